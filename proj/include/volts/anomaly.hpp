#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <utility>
#include <vector>

#include "volts/date.hpp"

namespace volts {

inline constexpr int kDefaultNeighbors = 5;

// KNN distance score of every point: mean absolute difference to its k
// nearest other values (scalar points, so |x_t - x_i| is the Euclidean
// distance). Throws SeriesTooShort unless size > k >= 1, InvalidArgument on
// non-finite input.
Eigen::ArrayXd knn_scores(const Eigen::Ref<const Eigen::ArrayXd>& values, int k);

enum class AnomalyStatus { Ok, DegenerateScores };

struct AnomalyReport {
  std::vector<Date> dates;
  Eigen::ArrayXd scores;
  double mean = 0.0;
  double stddev = 0.0;  // population
  double threshold = 0.0;
  std::vector<Date> flags;
  AnomalyStatus status = AnomalyStatus::Ok;

  bool flagged(Date d) const;
};

// Flags scores strictly above mean + 3 * stddev. A zero stddev yields no
// flags and status DegenerateScores. Throws SeriesTooShort (< 2 scores),
// InvalidArgument on size mismatch.
AnomalyReport detect(std::vector<Date> dates, const Eigen::Ref<const Eigen::ArrayXd>& scores);

struct DateWindow {
  Date start;
  Date end;

  friend bool operator==(const DateWindow&, const DateWindow&) = default;
};

// Longest flag-free suffix of `calendar`: from the day after the last flag
// to the last date. Throws AllFlagged when the last date is itself flagged,
// EmptySeries on an empty calendar.
DateWindow clean_window(const std::vector<Date>& flags, const std::vector<Date>& calendar);
inline DateWindow clean_window(const AnomalyReport& report, const std::vector<Date>& calendar) {
  return clean_window(report.flags, calendar);
}

// `date,score,flag`
void write_anomaly_csv(const AnomalyReport& report, const std::filesystem::path& path);

}  // namespace volts
