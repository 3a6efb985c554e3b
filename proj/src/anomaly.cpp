#include "volts/anomaly.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <cmath>
#include <fstream>
#include <numeric>

#include "volts/error.hpp"

namespace volts {

Eigen::ArrayXd knn_scores(const Eigen::Ref<const Eigen::ArrayXd>& values, int k) {
  const Eigen::Index n = values.size();
  if (k < 1 || n <= k) {
    throw Error(ErrorCode::SeriesTooShort, "knn needs size > k >= 1 (size " + std::to_string(n) +
                                               ", k " + std::to_string(k) + ")");
  }
  if (!values.allFinite()) throw Error(ErrorCode::InvalidArgument, "knn input has non-finite values");

  // In one dimension the k nearest neighbours of a point are contiguous in
  // sorted order, so grow a window around its sorted position.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
  Eigen::ArrayXd sorted(n);
  for (Eigen::Index i = 0; i < n; ++i) sorted(i) = values(order[static_cast<std::size_t>(i)]);

  Eigen::ArrayXd scores(n);
  for (Eigen::Index pos = 0; pos < n; ++pos) {
    const double x = sorted(pos);
    Eigen::Index left = pos - 1;
    Eigen::Index right = pos + 1;
    double total = 0.0;
    for (int taken = 0; taken < k; ++taken) {
      const double dl = left >= 0 ? x - sorted(left) : std::numeric_limits<double>::infinity();
      const double dr = right < n ? sorted(right) - x : std::numeric_limits<double>::infinity();
      if (dl <= dr) {
        total += dl;
        --left;
      } else {
        total += dr;
        ++right;
      }
    }
    scores(order[static_cast<std::size_t>(pos)]) = total / k;
  }
  return scores;
}

bool AnomalyReport::flagged(Date d) const { return std::binary_search(flags.begin(), flags.end(), d); }

AnomalyReport detect(std::vector<Date> dates, const Eigen::Ref<const Eigen::ArrayXd>& scores) {
  if (static_cast<Eigen::Index>(dates.size()) != scores.size()) {
    throw Error(ErrorCode::InvalidArgument, "dates and scores differ in length");
  }
  if (scores.size() < 2) throw Error(ErrorCode::SeriesTooShort, "detect needs >= 2 scores");

  AnomalyReport report;
  report.dates = std::move(dates);
  report.scores = scores;
  report.mean = scores.mean();
  report.stddev = std::sqrt((scores - report.mean).square().mean());
  report.threshold = report.mean + 3.0 * report.stddev;
  if (!(report.stddev > 0.0)) {
    report.status = AnomalyStatus::DegenerateScores;
    return report;
  }
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (scores(i) > report.threshold) report.flags.push_back(report.dates[static_cast<std::size_t>(i)]);
  }
  std::sort(report.flags.begin(), report.flags.end());
  return report;
}

DateWindow clean_window(const std::vector<Date>& flags, const std::vector<Date>& calendar) {
  if (calendar.empty()) throw Error(ErrorCode::EmptySeries, "empty calendar");
  if (flags.empty()) return {calendar.front(), calendar.back()};
  const Date last_flag = *std::max_element(flags.begin(), flags.end());
  const auto after = std::upper_bound(calendar.begin(), calendar.end(), last_flag);
  if (after == calendar.end()) {
    throw Error(ErrorCode::AllFlagged, "last flag " + last_flag.iso() + " leaves no clean suffix");
  }
  return {*after, calendar.back()};
}

void write_anomaly_csv(const AnomalyReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "date,score,flag\n";
  char buf[64];
  for (Eigen::Index i = 0; i < report.scores.size(); ++i) {
    const Date d = report.dates[static_cast<std::size_t>(i)];
    std::snprintf(buf, sizeof buf, "%.17g", report.scores(i));
    out << d.iso() << ',' << buf << ',' << (report.flagged(d) ? 1 : 0) << '\n';
  }
}

}  // namespace volts
