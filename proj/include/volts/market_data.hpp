#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "volts/date.hpp"

namespace volts {

struct OhlcBar {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
};

// Throws InvariantViolation when low <= 0, high < low, or open/close outside
// [low, high]. `row` is only used for the message.
void validate_bar(const OhlcBar& bar, std::size_t row);

// One ticker's candles, stored column-wise. Immutable after construction:
// dates are strictly increasing and every bar satisfies validate_bar().
class PriceSeries {
 public:
  // Sorts by date, then validates. Throws EmptySeries, InvariantViolation
  // (including duplicate dates).
  PriceSeries(std::string ticker, std::vector<OhlcBar> bars);

  const std::string& ticker() const { return ticker_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(dates_.size()); }

  const std::vector<Date>& dates() const { return dates_; }
  const Eigen::ArrayXd& open() const { return open_; }
  const Eigen::ArrayXd& high() const { return high_; }
  const Eigen::ArrayXd& low() const { return low_; }
  const Eigen::ArrayXd& close() const { return close_; }

  OhlcBar bar(Eigen::Index i) const;
  std::vector<OhlcBar> bars() const;

  // Bars whose dates fall in [start, end]. Throws EmptyWindow.
  PriceSeries slice(Date start, Date end) const;

  friend bool operator==(const PriceSeries& a, const PriceSeries& b);

 private:
  PriceSeries() = default;

  std::string ticker_;
  std::vector<Date> dates_;
  Eigen::ArrayXd open_, high_, low_, close_;
};

// Tickers observed on a shared calendar; one matrix column per ticker.
struct Panel {
  std::vector<std::string> tickers;
  std::vector<Date> dates;
  Eigen::MatrixXd open, high, low, close;

  Eigen::Index rows() const { return static_cast<Eigen::Index>(dates.size()); }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(tickers.size()); }

  PriceSeries column(Eigen::Index j) const;
  // Throws InvalidArgument for unknown tickers.
  Eigen::Index index_of(const std::string& ticker) const;

  friend bool operator==(const Panel& a, const Panel& b);
};

// Reads `date,open,high,low,close[,...]` (header case-insensitive, extra
// columns such as volume ignored). Throws MalformedRow / InvariantViolation
// with the 1-based data row index, EmptySeries, Io.
PriceSeries load_csv(const std::filesystem::path& path, const std::string& ticker);

// Writes the same format using shortest round-trip decimal representation.
void write_csv(const PriceSeries& series, const std::filesystem::path& path);

// Parses CSV text directly (used by load_csv and by tests).
PriceSeries parse_csv(std::string_view text, const std::string& ticker);

// Intersection alignment; ticker order is preserved. Throws NoCommonDates,
// InvalidArgument (fewer than two series).
Panel align(std::span<const PriceSeries> series);
// Re-aligning an existing panel: identity.
Panel align(const Panel& panel);

// Rows with dates in [start, end]. Throws EmptyWindow, InvalidArgument
// (start > end).
Panel slice_window(const Panel& panel, Date start, Date end);

// Source of price series; only the file-backed implementation ships.
class PriceProvider {
 public:
  virtual ~PriceProvider() = default;
  virtual PriceSeries fetch(const std::string& ticker, Date start, Date end) const = 0;
};

// Looks up `<directory>/<ticker>.csv`.
class CsvDirectoryProvider final : public PriceProvider {
 public:
  explicit CsvDirectoryProvider(std::filesystem::path directory);
  PriceSeries fetch(const std::string& ticker, Date start, Date end) const override;

  std::filesystem::path path_for(const std::string& ticker) const;

 private:
  std::filesystem::path directory_;
};

}  // namespace volts
