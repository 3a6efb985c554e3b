#include "volts/market_data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "volts/error.hpp"

namespace volts {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string row_context(std::size_t row) { return "row " + std::to_string(row); }

double parse_price(std::string_view field, std::size_t row, std::string_view column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::MalformedRow, row_context(row) + ": cannot parse " + std::string(column) +
                                             " '" + std::string(field) + "'");
  }
  return value;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

void validate_bar(const OhlcBar& bar, std::size_t row) {
  const auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::InvariantViolation, row_context(row) + " (" + bar.date.iso() + "): " + what);
  };
  if (!std::isfinite(bar.open) || !std::isfinite(bar.high) || !std::isfinite(bar.low) ||
      !std::isfinite(bar.close)) {
    fail("non-finite price");
  }
  if (!(bar.low > 0.0)) fail("low <= 0");
  if (bar.high < bar.low) fail("high < low");
  if (bar.open < bar.low || bar.open > bar.high) fail("open outside [low, high]");
  if (bar.close < bar.low || bar.close > bar.high) fail("close outside [low, high]");
}

PriceSeries::PriceSeries(std::string ticker, std::vector<OhlcBar> bars) : ticker_(std::move(ticker)) {
  if (bars.empty()) throw Error(ErrorCode::EmptySeries, "no bars for " + ticker_);
  std::stable_sort(bars.begin(), bars.end(),
                   [](const OhlcBar& a, const OhlcBar& b) { return a.date < b.date; });
  const auto n = static_cast<Eigen::Index>(bars.size());
  dates_.reserve(bars.size());
  open_.resize(n);
  high_.resize(n);
  low_.resize(n);
  close_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& b = bars[static_cast<std::size_t>(i)];
    validate_bar(b, static_cast<std::size_t>(i) + 1);
    if (i > 0 && b.date == dates_.back()) {
      throw Error(ErrorCode::InvariantViolation, ticker_ + ": duplicate date " + b.date.iso());
    }
    dates_.push_back(b.date);
    open_(i) = b.open;
    high_(i) = b.high;
    low_(i) = b.low;
    close_(i) = b.close;
  }
}

OhlcBar PriceSeries::bar(Eigen::Index i) const {
  return {dates_[static_cast<std::size_t>(i)], open_(i), high_(i), low_(i), close_(i)};
}

std::vector<OhlcBar> PriceSeries::bars() const {
  std::vector<OhlcBar> out;
  out.reserve(dates_.size());
  for (Eigen::Index i = 0; i < size(); ++i) out.push_back(bar(i));
  return out;
}

PriceSeries PriceSeries::slice(Date start, Date end) const {
  const auto first = std::lower_bound(dates_.begin(), dates_.end(), start);
  const auto last = std::upper_bound(dates_.begin(), dates_.end(), end);
  if (start > end || first >= last) {
    throw Error(ErrorCode::EmptyWindow,
                ticker_ + ": no bars in [" + start.iso() + ", " + end.iso() + "]");
  }
  const auto offset = static_cast<Eigen::Index>(first - dates_.begin());
  const auto count = static_cast<Eigen::Index>(last - first);
  PriceSeries out;
  out.ticker_ = ticker_;
  out.dates_.assign(first, last);
  out.open_ = open_.segment(offset, count);
  out.high_ = high_.segment(offset, count);
  out.low_ = low_.segment(offset, count);
  out.close_ = close_.segment(offset, count);
  return out;
}

bool operator==(const PriceSeries& a, const PriceSeries& b) {
  return a.ticker_ == b.ticker_ && a.dates_ == b.dates_ && (a.open_ == b.open_).all() &&
         (a.high_ == b.high_).all() && (a.low_ == b.low_).all() && (a.close_ == b.close_).all();
}

PriceSeries Panel::column(Eigen::Index j) const {
  std::vector<OhlcBar> bars;
  bars.reserve(dates.size());
  for (Eigen::Index i = 0; i < rows(); ++i) {
    bars.push_back({dates[static_cast<std::size_t>(i)], open(i, j), high(i, j), low(i, j), close(i, j)});
  }
  return PriceSeries(tickers[static_cast<std::size_t>(j)], std::move(bars));
}

Eigen::Index Panel::index_of(const std::string& ticker) const {
  const auto it = std::find(tickers.begin(), tickers.end(), ticker);
  if (it == tickers.end()) throw Error(ErrorCode::InvalidArgument, "ticker not in panel: " + ticker);
  return static_cast<Eigen::Index>(it - tickers.begin());
}

bool operator==(const Panel& a, const Panel& b) {
  return a.tickers == b.tickers && a.dates == b.dates && a.open == b.open && a.high == b.high &&
         a.low == b.low && a.close == b.close;
}

PriceSeries parse_csv(std::string_view text, const std::string& ticker) {
  std::vector<OhlcBar> bars;
  std::array<std::size_t, 5> column{};
  bool have_header = false;
  std::size_t width = 0;
  std::size_t row = 0;

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;

    const auto fields = split(line);
    if (!have_header) {
      static constexpr std::array<std::string_view, 5> names = {"date", "open", "high", "low", "close"};
      for (std::size_t k = 0; k < names.size(); ++k) {
        const auto it = std::find_if(fields.begin(), fields.end(),
                                     [&](std::string_view f) { return lower(f) == names[k]; });
        if (it == fields.end()) {
          throw Error(ErrorCode::MalformedRow,
                      ticker + ": header lacks column '" + std::string(names[k]) + "'");
        }
        column[k] = static_cast<std::size_t>(it - fields.begin());
      }
      width = fields.size();
      have_header = true;
      continue;
    }

    ++row;
    if (fields.size() < width) {
      throw Error(ErrorCode::MalformedRow, row_context(row) + ": expected " + std::to_string(width) +
                                               " fields, got " + std::to_string(fields.size()));
    }
    OhlcBar bar;
    try {
      bar.date = Date::parse(fields[column[0]]);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedRow, row_context(row) + ": " + e.what());
    }
    bar.open = parse_price(fields[column[1]], row, "open");
    bar.high = parse_price(fields[column[2]], row, "high");
    bar.low = parse_price(fields[column[3]], row, "low");
    bar.close = parse_price(fields[column[4]], row, "close");
    validate_bar(bar, row);
    bars.push_back(bar);
  }
  if (!have_header) throw Error(ErrorCode::EmptySeries, ticker + ": empty file");
  if (bars.empty()) throw Error(ErrorCode::EmptySeries, ticker + ": no data rows");
  return PriceSeries(ticker, std::move(bars));
}

PriceSeries load_csv(const std::filesystem::path& path, const std::string& ticker) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for ticker " + ticker);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), ticker);
}

void write_csv(const PriceSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "date,open,high,low,close\n";
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    out << series.dates()[static_cast<std::size_t>(i)].iso() << ',' << format_double(series.open()(i))
        << ',' << format_double(series.high()(i)) << ',' << format_double(series.low()(i)) << ','
        << format_double(series.close()(i)) << '\n';
  }
}

Panel align(std::span<const PriceSeries> series) {
  if (series.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "align needs at least two series");
  }
  std::vector<Date> common = series.front().dates();
  for (std::size_t s = 1; s < series.size(); ++s) {
    std::vector<Date> next;
    std::set_intersection(common.begin(), common.end(), series[s].dates().begin(),
                          series[s].dates().end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) throw Error(ErrorCode::NoCommonDates, "series share no dates");

  Panel panel;
  panel.dates = common;
  const auto rows = static_cast<Eigen::Index>(common.size());
  const auto cols = static_cast<Eigen::Index>(series.size());
  panel.open.resize(rows, cols);
  panel.high.resize(rows, cols);
  panel.low.resize(rows, cols);
  panel.close.resize(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto& s = series[static_cast<std::size_t>(j)];
    panel.tickers.push_back(s.ticker());
    Eigen::Index src = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      while (s.dates()[static_cast<std::size_t>(src)] < common[static_cast<std::size_t>(i)]) ++src;
      panel.open(i, j) = s.open()(src);
      panel.high(i, j) = s.high()(src);
      panel.low(i, j) = s.low()(src);
      panel.close(i, j) = s.close()(src);
    }
  }
  return panel;
}

Panel align(const Panel& panel) {
  std::vector<PriceSeries> columns;
  for (Eigen::Index j = 0; j < panel.cols(); ++j) columns.push_back(panel.column(j));
  return align(columns);
}

Panel slice_window(const Panel& panel, Date start, Date end) {
  if (start > end) {
    throw Error(ErrorCode::InvalidArgument, "window start " + start.iso() + " after end " + end.iso());
  }
  const auto first = std::lower_bound(panel.dates.begin(), panel.dates.end(), start);
  const auto last = std::upper_bound(panel.dates.begin(), panel.dates.end(), end);
  if (first >= last) {
    throw Error(ErrorCode::EmptyWindow, "no dates in [" + start.iso() + ", " + end.iso() + "]");
  }
  const auto offset = static_cast<Eigen::Index>(first - panel.dates.begin());
  const auto count = static_cast<Eigen::Index>(last - first);
  Panel out;
  out.tickers = panel.tickers;
  out.dates.assign(first, last);
  out.open = panel.open.middleRows(offset, count);
  out.high = panel.high.middleRows(offset, count);
  out.low = panel.low.middleRows(offset, count);
  out.close = panel.close.middleRows(offset, count);
  return out;
}

CsvDirectoryProvider::CsvDirectoryProvider(std::filesystem::path directory)
    : directory_(std::move(directory)) {}

std::filesystem::path CsvDirectoryProvider::path_for(const std::string& ticker) const {
  return directory_ / (ticker + ".csv");
}

PriceSeries CsvDirectoryProvider::fetch(const std::string& ticker, Date start, Date end) const {
  const auto path = path_for(ticker);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::Io, "missing data file for ticker " + ticker + ": " + path.string());
  }
  return load_csv(path, ticker).slice(start, end);
}

}  // namespace volts
