#include "volts/volatility.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace volts {

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Parkinson: return "Parkinson";
    case EstimatorKind::GarmanKlass: return "GarmanKlass";
    case EstimatorKind::RogersSatchell: return "RogersSatchell";
    case EstimatorKind::YangZhang: return "YangZhang";
  }
  return "?";
}

EstimatorKind estimator_from_string(std::string_view name) {
  for (const auto kind : kEstimators) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + std::string(name) + "'");
}

namespace {

struct Columns {
  Eigen::ArrayXd open, high, low, close;
};

Columns columns_of(std::span<const OhlcBar> bars) {
  const auto n = static_cast<Eigen::Index>(bars.size());
  Columns c{Eigen::ArrayXd(n), Eigen::ArrayXd(n), Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& b = bars[static_cast<std::size_t>(i)];
    c.open(i) = b.open;
    c.high(i) = b.high;
    c.low(i) = b.low;
    c.close(i) = b.close;
  }
  return c;
}

}  // namespace

double parkinson(std::span<const OhlcBar> bars) {
  const auto c = columns_of(bars);
  return parkinson(c.high, c.low);
}

double garman_klass(std::span<const OhlcBar> bars) {
  const auto c = columns_of(bars);
  return garman_klass(c.open, c.high, c.low, c.close);
}

double rogers_satchell(std::span<const OhlcBar> bars) {
  const auto c = columns_of(bars);
  return rogers_satchell(c.open, c.high, c.low, c.close);
}

double yang_zhang(std::span<const OhlcBar> bars) {
  const auto c = columns_of(bars);
  return yang_zhang(c.open, c.high, c.low, c.close);
}

double window_variance(const PriceSeries& s, EstimatorKind kind, Eigen::Index first,
                       Eigen::Index n) {
  const Eigen::Index len = bars_per_window(kind, n);
  const auto o = s.open().segment(first, len);
  const auto h = s.high().segment(first, len);
  const auto l = s.low().segment(first, len);
  const auto c = s.close().segment(first, len);
  switch (kind) {
    case EstimatorKind::Parkinson: return parkinson_variance(h, l);
    case EstimatorKind::GarmanKlass: return garman_klass_variance(o, h, l, c);
    case EstimatorKind::RogersSatchell: return rogers_satchell_variance(o, h, l, c);
    case EstimatorKind::YangZhang: return yang_zhang_components(o, h, l, c).variance();
  }
  return 0.0;
}

VolSeries rolling(const PriceSeries& series, EstimatorKind kind, Eigen::Index window) {
  const Eigen::Index minimum = kind == EstimatorKind::YangZhang ? 2 : 1;
  if (window < minimum) {
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(kind)) + " window must be >= " +
                                                std::to_string(minimum));
  }
  const Eigen::Index span = bars_per_window(kind, window);
  if (series.size() < span) {
    throw Error(ErrorCode::SeriesTooShort,
                series.ticker() + ": " + std::to_string(series.size()) + " bars, " +
                    std::string(to_string(kind)) + " window needs " + std::to_string(span));
  }

  VolSeries out;
  out.ticker = series.ticker();
  out.estimator = kind;
  out.window = window;
  const Eigen::Index count = series.size() - span + 1;
  out.values.resize(count);
  out.dates.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    const double variance = window_variance(series, kind, i, window);
    if (variance < 0.0) ++out.clamped;
    out.values(i) = detail::clamped_sqrt(variance);
    out.dates.push_back(series.dates()[static_cast<std::size_t>(i + span - 1)]);
  }
  return out;
}

namespace {

VolSeries mean_of(const std::array<VolSeries, 4>& parts, const PriceSeries& series,
                  Eigen::Index window) {
  // Yang-Zhang starts one bar later; every series ends on the same date.
  const auto& yz = parts[3];
  VolSeries out;
  out.ticker = series.ticker();
  out.window = window;
  out.dates = yz.dates;
  out.values = Eigen::ArrayXd::Zero(yz.size());
  for (const auto& p : parts) {
    out.values += p.values.tail(yz.size());
    out.clamped += p.clamped;
  }
  out.values /= 4.0;
  return out;
}

}  // namespace

VolSeries mean_hv(const PriceSeries& series, Eigen::Index window) {
  std::array<VolSeries, 4> parts;
  for (std::size_t k = 0; k < kEstimators.size(); ++k) parts[k] = rolling(series, kEstimators[k], window);
  return mean_of(parts, series, window);
}

std::vector<VolSeries> all_estimators(const PriceSeries& series, Eigen::Index window) {
  std::array<VolSeries, 4> parts;
  for (std::size_t k = 0; k < kEstimators.size(); ++k) parts[k] = rolling(series, kEstimators[k], window);
  std::vector<VolSeries> out(parts.begin(), parts.end());
  out.push_back(mean_of(parts, series, window));
  return out;
}

void write_vol_csv(const VolSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "date,ticker,estimator,value\n";
  std::array<char, 32> buf{};
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), series.values(i));
    out << series.dates[static_cast<std::size_t>(i)].iso() << ',' << series.ticker << ','
        << series.label() << ',' << std::string_view(buf.data(), ptr - buf.data()) << '\n';
  }
}

VolSeries read_vol_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("date,ticker,estimator,value", 0) != 0) {
    throw Error(ErrorCode::MalformedRow, path.string() + ": unexpected header");
  }
  VolSeries out;
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::array<std::string, 4> f;
    std::istringstream ls(line);
    for (auto& field : f) std::getline(ls, field, ',');
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), v);
    if (ec != std::errc{}) {
      throw Error(ErrorCode::MalformedRow, path.string() + " row " + std::to_string(row));
    }
    if (row == 1) {
      out.ticker = f[1];
      if (f[2] != "Mean") out.estimator = estimator_from_string(f[2]);
    }
    out.dates.push_back(Date::parse(f[0]));
    values.push_back(v);
  }
  out.values = Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return out;
}

}  // namespace volts
