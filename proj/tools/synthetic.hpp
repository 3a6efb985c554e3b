#pragma once

// Planted-structure market: nine tickers in three volatility regimes (daily
// return scale 1:3:9), a five-bar shock early on, and a lag-5 chain
// CHA -> CHB -> CHC inside the middle regime. CHB drifts with CHA's
// innovations from five to nine bars back, so it rallies after CHA does;
// CHC echoes CHB's own innovation five bars later.

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "volts/market_data.hpp"

namespace volts::synthetic {

struct Params {
  std::uint64_t seed = 20240607;
  int bars = 900;
  double base_sigma = 0.01;   // low regime; mid is 3x, high 9x
  int chain_lag = 5;
  double chain_beta = 0.8;  // share of the driver's innovation, in sd units
  int shock_at = 60;
  double shock_scale = 3.0;  // multiplies the shock path below
  Date first{2018, 1, 1};
};

inline const std::vector<std::string> kLow = {"LOWA", "LOWB", "LOWC"};
inline const std::vector<std::string> kMid = {"CHA", "CHB", "CHC"};
inline const std::vector<std::string> kHigh = {"HIA", "HIB", "HIC"};

inline std::vector<std::string> tickers() {
  std::vector<std::string> out = kLow;
  out.insert(out.end(), kMid.begin(), kMid.end());
  out.insert(out.end(), kHigh.begin(), kHigh.end());
  return out;
}

inline std::vector<Date> business_days(Date first, int count) {
  std::vector<Date> out;
  for (Date d = first; static_cast<int>(out.size()) < count; d = d.next()) {
    const std::chrono::weekday wd{d.days()};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
  }
  return out;
}

// Log close-to-close returns per ticker (same order as tickers()).
inline std::vector<std::vector<double>> returns(const Params& params, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const auto n = static_cast<std::size_t>(params.bars);
  const auto lag = static_cast<std::size_t>(params.chain_lag);
  const double idio = std::sqrt(1.0 - params.chain_beta * params.chain_beta);
  constexpr std::array<double, 5> shock = {-6.0, 5.0, -7.0, 6.0, -5.0};

  std::vector<std::vector<double>> z(9, std::vector<double>(n));
  for (auto& col : z) {
    for (auto& v : col) v = normal(rng);
  }
  std::vector<std::vector<double>> r(9, std::vector<double>(n));
  for (std::size_t j = 0; j < 9; ++j) {
    const double sigma = params.base_sigma * std::pow(3.0, static_cast<double>(j / 3));
    for (std::size_t t = 0; t < n; ++t) {
      double e = z[j][t];
      if (j == 4 && t >= 2 * lag) {
        double trail = 0.0;
        for (std::size_t i = lag; i < 2 * lag; ++i) trail += z[3][t - i];
        e = params.chain_beta * trail / std::sqrt(static_cast<double>(lag)) + idio * z[j][t];
      } else if (j == 5 && t >= lag) {
        e = params.chain_beta * z[4][t - lag] + idio * z[j][t];
      }
      r[j][t] = sigma * e;
    }
    for (std::size_t s = 0; s < shock.size(); ++s) {
      r[j][static_cast<std::size_t>(params.shock_at) + s] += params.shock_scale * sigma * shock[s];
    }
  }
  return r;
}

inline std::vector<PriceSeries> make(const Params& params = {}) {
  std::mt19937_64 rng(params.seed);
  const auto r = returns(params, rng);
  const auto dates = business_days(params.first, params.bars);
  std::normal_distribution<double> normal;
  const auto names = tickers();

  std::vector<PriceSeries> out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    const double sigma = params.base_sigma * std::pow(3.0, static_cast<double>(j / 3));
    std::vector<OhlcBar> bars;
    double prev = 100.0;
    for (std::size_t t = 0; t < dates.size(); ++t) {
      const double open = prev * std::exp(0.3 * r[j][t]);
      const double close = prev * std::exp(r[j][t]);
      const double high = std::max(open, close) * std::exp(0.5 * sigma * std::abs(normal(rng)));
      const double low = std::min(open, close) * std::exp(-0.5 * sigma * std::abs(normal(rng)));
      bars.push_back({dates[t], open, high, low, close});
      prev = close;
    }
    out.emplace_back(names[j], std::move(bars));
  }
  return out;
}

inline void write(const std::filesystem::path& dir, const Params& params = {}) {
  std::filesystem::create_directories(dir);
  for (const auto& s : make(params)) write_csv(s, dir / (s.ticker() + ".csv"));
}

}  // namespace volts::synthetic
