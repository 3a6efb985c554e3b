#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "volts/date.hpp"
#include "volts/error.hpp"
#include "volts/market_data.hpp"

namespace volts {

enum class Action { Buy, Sell, Hold };
std::string_view to_string(Action action);

enum class StrategyMode { TrendFollow, MeanReversion, BuyHold };
std::string_view to_string(StrategyMode mode);
StrategyMode strategy_mode_from_string(std::string_view name);

struct Signal {
  Date date;
  Action action = Action::Hold;
  std::string edge;  // e.g. "AMZN->META"; empty for single-asset strategies

  friend bool operator==(const Signal&, const Signal&) = default;
};

inline constexpr int kDefaultMaWindow = 5;

struct StrategyConfig {
  int ma_window = kDefaultMaWindow;
  double mr_k = 2.0;
  StrategyMode mode = StrategyMode::TrendFollow;
  // Bars between the predictor's signal and its execution on the target.
  int signal_delay = 0;

  void validate() const;  // throws InvalidArgument
};

// Trailing simple mean over w closes, one value per window end (index w-1..).
// Throws SeriesTooShort, InvalidArgument (w < 1).
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> moving_average(
    const Eigen::DenseBase<Derived>& series, Eigen::Index w);

// Trend following on the predictor: Buy when close >= MA and flat, Sell when
// close < MA and long, Hold otherwise. One signal per date from the first
// full MA window on. Throws SeriesTooShort.
std::vector<Signal> tf_signals(const PriceSeries& predictor, const StrategyConfig& cfg,
                               const std::string& edge = {});

// Mean reversion against the previous ma_window closes: Buy when close <
// mu - k sigma and flat, Sell when close > mu + k sigma and long.
std::vector<Signal> mr_signals(const PriceSeries& series, const StrategyConfig& cfg,
                               const std::string& edge = {});

// Buy at the first close, Sell at the last, Hold in between.
std::vector<Signal> bh_signals(const PriceSeries& series, const std::string& edge = {});

// Shifts every non-Hold action `bars` positions later on `calendar`;
// actions pushed past the end are dropped (a dangling Sell is kept on the
// last date so streams stay alternating).
std::vector<Signal> delay_signals(const std::vector<Signal>& signals,
                                  const std::vector<Date>& calendar, int bars);

// True when the non-Hold actions alternate Buy, Sell, Buy, ...
bool is_alternating(const std::vector<Signal>& signals);

// `date,edge,action`
void write_signal_csv(const std::vector<Signal>& signals, const std::filesystem::path& path);

template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> moving_average(
    const Eigen::DenseBase<Derived>& series, Eigen::Index w) {
  using S = typename Derived::Scalar;
  if (w < 1) throw Error(ErrorCode::InvalidArgument, "moving average window must be >= 1");
  const Eigen::Index n = series.size();
  if (n < w) {
    throw Error(ErrorCode::SeriesTooShort, "moving average window " + std::to_string(w) +
                                               " exceeds series length " + std::to_string(n));
  }
  Eigen::Array<S, Eigen::Dynamic, 1> out(n - w + 1);
  for (Eigen::Index i = 0; i + w <= n; ++i) out(i) = series.segment(i, w).sum() / S(w);
  return out;
}

}  // namespace volts
