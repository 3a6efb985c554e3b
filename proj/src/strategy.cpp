#include "volts/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace volts {

std::string_view to_string(Action action) {
  switch (action) {
    case Action::Buy: return "Buy";
    case Action::Sell: return "Sell";
    case Action::Hold: return "Hold";
  }
  return "?";
}

std::string_view to_string(StrategyMode mode) {
  switch (mode) {
    case StrategyMode::TrendFollow: return "trend_follow";
    case StrategyMode::MeanReversion: return "mean_reversion";
    case StrategyMode::BuyHold: return "buy_hold";
  }
  return "?";
}

StrategyMode strategy_mode_from_string(std::string_view name) {
  for (const auto mode : {StrategyMode::TrendFollow, StrategyMode::MeanReversion, StrategyMode::BuyHold}) {
    if (to_string(mode) == name) return mode;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown strategy mode '" + std::string(name) + "'");
}

void StrategyConfig::validate() const {
  if (ma_window < 1) throw Error(ErrorCode::InvalidArgument, "ma_window must be >= 1");
  if (!(mr_k > 0.0)) throw Error(ErrorCode::InvalidArgument, "mr_k must be > 0");
  if (signal_delay < 0) throw Error(ErrorCode::InvalidArgument, "signal_delay must be >= 0");
}

std::vector<Signal> tf_signals(const PriceSeries& predictor, const StrategyConfig& cfg,
                               const std::string& edge) {
  cfg.validate();
  const Eigen::Index w = cfg.ma_window;
  const auto ma = moving_average(predictor.close(), w);
  std::vector<Signal> out;
  out.reserve(static_cast<std::size_t>(ma.size()));
  bool long_position = false;
  for (Eigen::Index k = 0; k < ma.size(); ++k) {
    const Eigen::Index i = k + w - 1;
    const bool uptrend = predictor.close()(i) >= ma(k);
    Action action = Action::Hold;
    if (uptrend && !long_position) {
      action = Action::Buy;
      long_position = true;
    } else if (!uptrend && long_position) {
      action = Action::Sell;
      long_position = false;
    }
    out.push_back({predictor.dates()[static_cast<std::size_t>(i)], action, edge});
  }
  return out;
}

std::vector<Signal> mr_signals(const PriceSeries& series, const StrategyConfig& cfg,
                               const std::string& edge) {
  cfg.validate();
  const Eigen::Index w = cfg.ma_window;
  const Eigen::Index n = series.size();
  if (n < 2 || n <= w) {
    throw Error(ErrorCode::SeriesTooShort, series.ticker() + ": mean reversion needs more than " +
                                               std::to_string(w) + " bars");
  }
  const auto& close = series.close();
  std::vector<Signal> out;
  bool long_position = false;
  for (Eigen::Index i = w; i < n; ++i) {
    const auto window = close.segment(i - w, w);
    const double mu = window.mean();
    const double sigma = std::sqrt((window - mu).square().mean());
    const double band = cfg.mr_k * sigma;
    Action action = Action::Hold;
    if (sigma > 0.0 && !long_position && close(i) < mu - band) {
      action = Action::Buy;
      long_position = true;
    } else if (sigma > 0.0 && long_position && close(i) > mu + band) {
      action = Action::Sell;
      long_position = false;
    }
    out.push_back({series.dates()[static_cast<std::size_t>(i)], action, edge});
  }
  return out;
}

std::vector<Signal> bh_signals(const PriceSeries& series, const std::string& edge) {
  if (series.size() < 2) throw Error(ErrorCode::SeriesTooShort, "buy and hold needs >= 2 bars");
  std::vector<Signal> out;
  for (std::size_t i = 0; i < series.dates().size(); ++i) {
    Action action = Action::Hold;
    if (i == 0) action = Action::Buy;
    if (i + 1 == series.dates().size()) action = Action::Sell;
    out.push_back({series.dates()[i], action, edge});
  }
  return out;
}

std::vector<Signal> delay_signals(const std::vector<Signal>& signals,
                                  const std::vector<Date>& calendar, int bars) {
  if (bars < 0) throw Error(ErrorCode::InvalidArgument, "delay must be >= 0");
  if (bars == 0) return signals;
  std::vector<Signal> out;
  out.reserve(signals.size());
  for (const auto& date : calendar) out.push_back({date, Action::Hold, {}});
  for (const auto& s : signals) {
    if (s.action == Action::Hold) continue;
    const auto it = std::lower_bound(calendar.begin(), calendar.end(), s.date);
    if (it == calendar.end() || *it != s.date) {
      throw Error(ErrorCode::SignalOutOfCalendar, "signal on " + s.date.iso() + " not in calendar");
    }
    auto index = static_cast<std::size_t>(it - calendar.begin()) + static_cast<std::size_t>(bars);
    // A delayed entry needs at least one bar left to exit on.
    if (s.action == Action::Buy && index + 1 >= calendar.size()) break;
    index = std::min(index, calendar.size() - 1);
    out[index].action = s.action;
    out[index].edge = s.edge;
  }
  for (auto& s : out) {
    if (s.edge.empty() && !signals.empty()) s.edge = signals.front().edge;
  }
  return out;
}

bool is_alternating(const std::vector<Signal>& signals) {
  Action expected = Action::Buy;
  for (const auto& s : signals) {
    if (s.action == Action::Hold) continue;
    if (s.action != expected) return false;
    expected = expected == Action::Buy ? Action::Sell : Action::Buy;
  }
  return true;
}

void write_signal_csv(const std::vector<Signal>& signals, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "date,edge,action\n";
  for (const auto& s : signals) out << s.date.iso() << ',' << s.edge << ',' << to_string(s.action) << '\n';
}

}  // namespace volts
