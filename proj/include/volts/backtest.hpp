#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "volts/error.hpp"
#include "volts/market_data.hpp"
#include "volts/strategy.hpp"

namespace volts {

// ---------------------------------------------------------------------------
// Metric kernels over equity values / per-period returns
// ---------------------------------------------------------------------------

// (last - first) / first.
template <typename Derived>
typename Derived::Scalar total_return(const Eigen::DenseBase<Derived>& values) {
  if (values.size() < 2) throw Error(ErrorCode::SeriesTooShort, "total return needs >= 2 points");
  return (values(values.size() - 1) - values(0)) / values(0);
}

// Largest peak-to-trough decline as a fraction of the running peak.
template <typename Derived>
typename Derived::Scalar max_drawdown(const Eigen::DenseBase<Derived>& values) {
  using S = typename Derived::Scalar;
  if (values.size() < 1) throw Error(ErrorCode::SeriesTooShort, "drawdown of an empty curve");
  S peak = values(0);
  S worst = S(0);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    peak = std::max(peak, values(i));
    worst = std::max(worst, (peak - values(i)) / peak);
  }
  return worst;
}

// values(i) / values(i-1) - 1
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> simple_returns(
    const Eigen::DenseBase<Derived>& values) {
  const Eigen::Index n = values.size();
  if (n < 2) return {};
  return values.derived().tail(n - 1).array() / values.derived().head(n - 1).array() - 1;
}

template <typename Derived>
typename Derived::Scalar population_stddev(const Eigen::DenseBase<Derived>& x) {
  using std::sqrt;
  const auto mean = x.derived().array().mean();
  return sqrt((x.derived().array() - mean).square().mean());
}

// E[r] / sigma[r], population sigma, risk-free rate 0. Throws SeriesTooShort,
// ZeroVariance.
template <typename Derived>
typename Derived::Scalar sharpe(const Eigen::DenseBase<Derived>& returns) {
  if (returns.size() < 2) throw Error(ErrorCode::SeriesTooShort, "sharpe needs >= 2 returns");
  const auto sigma = population_stddev(returns);
  if (!(sigma > 0)) throw Error(ErrorCode::ZeroVariance, "returns have zero variance");
  return returns.derived().array().mean() / sigma;
}

// Root mean square of the negative returns.
template <typename Derived>
typename Derived::Scalar downside_deviation(const Eigen::DenseBase<Derived>& returns) {
  using S = typename Derived::Scalar;
  using std::sqrt;
  S sum = 0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < returns.size(); ++i) {
    if (returns(i) < S(0)) {
      sum += returns(i) * returns(i);
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::NoDownside, "no negative returns");
  return sqrt(sum / S(count));
}

// E[r] / downside deviation. Throws NoDownside.
template <typename Derived>
typename Derived::Scalar sortino(const Eigen::DenseBase<Derived>& returns) {
  const auto dd = downside_deviation(returns);
  return returns.derived().array().mean() / dd;
}

// E[r] / MDD. Throws ZeroDrawdown.
template <typename Derived>
typename Derived::Scalar calmar(const Eigen::DenseBase<Derived>& returns,
                                typename Derived::Scalar mdd) {
  if (!(mdd > 0)) throw Error(ErrorCode::ZeroDrawdown, "curve has no drawdown");
  return returns.derived().array().mean() / mdd;
}

template <typename R, typename V>
typename R::Scalar calmar(const Eigen::DenseBase<R>& returns, const Eigen::DenseBase<V>& curve) {
  return calmar(returns, max_drawdown(curve));
}

// (R - mean) / sigma with population sigma. Throws ZeroVariance.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> standardized_returns(
    const Eigen::DenseBase<Derived>& returns) {
  const auto sigma = population_stddev(returns);
  if (!(sigma > 0)) throw Error(ErrorCode::ZeroVariance, "returns have zero variance");
  return (returns.derived().array() - returns.derived().array().mean()) / sigma;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

enum class ExecutionPrice { Close, NextOpen };
enum class ReturnBasis { PerBar, PerTrade };

struct BacktestConfig {
  double budget = 1000.0;
  double commission = 9.0;
  ExecutionPrice execution = ExecutionPrice::Close;
  bool fractional_shares = true;
  ReturnBasis ratio_basis = ReturnBasis::PerBar;
  // Liquidate a position still open on the last bar.
  bool close_at_end = true;
};

struct Trade {
  Date entry_date;
  double entry_price = 0.0;
  Date exit_date;
  double exit_price = 0.0;
  double quantity = 0.0;
  double pnl = 0.0;         // quantity * (exit - entry) - commission
  double commission = 0.0;  // both legs
  double entry_capital = 0.0;  // cash committed at entry, before commission
};

// Marked to close after each bar's execution. `initial` is the budget
// before the first bar.
struct EquityCurve {
  double initial = 0.0;
  std::vector<Date> dates;
  Eigen::ArrayXd equity;
  Eigen::ArrayXd cash;
  Eigen::ArrayXd position;

  // initial followed by every per-bar equity value
  Eigen::ArrayXd values() const;
};

struct Metrics {
  int num_trades = 0;
  int winners = 0;
  double win_rate_pct = 0.0;
  double final_equity = 0.0;
  double total_return = 0.0;  // fraction
  std::optional<double> sharpe;
  std::optional<double> sortino;
  std::optional<double> calmar;
  double mdd = 0.0;  // fraction, >= 0
  double exposure_pct = 0.0;
};

struct BacktestResult {
  std::string edge;
  std::vector<Trade> trades;
  EquityCurve curve;
  Metrics metrics;
};

// Executes alternating Buy/Sell signals on `target` with the full cash
// balance reinvested per trade. Throws BudgetExhausted, SignalOutOfCalendar,
// InvalidArgument (non-alternating signals, budget <= 0, commission < 0).
BacktestResult simulate(const PriceSeries& target, const std::vector<Signal>& signals,
                        const BacktestConfig& cfg, const std::string& edge = {});

Metrics compute_metrics(const std::vector<Trade>& trades, const EquityCurve& curve,
                        ReturnBasis basis);

void write_equity_csv(const EquityCurve& curve, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct ReportRow {
  std::string stock_pair;
  int num_trades = 0;
  double win_rate_pct = 0.0;
  double total_return = 0.0;  // final equity in currency
  std::optional<double> sharpe;
  std::optional<double> sortino;
  std::optional<double> calmar;
  double mdd_pct = 0.0;
};

struct ReportOptions {
  // Scale Sharpe and Sortino by sqrt(252).
  bool annualize = false;
};

struct Report {
  std::vector<ReportRow> rows;  // sorted by stock_pair
  ReportRow portfolio;
  double initial_capital = 0.0;
  double portfolio_return_pct = 0.0;
  double exposure_pct = 0.0;
  bool annualized = false;
};

// One row per result plus an aggregate over the summed equity curves.
// Throws InvalidArgument when `results` is empty.
Report report(std::vector<BacktestResult> results, const ReportOptions& options = {});

std::string report_json_text(const Report& report);
std::string report_csv_text(const Report& report);

}  // namespace volts
