#include "volts/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

namespace volts {

Eigen::ArrayXd EquityCurve::values() const {
  Eigen::ArrayXd out(equity.size() + 1);
  out << initial, equity;
  return out;
}

namespace {

struct Order {
  Action action;
  double price;
};

}  // namespace

BacktestResult simulate(const PriceSeries& target, const std::vector<Signal>& signals,
                        const BacktestConfig& cfg, const std::string& edge) {
  if (!(cfg.budget > 0.0) || !(cfg.commission >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("budget {} must be positive and commission {} non-negative", cfg.budget,
                            cfg.commission));
  }
  if (!is_alternating(signals)) {
    throw Error(ErrorCode::InvalidArgument, "signals do not alternate Buy/Sell");
  }

  const Eigen::Index n = target.size();
  const auto& dates = target.dates();
  std::map<Eigen::Index, Order> orders;
  for (const auto& s : signals) {
    const auto it = std::lower_bound(dates.begin(), dates.end(), s.date);
    if (it == dates.end() || *it != s.date) {
      throw Error(ErrorCode::SignalOutOfCalendar,
                  fmt::format("signal on {} is not a {} trading day", s.date.iso(), target.ticker()));
    }
    if (s.action == Action::Hold) continue;
    const auto i = static_cast<Eigen::Index>(it - dates.begin());
    if (cfg.execution == ExecutionPrice::Close) {
      orders[i] = {s.action, target.close()(i)};
    } else if (i + 1 < n) {
      orders[i + 1] = {s.action, target.open()(i + 1)};
    } else if (s.action == Action::Sell) {
      orders[i] = {s.action, target.close()(i)};
    }
  }

  BacktestResult result;
  result.edge = edge;
  auto& curve = result.curve;
  curve.initial = cfg.budget;
  curve.dates = dates;
  curve.equity.resize(n);
  curve.cash.resize(n);
  curve.position.resize(n);

  double cash = cfg.budget;
  double position = 0.0;
  Trade open_trade;
  int exposed_bars = 0;

  const auto buy = [&](Eigen::Index i, double price) {
    if (cash <= cfg.commission) {
      throw Error(ErrorCode::BudgetExhausted,
                  fmt::format("{}: cash {:.6f} cannot cover commission {} on {}", edge, cash,
                              cfg.commission, dates[static_cast<std::size_t>(i)].iso()));
    }
    double quantity = (cash - cfg.commission) / price;
    if (!cfg.fractional_shares) quantity = std::floor(quantity);
    open_trade = Trade{};
    open_trade.entry_date = dates[static_cast<std::size_t>(i)];
    open_trade.entry_price = price;
    open_trade.quantity = quantity;
    open_trade.entry_capital = cash;
    cash = cash - cfg.commission - quantity * price;
    position = quantity;
  };
  const auto sell = [&](Eigen::Index i, double price) {
    cash += position * price - cfg.commission;
    open_trade.exit_date = dates[static_cast<std::size_t>(i)];
    open_trade.exit_price = price;
    open_trade.commission = 2.0 * cfg.commission;
    open_trade.pnl = open_trade.quantity * (open_trade.exit_price - open_trade.entry_price) -
                     open_trade.commission;
    result.trades.push_back(open_trade);
    position = 0.0;
  };

  for (Eigen::Index i = 0; i < n; ++i) {
    if (const auto it = orders.find(i); it != orders.end()) {
      if (it->second.action == Action::Buy) {
        buy(i, it->second.price);
      } else if (position > 0.0) {
        sell(i, it->second.price);
      }
    }
    if (i + 1 == n && position > 0.0 && cfg.close_at_end) sell(i, target.close()(i));
    if (position > 0.0) ++exposed_bars;
    curve.cash(i) = cash;
    curve.position(i) = position;
    curve.equity(i) = cash + position * target.close()(i);
  }

  result.metrics = compute_metrics(result.trades, curve, cfg.ratio_basis);
  result.metrics.exposure_pct = n > 0 ? 100.0 * exposed_bars / double(n) : 0.0;
  return result;
}

Metrics compute_metrics(const std::vector<Trade>& trades, const EquityCurve& curve, ReturnBasis basis) {
  Metrics m;
  m.num_trades = static_cast<int>(trades.size());
  m.winners = static_cast<int>(std::count_if(trades.begin(), trades.end(),
                                             [](const Trade& t) { return t.pnl > 0.0; }));
  m.win_rate_pct = m.num_trades > 0 ? 100.0 * m.winners / double(m.num_trades) : 0.0;

  const Eigen::ArrayXd values = curve.values();
  m.final_equity = values(values.size() - 1);
  m.total_return = total_return(values);
  m.mdd = max_drawdown(values);

  Eigen::ArrayXd returns;
  if (basis == ReturnBasis::PerBar) {
    returns = simple_returns(values);
  } else {
    returns.resize(static_cast<Eigen::Index>(trades.size()));
    for (std::size_t k = 0; k < trades.size(); ++k) {
      returns(static_cast<Eigen::Index>(k)) = trades[k].pnl / trades[k].entry_capital;
    }
  }

  const auto attempt = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  m.sharpe = attempt([&] { return sharpe(returns); });
  m.sortino = attempt([&] { return sortino(returns); });
  m.calmar = attempt([&] { return calmar(returns, m.mdd); });
  return m;
}

void write_equity_csv(const EquityCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "date,equity\n";
  for (Eigen::Index i = 0; i < curve.equity.size(); ++i) {
    out << curve.dates[static_cast<std::size_t>(i)].iso() << ',' << fmt::format("{:.6f}", curve.equity(i))
        << '\n';
  }
}

namespace {

ReportRow row_of(const std::string& name, const Metrics& m, const ReportOptions& options) {
  const double scale = options.annualize ? std::sqrt(252.0) : 1.0;
  ReportRow row;
  row.stock_pair = name;
  row.num_trades = m.num_trades;
  row.win_rate_pct = m.win_rate_pct;
  row.total_return = m.final_equity;
  if (m.sharpe) row.sharpe = *m.sharpe * scale;
  if (m.sortino) row.sortino = *m.sortino * scale;
  row.calmar = m.calmar;
  row.mdd_pct = 100.0 * m.mdd;
  return row;
}

}  // namespace

Report report(std::vector<BacktestResult> results, const ReportOptions& options) {
  if (results.empty()) throw Error(ErrorCode::InvalidArgument, "report needs at least one result");
  std::sort(results.begin(), results.end(),
            [](const BacktestResult& a, const BacktestResult& b) { return a.edge < b.edge; });

  Report out;
  out.annualized = options.annualize;
  for (const auto& r : results) out.rows.push_back(row_of(r.edge, r.metrics, options));

  // Portfolio: sum of the per-edge curves on the dates they share.
  std::map<Date, std::pair<double, std::size_t>> summed;
  EquityCurve portfolio;
  std::vector<Trade> trades;
  double exposure = 0.0;
  for (const auto& r : results) {
    portfolio.initial += r.curve.initial;
    for (Eigen::Index i = 0; i < r.curve.equity.size(); ++i) {
      auto& slot = summed[r.curve.dates[static_cast<std::size_t>(i)]];
      slot.first += r.curve.equity(i);
      ++slot.second;
    }
    trades.insert(trades.end(), r.trades.begin(), r.trades.end());
    exposure += r.metrics.exposure_pct;
  }
  std::vector<double> equity;
  for (const auto& [date, slot] : summed) {
    if (slot.second != results.size()) continue;
    portfolio.dates.push_back(date);
    equity.push_back(slot.first);
  }
  portfolio.equity = Eigen::Map<const Eigen::ArrayXd>(equity.data(), static_cast<Eigen::Index>(equity.size()));

  Metrics pm = compute_metrics(trades, portfolio, ReturnBasis::PerBar);
  pm.exposure_pct = exposure / double(results.size());
  out.portfolio = row_of("PORTFOLIO", pm, options);
  out.initial_capital = portfolio.initial;
  out.portfolio_return_pct = 100.0 * pm.total_return;
  out.exposure_pct = pm.exposure_pct;
  return out;
}

namespace {

nlohmann::ordered_json row_json(const ReportRow& row) {
  const auto ratio = [](const std::optional<double>& v) -> nlohmann::ordered_json {
    if (v) return *v;
    return "n/a";
  };
  nlohmann::ordered_json j;
  j["stock_pair"] = row.stock_pair;
  j["num_trades"] = row.num_trades;
  j["win_rate_pct"] = row.win_rate_pct;
  j["total_return"] = row.total_return;
  j["sharpe"] = ratio(row.sharpe);
  j["sortino"] = ratio(row.sortino);
  j["calmar"] = ratio(row.calmar);
  j["mdd_pct"] = row.mdd_pct;
  return j;
}

std::string csv_row(const ReportRow& row) {
  const auto ratio = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.4f}", *v) : std::string("n/a");
  };
  return fmt::format("{},{},{:.2f},{:.2f},{},{},{},{:.2f}\n", row.stock_pair, row.num_trades,
                     row.win_rate_pct, row.total_return, ratio(row.sharpe), ratio(row.sortino),
                     ratio(row.calmar), row.mdd_pct);
}

}  // namespace

std::string report_json_text(const Report& report) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) j["rows"].push_back(row_json(row));
  j["portfolio"] = row_json(report.portfolio);
  j["initial_capital"] = report.initial_capital;
  j["portfolio_return_pct"] = report.portfolio_return_pct;
  j["exposure_pct"] = report.exposure_pct;
  j["annualized"] = report.annualized;
  return j.dump(2) + "\n";
}

std::string report_csv_text(const Report& report) {
  std::string out = "stock_pair,num_trades,win_rate_pct,total_return,sharpe,sortino,calmar,mdd_pct\n";
  for (const auto& row : report.rows) out += csv_row(row);
  out += csv_row(report.portfolio);
  return out;
}

}  // namespace volts
