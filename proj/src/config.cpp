#include "volts/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "volts/market_data.hpp"

namespace volts {

std::string_view to_string(AnomalySource source) {
  return source == AnomalySource::MeanHv ? "mean_hv" : "close";
}

std::string_view to_string(GrangerSource source) {
  switch (source) {
    case GrangerSource::LogReturns: return "log_returns";
    case GrangerSource::Close: return "close";
    case GrangerSource::MeanHv: return "mean_hv";
  }
  return "?";
}

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::Config, message); }

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<std::string_view> keys) {
  if (!node) return;
  if (!node.IsMap()) config_error(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      config_error(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  if (!node || !node[key] || node[key].IsNull()) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    config_error(fmt::format("{}.{} has the wrong type", where, key));
  }
}

void read_window(const YAML::Node& node, const char* key, WindowBounds& out) {
  if (!node || !node[key] || node[key].IsNull()) return;
  const auto w = node[key];
  const std::string where = std::string("windows.") + key;
  check_keys(w, where, {"start", "end"});
  for (const auto& [field, slot] : {std::pair{"start", &out.start}, std::pair{"end", &out.end}}) {
    if (!w[field] || w[field].IsNull()) continue;
    try {
      *slot = Date::parse(w[field].as<std::string>());
    } catch (const Error& e) {
      config_error(where + "." + field + ": " + e.what());
    }
  }
}

nlohmann::ordered_json window_json(const WindowBounds& w) {
  nlohmann::ordered_json j;
  j["start"] = w.start ? nlohmann::ordered_json(w.start->iso()) : nlohmann::ordered_json(nullptr);
  j["end"] = w.end ? nlohmann::ordered_json(w.end->iso()) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text, const std::filesystem::path& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    config_error(std::string("YAML syntax: ") + e.what());
  }
  RunConfig cfg;
  cfg.origin = origin;
  if (!root || root.IsNull()) return cfg;
  check_keys(root, "config",
             {"data_dir", "output_dir", "tickers", "workers", "windows", "volatility", "anomaly", "cluster",
              "granger", "strategy", "backtest", "report"});

  std::string data_dir, output_dir;
  read(root, "data_dir", data_dir, "config");
  read(root, "output_dir", output_dir, "config");
  if (!data_dir.empty()) cfg.data_dir = data_dir;
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  read(root, "tickers", cfg.tickers, "config");
  read(root, "workers", cfg.workers, "config");

  const auto windows = root["windows"];
  check_keys(windows, "windows", {"analysis", "clustering", "granger", "backtest"});
  read_window(windows, "analysis", cfg.analysis);
  read_window(windows, "clustering", cfg.clustering);
  read_window(windows, "granger", cfg.granger_window);
  read_window(windows, "backtest", cfg.backtest_window);

  const auto vol = root["volatility"];
  check_keys(vol, "volatility", {"window"});
  read(vol, "window", cfg.vol_window, "volatility");

  const auto anomaly = root["anomaly"];
  check_keys(anomaly, "anomaly", {"k", "source"});
  read(anomaly, "k", cfg.anomaly_k, "anomaly");
  std::string source;
  read(anomaly, "source", source, "anomaly");
  if (!source.empty()) {
    if (source == "mean_hv") cfg.anomaly_source = AnomalySource::MeanHv;
    else if (source == "close") cfg.anomaly_source = AnomalySource::Close;
    else config_error("anomaly.source must be mean_hv or close");
  }

  const auto cluster = root["cluster"];
  check_keys(cluster, "cluster", {"k", "max_iter", "dtw_band"});
  read(cluster, "k", cfg.cluster_k, "cluster");
  read(cluster, "max_iter", cfg.cluster_max_iter, "cluster");
  if (cluster && cluster["dtw_band"] && !cluster["dtw_band"].IsNull()) {
    long band = 0;
    read(cluster, "dtw_band", band, "cluster");
    cfg.dtw_band = band;
  }

  const auto granger = root["granger"];
  check_keys(granger, "granger", {"min_lag", "max_lag", "threshold", "alpha_text", "source"});
  read(granger, "min_lag", cfg.min_lag, "granger");
  read(granger, "max_lag", cfg.max_lag, "granger");
  read(granger, "threshold", cfg.threshold, "granger");
  read(granger, "alpha_text", cfg.alpha_text, "granger");
  source.clear();
  read(granger, "source", source, "granger");
  if (!source.empty()) {
    if (source == "log_returns") cfg.granger_source = GrangerSource::LogReturns;
    else if (source == "close") cfg.granger_source = GrangerSource::Close;
    else if (source == "mean_hv") cfg.granger_source = GrangerSource::MeanHv;
    else config_error("granger.source must be log_returns, close or mean_hv");
  }

  const auto strategy = root["strategy"];
  check_keys(strategy, "strategy", {"mode", "ma_window", "mr_k", "signal_delay"});
  std::string mode;
  read(strategy, "mode", mode, "strategy");
  if (!mode.empty()) {
    try {
      cfg.strategy.mode = strategy_mode_from_string(mode);
    } catch (const Error&) {
      config_error("strategy.mode must be trend_follow, mean_reversion or buy_hold");
    }
  }
  read(strategy, "ma_window", cfg.strategy.ma_window, "strategy");
  read(strategy, "mr_k", cfg.strategy.mr_k, "strategy");
  if (strategy && strategy["signal_delay"] && strategy["signal_delay"].IsScalar() &&
      strategy["signal_delay"].as<std::string>() == "lag") {
    cfg.delay_by_lag = true;
  } else {
    read(strategy, "signal_delay", cfg.strategy.signal_delay, "strategy");
  }

  const auto backtest = root["backtest"];
  check_keys(backtest, "backtest",
             {"budget", "commission", "execution", "fractional_shares", "ratio_basis", "close_at_end"});
  read(backtest, "budget", cfg.backtest.budget, "backtest");
  read(backtest, "commission", cfg.backtest.commission, "backtest");
  read(backtest, "fractional_shares", cfg.backtest.fractional_shares, "backtest");
  read(backtest, "close_at_end", cfg.backtest.close_at_end, "backtest");
  std::string execution, basis;
  read(backtest, "execution", execution, "backtest");
  if (!execution.empty()) {
    if (execution == "close") cfg.backtest.execution = ExecutionPrice::Close;
    else if (execution == "next_open") cfg.backtest.execution = ExecutionPrice::NextOpen;
    else config_error("backtest.execution must be close or next_open");
  }
  read(backtest, "ratio_basis", basis, "backtest");
  if (!basis.empty()) {
    if (basis == "per_bar") cfg.backtest.ratio_basis = ReturnBasis::PerBar;
    else if (basis == "per_trade") cfg.backtest.ratio_basis = ReturnBasis::PerTrade;
    else config_error("backtest.ratio_basis must be per_bar or per_trade");
  }

  const auto rep = root["report"];
  check_keys(rep, "report", {"annualize"});
  read(rep, "annualize", cfg.annualize, "report");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

std::string config_json_text(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["data_dir"] = c.data_dir.generic_string();
  j["output_dir"] = c.output_dir.generic_string();
  j["tickers"] = c.tickers;
  j["workers"] = c.workers;
  j["windows"] = {{"analysis", window_json(c.analysis)},
                  {"clustering", window_json(c.clustering)},
                  {"granger", window_json(c.granger_window)},
                  {"backtest", window_json(c.backtest_window)}};
  j["volatility"] = {{"window", c.vol_window}};
  j["anomaly"] = {{"k", c.anomaly_k}, {"source", to_string(c.anomaly_source)}};
  j["cluster"] = {{"k", c.cluster_k},
                  {"max_iter", c.cluster_max_iter},
                  {"dtw_band", c.dtw_band ? nlohmann::ordered_json(*c.dtw_band) : nlohmann::ordered_json(nullptr)}};
  j["granger"] = {{"min_lag", c.min_lag},
                  {"max_lag", c.max_lag},
                  {"threshold", c.threshold},
                  {"alpha_text", c.alpha_text},
                  {"source", to_string(c.granger_source)}};
  j["strategy"] = {{"mode", to_string(c.strategy.mode)},
                   {"ma_window", c.strategy.ma_window},
                   {"mr_k", c.strategy.mr_k},
                   {"signal_delay", c.delay_by_lag ? nlohmann::ordered_json("lag")
                                                   : nlohmann::ordered_json(c.strategy.signal_delay)}};
  j["backtest"] = {{"budget", c.backtest.budget},
                   {"commission", c.backtest.commission},
                   {"execution", c.backtest.execution == ExecutionPrice::Close ? "close" : "next_open"},
                   {"fractional_shares", c.backtest.fractional_shares},
                   {"ratio_basis", c.backtest.ratio_basis == ReturnBasis::PerBar ? "per_bar" : "per_trade"},
                   {"close_at_end", c.backtest.close_at_end}};
  j["report"] = {{"annualize", c.annualize}};
  return j.dump(2) + "\n";
}

namespace {

std::filesystem::path resolve(const RunConfig& c, const std::filesystem::path& p) {
  if (p.is_absolute() || c.origin.empty()) return p;
  return c.origin.parent_path() / p;
}

void check_window(std::vector<std::string>& out, const WindowBounds& w, std::string_view name) {
  if (w.start && w.end && *w.start > *w.end) {
    out.push_back(fmt::format("{} window start {} is after its end {}", name, w.start->iso(), w.end->iso()));
  }
}

}  // namespace

std::vector<std::string> validate(const RunConfig& c, bool check_data) {
  std::vector<std::string> out;
  if (c.tickers.empty()) out.emplace_back("ticker list is empty");
  std::set<std::string> seen;
  for (const auto& t : c.tickers) {
    if (!seen.insert(t).second) out.push_back("duplicate ticker " + t);
  }
  if (c.workers < 1) out.emplace_back("workers must be ≥ 1");
  if (c.vol_window < 2) out.emplace_back("volatility window must be ≥ 2 (Yang-Zhang needs two returns)");
  if (c.anomaly_k < 1) out.emplace_back("anomaly k must be ≥ 1");
  if (c.cluster_k < 1) out.emplace_back("cluster K must be ≥ 1");
  if (c.cluster_max_iter < 1) out.emplace_back("cluster max_iter must be ≥ 1");
  if (c.dtw_band && *c.dtw_band < 0) out.emplace_back("dtw band must be ≥ 0");
  if (c.min_lag < 1 || c.max_lag < c.min_lag) {
    out.push_back(fmt::format("granger lag range [{}, {}] is not well-ordered with min ≥ 1", c.min_lag, c.max_lag));
  }
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) out.emplace_back("granger threshold must be in (0, 1)");
  if (!(c.alpha_text > 0.0 && c.alpha_text < 1.0)) out.emplace_back("granger alpha_text must be in (0, 1)");
  try {
    c.strategy.validate();
  } catch (const Error& e) {
    out.emplace_back(std::string("strategy: ") + e.what());
  }
  if (!(c.backtest.budget > 0.0)) out.emplace_back("budget must be > 0");
  if (c.backtest.commission < 0.0) out.emplace_back("commission must be ≥ 0");
  check_window(out, c.analysis, "analysis");
  check_window(out, c.clustering, "clustering");
  check_window(out, c.granger_window, "granger");
  check_window(out, c.backtest_window, "backtest");

  if (!check_data) return out;

  const auto dir = resolve(c, c.data_dir);
  if (!std::filesystem::is_directory(dir)) {
    out.push_back("data directory not found: " + dir.string());
    return out;
  }
  std::optional<Date> first, last;
  for (const auto& t : c.tickers) {
    const auto path = dir / (t + ".csv");
    if (!std::filesystem::exists(path)) {
      out.push_back("missing data file for ticker " + t + ": " + path.string());
      continue;
    }
    try {
      const auto s = load_csv(path, t);
      if (!first || s.dates().front() > *first) first = s.dates().front();
      if (!last || s.dates().back() < *last) last = s.dates().back();
    } catch (const Error& e) {
      out.push_back("ticker " + t + ": " + e.what());
    }
  }
  if (!first || !last) return out;
  const auto overlaps = [&](const WindowBounds& w, std::string_view name) {
    if (w.end && *w.end < *first) {
      out.push_back(fmt::format("{} window ends {} before the data starts {}", name, w.end->iso(), first->iso()));
    }
    if (w.start && *w.start > *last) {
      out.push_back(fmt::format("{} window starts {} after the data ends {}", name, w.start->iso(), last->iso()));
    }
  };
  overlaps(c.analysis, "analysis");
  overlaps(c.clustering, "clustering");
  overlaps(c.granger_window, "granger");
  overlaps(c.backtest_window, "backtest");
  return out;
}

}  // namespace volts
