#include "volts/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "volts/anomaly.hpp"
#include "volts/causality.hpp"
#include "volts/clustering.hpp"
#include "volts/market_data.hpp"
#include "volts/volatility.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace volts {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Ingest: return "ingest";
    case Stage::Volatility: return "volatility";
    case Stage::Anomaly: return "anomaly";
    case Stage::Cluster: return "cluster";
    case Stage::Granger: return "granger";
    case Stage::Backtest: return "backtest";
    case Stage::Report: return "report";
  }
  return "?";
}

Stage stage_from_string(std::string_view name) {
  for (const auto s : kStages) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown stage '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Hashing and small file helpers
// ---------------------------------------------------------------------------

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, std::string_view text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

std::string now_iso() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto day = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::hh_mm_ss hms{now - day};
  return fmt::format("{}T{:02d}:{:02d}:{:02d}Z", Date{day}.iso(), hms.hours().count(), hms.minutes().count(),
                     hms.seconds().count());
}

// Hash over (relative name, content hash) pairs in the given order.
std::string hash_files(const std::vector<fs::path>& files, const fs::path& base) {
  std::string acc;
  for (const auto& f : files) {
    acc += fs::relative(f, base).generic_string();
    acc += '\0';
    acc += sha256_file(f);
    acc += '\n';
  }
  return sha256_hex(acc);
}

fs::path resolve(const RunConfig& c, const fs::path& p) {
  if (p.is_absolute() || c.origin.empty()) return p;
  return c.origin.parent_path() / p;
}

std::string file_safe(const std::string& edge) {
  std::string out = edge;
  const auto arrow = out.find("->");
  if (arrow != std::string::npos) out.replace(arrow, 2, "_");
  return out;
}

constexpr Date kEarliest{1900, 1, 1};
constexpr Date kLatest{2999, 12, 31};

DateWindow bounds_or_all(const WindowBounds& w) { return {w.start.value_or(kEarliest), w.end.value_or(kLatest)}; }

DateWindow intersect(const DateWindow& a, const WindowBounds& b) {
  const auto w = bounds_or_all(b);
  return {std::max(a.start, w.start), std::min(a.end, w.end)};
}

VolSeries slice(const VolSeries& s, const DateWindow& w) {
  VolSeries out = s;
  out.dates.clear();
  std::vector<double> values;
  for (std::size_t i = 0; i < s.dates.size(); ++i) {
    if (s.dates[i] < w.start || s.dates[i] > w.end) continue;
    out.dates.push_back(s.dates[i]);
    values.push_back(s.values(static_cast<Eigen::Index>(i)));
  }
  if (values.empty()) {
    throw Error(ErrorCode::EmptyWindow,
                fmt::format("{}: no volatility values in [{}, {}]", s.ticker, w.start.iso(), w.end.iso()));
  }
  out.values = Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Stage context: the artifacts a stage reads and writes
// ---------------------------------------------------------------------------

struct StageIo {
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
};

class Runner {
 public:
  Runner(const RunConfig& config, fs::path out) : cfg_(config), out_(std::move(out)) {}

  StageIo run(Stage stage) {
    switch (stage) {
      case Stage::Ingest: return ingest();
      case Stage::Volatility: return volatility();
      case Stage::Anomaly: return anomaly();
      case Stage::Cluster: return cluster();
      case Stage::Granger: return granger();
      case Stage::Backtest: return backtest();
      case Stage::Report: return report_stage();
    }
    return {};
  }

  // Artifact that proves `stage` has run.
  fs::path marker(Stage stage) const {
    switch (stage) {
      case Stage::Ingest: return panel_path(cfg_.tickers.back());
      case Stage::Volatility: return vol_path(cfg_.tickers.back(), "Mean");
      case Stage::Anomaly: return out_ / artifacts::kWindow;
      case Stage::Cluster: return out_ / artifacts::kCluster;
      case Stage::Granger: return out_ / artifacts::kGraphJson;
      case Stage::Backtest: return out_ / artifacts::kBacktestJson;
      case Stage::Report: return out_ / artifacts::kReportJson;
    }
    return {};
  }

  RunManifest manifest;

 private:
  fs::path panel_path(const std::string& t) const { return out_ / artifacts::kPanelDir / (t + ".csv"); }
  fs::path vol_path(const std::string& t, std::string_view label) const {
    return out_ / artifacts::kVolDir / fmt::format("{}_{}.csv", t, label);
  }

  Panel read_panel(StageIo& io) const {
    std::vector<PriceSeries> columns;
    for (const auto& t : cfg_.tickers) {
      io.inputs.push_back(panel_path(t));
      columns.push_back(load_csv(panel_path(t), t));
    }
    return align(columns);
  }

  std::vector<VolSeries> read_mean_hv(StageIo& io) const {
    std::vector<VolSeries> out;
    for (const auto& t : cfg_.tickers) {
      io.inputs.push_back(vol_path(t, "Mean"));
      out.push_back(read_vol_csv(vol_path(t, "Mean")));
    }
    return out;
  }

  DateWindow read_clean_window(StageIo& io) const {
    const auto path = out_ / artifacts::kWindow;
    io.inputs.push_back(path);
    const auto j = nlohmann::json::parse(read_text(path));
    return {Date::parse(j.at("start").get<std::string>()), Date::parse(j.at("end").get<std::string>())};
  }

  StageIo ingest() {
    StageIo io;
    const CsvDirectoryProvider provider(resolve(cfg_, cfg_.data_dir));
    const auto window = bounds_or_all(cfg_.analysis);
    std::vector<PriceSeries> series;
    for (const auto& t : cfg_.tickers) {
      io.inputs.push_back(provider.path_for(t));
      try {
        series.push_back(provider.fetch(t, window.start, window.end));
      } catch (const Error& e) {
        throw Error(e.code(), "ticker " + t + ": " + e.what());
      }
    }
    const Panel panel = align(series);
    fs::create_directories(out_ / artifacts::kPanelDir);
    for (Eigen::Index j = 0; j < panel.cols(); ++j) {
      const auto path = panel_path(panel.tickers[static_cast<std::size_t>(j)]);
      write_csv(panel.column(j), path);
      io.outputs.push_back(path);
    }
    return io;
  }

  StageIo volatility() {
    StageIo io;
    const Panel panel = read_panel(io);
    fs::create_directories(out_ / artifacts::kVolDir);
    for (Eigen::Index j = 0; j < panel.cols(); ++j) {
      std::vector<VolSeries> all;
      try {
        all = all_estimators(panel.column(j), cfg_.vol_window);
      } catch (const Error& e) {
        throw Error(e.code(), "ticker " + panel.tickers[static_cast<std::size_t>(j)] + ": " + e.what());
      }
      for (const auto& s : all) {
        const auto path = vol_path(s.ticker, s.label());
        write_vol_csv(s, path);
        io.outputs.push_back(path);
      }
    }
    return io;
  }

  StageIo anomaly() {
    StageIo io;
    std::vector<std::pair<std::string, std::pair<std::vector<Date>, Eigen::ArrayXd>>> sources;
    if (cfg_.anomaly_source == AnomalySource::MeanHv) {
      for (auto& s : read_mean_hv(io)) sources.push_back({s.ticker, {s.dates, s.values}});
    } else {
      const Panel panel = read_panel(io);
      for (Eigen::Index j = 0; j < panel.cols(); ++j) {
        sources.push_back({panel.tickers[static_cast<std::size_t>(j)], {panel.dates, panel.close.col(j).array()}});
      }
    }

    fs::create_directories(out_ / artifacts::kAnomalyDir);
    std::set<Date> union_flags;
    std::vector<Date> calendar;
    json per_ticker = json::object();
    for (const auto& [ticker, data] : sources) {
      const auto scores = knn_scores(data.second, cfg_.anomaly_k);
      const AnomalyReport rep = detect(data.first, scores);
      const auto path = out_ / artifacts::kAnomalyDir / (ticker + ".csv");
      write_anomaly_csv(rep, path);
      io.outputs.push_back(path);
      union_flags.insert(rep.flags.begin(), rep.flags.end());
      if (calendar.empty()) calendar = data.first;
      json entry;
      entry["threshold"] = rep.threshold;
      entry["status"] = rep.status == AnomalyStatus::Ok ? "ok" : "degenerate_scores";
      json flags = json::array();
      for (const auto& d : rep.flags) flags.push_back(d.iso());
      entry["flags"] = flags;
      per_ticker[ticker] = entry;
    }
    const DateWindow window = clean_window(std::vector<Date>(union_flags.begin(), union_flags.end()), calendar);
    manifest.clean_window = window;

    json j;
    j["start"] = window.start.iso();
    j["end"] = window.end.iso();
    j["source"] = to_string(cfg_.anomaly_source);
    j["k"] = cfg_.anomaly_k;
    j["tickers"] = per_ticker;
    const auto path = out_ / artifacts::kWindow;
    write_text(path, j.dump(2) + "\n");
    io.outputs.push_back(path);
    return io;
  }

  StageIo cluster() {
    StageIo io;
    const auto clean = read_clean_window(io);
    const auto window = intersect(clean, cfg_.clustering);
    std::vector<VolSeries> series;
    for (const auto& s : read_mean_hv(io)) series.push_back(slice(s, window));
    DtwConfig dtw_cfg;
    if (cfg_.dtw_band) dtw_cfg.band = *cfg_.dtw_band;
    const ClusterResult result =
        kmeans_dtw(series, cfg_.cluster_k, cfg_.cluster_max_iter, dtw_cfg, cfg_.workers);
    const auto mid = pick_mid_cluster(result, series);
    manifest.mid_cluster = mid;
    manifest.cluster_label_tie = result.label_tie;
    const auto path = out_ / artifacts::kCluster;
    write_cluster_json(result, mid, path);
    io.outputs.push_back(path);
    return io;
  }

  std::vector<std::string> read_mid_cluster(StageIo& io) const {
    const auto path = out_ / artifacts::kCluster;
    io.inputs.push_back(path);
    return nlohmann::json::parse(read_text(path)).at("mid_cluster").get<std::vector<std::string>>();
  }

  StageIo granger() {
    StageIo io;
    const auto clean = read_clean_window(io);
    const auto window = intersect(clean, cfg_.granger_window);
    const auto mid = read_mid_cluster(io);
    if (mid.size() < 2) {
      throw Error(ErrorCode::TooFewSeries,
                  fmt::format("mid cluster has {} ticker(s); causality needs at least 2", mid.size()));
    }

    Eigen::MatrixXd data;
    if (cfg_.granger_source == GrangerSource::MeanHv) {
      const auto all = read_mean_hv(io);
      for (std::size_t k = 0; k < mid.size(); ++k) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const VolSeries& s) { return s.ticker == mid[k]; });
        const VolSeries s = slice(*it, window);
        if (k == 0) data.resize(s.size(), static_cast<Eigen::Index>(mid.size()));
        data.col(static_cast<Eigen::Index>(k)) = s.values.matrix();
      }
    } else {
      const Panel panel = slice_window(read_panel(io), window.start, window.end);
      const Eigen::Index rows = panel.rows();
      const bool returns = cfg_.granger_source == GrangerSource::LogReturns;
      data.resize(returns ? rows - 1 : rows, static_cast<Eigen::Index>(mid.size()));
      for (std::size_t k = 0; k < mid.size(); ++k) {
        const auto c = panel.close.col(panel.index_of(mid[k]));
        if (returns) {
          data.col(static_cast<Eigen::Index>(k)) =
              (c.tail(rows - 1).array() / c.head(rows - 1).array()).log().matrix();
        } else {
          data.col(static_cast<Eigen::Index>(k)) = c;
        }
      }
    }

    const LagSweep sweep = lag_sweep(mid, data, cfg_.min_lag, cfg_.max_lag, cfg_.threshold, cfg_.workers);
    manifest.chosen_lag = sweep.graph.lag;

    const auto json_path = out_ / artifacts::kGraphJson;
    const auto dot_path = out_ / artifacts::kGraphDot;
    const auto scores_path = out_ / artifacts::kLagScores;
    write_text(json_path, to_json_text(sweep.graph));
    write_text(dot_path, to_dot(sweep.graph));
    std::string scores = "lag,raw_edges,dag_nodes,dag_edges,skipped_pairs\n";
    for (const auto& s : sweep.scores) {
      scores += fmt::format("{},{},{},{},{}\n", s.lag, s.raw_edges, s.dag_nodes, s.dag_edges, s.skipped);
    }
    write_text(scores_path, scores);
    io.outputs = {json_path, dot_path, scores_path};
    return io;
  }

  StageIo backtest() {
    StageIo io;
    const auto graph_path = out_ / artifacts::kGraphJson;
    io.inputs.push_back(graph_path);
    const CausalGraph graph = graph_from_json_text(read_text(graph_path));
    const auto window = bounds_or_all(cfg_.backtest_window);
    const Panel panel = slice_window(read_panel(io), window.start, window.end);

    const auto dir = out_ / artifacts::kBacktestDir;
    fs::create_directories(dir);
    json results = json::array();
    for (const auto& edge : graph.edges) {
      const auto predictor = panel.column(panel.index_of(edge.source));
      const auto target = panel.column(panel.index_of(edge.target));
      std::vector<Signal> signals;
      switch (cfg_.strategy.mode) {
        case StrategyMode::TrendFollow: signals = tf_signals(predictor, cfg_.strategy, edge.name()); break;
        case StrategyMode::MeanReversion: signals = mr_signals(target, cfg_.strategy, edge.name()); break;
        case StrategyMode::BuyHold: signals = bh_signals(target, edge.name()); break;
      }
      const int delay = cfg_.delay_by_lag ? graph.lag : cfg_.strategy.signal_delay;
      signals = delay_signals(signals, target.dates(), delay);
      const BacktestResult r = simulate(target, signals, cfg_.backtest, edge.name());
      const BacktestResult benchmark = simulate(target, bh_signals(target, edge.name()), cfg_.backtest, edge.name());

      const auto stem = file_safe(edge.name());
      write_signal_csv(signals, dir / (stem + "_signals.csv"));
      write_equity_csv(r.curve, dir / (stem + "_equity.csv"));
      std::string trades = "entry_date,entry_price,exit_date,exit_price,quantity,pnl,commission\n";
      for (const auto& t : r.trades) {
        trades += fmt::format("{},{:.6f},{},{:.6f},{:.6f},{:.6f},{:.2f}\n", t.entry_date.iso(), t.entry_price,
                              t.exit_date.iso(), t.exit_price, t.quantity, t.pnl, t.commission);
      }
      write_text(dir / (stem + "_trades.csv"), trades);
      for (const auto* suffix : {"_signals.csv", "_equity.csv", "_trades.csv"}) io.outputs.push_back(dir / (stem + suffix));

      json e;
      e["edge"] = r.edge;
      e["initial"] = r.curve.initial;
      e["buy_hold_return_pct"] = 100.0 * benchmark.metrics.total_return;
      e["exposure_pct"] = r.metrics.exposure_pct;
      json dates = json::array();
      for (const auto& d : r.curve.dates) dates.push_back(d.iso());
      e["dates"] = dates;
      e["equity"] = std::vector<double>(r.curve.equity.begin(), r.curve.equity.end());
      e["cash"] = std::vector<double>(r.curve.cash.begin(), r.curve.cash.end());
      e["position"] = std::vector<double>(r.curve.position.begin(), r.curve.position.end());
      json trades_json = json::array();
      for (const auto& t : r.trades) {
        trades_json.push_back({{"entry_date", t.entry_date.iso()},
                               {"entry_price", t.entry_price},
                               {"exit_date", t.exit_date.iso()},
                               {"exit_price", t.exit_price},
                               {"quantity", t.quantity},
                               {"pnl", t.pnl},
                               {"commission", t.commission},
                               {"entry_capital", t.entry_capital}});
      }
      e["trades"] = trades_json;
      results.push_back(e);
    }
    json j;
    j["ratio_basis"] = cfg_.backtest.ratio_basis == ReturnBasis::PerBar ? "per_bar" : "per_trade";
    j["results"] = results;
    const auto path = out_ / artifacts::kBacktestJson;
    write_text(path, j.dump(2) + "\n");
    io.outputs.push_back(path);
    return io;
  }

  StageIo report_stage() {
    StageIo io;
    const auto path = out_ / artifacts::kBacktestJson;
    io.inputs.push_back(path);
    const auto j = nlohmann::json::parse(read_text(path));
    const auto basis = j.at("ratio_basis").get<std::string>() == "per_bar" ? ReturnBasis::PerBar : ReturnBasis::PerTrade;

    std::vector<BacktestResult> results;
    for (const auto& e : j.at("results")) {
      BacktestResult r;
      r.edge = e.at("edge").get<std::string>();
      r.curve.initial = e.at("initial").get<double>();
      for (const auto& d : e.at("dates")) r.curve.dates.push_back(Date::parse(d.get<std::string>()));
      const auto column = [&](const char* key) {
        const auto v = e.at(key).get<std::vector<double>>();
        return Eigen::ArrayXd(Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size())));
      };
      r.curve.equity = column("equity");
      r.curve.cash = column("cash");
      r.curve.position = column("position");
      for (const auto& t : e.at("trades")) {
        Trade trade;
        trade.entry_date = Date::parse(t.at("entry_date").get<std::string>());
        trade.entry_price = t.at("entry_price").get<double>();
        trade.exit_date = Date::parse(t.at("exit_date").get<std::string>());
        trade.exit_price = t.at("exit_price").get<double>();
        trade.quantity = t.at("quantity").get<double>();
        trade.pnl = t.at("pnl").get<double>();
        trade.commission = t.at("commission").get<double>();
        trade.entry_capital = t.at("entry_capital").get<double>();
        r.trades.push_back(trade);
      }
      r.metrics = compute_metrics(r.trades, r.curve, basis);
      r.metrics.exposure_pct = e.at("exposure_pct").get<double>();
      results.push_back(std::move(r));
    }
    if (results.empty()) throw Error(ErrorCode::NoSignificantEdges, "no backtested edges to report");

    ReportOptions options;
    options.annualize = cfg_.annualize;
    const Report rep = report(results, options);
    const auto json_path = out_ / artifacts::kReportJson;
    const auto csv_path = out_ / artifacts::kReportCsv;
    write_text(json_path, report_json_text(rep));
    write_text(csv_path, report_csv_text(rep));
    io.outputs = {json_path, csv_path};
    return io;
  }

  const RunConfig& cfg_;
  fs::path out_;
};

json manifest_json(const RunManifest& m) {
  json j;
  j["created_at"] = m.created_at;
  j["config_hash"] = m.config_hash;
  j["config"] = m.config_json.empty() ? json(nullptr) : json::parse(m.config_json);
  j["stages"] = json::array();
  for (const auto& s : m.stages) {
    j["stages"].push_back({{"name", s.name},
                           {"input_hash", s.input_hash},
                           {"output_hash", s.output_hash},
                           {"outputs", s.outputs},
                           {"finished_at", s.finished_at}});
  }
  j["failed_stage"] = m.failed_stage ? json(*m.failed_stage) : json(nullptr);
  j["failure"] = m.failure ? json(*m.failure) : json(nullptr);
  if (m.clean_window) {
    j["clean_window"] = {{"start", m.clean_window->start.iso()}, {"end", m.clean_window->end.iso()}};
  } else {
    j["clean_window"] = nullptr;
  }
  j["chosen_lag"] = m.chosen_lag ? json(*m.chosen_lag) : json(nullptr);
  j["mid_cluster"] = m.mid_cluster;
  j["cluster_label_tie"] = m.cluster_label_tie;
  return j;
}

}  // namespace

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

RunManifest read_manifest(const fs::path& out_dir) {
  RunManifest m;
  const auto path = out_dir / artifacts::kManifest;
  if (!fs::exists(path)) return m;
  const auto j = nlohmann::json::parse(read_text(path));
  m.created_at = j.value("created_at", "");
  m.config_hash = j.value("config_hash", "");
  if (j.contains("config") && !j["config"].is_null()) m.config_json = j["config"].dump(2) + "\n";
  for (const auto& s : j.at("stages")) {
    m.stages.push_back({s.at("name").get<std::string>(), s.at("input_hash").get<std::string>(),
                        s.at("output_hash").get<std::string>(), s.at("outputs").get<std::vector<std::string>>(),
                        s.at("finished_at").get<std::string>()});
  }
  if (!j["failed_stage"].is_null()) m.failed_stage = j["failed_stage"].get<std::string>();
  if (!j["failure"].is_null()) m.failure = j["failure"].get<std::string>();
  if (!j["clean_window"].is_null()) {
    m.clean_window = DateWindow{Date::parse(j["clean_window"]["start"].get<std::string>()),
                                Date::parse(j["clean_window"]["end"].get<std::string>())};
  }
  if (!j["chosen_lag"].is_null()) m.chosen_lag = j["chosen_lag"].get<int>();
  m.mid_cluster = j.at("mid_cluster").get<std::vector<std::string>>();
  m.cluster_label_tie = j.value("cluster_label_tie", false);
  return m;
}

void write_manifest(const RunManifest& manifest, const fs::path& out_dir) {
  write_text(out_dir / artifacts::kManifest, manifest_json(manifest).dump(2) + "\n");
}

void run_stage(const RunConfig& config, Stage stage, const fs::path& out_dir) {
  if (const auto problems = validate(config, false); !problems.empty()) {
    throw Error(ErrorCode::Config, problems.front());
  }
  fs::create_directories(out_dir);
  Runner runner(config, out_dir);

  // Missing prerequisites are produced first.
  const auto position = std::find(kStages.begin(), kStages.end(), stage) - kStages.begin();
  if (position > 0 && !fs::exists(runner.marker(kStages[static_cast<std::size_t>(position - 1)]))) {
    run_stage(config, kStages[static_cast<std::size_t>(position - 1)], out_dir);
  }

  runner.manifest = read_manifest(out_dir);
  auto& m = runner.manifest;
  if (m.created_at.empty()) m.created_at = now_iso();
  m.config_json = config_json_text(config);
  m.config_hash = sha256_hex(m.config_json);
  m.failed_stage.reset();
  m.failure.reset();

  StageIo io;
  try {
    io = runner.run(stage);
  } catch (const std::exception& e) {
    m.failed_stage = std::string(to_string(stage));
    m.failure = e.what();
    write_manifest(m, out_dir);
    throw;
  }

  StageRecord record;
  record.name = std::string(to_string(stage));
  record.input_hash = hash_files(io.inputs, io.inputs.empty() ? out_dir : io.inputs.front().parent_path());
  record.output_hash = hash_files(io.outputs, out_dir);
  for (const auto& f : io.outputs) record.outputs.push_back(fs::relative(f, out_dir).generic_string());
  record.finished_at = now_iso();
  std::erase_if(m.stages, [&](const StageRecord& s) { return s.name == record.name; });
  m.stages.push_back(record);
  std::sort(m.stages.begin(), m.stages.end(), [](const StageRecord& a, const StageRecord& b) {
    return stage_from_string(a.name) < stage_from_string(b.name);
  });
  write_manifest(m, out_dir);
}

void run_pipeline(const RunConfig& config, const fs::path& out_dir, Stage from) {
  const auto first = std::find(kStages.begin(), kStages.end(), from);
  for (auto it = first; it != kStages.end(); ++it) run_stage(config, *it, out_dir);
}

}  // namespace volts
