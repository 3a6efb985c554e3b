#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "volts/anomaly.hpp"
#include "volts/backtest.hpp"
#include "volts/strategy.hpp"

namespace volts {

// The nine default tickers.
inline const std::vector<std::string> kDefaultUniverse = {
    "MSFT", "GOOGL", "MU", "NVDA", "AMZN", "META", "QCOM", "IBM", "INTC"};

// Inclusive bounds; an unset end means "as far as the data goes".
struct WindowBounds {
  std::optional<Date> start;
  std::optional<Date> end;
};

enum class AnomalySource { MeanHv, Close };
enum class GrangerSource { LogReturns, Close, MeanHv };

struct RunConfig {
  std::filesystem::path data_dir;
  std::vector<std::string> tickers;
  std::filesystem::path output_dir = "out";
  int workers = 1;

  WindowBounds analysis;
  WindowBounds clustering;
  WindowBounds granger_window;
  WindowBounds backtest_window;

  long vol_window = 21;

  int anomaly_k = 5;
  AnomalySource anomaly_source = AnomalySource::MeanHv;

  int cluster_k = 3;
  int cluster_max_iter = 100;
  std::optional<long> dtw_band;

  int min_lag = 2;
  int max_lag = 30;
  double threshold = 0.025;
  double alpha_text = 0.05;
  GrangerSource granger_source = GrangerSource::LogReturns;

  StrategyConfig strategy;
  // `signal_delay: lag` trades the target the chosen Granger lag after the
  // predictor's signal.
  bool delay_by_lag = false;
  BacktestConfig backtest;
  bool annualize = false;

  // Path the config was loaded from; relative data/output paths resolve
  // against its directory.
  std::filesystem::path origin;
};

// Parses the YAML config; throws Error(Config) on syntax or type errors.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& yaml_text,
                       const std::filesystem::path& origin = {});

// Canonical JSON rendering, used for the manifest snapshot and hashing.
std::string config_json_text(const RunConfig& config);

// Every invariant violation, as human-readable lines; empty when valid.
// With `check_data`, also verifies the ticker files exist and that the
// configured windows overlap the data.
std::vector<std::string> validate(const RunConfig& config, bool check_data);

std::string_view to_string(AnomalySource source);
std::string_view to_string(GrangerSource source);

}  // namespace volts
