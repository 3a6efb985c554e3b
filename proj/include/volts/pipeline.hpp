#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "volts/config.hpp"

namespace volts {

enum class Stage { Ingest, Volatility, Anomaly, Cluster, Granger, Backtest, Report };

inline constexpr std::array<Stage, 7> kStages = {Stage::Ingest,  Stage::Volatility,
                                                 Stage::Anomaly, Stage::Cluster,
                                                 Stage::Granger, Stage::Backtest,
                                                 Stage::Report};

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view name);

// Artifact layout under the output directory.
namespace artifacts {
inline constexpr std::string_view kManifest = "manifest.json";
inline constexpr std::string_view kPanelDir = "panel";
inline constexpr std::string_view kVolDir = "volatility";
inline constexpr std::string_view kAnomalyDir = "anomaly";
inline constexpr std::string_view kWindow = "anomaly/window.json";
inline constexpr std::string_view kCluster = "cluster.json";
inline constexpr std::string_view kGraphJson = "granger/graph.json";
inline constexpr std::string_view kGraphDot = "granger/graph.dot";
inline constexpr std::string_view kLagScores = "granger/lag_scores.csv";
inline constexpr std::string_view kBacktestDir = "backtest";
inline constexpr std::string_view kBacktestJson = "backtest/results.json";
inline constexpr std::string_view kReportJson = "report.json";
inline constexpr std::string_view kReportCsv = "report.csv";
}  // namespace artifacts

struct StageRecord {
  std::string name;
  std::string input_hash;   // SHA-256 over the stage's input files
  std::string output_hash;  // SHA-256 over the files it wrote
  std::vector<std::string> outputs;
  std::string finished_at;
};

// manifest.json: config snapshot plus one record per completed stage.
struct RunManifest {
  std::string config_json;
  std::string config_hash;
  std::vector<StageRecord> stages;
  std::optional<std::string> failed_stage;
  std::optional<std::string> failure;
  std::optional<DateWindow> clean_window;
  std::optional<int> chosen_lag;
  std::vector<std::string> mid_cluster;
  bool cluster_label_tie = false;
  std::string created_at;
};

RunManifest read_manifest(const std::filesystem::path& out_dir);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir);

// Runs one stage against the artifacts already present in `out_dir` and
// records it in the manifest. Throws Error on failure (the manifest records
// the failed stage before rethrowing).
void run_stage(const RunConfig& config, Stage stage, const std::filesystem::path& out_dir);

// Runs every stage from `from` through Report, in order.
void run_pipeline(const RunConfig& config, const std::filesystem::path& out_dir,
                  Stage from = Stage::Ingest);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace volts
