// volts: command-line driver for the volatility / causality pipeline.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "volts/config.hpp"
#include "volts/error.hpp"
#include "volts/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kStageFailed = 2;

fs::path output_dir(const volts::RunConfig& config, const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (config.output_dir.is_absolute() || config.origin.empty()) return config.output_dir;
  return config.origin.parent_path() / config.output_dir;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"volts: volatility regimes, causal pairs and backtests from daily OHLC data"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out;
  std::string stage_from = "ingest";

  const auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output_dir)");
    return sub;
  };
  add("validate", "check the config and data without running anything");
  for (const auto stage : volts::kStages) {
    const std::string name(volts::to_string(stage));
    add(name, "run the " + name + " stage (and any missing prerequisites)");
  }
  auto* pipeline = add("pipeline", "run every stage in order");
  pipeline->add_option("--stage-from", stage_from, "first stage to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  volts::RunConfig config;
  try {
    config = volts::load_config(config_path);
  } catch (const volts::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }

  const auto problems = volts::validate(config, true);
  for (const auto& p : problems) std::cerr << "invalid: " << p << '\n';
  if (!problems.empty()) return kInvalid;
  if (command == "validate") {
    std::cout << "ok: " << config.tickers.size() << " tickers\n";
    return kOk;
  }

  const fs::path dir = output_dir(config, out);
  try {
    if (command == "pipeline") {
      volts::Stage from{};
      try {
        from = volts::stage_from_string(stage_from);
      } catch (const volts::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
      }
      volts::run_pipeline(config, dir, from);
    } else {
      volts::run_stage(config, volts::stage_from_string(command), dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "stage failed: " << e.what() << '\n';
    return kStageFailed;
  }
  std::cout << command << ": done, artifacts in " << dir.string() << '\n';
  return kOk;
}
