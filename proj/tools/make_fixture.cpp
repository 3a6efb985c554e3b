// Writes the planted synthetic market plus a matching config.yaml.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"write a synthetic nine-ticker market with a planted lag-5 chain"};
  std::string dir;
  volts::synthetic::Params params;
  app.add_option("dir", dir, "output directory")->required();
  app.add_option("--seed", params.seed, "generator seed");
  app.add_option("--bars", params.bars, "bars per ticker");
  int trade_bars = 60;
  app.add_option("--trade-bars", trade_bars, "bars in the backtest window")->check(CLI::Range(10, 100000));
  CLI11_PARSE(app, argc, argv);

  volts::synthetic::write(std::filesystem::path(dir) / "data", params);
  std::ofstream config(std::filesystem::path(dir) / "config.yaml");
  config << "data_dir: data\noutput_dir: out\ntickers: [";
  const auto names = volts::synthetic::tickers();
  for (std::size_t i = 0; i < names.size(); ++i) config << (i ? ", " : "") << names[i];
  config << "]\n";
  // Causality on the history, trading on the final stretch.
  const auto dates = volts::synthetic::business_days(params.first, params.bars);
  const auto split = dates.size() - static_cast<std::size_t>(trade_bars);
  config << "windows:\n  granger: {end: " << dates[split - 1].iso() << "}\n  backtest: {start: "
         << dates[split].iso() << "}\nstrategy:\n  signal_delay: lag\n";
  std::cout << fmt::format("wrote {} tickers x {} bars to {}\n", names.size(), params.bars, dir);
  return 0;
}
