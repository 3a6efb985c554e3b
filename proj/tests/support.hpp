#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "volts/market_data.hpp"

namespace testing_support {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(VOLTS_TEST_DATA) / name;
}

// Rows of a small numeric CSV with a header line.
inline std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<volts::Date> days(int count, volts::Date first = {2023, 1, 2}) {
  std::vector<volts::Date> out;
  for (volts::Date d = first; static_cast<int>(out.size()) < count; d = d.next()) out.push_back(d);
  return out;
}

// Candles with a valid geometry around a geometric random walk.
inline volts::PriceSeries random_series(std::mt19937_64& rng, int n, double sigma = 0.02,
                                        const std::string& ticker = "RND") {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<volts::OhlcBar> bars;
  const auto dates = days(n);
  double prev = 50.0 + 100.0 * unit(rng);
  for (int i = 0; i < n; ++i) {
    const double open = prev * std::exp(0.3 * sigma * normal(rng));
    const double close = open * std::exp(sigma * normal(rng));
    const double high = std::max(open, close) * std::exp(sigma * unit(rng));
    const double low = std::min(open, close) * std::exp(-sigma * unit(rng));
    bars.push_back({dates[static_cast<std::size_t>(i)], open, high, low, close});
    prev = close;
  }
  return volts::PriceSeries(ticker, bars);
}

// Every bar o = h = l = c = price.
inline volts::PriceSeries flat_series(int n, double price, const std::string& ticker = "FLAT") {
  std::vector<volts::OhlcBar> bars;
  for (const auto& d : days(n)) bars.push_back({d, price, price, price, price});
  return volts::PriceSeries(ticker, bars);
}

// Close-only candles (o = h = l = c).
inline volts::PriceSeries from_closes(const std::vector<double>& closes,
                                      const std::string& ticker = "C") {
  std::vector<volts::OhlcBar> bars;
  const auto dates = days(static_cast<int>(closes.size()));
  for (std::size_t i = 0; i < closes.size(); ++i) bars.push_back({dates[i], closes[i], closes[i], closes[i], closes[i]});
  return volts::PriceSeries(ticker, bars);
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           (tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace testing_support
