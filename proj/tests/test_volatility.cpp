#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "volts/volatility.hpp"

using namespace volts;

namespace {

// Straight loop versions of the closed forms.
double pk_loop(const std::vector<OhlcBar>& b) {
  double s = 0;
  for (const auto& x : b) s += std::pow(std::log(x.high / x.low), 2);
  return std::sqrt(s / (4.0 * b.size() * std::log(2.0)));
}

double gk_loop(const std::vector<OhlcBar>& b) {
  double s = 0;
  for (const auto& x : b) {
    s += 0.5 * std::pow(std::log(x.high / x.low), 2) -
         (2 * std::log(2.0) - 1) * std::pow(std::log(x.close / x.open), 2);
  }
  return std::sqrt(std::max(0.0, s / b.size()));
}

double rs_loop(const std::vector<OhlcBar>& b) {
  double s = 0;
  for (const auto& x : b) {
    s += std::log(x.high / x.close) * std::log(x.high / x.open) +
         std::log(x.low / x.close) * std::log(x.low / x.open);
  }
  return std::sqrt(std::max(0.0, s / b.size()));
}

double yz_loop(const std::vector<OhlcBar>& b) {
  const std::size_t n = b.size() - 1;
  double mo = 0, mc = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    mo += std::log(b[i].open / b[i - 1].close);
    mc += std::log(b[i].close / b[i].open);
  }
  mo /= n;
  mc /= n;
  double vo = 0, vc = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    vo += std::pow(std::log(b[i].open / b[i - 1].close) - mo, 2);
    vc += std::pow(std::log(b[i].close / b[i].open) - mc, 2);
  }
  vo /= (n - 1);
  vc /= (n - 1);
  const double rs = std::pow(rs_loop({b.begin() + 1, b.end()}), 2);
  const double k = 0.34 / (1.34 + double(n + 1) / double(n - 1));
  return std::sqrt(vo + k * vc + (1 - k) * rs);
}

OhlcBar bar(double o, double h, double l, double c) { return {Date{2023, 1, 2}, o, h, l, c}; }

}  // namespace

TEST(Parkinson, SingleBar) {
  const std::vector<OhlcBar> b = {bar(100, 110, 100, 105)};
  EXPECT_NEAR(parkinson(b), 0.0572395963742201580, 1e-15);
}

TEST(GarmanKlass, SingleBar) {
  const std::vector<OhlcBar> b = {bar(100, 110, 100, 110)};
  EXPECT_NEAR(garman_klass(b), 0.0321388468573443132, 1e-15);
}

TEST(RogersSatchell, SingleBar) {
  const std::vector<OhlcBar> b = {bar(100, 110, 95, 105)};
  EXPECT_NEAR(rogers_satchell(b), 0.0978132984708580445, 1e-15);
}

TEST(YangZhang, WeightForTwoReturns) {
  EXPECT_NEAR(yang_zhang_k(2), 0.0783410138248847968, 1e-16);
  EXPECT_THROW(yang_zhang_k(1), Error);
}

TEST(Estimators, ZeroOnFlatBars) {
  const auto s = testing_support::flat_series(30, 42.0);
  for (const auto kind : kEstimators) {
    const auto v = rolling(s, kind, 21);
    EXPECT_TRUE((v.values == 0.0).all()) << to_string(kind);
  }
  EXPECT_TRUE((mean_hv(s, 21).values == 0.0).all());
}

TEST(Estimators, ScaleAndDriftInvariance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = testing_support::random_series(rng, 40);
    auto scaled_bars = s.bars();
    for (auto& b : scaled_bars) {
      b.open *= 3.7;
      b.high *= 3.7;
      b.low *= 3.7;
      b.close *= 3.7;
    }
    const PriceSeries scaled("RND", scaled_bars);
    for (const auto kind : kEstimators) {
      const auto a = rolling(s, kind, 21).values;
      const auto b = rolling(scaled, kind, 21).values;
      EXPECT_LT(((a - b).abs() / a).maxCoeff(), 1e-12) << to_string(kind);
    }
  }
}

TEST(Estimators, MatchLoopImplementations) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testing_support::random_series(rng, 12);
    const auto all = s.bars();
    const std::vector<OhlcBar> window(all.begin() + 1, all.end());
    EXPECT_NEAR(parkinson(window), pk_loop(window), 1e-12 * pk_loop(window));
    EXPECT_NEAR(garman_klass(window), gk_loop(window), 1e-12 * gk_loop(window));
    EXPECT_NEAR(rogers_satchell(window), rs_loop(window), 1e-12 * rs_loop(window));
    EXPECT_NEAR(yang_zhang(all), yz_loop(all), 1e-12 * yz_loop(all));
  }
}

TEST(YangZhang, DecompositionAndWeightRange) {
  std::mt19937_64 rng(21);
  for (Eigen::Index n = 2; n <= 500; ++n) {
    const double k = yang_zhang_k(n);
    EXPECT_GT(k, 0.0);
    EXPECT_LE(k, 0.2537);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = testing_support::random_series(rng, 22);
    const auto c = yang_zhang_components(s.open(), s.high(), s.low(), s.close());
    const double yz = yang_zhang(s.open(), s.high(), s.low(), s.close());
    EXPECT_NEAR(yz * yz, c.overnight + c.k * c.open_to_close + (1 - c.k) * c.rogers_satchell, 1e-12 * yz * yz);
  }
}

TEST(YangZhang, WithinEnvelopeOfOtherEstimatorsOnRandomWalk) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = testing_support::random_series(rng, 30);
    const auto all = s.bars();
    const std::vector<OhlcBar> body(all.begin() + 1, all.end());
    const double others[] = {parkinson(body), garman_klass(body), rogers_satchell(body)};
    const double lo = *std::min_element(std::begin(others), std::end(others));
    const double hi = *std::max_element(std::begin(others), std::end(others));
    const double yz = yang_zhang(all);
    EXPECT_GE(yz, 0.5 * lo);
    EXPECT_LE(yz, 1.5 * hi);
  }
}

TEST(Rolling, LengthAndDates) {
  std::mt19937_64 rng(1);
  const auto s = testing_support::random_series(rng, 21);
  EXPECT_EQ(rolling(s, EstimatorKind::Parkinson, 21).size(), 1);
  EXPECT_EQ(rolling(s, EstimatorKind::Parkinson, 21).dates.front(), s.dates().back());
  EXPECT_THROW(rolling(s, EstimatorKind::YangZhang, 21), Error);

  const auto longer = testing_support::random_series(rng, 60);
  for (const auto kind : kEstimators) {
    const auto v = rolling(longer, kind, 21);
    EXPECT_EQ(v.size(), 60 - bars_per_window(kind, 21) + 1);
    EXPECT_EQ(v.dates.back(), longer.dates().back());
  }
}

TEST(Rolling, EachPointIsItsOwnWindow) {
  std::mt19937_64 rng(2);
  const auto s = testing_support::random_series(rng, 80);
  const auto bars = s.bars();
  const Eigen::Index n = 10;
  for (const auto kind : kEstimators) {
    const auto v = rolling(s, kind, n);
    const Eigen::Index span = bars_per_window(kind, n);
    for (Eigen::Index t = 0; t < v.size(); ++t) {
      const std::vector<OhlcBar> w(bars.begin() + t, bars.begin() + t + span);
      double expect = 0;
      switch (kind) {
        case EstimatorKind::Parkinson: expect = pk_loop(w); break;
        case EstimatorKind::GarmanKlass: expect = gk_loop(w); break;
        case EstimatorKind::RogersSatchell: expect = rs_loop(w); break;
        case EstimatorKind::YangZhang: expect = yz_loop(w); break;
      }
      EXPECT_NEAR(v.values(t), expect, 1e-12 * expect);
      EXPECT_EQ(v.dates[static_cast<std::size_t>(t)], w.back().date);
    }
  }
}

TEST(MeanHv, AverageOfTheFourOnCommonDates) {
  std::mt19937_64 rng(4);
  const auto s = testing_support::random_series(rng, 70);
  const auto m = mean_hv(s, 21);
  EXPECT_EQ(m.size(), 70 - 21);
  const auto pk = rolling(s, EstimatorKind::Parkinson, 21);
  const auto gk = rolling(s, EstimatorKind::GarmanKlass, 21);
  const auto rs = rolling(s, EstimatorKind::RogersSatchell, 21);
  const auto yz = rolling(s, EstimatorKind::YangZhang, 21);
  for (Eigen::Index t = 0; t < m.size(); ++t) {
    const auto& d = m.dates[static_cast<std::size_t>(t)];
    EXPECT_EQ(d, yz.dates[static_cast<std::size_t>(t)]);
    const auto at = [&](const VolSeries& v) {
      return v.values(std::find(v.dates.begin(), v.dates.end(), d) - v.dates.begin());
    };
    EXPECT_NEAR(m.values(t), (at(pk) + at(gk) + at(rs) + at(yz)) / 4.0, 1e-15);
  }
}

TEST(VolCsv, RoundTrip) {
  std::mt19937_64 rng(6);
  const auto s = testing_support::random_series(rng, 40);
  testing_support::TempDir dir("volts_vol");
  for (const auto& v : all_estimators(s, 21)) {
    write_vol_csv(v, dir.path / "v.csv");
    const auto back = read_vol_csv(dir.path / "v.csv");
    EXPECT_EQ(back.dates, v.dates);
    EXPECT_TRUE((back.values == v.values).all());
    EXPECT_EQ(back.label(), v.label());
  }
}
