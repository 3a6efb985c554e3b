#include <gtest/gtest.h>

#include <functional>
#include <numeric>
#include <random>

#include "support.hpp"
#include "volts/clustering.hpp"
#include "volts/dtw.hpp"

using namespace volts;

namespace {

// Minimum cost over every monotone warping path, by explicit recursion.
double dtw_paths(const std::vector<double>& a, const std::vector<double>& b, std::size_t i = 0,
                 std::size_t j = 0) {
  const double here = std::abs(a[i] - b[j]);
  if (i + 1 == a.size() && j + 1 == b.size()) return here;
  double best = std::numeric_limits<double>::infinity();
  if (i + 1 < a.size()) best = std::min(best, dtw_paths(a, b, i + 1, j));
  if (j + 1 < b.size()) best = std::min(best, dtw_paths(a, b, i, j + 1));
  if (i + 1 < a.size() && j + 1 < b.size()) best = std::min(best, dtw_paths(a, b, i + 1, j + 1));
  return here + best;
}

Eigen::ArrayXd arr(std::initializer_list<double> v) {
  Eigen::ArrayXd a(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), a.begin());
  return a;
}

VolSeries vs(const std::string& ticker, const Eigen::ArrayXd& values) {
  VolSeries s;
  s.ticker = ticker;
  s.values = values;
  s.dates = testing_support::days(static_cast<int>(values.size()));
  return s;
}

// Best k-medoid cost over every partition of n items into k non-empty groups.
double optimal_inertia(const Eigen::MatrixXd& d, int k) {
  const int n = static_cast<int>(d.rows());
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  double best = std::numeric_limits<double>::infinity();
  const std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      double total = 0;
      for (int c = 0; c < k; ++c) {
        double cluster_best = std::numeric_limits<double>::infinity();
        bool any = false;
        for (int m = 0; m < n; ++m) {
          if (assign[m] != c) continue;
          any = true;
          double s = 0;
          for (int j = 0; j < n; ++j) {
            if (assign[j] == c) s += d(m, j);
          }
          cluster_best = std::min(cluster_best, s);
        }
        if (!any) return;
        total += cluster_best;
      }
      best = std::min(best, total);
      return;
    }
    for (int c = 0; c < k; ++c) {
      assign[static_cast<std::size_t>(i)] = c;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

std::vector<VolSeries> planted_levels(std::mt19937_64& rng, double noise, int length = 40) {
  std::normal_distribution<double> normal;
  std::vector<VolSeries> out;
  const double levels[] = {1.0, 3.0, 9.0};
  for (int g = 0; g < 3; ++g) {
    for (int m = 0; m < 3; ++m) {
      Eigen::ArrayXd v(length);
      for (auto& x : v) x = levels[g] * (1.0 + noise * normal(rng));
      out.push_back(vs("S" + std::to_string(3 * g + m), v));
    }
  }
  return out;
}

}  // namespace

TEST(Dtw, Examples) {
  EXPECT_EQ(dtw(arr({0, 0, 0}), arr({1, 1, 1})), 3.0);
  EXPECT_EQ(dtw(arr({1, 2, 3}), arr({1, 2, 2, 3})), 0.0);
  EXPECT_EQ(dtw(arr({4, 1, 5}), arr({4, 1, 5})), 0.0);
}

TEST(Dtw, MatchesPathEnumeration) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2, 2);
  std::uniform_int_distribution<int> len(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(len(rng))), b(static_cast<std::size_t>(len(rng)));
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    const Eigen::Map<const Eigen::ArrayXd> ea(a.data(), static_cast<Eigen::Index>(a.size()));
    const Eigen::Map<const Eigen::ArrayXd> eb(b.data(), static_cast<Eigen::Index>(b.size()));
    EXPECT_NEAR(dtw(ea, eb), dtw_paths(a, b), 1e-12);
    EXPECT_EQ(dtw(ea, eb), dtw(eb, ea));
  }
}

TEST(Dtw, BandBehaviour) {
  const auto a = arr({1, 2, 3, 4, 5});
  const auto b = arr({1, 1, 2, 3, 4, 5});
  EXPECT_EQ(dtw(a, b, {.band = 5}), dtw(a, b));
  EXPECT_GE(dtw(a, b, {.band = 1}), dtw(a, b));
  // Radius 0 on equal lengths is the lock-step sum.
  const auto c = arr({2, 2, 2, 2, 2});
  EXPECT_DOUBLE_EQ(dtw(a, c, {.band = 0}), (a - c).abs().sum());
  EXPECT_LE(dtw(a, c), (a - c).abs().sum());
  EXPECT_THROW(dtw(a, arr({1, 2, 3, 4, 5, 6, 7, 8}), {.band = 2}), Error);
  EXPECT_THROW(dtw(Eigen::ArrayXd(), a), Error);
}

TEST(Seeds, EverySeriesWhenKEqualsCount) {
  std::mt19937_64 rng(1);
  const auto s = planted_levels(rng, 0.05);
  auto seeds = seed_centroids(s, 9);
  std::sort(seeds.begin(), seeds.end());
  for (Eigen::Index i = 0; i < 9; ++i) EXPECT_EQ(seeds[static_cast<std::size_t>(i)], i);
  EXPECT_THROW(seed_centroids(s, 10), Error);
}

TEST(Seeds, SingleSeedHasLargestTotalDistance) {
  std::mt19937_64 rng(2);
  const auto s = planted_levels(rng, 0.1);
  const auto d = distance_matrix(s);
  Eigen::Index expect = 0;
  d.rowwise().sum().maxCoeff(&expect);
  EXPECT_EQ(seed_centroids(d, 1), std::vector<Eigen::Index>{expect});
}

TEST(Seeds, TwoNearOneFar) {
  const std::vector<VolSeries> s = {vs("A", arr({1.0, 1.0, 1.0})), vs("B", arr({1.1, 1.0, 1.0})),
                                    vs("C", arr({5.0, 5.0, 5.0}))};
  // C has the largest total distance; A is farther from C than B is.
  EXPECT_EQ(seed_centroids(s, 2), (std::vector<Eigen::Index>{2, 0}));
}

TEST(Seeds, LaterSeedsMaximiseDistanceToNearestSeed) {
  std::mt19937_64 rng(3);
  const auto d = distance_matrix(planted_levels(rng, 0.05));
  const auto seeds = seed_centroids(d, 3);
  // Third seed: no unchosen series is farther from both earlier seeds.
  const auto gap = [&](Eigen::Index i) { return std::min(d(i, seeds[0]), d(i, seeds[1])); };
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (i == seeds[0] || i == seeds[1]) continue;
    EXPECT_LE(gap(i), gap(seeds[2]));
  }
}

TEST(Kmeans, ConstantLevelsSeparate) {
  std::vector<VolSeries> s;
  for (int g = 0; g < 3; ++g) {
    for (int m = 0; m < 3; ++m) s.push_back(vs("S" + std::to_string(3 * g + m), Eigen::ArrayXd::Constant(10, 1.0 + 2.0 * g)));
  }
  const auto r = kmeans_dtw(s, 3, 100);
  for (int g = 0; g < 3; ++g) {
    EXPECT_EQ(r.assignments[3 * g], r.assignments[3 * g + 1]);
    EXPECT_EQ(r.assignments[3 * g], r.assignments[3 * g + 2]);
  }
  EXPECT_NE(r.assignments[0], r.assignments[3]);
  EXPECT_NE(r.assignments[3], r.assignments[6]);
  EXPECT_NE(r.assignments[0], r.assignments[6]);
  EXPECT_EQ(r.inertia, 0.0);
  EXPECT_EQ(pick_mid_cluster(r, s), (std::vector<std::string>{"S3", "S4", "S5"}));
}

TEST(Kmeans, SingleClusterUsesGlobalMedoid) {
  std::mt19937_64 rng(4);
  const auto s = planted_levels(rng, 0.1);
  const auto d = distance_matrix(s);
  const auto r = kmeans_dtw(s, 1, 50);
  Eigen::Index medoid = 0;
  d.rowwise().sum().minCoeff(&medoid);
  EXPECT_EQ(r.medoids[0], medoid);
  EXPECT_TRUE(std::all_of(r.assignments.begin(), r.assignments.end(), [](int a) { return a == 0; }));
  EXPECT_THROW(pick_mid_cluster(r, s), Error);
}

TEST(Kmeans, DuplicatesCoCluster) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = planted_levels(rng, 0.3);
    s.push_back(s[static_cast<std::size_t>(trial % 9)]);
    s.back().ticker = "DUP";
    const auto r = kmeans_dtw(s, 3, 100);
    EXPECT_EQ(r.assignments.back(), r.assignments[static_cast<std::size_t>(trial % 9)]);
  }
}

TEST(Kmeans, InertiaNeverRisesAndNearOptimal) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = planted_levels(rng, 0.15, 25);
    const auto d = distance_matrix(s);
    const auto r = kmeans_dtw(s, 3, 100);
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
      EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1] + 1e-12);
    }
    EXPECT_LE(r.iterations, 100);
    EXPECT_LE(r.inertia, 1.10 * optimal_inertia(d, 3));
  }
}

TEST(Kmeans, DeterministicAndParallelAgree) {
  std::mt19937_64 rng(7);
  const auto s = planted_levels(rng, 0.2);
  const auto a = kmeans_dtw(s, 3, 100);
  const auto b = kmeans_dtw(s, 3, 100, {}, 4);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.medoids, b.medoids);
  EXPECT_EQ(a.inertia, b.inertia);
}

TEST(PickMid, OrderedByLevel) {
  const std::vector<VolSeries> s = {vs("A", arr({0.9})), vs("B", arr({0.1})), vs("C", arr({0.5}))};
  const auto r = kmeans_dtw(s, 3, 10);
  EXPECT_EQ(pick_mid_cluster(r, s), std::vector<std::string>{"C"});
  EXPECT_FALSE(r.label_tie);
}

TEST(PickMid, TieGoesToMedoidSortingFirst) {
  // Two far-apart clusters share a mean level; a third sits below.
  Eigen::MatrixXd d(3, 3);
  d << 0, 5, 6, 5, 0, 7, 6, 7, 0;
  const std::vector<std::string> tickers = {"ZED", "LOW", "ALF"};
  const auto r = kmeans_dtw(d, tickers, {0.5, 0.1, 0.5}, 3, 10);
  EXPECT_TRUE(r.label_tie);
  std::vector<VolSeries> s = {vs("ZED", arr({0.5})), vs("LOW", arr({0.1})), vs("ALF", arr({0.5}))};
  EXPECT_EQ(pick_mid_cluster(r, s), std::vector<std::string>{"ALF"});
}

TEST(Kmeans, TooFewSeries) {
  const std::vector<VolSeries> s = {vs("A", arr({1})), vs("B", arr({2}))};
  EXPECT_THROW(kmeans_dtw(s, 3, 10), Error);
}
