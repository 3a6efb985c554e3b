#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support.hpp"
#include "volts/causality.hpp"
#include "volts/error.hpp"
#include "volts/special_functions.hpp"

using namespace volts;
using testing_support::data_path;
using testing_support::read_numeric_csv;

namespace {

Eigen::VectorXd noise(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

// y_t = beta * x_{t-lag} + e_t
std::pair<Eigen::VectorXd, Eigen::VectorXd> lagged_pair(std::mt19937_64& rng, Eigen::Index n, int lag,
                                                        double beta) {
  const Eigen::VectorXd x = noise(rng, n);
  Eigen::VectorXd y = noise(rng, n);
  for (Eigen::Index t = lag; t < n; ++t) y(t) += beta * x(t - lag);
  return {x, y};
}

GrangerEdge edge(const std::string& s, const std::string& t, double p) { return {s, t, 1, 1.0, p}; }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

}  // namespace

TEST(IncompleteBeta, ReferenceGrid) {
  for (const auto& r : read_numeric_csv(data_path("incomplete_beta_grid.csv"))) {
    const double got = incomplete_beta(r[0], r[1], r[2]);
    EXPECT_NEAR(got, r[3], 1e-8 * std::max(r[3], 1e-300)) << r[0] << " " << r[1] << " " << r[2];
  }
  EXPECT_EQ(incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(incomplete_beta(2, 3, 1.0), 1.0);
  EXPECT_THROW(incomplete_beta(0, 3, 0.5), Error);
  EXPECT_THROW(incomplete_beta(2, 3, 1.5), Error);
}

TEST(FSurvival, ReferenceGrid) {
  for (const auto& r : read_numeric_csv(data_path("f_survival_grid.csv"))) {
    const double got = f_survival(r[2], r[0], r[1]);
    EXPECT_NEAR(got, r[3], 1e-8 * r[3]) << "d1=" << r[0] << " d2=" << r[1] << " f=" << r[2];
  }
  EXPECT_EQ(f_survival(0.0, 3, 10), 1.0);
  EXPECT_EQ(f_survival(std::numeric_limits<double>::infinity(), 3, 10), 0.0);
}

TEST(FitAr, ConstantSeries) {
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(30, 4.25);
  const auto fit = fit_ar(y, 3);
  EXPECT_EQ(fit.rss, 0.0);
  EXPECT_DOUBLE_EQ(fit.coefficients(0), 4.25);
  EXPECT_TRUE((fit.coefficients.tail(3).array() == 0.0).all());
}

TEST(FitAr, MatchesLeastSquaresReference) {
  const auto rows = read_numeric_csv(data_path("granger_series.csv"));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = rows[i][1];
  const auto fit = fit_ar(y, 2);
  EXPECT_NEAR(fit.coefficients(0), -0.1896606882179713, 1e-12);
  EXPECT_NEAR(fit.coefficients(1), 0.2874128834622264, 1e-12);
  EXPECT_NEAR(fit.coefficients(2), -0.04302768614267427, 1e-12);
  EXPECT_NEAR(fit.rss, 249.8879228053718, 1e-9);
}

TEST(FitAr, RecoversAr1) {
  std::mt19937_64 rng(31);
  const Eigen::VectorXd e = noise(rng, 1000);
  Eigen::VectorXd y(1000);
  y(0) = e(0);
  for (Eigen::Index t = 1; t < 1000; ++t) y(t) = 0.5 * y(t - 1) + e(t);
  EXPECT_NEAR(fit_ar(y, 1).coefficients(1), 0.5, 0.1);
}

TEST(FitAr, LengthRules) {
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(7, 0, 1).array().sin();
  EXPECT_EQ(code_of([&] { fit_ar(y.head(7), 3); }), ErrorCode::SeriesTooShort);  // 7 <= 2*3+1
  std::mt19937_64 rng(9);
  EXPECT_NO_THROW(fit_ar(noise(rng, 8), 3));
  EXPECT_EQ(code_of([&] { fit_ar(y, 0); }), ErrorCode::InvalidArgument);
}

TEST(FitAr, CollinearRegressorsAreSingular) {
  std::mt19937_64 rng(2);
  const Eigen::VectorXd y = noise(rng, 60);
  const Eigen::VectorXd x = 2.0 * y.array() + 1.0;  // x lags duplicate y lags
  EXPECT_EQ(code_of([&] { fit_ar(y, 2, x); }), ErrorCode::SingularDesign);
}

TEST(Granger, MatchesStatsmodelsReference) {
  const auto rows = read_numeric_csv(data_path("granger_series.csv"));
  Eigen::VectorXd x(static_cast<Eigen::Index>(rows.size())), y(x.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x(static_cast<Eigen::Index>(i)) = rows[i][0];
    y(static_cast<Eigen::Index>(i)) = rows[i][1];
  }
  for (const auto& r : read_numeric_csv(data_path("granger_reference.csv"))) {
    const auto g = granger_f(x, y, static_cast<int>(r[0]));
    EXPECT_NEAR(g.f_stat, r[1], 1e-9 * r[1]);
    EXPECT_NEAR(g.p_value, r[2], 1e-8 * r[2]);
    EXPECT_EQ(g.df_num, static_cast<Eigen::Index>(r[3]));
    EXPECT_EQ(g.df_den, static_cast<Eigen::Index>(r[4]));
    EXPECT_NEAR(g.rss_restricted, r[5], 1e-10 * r[5]);
    EXPECT_NEAR(g.rss_unrestricted, r[6], 1e-10 * r[6]);
  }
}

TEST(Granger, NestedRss) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> lag(1, 8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto [x, y] = lagged_pair(rng, 80, 2, trial % 2 ? 0.5 : 0.0);
    const auto g = granger_f(x, y, lag(rng));
    EXPECT_LE(g.rss_unrestricted, g.rss_restricted);
    EXPECT_GE(g.f_stat, 0.0);
    EXPECT_GE(g.p_value, 0.0);
    EXPECT_LE(g.p_value, 1.0);
  }
}

TEST(Granger, PlantedLagFive) {
  std::mt19937_64 rng(51);
  const auto [x, y] = lagged_pair(rng, 500, 5, 0.8);
  EXPECT_LT(granger_f(x, y, 5).p_value, 1e-4);
}

TEST(Granger, SizeOnIndependentNoise) {
  std::mt19937_64 rng(61);
  int rejections = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd x = noise(rng, 500);
    const Eigen::VectorXd y = noise(rng, 500);
    if (granger_f(x, y, 5).p_value < 0.05) ++rejections;
  }
  EXPECT_GE(rejections, 2);
  EXPECT_LE(rejections, 24);
}

TEST(Granger, NothingAddedGivesZeroF) {
  // y is an exact AR(2); x lags cannot improve a zero residual.
  Eigen::VectorXd y(40);
  y(0) = 1.0;
  y(1) = -0.5;
  for (Eigen::Index t = 2; t < 40; ++t) y(t) = 0.5 * y(t - 1) - 0.3 * y(t - 2) + 0.2;
  std::mt19937_64 rng(3);
  const auto g = granger_f(noise(rng, 40), y, 2);
  EXPECT_EQ(g.f_stat, 0.0);
  EXPECT_EQ(g.p_value, 1.0);
}

TEST(Granger, Rejections) {
  std::mt19937_64 rng(4);
  const Eigen::VectorXd x = noise(rng, 20);
  EXPECT_EQ(code_of([&] { granger_f(x, Eigen::VectorXd::Constant(20, 2.0), 2); }), ErrorCode::DegenerateVariance);
  EXPECT_EQ(code_of([&] { granger_f(x, noise(rng, 20), 7); }), ErrorCode::SeriesTooShort);
}

TEST(PairScan, ChainAtLagThree) {
  std::mt19937_64 rng(71);
  const Eigen::Index n = 600;
  Eigen::MatrixXd data(n, 3);
  data.col(0) = noise(rng, n);
  data.col(1) = noise(rng, n);
  data.col(2) = noise(rng, n);
  for (Eigen::Index t = 3; t < n; ++t) {
    data(t, 1) += 0.7 * data(t - 3, 0);
    data(t, 2) += 0.7 * data(t - 3, 1);
  }
  const auto scan = pair_scan({"A", "B", "C"}, data, 3, kScanThreshold);
  const auto has = [&](const std::string& name) {
    return std::any_of(scan.edges.begin(), scan.edges.end(), [&](const GrangerEdge& e) { return e.name() == name; });
  };
  EXPECT_TRUE(has("A->B"));
  EXPECT_TRUE(has("B->C"));
  EXPECT_TRUE(std::is_sorted(scan.edges.begin(), scan.edges.end(), [](const GrangerEdge& a, const GrangerEdge& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  }));
}

TEST(PairScan, EdgeCases) {
  std::mt19937_64 rng(72);
  Eigen::MatrixXd one(100, 1);
  one.col(0) = noise(rng, 100);
  EXPECT_TRUE(pair_scan({"A"}, one, 2, kScanThreshold).edges.empty());

  Eigen::MatrixXd with_constant(100, 2);
  with_constant.col(0) = noise(rng, 100);
  with_constant.col(1).setConstant(3.0);
  const auto scan = pair_scan({"A", "K"}, with_constant, 2, kScanThreshold);
  ASSERT_EQ(scan.skipped.size(), 1u);
  EXPECT_EQ(scan.skipped[0].target, "K");
}

TEST(PairScan, FalseEdgeRateOnNoise) {
  std::mt19937_64 rng(73);
  int edges = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::MatrixXd data(300, 2);
    data.col(0) = noise(rng, 300);
    data.col(1) = noise(rng, 300);
    edges += static_cast<int>(pair_scan({"A", "B"}, data, 3, kScanThreshold).edges.size());
  }
  // Two ordered pairs per trial at 2.5% each.
  EXPECT_LT(edges / double(trials), 0.12);
}

TEST(PairScan, ParallelMatchesSerial) {
  std::mt19937_64 rng(74);
  Eigen::MatrixXd data(200, 5);
  for (Eigen::Index c = 0; c < 5; ++c) data.col(c) = noise(rng, 200);
  for (Eigen::Index t = 2; t < 200; ++t) data(t, 3) += 0.9 * data(t - 2, 1);
  const std::vector<std::string> names = {"A", "B", "C", "D", "E"};
  EXPECT_EQ(pair_scan(names, data, 2, 0.5, 1).edges, pair_scan(names, data, 2, 0.5, 3).edges);
}

TEST(Prune, AcyclicUnchanged) {
  const std::vector<GrangerEdge> edges = {edge("A", "B", 0.01), edge("B", "C", 0.02), edge("A", "C", 0.001)};
  const auto r = prune_to_dag(edges);
  EXPECT_EQ(r.edges, edges);
  EXPECT_TRUE(r.removed.empty());
  EXPECT_TRUE(prune_to_dag({}).edges.empty());
}

TEST(Prune, TwoCycleDropsWeakerEdge) {
  const auto r = prune_to_dag({edge("A", "B", 0.001), edge("B", "A", 0.02)});
  ASSERT_EQ(r.edges.size(), 1u);
  EXPECT_EQ(r.edges[0].name(), "A->B");
  ASSERT_EQ(r.removed.size(), 1u);
  EXPECT_EQ(r.removed[0].name(), "B->A");
}

TEST(Prune, RandomGraphsFollowTheRemovalRule) {
  // Replays the pruning: each removed edge must sit on a cycle of the edges
  // left at that point and carry the largest p-value among such edges.
  const auto on_cycle = [](const std::vector<GrangerEdge>& edges, const GrangerEdge& e) {
    std::set<std::string> seen = {e.target};
    std::vector<std::string> stack = {e.target};
    while (!stack.empty()) {
      const auto at = stack.back();
      stack.pop_back();
      if (at == e.source) return true;
      for (const auto& f : edges) {
        if (f.source == at && seen.insert(f.target).second) stack.push_back(f.target);
      }
    }
    return false;
  };
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(0, 1);
  const std::vector<std::string> names = {"A", "B", "C", "D", "E", "F"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GrangerEdge> edges;
    for (const auto& s : names) {
      for (const auto& t : names) {
        if (s != t && u(rng) < 0.25) edges.push_back(edge(s, t, u(rng) * 0.025));
      }
    }
    const auto r = prune_to_dag(edges);
    EXPECT_TRUE(is_acyclic(r.edges));
    EXPECT_EQ(r.edges.size() + r.removed.size(), edges.size());
    auto remaining = edges;
    for (const auto& gone : r.removed) {
      ASSERT_TRUE(on_cycle(remaining, gone));
      for (const auto& other : remaining) {
        if (on_cycle(remaining, other)) EXPECT_LE(other.p_value, gone.p_value);
      }
      std::erase(remaining, gone);
    }
    EXPECT_EQ(remaining, r.edges);
  }
}

TEST(LagSweep, PicksThePlantedLag) {
  std::mt19937_64 rng(91);
  const auto [x, y] = lagged_pair(rng, 500, 5, 0.8);
  Eigen::MatrixXd data(500, 2);
  data.col(0) = x;
  data.col(1) = y;
  const auto sweep = lag_sweep({"X", "Y"}, data, 2, 10, kScanThreshold);
  EXPECT_EQ(sweep.graph.lag, 5);
  ASSERT_EQ(sweep.graph.edges.size(), 1u);
  EXPECT_EQ(sweep.graph.edges[0].name(), "X->Y");
  EXPECT_EQ(sweep.scores.size(), 9u);
  EXPECT_TRUE(sweep.graph.is_acyclic);
}

TEST(LagSweep, NoiseUsuallyHasNoEdges) {
  std::mt19937_64 rng(92);
  int empty = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd data(200, 2);
    data.col(0) = noise(rng, 200);
    data.col(1) = noise(rng, 200);
    try {
      lag_sweep({"A", "B"}, data, 2, 4, kScanThreshold);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NoSignificantEdges);
      ++empty;
    }
  }
  EXPECT_GE(empty, 12);
}

TEST(LagSweep, TooShortForMaxLag) {
  Eigen::MatrixXd data = Eigen::MatrixXd::Random(40, 2);
  EXPECT_EQ(code_of([&] { lag_sweep({"A", "B"}, data, 2, 30, kScanThreshold); }), ErrorCode::SeriesTooShort);
}

TEST(Graph, JsonRoundTripAndDot) {
  CausalGraph g;
  g.lag = 5;
  g.edges = {GrangerEdge{"AMZN", "META", 5, 12.5, 1e-6}, GrangerEdge{"META", "QCOM", 5, 4.25, 0.004}};
  g.nodes = {"AMZN", "META", "QCOM"};
  g.pruned = {GrangerEdge{"QCOM", "AMZN", 5, 3.0, 0.02}};
  const auto back = graph_from_json_text(to_json_text(g));
  EXPECT_EQ(back.lag, 5);
  EXPECT_EQ(back.edges, g.edges);
  EXPECT_EQ(back.nodes, g.nodes);
  EXPECT_EQ(back.pruned, g.pruned);
  const auto dot = to_dot(g);
  EXPECT_NE(dot.find("\"AMZN\" -> \"META\""), std::string::npos);
}
