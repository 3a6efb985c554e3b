#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace volts {

struct ArFit {
  // intercept, then y lags 1..p, then (unrestricted only) x lags 1..p
  Eigen::VectorXd coefficients;
  double rss = 0.0;
  Eigen::Index n_obs = 0;
  Eigen::Index rank = 0;
};

// OLS of y_t on [1, y_{t-1..t-p}] (and x_{t-1..t-p} when x is given) over
// rows t = p .. n-1. Regressors are centred before a column-pivoted QR; a
// regressor with zero variance gets a zero coefficient. Throws
// SeriesTooShort (n <= 2p + 1), SingularDesign (collinear non-constant
// regressors), InvalidArgument (p < 1, size mismatch).
ArFit fit_ar(const Eigen::Ref<const Eigen::VectorXd>& y, int p,
             const std::optional<Eigen::VectorXd>& x = std::nullopt);

struct GrangerTest {
  double f_stat = 0.0;
  double p_value = 1.0;
  double rss_restricted = 0.0;
  double rss_unrestricted = 0.0;
  Eigen::Index df_num = 0;
  Eigen::Index df_den = 0;
};

// SSR-based F test of "x does not Granger-cause y" at lag p with
// F(p, n_obs - 2p - 1). Throws SeriesTooShort, DegenerateVariance (y
// constant), SingularDesign.
GrangerTest granger_f(const Eigen::Ref<const Eigen::VectorXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y, int p);

struct GrangerEdge {
  std::string source;  // cause X
  std::string target;  // effect Y
  int lag = 0;
  double f_stat = 0.0;
  double p_value = 1.0;

  std::string name() const { return source + "->" + target; }
  friend bool operator==(const GrangerEdge&, const GrangerEdge&) = default;
};

struct SkippedPair {
  std::string source;
  std::string target;
  std::string reason;
};

struct PairScan {
  std::vector<GrangerEdge> edges;  // sorted by (source, target)
  std::vector<SkippedPair> skipped;
};

inline constexpr double kScanThreshold = 0.025;
inline constexpr double kAlphaText = 0.05;

// Every ordered pair (X, Y), X != Y, tested at lag p; edges with
// p_value < threshold are kept. Per-pair failures are recorded as skipped.
// `data` holds one column per ticker.
PairScan pair_scan(const std::vector<std::string>& tickers,
                   const Eigen::Ref<const Eigen::MatrixXd>& data, int p, double threshold,
                   int workers = 1);

struct DagPruning {
  std::vector<GrangerEdge> edges;
  std::vector<GrangerEdge> removed;
};

// While a cycle exists, drop the edge with the highest p-value among the
// edges lying on some cycle (ties: lexicographically last name).
DagPruning prune_to_dag(std::vector<GrangerEdge> edges);

bool is_acyclic(const std::vector<GrangerEdge>& edges);

struct CausalGraph {
  int lag = 0;
  std::vector<GrangerEdge> edges;
  std::vector<std::string> nodes;  // sorted union of endpoints
  bool is_acyclic = true;
  std::vector<GrangerEdge> pruned;
};

struct LagScore {
  int lag = 0;
  std::size_t raw_edges = 0;
  std::size_t dag_nodes = 0;
  std::size_t dag_edges = 0;
  std::size_t skipped = 0;
};

struct LagSweep {
  CausalGraph graph;
  std::vector<LagScore> scores;
};

// Scans each lag in [min_lag, max_lag], prunes to a DAG, and keeps the lag
// maximizing (DAG node count, DAG edge count), ties to the smaller lag.
// Throws NoSignificantEdges, InvalidArgument.
LagSweep lag_sweep(const std::vector<std::string>& tickers,
                   const Eigen::Ref<const Eigen::MatrixXd>& data, int min_lag, int max_lag,
                   double threshold, int workers = 1);

std::string to_json_text(const CausalGraph& graph);
std::string to_dot(const CausalGraph& graph);
CausalGraph graph_from_json_text(const std::string& text);

}  // namespace volts
