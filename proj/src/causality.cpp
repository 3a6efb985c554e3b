#include "volts/causality.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "parallel.hpp"
#include "volts/error.hpp"
#include "volts/special_functions.hpp"

namespace volts {

namespace {

// A residual sum of squares this small relative to the total sum of squares
// is an exact fit up to rounding.
constexpr double kExactFit = 1e-20;

bool is_constant(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double mean = v.mean();
  const double spread = (v.array() - mean).abs().maxCoeff();
  return spread <= 1e-12 * std::max(std::abs(mean), 1e-300);
}

}  // namespace

ArFit fit_ar(const Eigen::Ref<const Eigen::VectorXd>& y, int p,
             const std::optional<Eigen::VectorXd>& x) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "lag must be >= 1");
  const Eigen::Index n = y.size();
  if (x && x->size() != n) throw Error(ErrorCode::InvalidArgument, "x and y differ in length");

  const Eigen::Index blocks = x ? 2 : 1;
  const Eigen::Index params = 1 + blocks * p;
  const Eigen::Index rows = n - p;
  if (rows <= params) {
    throw Error(ErrorCode::SeriesTooShort,
                fmt::format("{} observations cannot fit {} parameters at lag {}", n, params, p));
  }

  Eigen::MatrixXd design(rows, blocks * p);
  for (int lag = 1; lag <= p; ++lag) {
    design.col(lag - 1) = y.segment(p - lag, rows);
    if (x) design.col(p + lag - 1) = x->segment(p - lag, rows);
  }
  const Eigen::VectorXd target = y.tail(rows);

  // Centre everything so the intercept drops out of the solve; constant
  // regressors then become zero columns and are left out.
  const Eigen::RowVectorXd means = design.colwise().mean();
  const double target_mean = target.mean();
  std::vector<Eigen::Index> active;
  for (Eigen::Index c = 0; c < design.cols(); ++c) {
    if (!is_constant(design.col(c))) active.push_back(c);
  }

  ArFit fit;
  fit.n_obs = rows;
  fit.coefficients = Eigen::VectorXd::Zero(params);
  const Eigen::VectorXd centred_target = target.array() - target_mean;

  Eigen::VectorXd residual = centred_target;
  if (!active.empty()) {
    Eigen::MatrixXd centred(rows, static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      centred.col(static_cast<Eigen::Index>(k)) =
          design.col(active[k]).array() - means(active[k]);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(centred);
    fit.rank = qr.rank();
    if (fit.rank < centred.cols()) {
      const auto r = qr.matrixR().diagonal().cwiseAbs();
      throw Error(ErrorCode::SingularDesign,
                  fmt::format("rank {} of {} regressors; |R| diagonal max {:.3e}, min {:.3e}", fit.rank,
                              centred.cols(), r.maxCoeff(), r.minCoeff()));
    }
    const Eigen::VectorXd beta = qr.solve(centred_target);
    residual -= centred * beta;
    double intercept = target_mean;
    for (std::size_t k = 0; k < active.size(); ++k) {
      fit.coefficients(1 + active[k]) = beta(static_cast<Eigen::Index>(k));
      intercept -= beta(static_cast<Eigen::Index>(k)) * means(active[k]);
    }
    fit.coefficients(0) = intercept;
  } else {
    fit.coefficients(0) = target_mean;
  }
  fit.rss = residual.squaredNorm();
  return fit;
}

GrangerTest granger_f(const Eigen::Ref<const Eigen::VectorXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y, int p) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "x and y differ in length");
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "lag must be >= 1");
  if (y.size() <= 3 * Eigen::Index{p} + 1) {
    throw Error(ErrorCode::SeriesTooShort,
                fmt::format("{} observations leave no residual degrees of freedom at lag {}", y.size(), p));
  }
  if (is_constant(y)) throw Error(ErrorCode::DegenerateVariance, "target series is constant");

  const ArFit restricted = fit_ar(y, p);
  const ArFit unrestricted = fit_ar(y, p, Eigen::VectorXd(x));

  GrangerTest t;
  t.rss_restricted = restricted.rss;
  t.rss_unrestricted = unrestricted.rss;
  t.df_num = p;
  t.df_den = unrestricted.n_obs - 2 * p - 1;

  const Eigen::VectorXd tail = y.tail(unrestricted.n_obs);
  const double tss = (tail.array() - tail.mean()).square().sum();
  const double gain = std::max(0.0, t.rss_restricted - t.rss_unrestricted);
  if (t.rss_restricted <= kExactFit * tss || gain == 0.0) {
    t.f_stat = 0.0;
    t.p_value = 1.0;
  } else if (t.rss_unrestricted <= kExactFit * tss) {
    t.f_stat = std::numeric_limits<double>::infinity();
    t.p_value = 0.0;
  } else {
    t.f_stat = (gain / double(t.df_num)) / (t.rss_unrestricted / double(t.df_den));
    t.p_value = f_survival(t.f_stat, double(t.df_num), double(t.df_den));
  }
  return t;
}

PairScan pair_scan(const std::vector<std::string>& tickers,
                   const Eigen::Ref<const Eigen::MatrixXd>& data, int p, double threshold,
                   int workers) {
  if (static_cast<Eigen::Index>(tickers.size()) != data.cols()) {
    throw Error(ErrorCode::InvalidArgument, "ticker count does not match data columns");
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < data.cols(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }

  struct Outcome {
    std::optional<GrangerTest> test;
    std::string error;
  };
  std::vector<Outcome> outcomes(pairs.size());
  detail::parallel_for(pairs.size(), workers, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    try {
      outcomes[k].test = granger_f(data.col(i), data.col(j), p);
    } catch (const Error& e) {
      outcomes[k].error = e.what();
    }
  });

  PairScan scan;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& source = tickers[static_cast<std::size_t>(pairs[k].first)];
    const auto& target = tickers[static_cast<std::size_t>(pairs[k].second)];
    if (!outcomes[k].test) {
      scan.skipped.push_back({source, target, outcomes[k].error});
      continue;
    }
    if (outcomes[k].test->p_value < threshold) {
      scan.edges.push_back({source, target, p, outcomes[k].test->f_stat, outcomes[k].test->p_value});
    }
  }
  const auto by_name = [](const auto& a, const auto& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  };
  std::sort(scan.edges.begin(), scan.edges.end(), by_name);
  std::sort(scan.skipped.begin(), scan.skipped.end(), by_name);
  return scan;
}

namespace {

using Adjacency = std::map<std::string, std::set<std::string>>;

Adjacency adjacency_of(const std::vector<GrangerEdge>& edges) {
  Adjacency adj;
  for (const auto& e : edges) adj[e.source].insert(e.target);
  return adj;
}

bool reaches(const Adjacency& adj, const std::string& from, const std::string& to) {
  std::set<std::string> seen;
  std::vector<std::string> stack = {from};
  while (!stack.empty()) {
    const auto node = stack.back();
    stack.pop_back();
    if (node == to) return true;
    if (!seen.insert(node).second) continue;
    const auto it = adj.find(node);
    if (it == adj.end()) continue;
    for (const auto& next : it->second) stack.push_back(next);
  }
  return false;
}

}  // namespace

bool is_acyclic(const std::vector<GrangerEdge>& edges) {
  std::map<std::string, int> indegree;
  const auto adj = adjacency_of(edges);
  for (const auto& e : edges) {
    indegree.try_emplace(e.source, 0);
    ++indegree[e.target];
  }
  std::vector<std::string> ready;
  for (const auto& [node, deg] : indegree) {
    if (deg == 0) ready.push_back(node);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto node = ready.back();
    ready.pop_back();
    ++visited;
    const auto it = adj.find(node);
    if (it == adj.end()) continue;
    for (const auto& next : it->second) {
      if (--indegree[next] == 0) ready.push_back(next);
    }
  }
  return visited == indegree.size();
}

DagPruning prune_to_dag(std::vector<GrangerEdge> edges) {
  DagPruning out;
  while (true) {
    const auto adj = adjacency_of(edges);
    std::optional<std::size_t> worst;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      // u -> v lies on a cycle iff v reaches u.
      if (!reaches(adj, edges[k].target, edges[k].source)) continue;
      if (!worst || edges[k].p_value > edges[*worst].p_value ||
          (edges[k].p_value == edges[*worst].p_value && edges[k].name() > edges[*worst].name())) {
        worst = k;
      }
    }
    if (!worst) break;
    out.removed.push_back(edges[*worst]);
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(*worst));
  }
  out.edges = std::move(edges);
  return out;
}

namespace {

std::vector<std::string> nodes_of(const std::vector<GrangerEdge>& edges) {
  std::set<std::string> nodes;
  for (const auto& e : edges) {
    nodes.insert(e.source);
    nodes.insert(e.target);
  }
  return {nodes.begin(), nodes.end()};
}

}  // namespace

LagSweep lag_sweep(const std::vector<std::string>& tickers,
                   const Eigen::Ref<const Eigen::MatrixXd>& data, int min_lag, int max_lag,
                   double threshold, int workers) {
  if (min_lag < 1 || max_lag < min_lag) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("bad lag range [{}, {}]", min_lag, max_lag));
  }
  if (data.rows() <= 3 * Eigen::Index{max_lag} + 1) {
    throw Error(ErrorCode::SeriesTooShort,
                fmt::format("{} rows are too few for lag {}", data.rows(), max_lag));
  }

  LagSweep sweep;
  std::optional<DagPruning> best;
  for (int lag = min_lag; lag <= max_lag; ++lag) {
    const PairScan scan = pair_scan(tickers, data, lag, threshold, workers);
    DagPruning dag = prune_to_dag(scan.edges);
    LagScore score{lag, scan.edges.size(), nodes_of(dag.edges).size(), dag.edges.size(),
                   scan.skipped.size()};
    sweep.scores.push_back(score);
    if (!best) {
      best = std::move(dag);
      sweep.graph.lag = lag;
      continue;
    }
    const auto current_nodes = nodes_of(best->edges).size();
    if (std::make_pair(score.dag_nodes, score.dag_edges) >
        std::make_pair(current_nodes, best->edges.size())) {
      best = std::move(dag);
      sweep.graph.lag = lag;
    }
  }

  if (!best || best->edges.empty()) {
    throw Error(ErrorCode::NoSignificantEdges,
                fmt::format("no lag in [{}, {}] produced an edge below {}", min_lag, max_lag, threshold));
  }
  sweep.graph.edges = best->edges;
  sweep.graph.pruned = best->removed;
  sweep.graph.nodes = nodes_of(sweep.graph.edges);
  sweep.graph.is_acyclic = is_acyclic(sweep.graph.edges);
  return sweep;
}

namespace {

nlohmann::ordered_json edge_json(const GrangerEdge& e) {
  nlohmann::ordered_json j;
  j["source"] = e.source;
  j["target"] = e.target;
  j["lag"] = e.lag;
  j["f_stat"] = e.f_stat;
  j["p_value"] = e.p_value;
  return j;
}

GrangerEdge edge_from(const nlohmann::json& j) {
  return {j.at("source").get<std::string>(), j.at("target").get<std::string>(), j.at("lag").get<int>(),
          j.at("f_stat").get<double>(), j.at("p_value").get<double>()};
}

}  // namespace

std::string to_json_text(const CausalGraph& graph) {
  nlohmann::ordered_json j;
  j["lag"] = graph.lag;
  j["is_acyclic"] = graph.is_acyclic;
  j["nodes"] = graph.nodes;
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges) j["edges"].push_back(edge_json(e));
  j["pruned"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.pruned) j["pruned"].push_back(edge_json(e));
  return j.dump(2) + "\n";
}

CausalGraph graph_from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CausalGraph g;
  g.lag = j.at("lag").get<int>();
  g.is_acyclic = j.at("is_acyclic").get<bool>();
  g.nodes = j.at("nodes").get<std::vector<std::string>>();
  for (const auto& e : j.at("edges")) g.edges.push_back(edge_from(e));
  for (const auto& e : j.at("pruned")) g.pruned.push_back(edge_from(e));
  return g;
}

std::string to_dot(const CausalGraph& graph) {
  std::string out = "digraph granger {\n  rankdir=LR;\n";
  for (const auto& node : graph.nodes) out += fmt::format("  \"{}\";\n", node);
  for (const auto& e : graph.edges) {
    out += fmt::format("  \"{}\" -> \"{}\" [label=\"lag {}, F={:.4g}, p={:.3g}\"];\n", e.source, e.target,
                       e.lag, e.f_stat, e.p_value);
  }
  out += "}\n";
  return out;
}

}  // namespace volts
