#include "volts/clustering.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "parallel.hpp"

namespace volts {

std::string_view to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::Low: return "low";
    case RegimeLabel::Mid: return "mid";
    case RegimeLabel::High: return "high";
  }
  return "?";
}

std::vector<std::string> ClusterResult::members(int cluster) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == cluster) out.push_back(tickers[i]);
  }
  return out;
}

Eigen::MatrixXd distance_matrix(const std::vector<VolSeries>& series, const DtwConfig& cfg,
                                int workers) {
  const auto n = static_cast<Eigen::Index>(series.size());
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) cells.emplace_back(i, j);
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  detail::parallel_for(cells.size(), workers, [&](std::size_t c) {
    const auto [i, j] = cells[c];
    const double v = dtw(series[static_cast<std::size_t>(i)].values,
                         series[static_cast<std::size_t>(j)].values, cfg);
    d(i, j) = v;
    d(j, i) = v;
  });
  return d;
}

std::vector<Eigen::Index> seed_centroids(const Eigen::Ref<const Eigen::MatrixXd>& distances, int k) {
  const Eigen::Index n = distances.rows();
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "cluster count must be >= 1");
  if (n < k) {
    throw Error(ErrorCode::TooFewSeries, std::to_string(n) + " series for " + std::to_string(k) +
                                             " clusters");
  }
  std::vector<Eigen::Index> seeds;
  Eigen::Index first = 0;
  distances.rowwise().sum().maxCoeff(&first);  // first maximum wins ties
  seeds.push_back(first);

  // Distance from each series to its nearest seed so far.
  Eigen::VectorXd nearest = distances.col(first);
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  chosen[static_cast<std::size_t>(first)] = true;
  while (static_cast<int>(seeds.size()) < k) {
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (chosen[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || nearest(i) > nearest(best)) best = i;
    }
    seeds.push_back(best);
    chosen[static_cast<std::size_t>(best)] = true;
    nearest = nearest.cwiseMin(distances.col(best));
  }
  return seeds;
}

std::vector<Eigen::Index> seed_centroids(const std::vector<VolSeries>& series, int k,
                                         const DtwConfig& cfg) {
  if (k >= 1 && static_cast<int>(series.size()) < k) {
    throw Error(ErrorCode::TooFewSeries, std::to_string(series.size()) + " series for " +
                                             std::to_string(k) + " clusters");
  }
  return seed_centroids(distance_matrix(series, cfg), k);
}

namespace {

double inertia_of(const Eigen::Ref<const Eigen::MatrixXd>& d, const std::vector<int>& assign,
                  const std::vector<Eigen::Index>& medoids) {
  double total = 0.0;
  for (std::size_t i = 0; i < assign.size(); ++i) {
    total += d(static_cast<Eigen::Index>(i), medoids[static_cast<std::size_t>(assign[i])]);
  }
  return total;
}

void label_clusters(ClusterResult& result, const std::vector<double>& series_means) {
  const auto k = static_cast<std::size_t>(result.k);
  result.levels.assign(k, 0.0);
  std::vector<int> counts(k, 0);
  for (std::size_t i = 0; i < result.assignments.size(); ++i) {
    const auto c = static_cast<std::size_t>(result.assignments[i]);
    result.levels[c] += series_means[i];
    ++counts[c];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) result.levels[c] /= counts[c];
  }
  if (result.k != 3) return;

  const auto medoid_ticker = [&](std::size_t c) {
    return result.tickers[static_cast<std::size_t>(result.medoids[c])];
  };
  std::vector<std::size_t> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (result.levels[a] != result.levels[b]) return result.levels[a] < result.levels[b];
    return medoid_ticker(a) < medoid_ticker(b);
  });
  // A tie for the middle slot goes to the cluster whose medoid sorts first.
  if (result.levels[order[0]] == result.levels[order[1]]) std::swap(order[0], order[1]);
  result.label_tie = result.levels[order[0]] == result.levels[order[1]] ||
                     result.levels[order[1]] == result.levels[order[2]];

  result.labels.assign(3, RegimeLabel::Mid);
  result.labels[order[0]] = RegimeLabel::Low;
  result.labels[order[1]] = RegimeLabel::Mid;
  result.labels[order[2]] = RegimeLabel::High;
}

}  // namespace

ClusterResult kmeans_dtw(const Eigen::Ref<const Eigen::MatrixXd>& d,
                         const std::vector<std::string>& tickers,
                         const std::vector<double>& series_means, int k, int max_iter) {
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
  const Eigen::Index n = d.rows();
  if (static_cast<Eigen::Index>(tickers.size()) != n ||
      static_cast<Eigen::Index>(series_means.size()) != n) {
    throw Error(ErrorCode::InvalidArgument, "distance matrix and ticker list differ in size");
  }

  ClusterResult result;
  result.k = k;
  result.tickers = tickers;
  result.medoids = seed_centroids(d, k);
  std::vector<int> previous;

  for (int iter = 1; iter <= max_iter; ++iter) {
    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      for (int c = 1; c < k; ++c) {
        if (d(i, result.medoids[static_cast<std::size_t>(c)]) <
            d(i, result.medoids[static_cast<std::size_t>(best)])) {
          best = c;
        }
      }
      assign[static_cast<std::size_t>(i)] = best;
    }

    for (int c = 0; c < k; ++c) {
      if (std::find(assign.begin(), assign.end(), c) != assign.end()) continue;
      // Reseed the empty cluster with the series farthest from its medoid.
      Eigen::Index far = -1;
      double far_distance = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::find(result.medoids.begin(), result.medoids.end(), i) != result.medoids.end()) continue;
        const double dist = d(i, result.medoids[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])]);
        if (dist > far_distance) {
          far = i;
          far_distance = dist;
        }
      }
      if (far < 0) continue;
      result.medoids[static_cast<std::size_t>(c)] = far;
      assign[static_cast<std::size_t>(far)] = c;
      result.status = ClusterStatus::EmptyClusterRepaired;
    }

    result.iterations = iter;
    const bool converged = assign == previous;
    previous = assign;

    for (int c = 0; c < k; ++c) {
      Eigen::Index best = result.medoids[static_cast<std::size_t>(c)];
      const auto cost = [&](Eigen::Index m) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (assign[static_cast<std::size_t>(j)] == c) s += d(m, j);
        }
        return s;
      };
      double best_cost = assign[static_cast<std::size_t>(best)] == c ? cost(best)
                                                                      : std::numeric_limits<double>::infinity();
      for (Eigen::Index m = 0; m < n; ++m) {
        if (assign[static_cast<std::size_t>(m)] != c) continue;
        const double mc = cost(m);
        if (mc < best_cost) {
          best = m;
          best_cost = mc;
        }
      }
      result.medoids[static_cast<std::size_t>(c)] = best;
    }
    result.assignments = assign;
    result.inertia = inertia_of(d, assign, result.medoids);
    result.inertia_history.push_back(result.inertia);
    if (converged) break;
  }

  label_clusters(result, series_means);
  return result;
}

ClusterResult kmeans_dtw(const std::vector<VolSeries>& series, int k, int max_iter,
                         const DtwConfig& cfg, int workers) {
  if (k >= 1 && static_cast<int>(series.size()) < k) {
    throw Error(ErrorCode::TooFewSeries, std::to_string(series.size()) + " series for " +
                                             std::to_string(k) + " clusters");
  }
  std::vector<std::string> tickers;
  std::vector<double> means;
  for (const auto& s : series) {
    tickers.push_back(s.ticker);
    means.push_back(s.values.size() > 0 ? s.values.mean() : 0.0);
  }
  return kmeans_dtw(distance_matrix(series, cfg, workers), tickers, means, k, max_iter);
}

std::vector<std::string> pick_mid_cluster(const ClusterResult& result,
                                          const std::vector<VolSeries>& series) {
  if (result.k != 3 || result.labels.size() != 3) {
    throw Error(ErrorCode::NotThreeClusters, "mid cluster needs K = 3, got " + std::to_string(result.k));
  }
  const auto mid = static_cast<int>(std::find(result.labels.begin(), result.labels.end(), RegimeLabel::Mid) -
                                    result.labels.begin());
  std::vector<std::pair<double, std::string>> members;
  for (std::size_t i = 0; i < result.assignments.size(); ++i) {
    if (result.assignments[i] != mid) continue;
    const auto it = std::find_if(series.begin(), series.end(),
                                 [&](const VolSeries& s) { return s.ticker == result.tickers[i]; });
    const double level = it != series.end() && it->values.size() > 0 ? it->values.mean() : 0.0;
    members.emplace_back(level, result.tickers[i]);
  }
  std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (auto& m : members) out.push_back(std::move(m.second));
  return out;
}

void write_cluster_json(const ClusterResult& result, const std::vector<std::string>& mid,
                        const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["k"] = result.k;
  j["iterations"] = result.iterations;
  j["inertia"] = result.inertia;
  j["inertia_history"] = result.inertia_history;
  j["status"] = result.status == ClusterStatus::Ok ? "ok" : "empty_cluster_repaired";
  auto& assignments = j["assignments"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < result.tickers.size(); ++i) assignments[result.tickers[i]] = result.assignments[i];
  auto& clusters = j["clusters"] = nlohmann::ordered_json::array();
  for (int c = 0; c < result.k; ++c) {
    nlohmann::ordered_json entry;
    entry["id"] = c;
    entry["medoid"] = result.tickers[static_cast<std::size_t>(result.medoids[static_cast<std::size_t>(c)])];
    entry["level"] = result.levels.empty() ? 0.0 : result.levels[static_cast<std::size_t>(c)];
    if (!result.labels.empty()) entry["label"] = to_string(result.labels[static_cast<std::size_t>(c)]);
    entry["members"] = result.members(c);
    clusters.push_back(entry);
  }
  j["label_tie"] = result.label_tie;
  j["mid_cluster"] = mid;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace volts
