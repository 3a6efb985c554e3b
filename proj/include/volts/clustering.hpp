#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

#include "volts/dtw.hpp"
#include "volts/volatility.hpp"

namespace volts {

enum class RegimeLabel { Low, Mid, High };
std::string_view to_string(RegimeLabel label);

enum class ClusterStatus { Ok, EmptyClusterRepaired };

struct ClusterResult {
  int k = 0;
  std::vector<std::string> tickers;
  std::vector<int> assignments;       // per series, cluster id in [0, k)
  std::vector<Eigen::Index> medoids;  // per cluster, index into tickers
  double inertia = 0.0;               // sum of DTW distances to own medoid
  std::vector<double> inertia_history;  // after each iteration
  int iterations = 0;
  // Per cluster; filled only when k == 3 (bijection onto low/mid/high).
  std::vector<RegimeLabel> labels;
  // Per cluster, mean of the members' series means.
  std::vector<double> levels;
  // Two clusters had equal levels and the medoid-ticker rule decided.
  bool label_tie = false;
  ClusterStatus status = ClusterStatus::Ok;

  std::vector<std::string> members(int cluster) const;
};

// Pairwise DTW matrix over the series values; `workers` > 1 fans the upper
// triangle out over threads.
Eigen::MatrixXd distance_matrix(const std::vector<VolSeries>& series, const DtwConfig& cfg = {},
                                int workers = 1);

// Deterministic farthest-point seeding: the first medoid has the largest
// total distance to all others; each following one is the not-yet-chosen
// series whose distance to its nearest chosen medoid is largest. Ties go to
// the lowest index. Throws TooFewSeries, InvalidArgument (k < 1).
std::vector<Eigen::Index> seed_centroids(const Eigen::Ref<const Eigen::MatrixXd>& distances,
                                         int k);
std::vector<Eigen::Index> seed_centroids(const std::vector<VolSeries>& series, int k,
                                         const DtwConfig& cfg = {});

// k-medoids under DTW: assign to nearest medoid, move each medoid to the
// member with the smallest within-cluster distance sum, stop at an
// assignment fixpoint or after max_iter rounds.
ClusterResult kmeans_dtw(const std::vector<VolSeries>& series, int k, int max_iter,
                         const DtwConfig& cfg = {}, int workers = 1);
ClusterResult kmeans_dtw(const Eigen::Ref<const Eigen::MatrixXd>& distances,
                         const std::vector<std::string>& tickers,
                         const std::vector<double>& series_means, int k, int max_iter);

// Tickers of the mid-level cluster sorted by descending series mean.
// Throws NotThreeClusters.
std::vector<std::string> pick_mid_cluster(const ClusterResult& result,
                                          const std::vector<VolSeries>& series);

void write_cluster_json(const ClusterResult& result, const std::vector<std::string>& mid,
                        const std::filesystem::path& path);

}  // namespace volts
