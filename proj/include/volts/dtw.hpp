#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "volts/error.hpp"

namespace volts {

struct DtwConfig {
  // Sakoe-Chiba radius; nullopt runs the full dynamic program.
  std::optional<Eigen::Index> band;
};

// Dynamic time warping cost with |a_i - b_j| as local distance:
//   D(i,j) = |a_i - b_j| + min(D(i-1,j), D(i,j-1), D(i-1,j-1)).
// With a band, cell (i,j) is admissible iff |i - j| <= radius. Throws
// EmptySeries, InfeasibleBand (radius < ||a| - |b||), InvalidArgument.
template <typename A, typename B>
typename A::Scalar dtw(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b,
                       const DtwConfig& cfg = {}) {
  using S = typename A::Scalar;
  const Eigen::Index n = a.size();
  const Eigen::Index m = b.size();
  if (n == 0 || m == 0) throw Error(ErrorCode::EmptySeries, "dtw of an empty series");

  Eigen::Index radius = std::max(n, m);
  if (cfg.band) {
    if (*cfg.band < 0) throw Error(ErrorCode::InvalidArgument, "dtw band radius must be >= 0");
    if (*cfg.band < std::abs(n - m)) {
      throw Error(ErrorCode::InfeasibleBand,
                  "band radius " + std::to_string(*cfg.band) + " cannot connect series of length " +
                      std::to_string(n) + " and " + std::to_string(m));
    }
    radius = *cfg.band;
  }

  constexpr S inf = std::numeric_limits<S>::infinity();
  // Two rolling rows of the cost matrix.
  Eigen::Array<S, Eigen::Dynamic, 1> prev = Eigen::Array<S, Eigen::Dynamic, 1>::Constant(m, inf);
  Eigen::Array<S, Eigen::Dynamic, 1> curr(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    curr.setConstant(inf);
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - radius);
    const Eigen::Index hi = std::min<Eigen::Index>(m - 1, i + radius);
    for (Eigen::Index j = lo; j <= hi; ++j) {
      using std::abs;
      const S cost = abs(a(i) - b(j));
      S best;
      if (i == 0 && j == 0) {
        best = S(0);
      } else {
        best = inf;
        if (i > 0) best = std::min(best, prev(j));
        if (j > 0) best = std::min(best, curr(j - 1));
        if (i > 0 && j > 0) best = std::min(best, prev(j - 1));
      }
      curr(j) = cost + best;
    }
    prev.swap(curr);
  }
  return prev(m - 1);
}

}  // namespace volts
