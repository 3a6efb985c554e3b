#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "volts/error.hpp"
#include "volts/market_data.hpp"

namespace volts {

enum class EstimatorKind { Parkinson, GarmanKlass, RogersSatchell, YangZhang };

inline constexpr std::array<EstimatorKind, 4> kEstimators = {
    EstimatorKind::Parkinson, EstimatorKind::GarmanKlass, EstimatorKind::RogersSatchell,
    EstimatorKind::YangZhang};

std::string_view to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(std::string_view name);

// Bars consumed per output point: N, or N + 1 for Yang-Zhang (prior close).
inline Eigen::Index bars_per_window(EstimatorKind kind, Eigen::Index n) {
  return kind == EstimatorKind::YangZhang ? n + 1 : n;
}

// ---------------------------------------------------------------------------
// Single-window kernels. All take the open/high/low/close columns of one
// window as Eigen array expressions and return per-period (daily) values.
// The *_variance forms return the raw radicand, which can dip below zero by
// rounding; the public estimators clamp it at zero.
// ---------------------------------------------------------------------------

namespace detail {
inline void require_window(Eigen::Index n, Eigen::Index minimum, const char* what) {
  if (n < minimum) {
    throw Error(ErrorCode::WindowTooShort, std::string(what) + " needs at least " +
                                               std::to_string(minimum) + " bars, got " +
                                               std::to_string(n));
  }
}

template <typename S>
S clamped_sqrt(S variance) {
  using std::sqrt;
  return variance > S(0) ? sqrt(variance) : S(0);
}
}  // namespace detail

template <typename H, typename L>
typename H::Scalar parkinson_variance(const Eigen::ArrayBase<H>& high,
                                      const Eigen::ArrayBase<L>& low) {
  using S = typename H::Scalar;
  detail::require_window(high.size(), 1, "Parkinson");
  const S ln2 = std::numbers::ln2_v<S>;
  return (high.derived() / low.derived()).log().square().sum() / (S(4) * S(high.size()) * ln2);
}

template <typename H, typename L>
typename H::Scalar parkinson(const Eigen::ArrayBase<H>& high, const Eigen::ArrayBase<L>& low) {
  return detail::clamped_sqrt(parkinson_variance(high, low));
}

template <typename O, typename H, typename L, typename C>
typename O::Scalar garman_klass_variance(const Eigen::ArrayBase<O>& open,
                                         const Eigen::ArrayBase<H>& high,
                                         const Eigen::ArrayBase<L>& low,
                                         const Eigen::ArrayBase<C>& close) {
  using S = typename O::Scalar;
  detail::require_window(open.size(), 1, "Garman-Klass");
  const S range = (high.derived() / low.derived()).log().square().sum() / S(2);
  const S body = (S(2) * std::numbers::ln2_v<S> - S(1)) *
                 (close.derived() / open.derived()).log().square().sum();
  return (range - body) / S(open.size());
}

template <typename O, typename H, typename L, typename C>
typename O::Scalar garman_klass(const Eigen::ArrayBase<O>& open, const Eigen::ArrayBase<H>& high,
                                const Eigen::ArrayBase<L>& low,
                                const Eigen::ArrayBase<C>& close) {
  return detail::clamped_sqrt(garman_klass_variance(open, high, low, close));
}

template <typename O, typename H, typename L, typename C>
typename O::Scalar rogers_satchell_variance(const Eigen::ArrayBase<O>& open,
                                            const Eigen::ArrayBase<H>& high,
                                            const Eigen::ArrayBase<L>& low,
                                            const Eigen::ArrayBase<C>& close) {
  using S = typename O::Scalar;
  detail::require_window(open.size(), 1, "Rogers-Satchell");
  const auto& o = open.derived();
  const auto& h = high.derived();
  const auto& l = low.derived();
  const auto& c = close.derived();
  return ((h / c).log() * (h / o).log() + (l / c).log() * (l / o).log()).sum() / S(open.size());
}

template <typename O, typename H, typename L, typename C>
typename O::Scalar rogers_satchell(const Eigen::ArrayBase<O>& open,
                                   const Eigen::ArrayBase<H>& high,
                                   const Eigen::ArrayBase<L>& low,
                                   const Eigen::ArrayBase<C>& close) {
  return detail::clamped_sqrt(rogers_satchell_variance(open, high, low, close));
}

// Weight of the open-to-close variance in the Yang-Zhang blend for a window
// of n returns: 0.34 / (1.34 + (n + 1) / (n - 1)). Lies in (0, 0.2537] for
// n >= 2.
template <typename S = double>
S yang_zhang_k(Eigen::Index n) {
  detail::require_window(n, 2, "Yang-Zhang");
  return S(0.34) / (S(1.34) + S(n + 1) / S(n - 1));
}

template <typename S>
struct YangZhangComponents {
  S overnight = 0;        // sample variance of ln(o_t / c_{t-1})
  S open_to_close = 0;    // sample variance of ln(c_t / o_t)
  S rogers_satchell = 0;  // Rogers-Satchell variance over the same n bars
  S k = 0;

  S variance() const { return overnight + k * open_to_close + (S(1) - k) * rogers_satchell; }
};

// The window holds n + 1 bars; bar 0 only supplies the prior close.
template <typename O, typename H, typename L, typename C>
YangZhangComponents<typename O::Scalar> yang_zhang_components(const Eigen::ArrayBase<O>& open,
                                                               const Eigen::ArrayBase<H>& high,
                                                               const Eigen::ArrayBase<L>& low,
                                                               const Eigen::ArrayBase<C>& close) {
  using S = typename O::Scalar;
  const Eigen::Index n = open.size() - 1;
  detail::require_window(n, 2, "Yang-Zhang");

  const auto o = open.derived().tail(n);
  const auto c = close.derived().tail(n);
  const auto prior_close = close.derived().head(n);

  const Eigen::Array<S, Eigen::Dynamic, 1> overnight = (o / prior_close).log();
  const Eigen::Array<S, Eigen::Dynamic, 1> body = (c / o).log();
  const auto sample_variance = [n](const Eigen::Array<S, Eigen::Dynamic, 1>& r) {
    return (r - r.mean()).square().sum() / S(n - 1);
  };

  YangZhangComponents<S> out;
  out.overnight = sample_variance(overnight);
  out.open_to_close = sample_variance(body);
  out.rogers_satchell = rogers_satchell_variance(o, high.derived().tail(n), low.derived().tail(n), c);
  out.k = yang_zhang_k<S>(n);
  return out;
}

template <typename O, typename H, typename L, typename C>
typename O::Scalar yang_zhang(const Eigen::ArrayBase<O>& open, const Eigen::ArrayBase<H>& high,
                              const Eigen::ArrayBase<L>& low, const Eigen::ArrayBase<C>& close) {
  return detail::clamped_sqrt(yang_zhang_components(open, high, low, close).variance());
}

// Convenience overloads over a window of bars.
double parkinson(std::span<const OhlcBar> bars);
double garman_klass(std::span<const OhlcBar> bars);
double rogers_satchell(std::span<const OhlcBar> bars);
double yang_zhang(std::span<const OhlcBar> bars);  // bars.size() == n + 1

// Raw (unclamped) variance of `kind` over bars [first, first + bars_per_window).
double window_variance(const PriceSeries& series, EstimatorKind kind, Eigen::Index first,
                       Eigen::Index n);

// ---------------------------------------------------------------------------
// Rolling series
// ---------------------------------------------------------------------------

struct VolSeries {
  std::string ticker;
  std::optional<EstimatorKind> estimator;  // nullopt: cross-estimator mean
  Eigen::Index window = 0;
  std::vector<Date> dates;
  Eigen::ArrayXd values;
  // Number of windows whose radicand was negative (rounding) and clamped.
  int clamped = 0;

  std::string_view label() const { return estimator ? to_string(*estimator) : "Mean"; }
  Eigen::Index size() const { return values.size(); }
};

inline constexpr Eigen::Index kDefaultVolWindow = 21;

// One value per admissible window end date. Throws SeriesTooShort,
// InvalidArgument (window < 1, or < 2 for Yang-Zhang).
VolSeries rolling(const PriceSeries& series, EstimatorKind kind, Eigen::Index window);

// Pointwise mean of the four rolling estimators over their common dates
// (those of the Yang-Zhang series).
VolSeries mean_hv(const PriceSeries& series, Eigen::Index window);

// All four estimators followed by the mean.
std::vector<VolSeries> all_estimators(const PriceSeries& series, Eigen::Index window);

// CSV with header `date,ticker,estimator,value`.
void write_vol_csv(const VolSeries& series, const std::filesystem::path& path);
VolSeries read_vol_csv(const std::filesystem::path& path);

}  // namespace volts
