#include "volts/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "volts/error.hpp"

namespace volts {

namespace {

// Continued fraction for I_x(a, b), evaluated with the modified Lentz method.
// Converges quickly for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw Error(ErrorCode::InvalidArgument, "incomplete beta continued fraction did not converge");
}

// x and its complement y = 1 - x are passed separately so callers that know
// y exactly do not lose it to cancellation.
double incomplete_beta_xy(double a, double b, double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "incomplete beta needs a, b > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "incomplete beta needs x in [0, 1], got " + std::to_string(x));
  }
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double f_survival(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "F distribution needs positive degrees of freedom");
  }
  if (std::isnan(f)) throw Error(ErrorCode::InvalidArgument, "F statistic is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  // P(F > f) = I_{d2 / (d2 + d1 f)}(d2 / 2, d1 / 2)
  const double x = d2 / (d2 + d1 * f);
  const double y = d1 * f / (d2 + d1 * f);
  return incomplete_beta_xy(0.5 * d2, 0.5 * d1, x, y);
}

}  // namespace volts
