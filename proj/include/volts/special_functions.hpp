#pragma once

namespace volts {

// Regularized incomplete beta I_x(a, b) for a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

// Upper tail P(F > f) of the F(d1, d2) distribution.
double f_survival(double f, double d1, double d2);

}  // namespace volts
