#pragma once

#include <vector>

namespace kreinlab::specfun {

/// Modified Bessel function I_m at a positive argument.
struct BesselEval {
  int order = 0;
  double argument = 0.0;
  double value = 0.0;
  double derivative = 0.0;
};

/// Log-scaled form of BesselEval. Never overflows; this is what the disc
/// model consumes.
struct BesselLogEval {
  int order = 0;
  double argument = 0.0;
  double log_value = 0.0;
  /// I_m'(x) / I_m(x)
  double log_derivative = 0.0;
};

/// Zero j_{m,k} of the Bessel function J_m.
struct BesselZero {
  int order = 0;
  int index = 0;
  double value = 0.0;
};

inline constexpr int kMaxBesselIOrder = 10000;
inline constexpr double kMaxBesselIArgument = 1000.0;
inline constexpr int kMaxBesselJOrder = 200;
inline constexpr int kMaxBesselJZeroIndex = 500;

/// I_m(x) and I_m'(x). Throws FloatingRangeError when I_m(x) is not
/// representable; use bessel_i_log in that case.
BesselEval bessel_i(int m, double x);

BesselLogEval bessel_i_log(int m, double x);

/// I_{m+1}(x) / I_m(x), evaluated by the continued fraction.
double bessel_i_ratio(int m, double x);

/// I_m'(x) / I_m(x) = m/x + I_{m+1}(x)/I_m(x).
double bessel_i_log_derivative(int m, double x);

/// Normalized radial profile I_m(x r) / I_m(x) for r in [0, 1].
double bessel_i_profile(int m, double x, double r);

/// S_m(x r) / S_m(x) for r in [0, 1], where I_m(y) = (y/2)^m / m! S_m(y);
/// the profile without its r^m factor.
double bessel_i_entire_ratio(int m, double x, double r);

/// J_m(x) for real x >= 0.
double bessel_j(int m, double x);

/// k-th positive zero of J_m (k >= 1).
double bessel_j_zero(int m, int k);

/// First `count` positive zeros of J_m in increasing order.
std::vector<double> bessel_j_zeros(int m, int count);

/// All positive zeros of J_m not exceeding `upper`.
std::vector<double> bessel_j_zeros_below(int m, double upper);

/// Gamma function on (0, 50].
double gamma_fn(double x);

}  // namespace kreinlab::specfun
