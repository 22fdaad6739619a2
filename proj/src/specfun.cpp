#include "kreinlab/specfun.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

#include "kreinlab/error.hpp"

namespace kreinlab::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_i_args(int m, double x) {
  if (m < 0 || m > kMaxBesselIOrder) {
    throw DomainError("bessel_i: order " + std::to_string(m) + " outside [0, " +
                      std::to_string(kMaxBesselIOrder) + "]");
  }
  if (!(x > 0.0) || x > kMaxBesselIArgument) {
    throw DomainError("bessel_i: argument " + std::to_string(x) +
                      " outside (0, " + std::to_string(kMaxBesselIArgument) + "]");
  }
}

// log of S_m(y) = sum_k (y^2/4)^k / (k! (m+1)_k), the entire part of
// I_m(y) = (y/2)^m / m! * S_m(y). All terms are positive; the running sum is
// rescaled so it never overflows for y <= 1000.
double log_series(int m, double y) {
  const double q = 0.25 * y * y;
  double sum = 1.0;
  double term = 1.0;
  double log_scale = 0.0;
  for (int k = 1; k < 1000000; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(m + k));
    sum += term;
    if (sum > 1e280) {
      sum *= 1e-280;
      term *= 1e-280;
      log_scale += 280.0 * std::log(10.0);
    }
    // terms decrease once k(m+k) > q; stop when they no longer register
    if (static_cast<double>(k) * static_cast<double>(m + k) > q && term < 0.25 * kEps * sum) {
      break;
    }
  }
  return std::log(sum) + log_scale;
}

}  // namespace

double bessel_i_ratio(int m, double x) {
  check_i_args(m, x);
  // I_{m+1}/I_m = 1 / (2(m+1)/x + 1 / (2(m+2)/x + ...)), modified Lentz.
  constexpr double tiny = 1e-300;
  double f = tiny;
  double c = f;
  double d = 0.0;
  for (int j = 1; j < 1000000; ++j) {
    const double b = 2.0 * (m + j) / x;
    d = b + d;
    if (d == 0.0) d = tiny;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 0.5 * kEps) {
      return f;
    }
  }
  throw ConvergenceError("bessel_i_ratio: continued fraction did not converge");
}

double bessel_i_log_derivative(int m, double x) {
  return static_cast<double>(m) / x + bessel_i_ratio(m, x);
}

BesselLogEval bessel_i_log(int m, double x) {
  check_i_args(m, x);
  BesselLogEval out;
  out.order = m;
  out.argument = x;
  out.log_value = m * std::log(0.5 * x) - std::lgamma(m + 1.0) + log_series(m, x);
  out.log_derivative = bessel_i_log_derivative(m, x);
  return out;
}

BesselEval bessel_i(int m, double x) {
  const BesselLogEval lg = bessel_i_log(m, x);
  const double log_max = std::log(DBL_MAX);
  const double log_min = std::log(DBL_MIN);
  const double log_deriv = lg.log_value + std::log(lg.log_derivative);
  if (lg.log_value > log_max || log_deriv > log_max || lg.log_value < log_min) {
    throw FloatingRangeError("bessel_i: I_" + std::to_string(m) + "(" + std::to_string(x) +
                             ") is outside the double range (log value " +
                             std::to_string(lg.log_value) + ")");
  }
  BesselEval out;
  out.order = m;
  out.argument = x;
  out.value = std::exp(lg.log_value);
  out.derivative = out.value * lg.log_derivative;
  return out;
}

double bessel_i_profile(int m, double x, double r) {
  check_i_args(m, x);
  if (r < 0.0 || r > 1.0) {
    throw DomainError("bessel_i_profile: radius " + std::to_string(r) + " outside [0, 1]");
  }
  if (r == 0.0) {
    return m == 0 ? std::exp(-log_series(0, x)) : 0.0;
  }
  if (r == 1.0) return 1.0;
  return std::exp(m * std::log(r) + log_series(m, x * r) - log_series(m, x));
}

double bessel_i_entire_ratio(int m, double x, double r) {
  check_i_args(m, x);
  if (r < 0.0 || r > 1.0) {
    throw DomainError("bessel_i_entire_ratio: radius " + std::to_string(r) + " outside [0, 1]");
  }
  if (r == 1.0) return 1.0;
  const double inner = r == 0.0 ? 0.0 : log_series(m, x * r);
  return std::exp(inner - log_series(m, x));
}

double bessel_j(int m, double x) {
  if (m < 0) throw DomainError("bessel_j: negative order");
  if (x < 0.0) throw DomainError("bessel_j: negative argument");
  return boost::math::cyl_bessel_j(m, x);
}

namespace {

double bessel_j_prime(int m, double x) {
  if (m == 0) return -bessel_j(1, x);
  return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x));
}

// Root in [lo, hi] where J_m changes sign: bisection to full precision,
// then one Newton step kept only if it improves the residual.
double refine_zero(int m, double lo, double hi) {
  double flo = bessel_j(m, lo);
  for (int it = 0; it < 200 && hi - lo > 2.0 * kEps * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = bessel_j(m, mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  const double x0 = 0.5 * (lo + hi);
  const double f0 = bessel_j(m, x0);
  const double x1 = x0 - f0 / bessel_j_prime(m, x0);
  if (std::abs(x1 - x0) <= hi - lo + 4.0 * kEps * x0 && std::abs(bessel_j(m, x1)) < std::abs(f0)) {
    return x1;
  }
  return x0;
}

template <class Stop>
std::vector<double> scan_zeros(int m, Stop stop) {
  if (m < 0 || m > kMaxBesselJOrder) {
    throw DomainError("bessel_j_zero: order " + std::to_string(m) + " outside [0, " +
                      std::to_string(kMaxBesselJOrder) + "]");
  }
  // J_m > 0 on (0, m] and consecutive zeros are more than 3 apart, so a
  // unit step brackets each zero exactly once.
  constexpr double step = 1.0;
  std::vector<double> zeros;
  double a = m == 0 ? 0.5 : static_cast<double>(m);
  double fa = bessel_j(m, a);
  while (!stop(zeros, a)) {
    const double b = a + step;
    const double fb = bessel_j(m, b);
    if (fb == 0.0) {
      zeros.push_back(b);
      a = b + 0.5 * step;
      fa = bessel_j(m, a);
      continue;
    }
    if ((fa > 0.0) != (fb > 0.0)) {
      zeros.push_back(refine_zero(m, a, b));
    }
    a = b;
    fa = fb;
  }
  return zeros;
}

}  // namespace

std::vector<double> bessel_j_zeros(int m, int count) {
  if (count < 0 || count > kMaxBesselJZeroIndex) {
    throw DomainError("bessel_j_zeros: count " + std::to_string(count) + " outside [0, " +
                      std::to_string(kMaxBesselJZeroIndex) + "]");
  }
  return scan_zeros(m, [count](const std::vector<double>& z, double) {
    return static_cast<int>(z.size()) >= count;
  });
}

double bessel_j_zero(int m, int k) {
  if (k < 1 || k > kMaxBesselJZeroIndex) {
    throw DomainError("bessel_j_zero: index " + std::to_string(k) + " outside [1, " +
                      std::to_string(kMaxBesselJZeroIndex) + "]");
  }
  return bessel_j_zeros(m, k).back();
}

std::vector<double> bessel_j_zeros_below(int m, double upper) {
  auto zeros = scan_zeros(m, [upper](const std::vector<double>& z, double a) {
    return a > upper || static_cast<int>(z.size()) >= kMaxBesselJZeroIndex;
  });
  while (!zeros.empty() && zeros.back() > upper) zeros.pop_back();
  return zeros;
}

double gamma_fn(double x) {
  if (!(x > 0.0) || x > 50.0) {
    throw DomainError("gamma_fn: argument " + std::to_string(x) + " outside (0, 50]");
  }
  return std::tgamma(x);
}

}  // namespace kreinlab::specfun
