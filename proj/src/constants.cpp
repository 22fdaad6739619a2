#include <cmath>
#include <numbers>
#include <string>

#include "kreinlab/error.hpp"
#include "kreinlab/experiments.hpp"
#include "kreinlab/specfun.hpp"

namespace kreinlab::experiments {

ConstantsReport constants(int n, double arc_length, double boundary_length, double domain_measure) {
  if (n < 2 || n > 60) throw DomainError("constants: n must lie in [2, 60], got " + std::to_string(n));
  if (!(arc_length >= 0.0) || !(boundary_length > 0.0) || !(domain_measure > 0.0)) {
    throw DomainError("constants: measures must be positive");
  }
  const double pi = std::numbers::pi;
  ConstantsReport r;
  r.n = n;
  r.arc_length = arc_length;
  r.boundary_length = boundary_length;
  r.domain_measure = domain_measure;
  r.c_n = std::pow(2.0 * pi, -(n - 1) / 2.0) * std::pow(2.0, 1 - n) /
          specfun::gamma_fn(1.0 + (n - 1) / 2.0);
  r.C0_plus = r.c_n * arc_length;
  r.C0 = r.c_n * boundary_length;
  const double ball = std::pow(pi, n / 2.0) / specfun::gamma_fn(n / 2.0 + 1.0);
  r.C_A = std::pow(2.0 * pi, -n) * domain_measure * ball;
  return r;
}

}  // namespace kreinlab::experiments
