#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "kreinlab/error.hpp"
#include "kreinlab/experiments.hpp"

namespace kreinlab::experiments {

std::pair<std::size_t, std::size_t> window_from_fractions(double lo_frac, double hi_frac,
                                                          std::size_t n, std::size_t length) {
  if (!(lo_frac > 0.0) || !(hi_frac >= lo_frac)) {
    throw DomainError("fit window fractions must satisfy 0 < lo <= hi");
  }
  const auto lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(lo_frac * n)));
  const auto hi = std::min(length, static_cast<std::size_t>(std::llround(hi_frac * n)));
  return {lo, hi};
}

WeylFitResult weyl_fit(const std::vector<double>& s, double p, std::size_t j_lo, std::size_t j_hi,
                       int order, double q, double predicted) {
  if (j_lo < 1 || j_hi < j_lo || j_hi > s.size()) {
    throw DomainError("weyl_fit: window [" + std::to_string(j_lo) + ", " + std::to_string(j_hi) +
                      "] is empty or outside the spectrum (length " + std::to_string(s.size()) + ")");
  }
  if (order < 0 || order > 4) throw DomainError("weyl_fit: extrapolation order must lie in [0, 4]");
  if (!(q > 0.0)) throw DomainError("weyl_fit: correction exponent must be positive");

  WeylFitResult r;
  r.exponent = p;
  r.j_lo = j_lo;
  r.j_hi = j_hi;
  r.order = order;
  r.correction_exponent = q;
  r.predicted = predicted;

  const double floor = linalg::kNoiseFloor * s.front();
  std::vector<double> js;
  std::vector<double> ys;
  for (std::size_t j = j_lo; j <= j_hi; ++j) {
    if (s[j - 1] < floor) continue;
    js.push_back(static_cast<double>(j));
    ys.push_back(s[j - 1] * std::pow(static_cast<double>(j), p));
  }
  r.used = js.size();
  if (js.empty()) throw DomainError("weyl_fit: every window value is below the noise floor");
  if (static_cast<int>(js.size()) < order + 1) {
    throw DomainError("weyl_fit: window too short for the extrapolation order");
  }

  const auto m = static_cast<Eigen::Index>(js.size());
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), m);
  r.raw = y.mean();
  r.raw_residual = std::sqrt((y.array() - r.raw).square().mean());

  Eigen::MatrixXd a(m, order + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int k = 0; k <= order; ++k) a(i, k) = std::pow(js[static_cast<std::size_t>(i)], -k * q);
  }
  const Eigen::VectorXd scale = a.colwise().norm().transpose();
  const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(as, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  r.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                         : std::numeric_limits<double>::infinity();
  r.ill_conditioned = !(r.condition < 1e10);
  const Eigen::VectorXd coef = svd.solve(y).cwiseQuotient(scale);
  r.coefficients.assign(coef.data(), coef.data() + coef.size());
  r.extrapolated = coef(0);
  r.fit_residual = std::sqrt((a * coef - y).array().square().mean());
  if (std::isfinite(predicted) && predicted != 0.0) {
    r.relative_error = (r.extrapolated - predicted) / predicted;
  }
  return r;
}

}  // namespace kreinlab::experiments
