#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kreinlab/disc.hpp"
#include "kreinlab/error.hpp"
#include "kreinlab/experiments.hpp"

namespace kreinlab::experiments {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

void check_shapes(const std::vector<double>& orders, const std::vector<double>& coefficients,
                  const std::vector<CircleFunction>& multipliers) {
  if (orders.empty() || orders.size() > 3) throw DomainError("composed operator: need 1 to 3 factors");
  if (coefficients.size() != orders.size()) {
    throw DomainError("composed operator: one coefficient per symbol factor");
  }
  if (multipliers.size() != orders.size() + 1) {
    throw DomainError("composed operator: need one more multiplier than symbol factors");
  }
  double total = 0.0;
  for (double t : orders) {
    if (!(t > 0.0)) throw DomainError("composed operator: symbol orders must be positive");
    total += t;
  }
  if (total > 3.0 + 1e-12) throw DomainError("composed operator: total order must not exceed 3");
}

}  // namespace

CircleFunction CircleFunction::constant(double c) { return {{{0.0, kTwoPi, c}}}; }

CircleFunction CircleFunction::indicator(double start, double end) {
  if (!(end > start) || end - start > kTwoPi + 1e-15) {
    throw DomainError("CircleFunction::indicator: need start < end <= start + 2 pi");
  }
  return {{{start, end, 1.0}}};
}

double CircleFunction::operator()(double theta) const {
  const double t = wrap(theta);
  double v = 0.0;
  for (const Arc& a : arcs) {
    const double len = a.end - a.start;
    if (len >= kTwoPi || wrap(t - a.start) < len) v += a.value;
  }
  return v;
}

double composed_constant(const std::vector<double>& orders, const std::vector<double>& coefficients,
                         const std::vector<CircleFunction>& multipliers) {
  check_shapes(orders, coefficients, multipliers);
  double total = 0.0;
  double coef = 1.0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    total += orders[i];
    coef *= coefficients[i];
  }
  std::vector<double> cuts{0.0, kTwoPi};
  for (const auto& f : multipliers) {
    for (const auto& a : f.arcs) {
      cuts.push_back(wrap(a.start));
      cuts.push_back(wrap(a.end));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double len = cuts[k + 1] - cuts[k];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    double prod = coef;
    for (const auto& f : multipliers) prod *= f(mid);
    integral += len * std::pow(std::abs(prod), 1.0 / total);
  }
  return integral / std::numbers::pi;
}

ComposedCheck composed_operator_check(const std::vector<double>& orders,
                                      const std::vector<double>& coefficients,
                                      const std::vector<CircleFunction>& multipliers, int n,
                                      double lo_frac, double hi_frac, int order, double q) {
  check_shapes(orders, coefficients, multipliers);
  if (n < 512 || (n & (n - 1)) != 0) {
    throw DomainError("composed operator: grid size must be a power of two >= 512");
  }
  ComposedCheck out;
  for (double t : orders) out.total_order += t;
  out.c_p = composed_constant(orders, coefficients, multipliers);
  out.predicted = std::pow(out.c_p, out.total_order);

  auto diag_of = [n](const CircleFunction& f) {
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = f(kTwoPi * i / n);
    return d;
  };
  Eigen::MatrixXd p = diag_of(multipliers[0]).asDiagonal() * Eigen::MatrixXd::Identity(n, n);
  for (std::size_t i = 0; i < orders.size(); ++i) {
    disc::ModalOperator sym;
    sym.values.resize(static_cast<std::size_t>(n / 2) + 1);
    for (int m = 0; m <= n / 2; ++m) {
      sym.values[static_cast<std::size_t>(m)] =
          coefficients[i] * (m == 0 ? 1.0 : std::pow(static_cast<double>(m), -orders[i]));
    }
    p = p * disc::modal_to_grid(sym, n).matrix;
    p = p * diag_of(multipliers[i + 1]).asDiagonal();
  }
  out.spectrum = linalg::SingularSpectrum{linalg::singular_values(p), "composed", {}};
  const auto [lo, hi] = window_from_fractions(lo_frac, hi_frac, static_cast<std::size_t>(n),
                                              out.spectrum.size());
  out.fit = weyl_fit(out.spectrum.values, out.total_order, lo, hi, order, q, out.predicted);
  out.relative_gap = out.fit.relative_error;
  return out;
}

}  // namespace kreinlab::experiments
