#include "kreinlab/disc.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "kreinlab/error.hpp"
#include "kreinlab/specfun.hpp"

namespace kreinlab::disc {

using linalg::Basis;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_alpha_modes(double alpha, int mode_cut) {
  if (!(alpha > 0.0) || alpha > specfun::kMaxBesselIArgument) {
    throw DomainError("disc: alpha must lie in (0, 1000], got " + std::to_string(alpha));
  }
  if (mode_cut < 1 || mode_cut > specfun::kMaxBesselIOrder) {
    throw DomainError("disc: mode cut must lie in [1, 10000], got " + std::to_string(mode_cut));
  }
}

// Symmetric eigenvalues turned into descending singular values.
SingularSpectrum abs_spectrum(const Eigen::MatrixXd& a, std::string route) {
  const Eigen::VectorXd ev = linalg::eigvalsh(linalg::symmetrized(a));
  SingularSpectrum s;
  s.route = std::move(route);
  s.values.assign(ev.data(), ev.data() + ev.size());
  for (double& v : s.values) v = std::abs(v);
  std::sort(s.values.begin(), s.values.end(), std::greater<>());
  return s;
}

}  // namespace

void validate(const DiscConfig& cfg, bool neumann_route) {
  if (!(cfg.alpha > 0.0) || cfg.alpha > specfun::kMaxBesselIArgument) {
    throw ConfigError("alpha must lie in (0, 1000]");
  }
  if (!std::isfinite(cfg.b)) throw ConfigError("b must be finite");
  if (!(cfg.theta_plus > 0.0) || cfg.theta_plus > kTwoPi * (1.0 + 1e-15)) {
    throw ConfigError("theta_plus must lie in (0, 2 pi]");
  }
  if (cfg.grid_n < 16 || (cfg.grid_n & (cfg.grid_n - 1)) != 0 ||
      cfg.mode_cut() > specfun::kMaxBesselIOrder) {
    throw ConfigError("grid_n must be a power of two in [16, 20000]");
  }
  // b - p_m is increasing in |m| (p_m decreasing), so m = 0 decides positivity.
  const double p0 = -cfg.alpha * specfun::bessel_i_log_derivative(0, cfg.alpha);
  if (!(cfg.b - p0 > 0.0)) {
    throw ConfigError("b - p_0 must be positive (b = " + std::to_string(cfg.b) +
                      ", p_0 = " + std::to_string(p0) + ")");
  }
  if (neumann_route) {
    if (!(cfg.shift_k >= 0.0)) throw ConfigError("shift_k must be nonnegative");
    if (!(cfg.shift_k < -p0)) {
      throw ConfigError("shift_k must be below -p_0 = " + std::to_string(-p0));
    }
    if (!(cfg.b + cfg.shift_k > 0.0)) throw ConfigError("b + shift_k must be positive");
  }
}

ModalOperator dtn_modal(double alpha, int mode_cut) {
  check_alpha_modes(alpha, mode_cut);
  ModalOperator p;
  p.values.resize(static_cast<std::size_t>(mode_cut) + 1);
  for (int m = 0; m <= mode_cut; ++m) {
    // alpha I_m'/I_m = m + alpha I_{m+1}/I_m
    p.values[static_cast<std::size_t>(m)] = -(m + alpha * specfun::bessel_i_ratio(m, alpha));
  }
  return p;
}

ModalOperator poisson_gram_modal(double alpha, int mode_cut, double tolerance) {
  check_alpha_modes(alpha, mode_cut);
  boost::math::quadrature::tanh_sinh<double> rule;
  ModalOperator q;
  q.values.resize(static_cast<std::size_t>(mode_cut) + 1);
  for (int m = 0; m <= mode_cut; ++m) {
    // u = r^{2m+2} maps the boundary layer at r = 1 onto the whole interval:
    // q_m = 1/(2m+2) int_0^1 (S_m(alpha u^{1/(2m+2)}) / S_m(alpha))^2 du.
    const double k = 2.0 * m + 2.0;
    auto f = [m, alpha, k](double u) {
      const double w = specfun::bessel_i_entire_ratio(m, alpha, std::pow(u, 1.0 / k));
      return w * w;
    };
    double err = 0.0;
    double l1 = 0.0;
    // tanh-sinh copes with the u^{1/(2m+2)} behaviour at u = 0
    const double integral = rule.integrate(f, 0.0, 1.0, tolerance, &err, &l1);
    if (!(integral > 0.0) || err > 100.0 * tolerance * integral) {
      throw ConvergenceError("poisson_gram_modal: quadrature did not converge at m = " +
                             std::to_string(m));
    }
    const double value = integral / k;
    q.values[static_cast<std::size_t>(m)] = value;
  }
  return q;
}

GridOperator modal_to_grid(const ModalOperator& op, int n) {
  const int m_cut = op.mode_cut();
  if (n != 2 * m_cut) {
    throw DomainError("modal_to_grid: grid size " + std::to_string(n) + " needs " +
                      std::to_string(n / 2) + " modes, have " + std::to_string(m_cut));
  }
  std::vector<std::complex<double>> a(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int m = k < n / 2 ? k : k - n;
    a[static_cast<std::size_t>(k)] = op(m);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> c;
  fft.inv(c, a);
  Eigen::MatrixXd mat(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // c is even in its index, so the circulant is symmetric
      const int d = std::min((i - j + n) % n, (j - i + n) % n);
      mat(i, j) = c[static_cast<std::size_t>(d)].real();
    }
  }
  return GridOperator{std::move(mat), Basis::circle_grid, kTwoPi / n, true};
}

ArcMask arc_mask(int n, double theta_plus) {
  ArcMask mask;
  for (int i = 0; i < n; ++i) {
    if (kTwoPi * i / n < theta_plus) mask.indices.push_back(i);
  }
  if (mask.indices.empty()) throw DomainError("arc_mask: arc contains no grid point");
  return mask;
}

namespace {

struct Assembled {
  ModalOperator p;
  ModalOperator q;
  ArcMask arc;
  GridOperator l;
};

Assembled assemble_all(const DiscConfig& cfg, bool need_q) {
  validate(cfg);
  Assembled out;
  out.p = dtn_modal(cfg.alpha, cfg.mode_cut());
  if (need_q) out.q = poisson_gram_modal(cfg.alpha, cfg.mode_cut());
  out.arc = arc_mask(cfg.grid_n, cfg.theta_plus);
  const double b = cfg.b;
  const GridOperator full =
      modal_to_grid(modal_map(out.p, [b](double pm) { return b - pm; }), cfg.grid_n);
  out.l = linalg::restrict(full, out.arc.indices, Basis::arc_grid);
  return out;
}

}  // namespace

GridOperator assemble_L(const DiscConfig& cfg) { return assemble_all(cfg, false).l; }

std::vector<double> full_boundary_spectrum(double alpha, double b, int mode_cut) {
  const ModalOperator p = dtn_modal(alpha, mode_cut);
  const ModalOperator q = poisson_gram_modal(alpha, mode_cut);
  if (!(b - p(0) > 0.0)) throw ConfigError("full_boundary_spectrum: b - p_0 must be positive");
  std::vector<double> s;
  s.reserve(static_cast<std::size_t>(2 * mode_cut));
  for (int m = -mode_cut; m < mode_cut; ++m) s.push_back(q(m) / (b - p(m)));
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

KreinSpectra krein_spectrum_dirichlet_ref(const DiscConfig& cfg) {
  const Assembled as = assemble_all(cfg, true);
  const GridOperator p1 =
      linalg::restrict(modal_to_grid(as.q, cfg.grid_n), as.arc.indices, Basis::arc_grid);
  const GridOperator p2 = linalg::restrict(
      modal_to_grid(modal_map(as.q, [](double v) { return std::sqrt(v); }), cfg.grid_n),
      as.arc.indices, Basis::arc_grid);
  const Eigen::MatrixXd s1 = linalg::sqrt_spd(p1.matrix);

  KreinSpectra out;
  const Eigen::MatrixXd xa = s1 * linalg::solve_spd(as.l, s1);
  out.route_a = linalg::spectrum_from_eigenvalues(linalg::eigvalsh(linalg::symmetrized(xa)),
                                                  "disc:dirichlet-ref:a");
  const Eigen::MatrixXd xb = p2.matrix * linalg::solve_spd(as.l, p2.matrix);
  out.route_b = linalg::spectrum_from_eigenvalues(linalg::eigvalsh(linalg::symmetrized(xb)),
                                                  "disc:dirichlet-ref:b");
  return out;
}

SingularSpectrum krein_spectrum_neumann_ref(const DiscConfig& cfg) {
  validate(cfg);
  const ModalOperator p = dtn_modal(cfg.alpha, cfg.mode_cut());
  const double k = cfg.shift_k;
  if (!(p(0) + k < 0.0)) {
    throw SingularError("neumann route: p_0 + K = " + std::to_string(p(0) + k) +
                            " makes A_nu' non-invertible",
                        std::numeric_limits<double>::infinity());
  }
  validate(cfg, true);
  const ModalOperator q = poisson_gram_modal(cfg.alpha, cfg.mode_cut());
  const ArcMask arc = arc_mask(cfg.grid_n, cfg.theta_plus);
  const double f = 1.0 / (cfg.b + k);
  const int n = cfg.grid_n;

  const Eigen::MatrixXd pk =
      modal_to_grid(modal_map(p, [k](double pm) { return 1.0 / (pm + k); }), n).matrix;
  // P' - f 1_+ is negative definite; factor its negative.
  Eigen::MatrixXd neg = -pk;
  for (int i : arc.indices) neg(i, i) += f;
  Eigen::LLT<Eigen::MatrixXd> llt(neg);
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (!(rcond > 1e-13)) {
    throw SingularError("neumann route: P' - f 1_+ is singular",
                        rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
  }
  // X = P'(P' - F)^{-1} F = P'(P' - F)^{-1} P' - P', which is symmetric.
  const Eigen::MatrixXd x = -pk * llt.solve(pk) - pk;
  const Eigen::MatrixXd s1 = linalg::sqrt_spd(modal_to_grid(q, n).matrix);
  const Eigen::VectorXd ev = linalg::eigvalsh(linalg::symmetrized(s1 * x * s1));
  SingularSpectrum all = linalg::spectrum_from_eigenvalues(ev, "disc:neumann-ref", 1e-8);
  // X has rank |arc|; the rest is roundoff.
  all.values.resize(arc.indices.size());
  return all;
}

RemainderReport remainder_check(const DiscConfig& cfg) {
  const Assembled as = assemble_all(cfg, false);
  const auto n = static_cast<Eigen::Index>(as.arc.indices.size());
  const Eigen::MatrixXd linv = linalg::symmetrized(
      linalg::solve_spd(as.l, Eigen::MatrixXd::Identity(n, n)));
  const GridOperator pinv = linalg::restrict(
      modal_to_grid(modal_map(as.p, [](double pm) { return 1.0 / pm; }), cfg.grid_n),
      as.arc.indices, Basis::arc_grid);
  const Eigen::MatrixXd r = linv + pinv.matrix;

  RemainderReport rep;
  rep.remainder = abs_spectrum(r, "disc:remainder");
  rep.l_inverse = abs_spectrum(linv, "disc:l-inverse");
  rep.norm_remainder = rep.remainder.values.front();
  const auto grid = static_cast<std::size_t>(cfg.grid_n);
  rep.window_lo = std::max<std::size_t>(1, grid / 32);
  rep.window_hi = std::min(grid / 4, rep.l_inverse.size());
  if (rep.window_hi < rep.window_lo) throw DomainError("remainder_check: arc too short");

  const double floor = linalg::kNoiseFloor * rep.l_inverse.values.front();
  std::vector<double> ratios;
  for (std::size_t j = rep.window_lo; j <= rep.window_hi; ++j) {
    const double sr = rep.remainder.s(j) < floor ? 0.0 : rep.remainder.s(j);
    ratios.push_back(sr / rep.l_inverse.s(j));
  }
  const std::size_t mid = ratios.size() / 2;
  std::nth_element(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(mid), ratios.end());
  rep.trend = ratios[mid];
  if (ratios.size() % 2 == 0) {
    rep.trend = 0.5 * (rep.trend + *std::max_element(ratios.begin(),
                                                     ratios.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return rep;
}

CorrectionReport g_corrections(const DiscConfig& cfg) {
  validate(cfg);
  const ModalOperator q = poisson_gram_modal(cfg.alpha, cfg.mode_cut());
  const ArcMask arc = arc_mask(cfg.grid_n, cfg.theta_plus);
  const Eigen::MatrixXd p1 =
      linalg::restrict(modal_to_grid(q, cfg.grid_n), arc.indices, Basis::arc_grid).matrix;
  const Eigen::MatrixXd p2 =
      linalg::restrict(modal_to_grid(modal_map(q, [](double v) { return std::sqrt(v); }), cfg.grid_n),
                       arc.indices, Basis::arc_grid)
          .matrix;

  CorrectionReport rep;
  rep.g_one = abs_spectrum(p1 - p2 * p2, "disc:g-one");
  rep.g_half = abs_spectrum(linalg::sqrt_spd(p1) - p2, "disc:g-half");
  const auto n = static_cast<std::size_t>(cfg.grid_n);
  const std::size_t len = rep.g_one.size();
  const std::size_t hi = std::min(n / 4, len);
  const double scale = q(0);
  rep.trend_one = linalg::decay_trend(rep.g_one.values, 1.0, std::max<std::size_t>(1, n / 32),
                                      std::max<std::size_t>(1, n / 16), std::max<std::size_t>(1, n / 8),
                                      hi, linalg::kNoiseFloor * scale);
  rep.trend_half = linalg::decay_trend(rep.g_half.values, 0.5, std::max<std::size_t>(1, n / 32),
                                       std::max<std::size_t>(1, n / 16),
                                       std::max<std::size_t>(1, n / 8), hi,
                                       linalg::kNoiseFloor * std::sqrt(scale));
  return rep;
}

MonotonicityReport birman_monotonicity(const DiscConfig& cfg, std::vector<double> thetas,
                                       double tolerance) {
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
  if (thetas.empty() || thetas.back() < kTwoPi) thetas.push_back(kTwoPi);
  MonotonicityReport rep;
  rep.thetas = thetas;
  std::vector<std::vector<double>> spectra;
  for (double th : thetas) {
    DiscConfig c = cfg;
    c.theta_plus = th;
    spectra.push_back(krein_spectrum_dirichlet_ref(c).route_a.values);
  }
  const double mu1 = spectra.back().front();
  for (std::size_t k = 0; k + 1 < spectra.size(); ++k) {
    const auto& lo = spectra[k];
    const auto& hi = spectra[k + 1];
    const std::size_t len = std::min(lo.size(), hi.size());
    for (std::size_t j = 0; j < len; ++j) {
      rep.worst_violation = std::max(rep.worst_violation, (lo[j] - hi[j]) / mu1);
    }
  }
  rep.holds = rep.worst_violation <= tolerance;
  return rep;
}

}  // namespace kreinlab::disc
