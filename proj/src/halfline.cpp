#include "kreinlab/halfline.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kreinlab/error.hpp"

namespace kreinlab::halfline {

using linalg::Basis;

std::vector<double> HalflineGrid::points() const {
  std::vector<double> t(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) t[static_cast<std::size_t>(i)] = point(i);
  return t;
}

std::vector<double> HalflineGrid::frequencies() const {
  std::vector<double> tau(static_cast<std::size_t>(size));
  const double base = std::numbers::pi / extent;
  for (int k = 0; k < size; ++k) {
    const int signed_k = k < size / 2 ? k : k - size;
    tau[static_cast<std::size_t>(k)] = base * signed_k;
  }
  return tau;
}

HalflineGrid make_grid(double extent, int size) {
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw DomainError("halfline grid: extent must be positive, got " + std::to_string(extent));
  }
  if (size < 64 || (size & (size - 1)) != 0) {
    throw DomainError("halfline grid: size must be a power of two >= 64, got " +
                      std::to_string(size));
  }
  return HalflineGrid{extent, size};
}

std::complex<double> symbol_value(const SymbolSpec& sym, double tau) {
  if (!(sym.alpha > 0.0)) throw DomainError("symbol: alpha must be positive");
  const double a = sym.alpha;
  switch (sym.kind) {
    case SymbolKind::sqrt_full: return std::sqrt(tau * tau + a * a);
    case SymbolKind::lambda_plus: return 1.0 / std::sqrt(std::complex<double>(a, tau));
    case SymbolKind::lambda_minus: return 1.0 / std::sqrt(std::complex<double>(a, -tau));
    case SymbolKind::p0_nu_gamma: return -1.0 / std::sqrt(tau * tau + a * a);
  }
  throw DomainError("symbol: unknown kind");
}

PlusMask plus_mask(const HalflineGrid& grid) {
  PlusMask mask;
  for (int i = 0; i < grid.size; ++i) {
    (grid.point(i) > 0.0 ? mask.indices : mask.minus).push_back(i);
  }
  mask.reflected.reserve(mask.indices.size());
  for (int i : mask.indices) mask.reflected.push_back(grid.size - 1 - i);
  return mask;
}

GridOperator op_multiplier(const std::function<std::complex<double>(double)>& symbol,
                           const HalflineGrid& grid) {
  const int n = grid.size;
  const auto tau = grid.frequencies();
  std::vector<std::complex<double>> a(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) a[static_cast<std::size_t>(k)] = symbol(tau[static_cast<std::size_t>(k)]);
  const double nyquist = std::numbers::pi / grid.spacing();
  // +-tau_N alias to one mode. Keep the modulus (signed by the real part) so
  // that products of factors, e.g. lambda_+ lambda_-, stay exact there too.
  const std::complex<double> an = 0.5 * (symbol(nyquist) + std::conj(symbol(-nyquist)));
  a[static_cast<std::size_t>(n / 2)] = std::copysign(std::abs(an), an.real());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> c;
  fft.inv(c, a);  // scaled by 1/N

  double largest = 0.0;
  double imag = 0.0;
  for (const auto& z : c) {
    largest = std::max(largest, std::abs(z.real()));
    imag = std::max(imag, std::abs(z.imag()));
  }
  if (imag > 1e-12 * std::max(largest, 1e-300)) {
    throw DomainError("op_multiplier: symbol is not Hermitian (imaginary kernel part " +
                      std::to_string(imag) + ")");
  }
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m(i, j) = c[static_cast<std::size_t>((i - j + n) % n)].real();
    }
  }
  const bool symmetric = linalg::relative_asymmetry(m) <= 1e-12;
  if (symmetric) m = linalg::symmetrized(m);
  return GridOperator{std::move(m), Basis::halfline_grid, grid.spacing(), symmetric};
}

GridOperator op_symbol(const SymbolSpec& sym, const HalflineGrid& grid) {
  return op_multiplier([&sym](double tau) { return symbol_value(sym, tau); }, grid);
}

GridOperator truncate(const GridOperator& a, const PlusMask& mask) {
  if (mask.indices.empty()) throw DomainError("truncate: empty mask");
  if (a.basis != Basis::halfline_grid && a.basis != Basis::circle_grid) {
    throw BasisMismatchError("truncate: expected a full-grid operator, got " +
                             std::string(linalg::to_string(a.basis)));
  }
  return linalg::restrict(a, mask.indices, Basis::halfline_grid);
}

GridOperator assemble_L0(double alpha, const HalflineGrid& grid, const PlusMask& mask) {
  return truncate(op_symbol({SymbolKind::sqrt_full, alpha}, grid), mask);
}

GridOperator assemble_L0_inverse(double alpha, const HalflineGrid& grid, const PlusMask& mask) {
  const GridOperator pp = truncate(op_symbol({SymbolKind::lambda_plus, alpha}, grid), mask);
  const GridOperator mp = truncate(op_symbol({SymbolKind::lambda_minus, alpha}, grid), mask);
  Eigen::MatrixXd prod = pp.matrix * mp.matrix;
  // Lambda_- = Lambda_+^T, so the product is symmetric up to roundoff.
  return GridOperator{linalg::symmetrized(prod), Basis::halfline_grid, grid.spacing(), true};
}

Eigen::MatrixXd gplus(const GridOperator& q, const PlusMask& mask) {
  const auto n = static_cast<Eigen::Index>(mask.indices.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const int col = mask.reflected[static_cast<std::size_t>(k)];
    for (Eigen::Index a = 0; a < n; ++a) g(a, k) = q.matrix(mask.indices[static_cast<std::size_t>(a)], col);
  }
  return g;
}

Eigen::MatrixXd gminus(const GridOperator& q, const PlusMask& mask) {
  const auto n = static_cast<Eigen::Index>(mask.indices.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const int col = mask.indices[static_cast<std::size_t>(b)];
    for (Eigen::Index k = 0; k < n; ++k) g(k, b) = q.matrix(mask.reflected[static_cast<std::size_t>(k)], col);
  }
  return g;
}

double hankel_kernel(double alpha, double t) {
  if (!(t > 0.0)) throw DomainError("hankel_kernel: t must be positive");
  return std::exp(-alpha * t) / std::sqrt(std::numbers::pi * t);
}

namespace {

// integral of the kernel over [a, b], 0 <= a < b
double kernel_integral(double alpha, double a, double b) {
  const double ra = std::sqrt(alpha);
  return (std::erf(std::sqrt(alpha * b)) - std::erf(std::sqrt(alpha * a))) / ra;
}

}  // namespace

GridOperator hankel_operator(double alpha, const HalflineGrid& grid, const PlusMask& mask) {
  const auto n = static_cast<Eigen::Index>(mask.indices.size());
  const double h = grid.spacing();
  // t_i + t_j = (a + b + 1) h for plus-local indices a, b
  std::vector<double> diag(static_cast<std::size_t>(2 * n));
  for (Eigen::Index d = 1; d < 2 * n; ++d) {
    const double s = static_cast<double>(d) * h;
    diag[static_cast<std::size_t>(d)] =
        d <= 2 ? kernel_integral(alpha, s - 0.5 * h, s + 0.5 * h) : h * hankel_kernel(alpha, s);
  }
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) m(a, b) = diag[static_cast<std::size_t>(a + b + 1)];
  }
  return GridOperator{std::move(m), Basis::halfline_grid, h, true};
}

DecompositionReport decomposition_check(double alpha, const HalflineGrid& grid, const PlusMask& mask) {
  const GridOperator lp = op_symbol({SymbolKind::lambda_plus, alpha}, grid);
  const GridOperator lm = op_symbol({SymbolKind::lambda_minus, alpha}, grid);
  const GridOperator p0 = truncate(op_symbol({SymbolKind::p0_nu_gamma, alpha}, grid), mask);
  const Eigen::MatrixXd l0inv = truncate(lp, mask).matrix * truncate(lm, mask).matrix;
  const Eigen::MatrixXd gp = gplus(lp, mask);
  const Eigen::MatrixXd gm = gminus(lm, mask);
  const GridOperator hk = hankel_operator(alpha, grid, mask);

  DecompositionReport rep;
  rep.norm_l0_inverse = linalg::spectral_norm(linalg::symmetrized(l0inv));
  const Eigen::MatrixXd base = l0inv + p0.matrix;
  rep.residual_fft = linalg::spectral_norm(base + gp * gm) / rep.norm_l0_inverse;
  rep.residual_kernel = linalg::spectral_norm(base + hk.matrix * hk.matrix) / rep.norm_l0_inverse;
  rep.hankel_gap = linalg::spectral_norm(hk.matrix - gp) / linalg::spectral_norm(gp);
  rep.adjoint_gap = (gp - gm.transpose()).cwiseAbs().maxCoeff() / gp.cwiseAbs().maxCoeff();
  return rep;
}

Eigen::VectorXd gaussian_bump(const HalflineGrid& grid, const PlusMask& mask) {
  const double centre = 0.5 * grid.extent;
  const double sigma = grid.extent / 20.0;
  Eigen::VectorXd u(static_cast<Eigen::Index>(mask.indices.size()));
  for (std::size_t k = 0; k < mask.indices.size(); ++k) {
    const double x = (grid.point(mask.indices[k]) - centre) / sigma;
    u(static_cast<Eigen::Index>(k)) = std::exp(-0.5 * x * x);
  }
  return u;
}

namespace {

double norm_where(const Eigen::VectorXd& v, const std::vector<int>& idx, const HalflineGrid& grid,
                  double lo, double hi) {
  double acc = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double t = grid.point(idx[k]);
    if (t > lo && t <= hi) acc += v(static_cast<Eigen::Index>(k)) * v(static_cast<Eigen::Index>(k));
  }
  return std::sqrt(acc);
}

}  // namespace

FactorizationReport factorization_check(double alpha, const HalflineGrid& grid,
                                        const PlusMask& mask) {
  const GridOperator lp = op_symbol({SymbolKind::lambda_plus, alpha}, grid);
  const GridOperator lm = op_symbol({SymbolKind::lambda_minus, alpha}, grid);
  const Eigen::MatrixXd pp = truncate(lp, mask).matrix;
  const Eigen::MatrixXd mp = truncate(lm, mask).matrix;
  const Eigen::MatrixXd l0 = assemble_L0(alpha, grid, mask).matrix;
  const Eigen::VectorXd u = gaussian_bump(grid, mask);
  const double un = u.norm();
  const double t = grid.extent;

  FactorizationReport rep;
  const Eigen::VectorXd right = l0 * (pp * (mp * u)) - u;
  const Eigen::VectorXd left = pp * (mp * (l0 * u)) - u;
  rep.right_residual = right.norm() / un;
  rep.left_residual = left.norm() / un;
  rep.right_residual_interior = norm_where(right, mask.indices, grid, 0.0, 0.5 * t) / un;
  rep.left_residual_interior = norm_where(left, mask.indices, grid, 0.0, 0.5 * t) / un;

  std::vector<int> all(static_cast<std::size_t>(grid.size));
  for (int i = 0; i < grid.size; ++i) all[static_cast<std::size_t>(i)] = i;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(grid.size);
  Eigen::VectorXd mirrored = Eigen::VectorXd::Zero(grid.size);
  for (std::size_t k = 0; k < mask.indices.size(); ++k) {
    full(mask.indices[k]) = u(static_cast<Eigen::Index>(k));
    mirrored(mask.reflected[k]) = u(static_cast<Eigen::Index>(k));
  }
  const Eigen::VectorXd plus_image = lp.matrix * full;
  const Eigen::VectorXd minus_image = lm.matrix * mirrored;
  rep.plus_leakage_cut = norm_where(plus_image, all, grid, -0.5 * t, 0.0) / un;
  rep.plus_leakage_seam = norm_where(plus_image, all, grid, -t - 1.0, -0.5 * t) / un;
  rep.minus_leakage_cut = norm_where(minus_image, all, grid, 0.0, 0.5 * t) / un;
  rep.minus_leakage_seam = norm_where(minus_image, all, grid, 0.5 * t, t) / un;
  return rep;
}

std::vector<double> default_window(const HalflineGrid& grid, const PlusMask& mask) {
  std::vector<double> w;
  w.reserve(mask.indices.size());
  for (int i : mask.indices) {
    const double t = grid.point(i);
    w.push_back(t <= 0.5 * grid.extent
                    ? 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * t / grid.extent))
                    : 0.0);
  }
  return w;
}

DecayReport gplus_decay(double alpha, const HalflineGrid& grid, const PlusMask& mask,
                        const std::vector<double>& window) {
  if (window.size() != mask.indices.size()) {
    throw DomainError("gplus_decay: window length does not match the plus grid");
  }
  const Eigen::MatrixXd h = gplus(op_symbol({SymbolKind::lambda_plus, alpha}, grid), mask);
  const Eigen::Map<const Eigen::VectorXd> psi(window.data(), static_cast<Eigen::Index>(window.size()));
  DecayReport rep;
  rep.spectrum = linalg::SingularSpectrum{linalg::singular_values(psi.asDiagonal() * h),
                                          "halfline:psi-gplus", {}};
  rep.bound = psi.cwiseAbs().maxCoeff() * linalg::singular_values(h).front();
  const auto n = static_cast<std::size_t>(grid.size);
  rep.trend = linalg::decay_trend(rep.spectrum.values, 0.5, n / 32, n / 16, n / 8, n / 4);
  return rep;
}

DecayReport gplus_decay(double alpha, const HalflineGrid& grid, const PlusMask& mask) {
  return gplus_decay(alpha, grid, mask, default_window(grid, mask));
}

double truncation_defect_gap(const GridOperator& q1, const GridOperator& q2,
                             const GridOperator& q1q2, const PlusMask& mask) {
  const Eigen::MatrixXd defect =
      truncate(q1q2, mask).matrix - truncate(q1, mask).matrix * truncate(q2, mask).matrix;
  const Eigen::MatrixXd singular_green = gplus(q1, mask) * gminus(q2, mask);
  const double scale = defect.cwiseAbs().maxCoeff();
  if (scale == 0.0) return (singular_green).cwiseAbs().maxCoeff();
  return (defect - singular_green).cwiseAbs().maxCoeff() / scale;
}

}  // namespace kreinlab::halfline
