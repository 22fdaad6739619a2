#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "kreinlab/linalg.hpp"

namespace kreinlab::halfline {

using linalg::GridOperator;
using linalg::SingularSpectrum;

/// Periodized boundary line (-T, T] with N cells. Points sit at cell
/// centres, t_i = -T + (i + 1/2) h, so that t -> -t maps the grid onto
/// itself (i -> N-1-i) and no point lies on the cut t = 0.
struct HalflineGrid {
  double extent = 20.0;
  int size = 4096;

  double spacing() const { return 2.0 * extent / size; }
  double point(int i) const { return -extent + (i + 0.5) * spacing(); }
  std::vector<double> points() const;
  /// Discrete frequencies for period 2T in FFT order (0, 1, ..., -1).
  std::vector<double> frequencies() const;
};

/// Throws DomainError unless T > 0, N >= 64 and N is a power of two.
HalflineGrid make_grid(double extent, int size);

enum class SymbolKind { sqrt_full, lambda_plus, lambda_minus, p0_nu_gamma };

struct SymbolSpec {
  SymbolKind kind = SymbolKind::sqrt_full;
  double alpha = 1.0;
};

/// (tau^2 + a^2)^{1/2}, (a +- i tau)^{-1/2} or -(tau^2 + a^2)^{-1/2};
/// principal branch.
std::complex<double> symbol_value(const SymbolSpec& sym, double tau);

/// Indices with t_i > 0; `minus` holds the rest, and `reflected[k]` is the
/// minus index of the point -t of plus[k].
struct PlusMask {
  std::vector<int> indices;
  std::vector<int> minus;
  std::vector<int> reflected;
};

PlusMask plus_mask(const HalflineGrid& grid);

/// Fourier multiplier matrix F^{-1} diag(a(tau_k)) F. At the Nyquist mode the
/// symbol is replaced by |a(tau_N)| signed by Re a(tau_N): real, so that a
/// Hermitian symbol gives a real matrix, and multiplicative over factor pairs.
/// Throws DomainError if the result is not real to 1e-12.
GridOperator op_multiplier(const std::function<std::complex<double>(double)>& symbol,
                           const HalflineGrid& grid);
GridOperator op_symbol(const SymbolSpec& sym, const HalflineGrid& grid);

/// r+ A e+ : principal submatrix on the plus indices.
GridOperator truncate(const GridOperator& a, const PlusMask& mask);

GridOperator assemble_L0(double alpha, const HalflineGrid& grid, const PlusMask& mask);
/// Lambda_{+,+} Lambda_{-,+}.
GridOperator assemble_L0_inverse(double alpha, const HalflineGrid& grid, const PlusMask& mask);

/// r+ Q e- J and J r- Q e+ for a full-grid operator Q (plus x plus blocks).
Eigen::MatrixXd gplus(const GridOperator& q, const PlusMask& mask);
Eigen::MatrixXd gminus(const GridOperator& q, const PlusMask& mask);

/// k(t) = t^{-1/2} e^{-alpha t} / sqrt(pi), inverse Fourier transform of lambda_+.
double hankel_kernel(double alpha, double t);

/// Hankel matrix h k(t_i + t_j) on the plus indices. Entries on the first two
/// anti-diagonals use exact cell averages of k (product integration), since
/// the kernel is unbounded at t + s -> 0.
GridOperator hankel_operator(double alpha, const HalflineGrid& grid, const PlusMask& mask);

struct DecompositionReport {
  /// |L0^{-1} + P0_+ + G+ G-| / |L0^{-1}| with FFT-assembled G factors.
  double residual_fft = 0.0;
  /// same with the Hankel-kernel matrix for both factors
  double residual_kernel = 0.0;
  double hankel_gap = 0.0;  // |H_kernel - H_fft| / |H_fft|
  double adjoint_gap = 0.0;  // max |G+(Lambda+) - G-(Lambda-)^T| / max |G+|
  double norm_l0_inverse = 0.0;
};

DecompositionReport decomposition_check(double alpha, const HalflineGrid& grid, const PlusMask& mask);

/// Gaussian bump exp(-(t - T/2)^2 / (2 sigma^2)) with sigma = T/20; numerically
/// supported in (T/8, 7T/8).
Eigen::VectorXd gaussian_bump(const HalflineGrid& grid, const PlusMask& mask);

struct FactorizationReport {
  /// |L0 (L0^{-1} u) - u| / |u|, full plus-vector norm
  double right_residual = 0.0;
  /// |L0^{-1} (L0 u) - u| / |u|
  double left_residual = 0.0;
  /// right residual restricted to 0 < t < T/2 (away from the periodic seam)
  double right_residual_interior = 0.0;
  double left_residual_interior = 0.0;
  /// |(Lambda+ u)| on -T/2 < t < 0 relative to |u|, u the bump
  double plus_leakage_cut = 0.0;
  /// |(Lambda+ u)| on -T < t <= -T/2, caused by periodic wrap-around
  double plus_leakage_seam = 0.0;
  /// mirror test for Lambda-: u the reflected bump, leakage into 0 < t < T/2
  double minus_leakage_cut = 0.0;
  double minus_leakage_seam = 0.0;
};

FactorizationReport factorization_check(double alpha, const HalflineGrid& grid,
                                        const PlusMask& mask);

/// Raised cosine 0.5 (1 + cos(2 pi t / T)) on [0, T/2], zero beyond.
std::vector<double> default_window(const HalflineGrid& grid, const PlusMask& mask);

struct DecayReport {
  SingularSpectrum spectrum;
  /// median s_j j^{1/2} over [N/8, N/4] divided by the median over [N/32, N/16]
  double trend = 0.0;
  double bound = 0.0;  // |psi|_inf |H|_2
};

/// Singular values of psi G+(Lambda+) (FFT assembly).
DecayReport gplus_decay(double alpha, const HalflineGrid& grid, const PlusMask& mask,
                        const std::vector<double>& window);
DecayReport gplus_decay(double alpha, const HalflineGrid& grid, const PlusMask& mask);

/// (Q1 Q2)_+ - Q1_+ Q2_+, with Q1 Q2 given as its own multiplier `q1q2`, against
/// G+(Q1) G-(Q2); returns the max-entry gap relative
/// to the largest entry of the first.
double truncation_defect_gap(const GridOperator& q1, const GridOperator& q2,
                             const GridOperator& q1q2, const PlusMask& mask);

}  // namespace kreinlab::halfline
