#pragma once

#include <numbers>
#include <vector>

#include "kreinlab/linalg.hpp"

namespace kreinlab::disc {

using linalg::GridOperator;
using linalg::SingularSpectrum;

struct DiscConfig {
  double alpha = 1.0;
  double b = 0.0;
  double theta_plus = std::numbers::pi;
  int grid_n = 1024;
  double shift_k = 0.0;

  int mode_cut() const { return grid_n / 2; }
};

/// Checks ranges and positivity of b - p_m; with `neumann_route` also
/// K < -p_0 and b + K > 0. Throws ConfigError.
void validate(const DiscConfig& cfg, bool neumann_route = false);

/// Real even modal sequence; values[|m|] for |m| = 0..M.
struct ModalOperator {
  std::vector<double> values;

  int mode_cut() const { return static_cast<int>(values.size()) - 1; }
  double operator()(int m) const { return values.at(static_cast<std::size_t>(m < 0 ? -m : m)); }
};

/// p_m = -alpha I_m'(alpha) / I_m(alpha), the Dirichlet-to-Neumann eigenvalues
/// with the interior normal.
ModalOperator dtn_modal(double alpha, int mode_cut);

/// q_m = int_0^1 (I_m(alpha r) / I_m(alpha))^2 r dr by tanh-sinh quadrature.
ModalOperator poisson_gram_modal(double alpha, int mode_cut, double tolerance = 1e-12);

/// Elementwise map of a modal sequence.
template <class F>
ModalOperator modal_map(const ModalOperator& op, F f) {
  ModalOperator out;
  out.values.reserve(op.values.size());
  for (double v : op.values) out.values.push_back(f(v));
  return out;
}

/// Circulant matrix on theta_i = 2 pi i / N, diagonal in the Fourier modes
/// m = -M..M-1 with the given values. Requires N = 2M.
GridOperator modal_to_grid(const ModalOperator& op, int n);

/// Indices with theta_i in [0, theta_plus).
struct ArcMask {
  std::vector<int> indices;
};

ArcMask arc_mask(int n, double theta_plus);

/// b I - P_{gamma,nu} truncated to the arc.
GridOperator assemble_L(const DiscConfig& cfg);

/// Descending eigenvalues of the full-boundary diagonal form q_m / (b - p_m)
/// over m = -M..M-1, without assembling matrices.
std::vector<double> full_boundary_spectrum(double alpha, double b, int mode_cut);

struct KreinSpectra {
  /// eig(P1+^{1/2} L^{-1} P1+^{1/2})
  SingularSpectrum route_a;
  /// eig(P2+ L^{-1} P2+), P2 = P1^{1/2} taken on the modes
  SingularSpectrum route_b;
};

KreinSpectra krein_spectrum_dirichlet_ref(const DiscConfig& cfg);

/// eig(P1^{1/2} X P1^{1/2}) with X = P'(P' - f 1_+)^{-1} f 1_+ on the full
/// circle, P' = grid(1/(p_m + K)), f = 1/(b + K). Nonzero part, descending.
SingularSpectrum krein_spectrum_neumann_ref(const DiscConfig& cfg);

struct RemainderReport {
  SingularSpectrum remainder;  // s_j(R), R = L^{-1} + P_{nu,gamma,+}
  SingularSpectrum l_inverse;  // s_j(L^{-1})
  std::size_t window_lo = 0;
  std::size_t window_hi = 0;
  /// median of s_j(R) / s_j(L^{-1}) over the window; s_j(R) below
  /// kNoiseFloor |L^{-1}| counts as zero
  double trend = 0.0;
  double norm_remainder = 0.0;
};

/// Window defaults to j in [N/32, N/4].
RemainderReport remainder_check(const DiscConfig& cfg);

struct CorrectionReport {
  SingularSpectrum g_one;   // P1+ - P2+^2
  SingularSpectrum g_half;  // P1+^{1/2} - P2+
  /// s_j j (resp. s_j j^{1/2}) median over [N/8, N/4] relative to [N/32, N/16]
  double trend_one = 0.0;
  double trend_half = 0.0;
};

CorrectionReport g_corrections(const DiscConfig& cfg);

struct MonotonicityReport {
  std::vector<double> thetas;  // sorted, ending with 2 pi
  /// max over consecutive arcs and j of (mu_j(theta) - mu_j(theta')) / mu_1
  double worst_violation = 0.0;
  bool holds = true;
};

/// Route-A spectra over the sorted arc grid plus the full circle; checks
/// mu_j(theta) <= mu_j(theta') + tol mu_1 for every consecutive pair.
MonotonicityReport birman_monotonicity(const DiscConfig& cfg, std::vector<double> thetas,
                                       double tolerance = 1e-8);

}  // namespace kreinlab::disc
