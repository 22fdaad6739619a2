#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kreinlab::linalg {

enum class Basis { circle_grid, arc_grid, halfline_grid, modal, fem };

std::string_view to_string(Basis basis);

/// Dense real operator in a point basis. `weight` is the quadrature weight
/// h of that basis; it cancels in every pencil eigenvalue computed here but
/// is carried so that L2 norms can be recovered.
struct GridOperator {
  Eigen::MatrixXd matrix;
  Basis basis = Basis::circle_grid;
  double weight = 1.0;
  bool symmetric = false;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Makes a GridOperator, validating the symmetry flag against the entries.
GridOperator make_operator(Eigen::MatrixXd matrix, Basis basis, double weight, bool symmetric);

GridOperator identity(Eigen::Index n, Basis basis, double weight);

/// A + B and A * B; throws BasisMismatchError on differing bases.
GridOperator sum(const GridOperator& a, const GridOperator& b);
GridOperator difference(const GridOperator& a, const GridOperator& b);
GridOperator product(const GridOperator& a, const GridOperator& b);

/// Principal submatrix on `indices`, retagged with `basis`.
GridOperator restrict(const GridOperator& a, std::span<const int> indices, Basis basis);

/// max |A - A^T| relative to max |A| (0 for the zero matrix).
double relative_asymmetry(const Eigen::MatrixXd& a);

/// Throws NonSymmetricError unless max|A - A^T| <= 1e-12 max|A|.
void require_symmetric(const Eigen::MatrixXd& a, std::string_view who);
void require_finite(const Eigen::MatrixXd& a, std::string_view who);

/// Returns (A + A^T) / 2.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a);

/// Descending nonnegative singular values with provenance.
struct SingularSpectrum {
  std::vector<double> values;
  std::string route;
  std::string config_digest;

  std::size_t size() const { return values.size(); }
  /// 1-based access, s_j.
  double s(std::size_t j) const { return values.at(j - 1); }
};

/// Eigenvalues sorted descending with matching orthonormal eigenvector columns.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

EigenDecomposition eigh(const GridOperator& a);
EigenDecomposition eigh(const Eigen::MatrixXd& a);

/// Eigenvalues only, descending.
Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& a);

SingularSpectrum singular_values(const GridOperator& a, std::string route = {});
std::vector<double> singular_values(const Eigen::MatrixXd& a);

/// Solves A X = B for SPD A. Throws IndefiniteError carrying the smallest
/// eigenvalue when A is not (numerically) positive definite.
Eigen::MatrixXd solve_spd(const GridOperator& a, const Eigen::MatrixXd& b);
Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Symmetric square root of an SPD operator.
GridOperator sqrt_spd(const GridOperator& a);
Eigen::MatrixXd sqrt_spd(const Eigen::MatrixXd& a);

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& a);

/// Converts a descending vector of eigenvalues into a SingularSpectrum,
/// clamping roundoff-level negatives (>= -tol * max) to zero.
SingularSpectrum spectrum_from_eigenvalues(const Eigen::VectorXd& descending, std::string route,
                                           double negative_tolerance = 1e-10);

/// Values below this fraction of s_1 are treated as roundoff: they are
/// reported but excluded from fits and trend statistics.
inline constexpr double kNoiseFloor = 1e-13;

/// Median of s_j j^p over 1-based j in [lo, hi]; values below
/// kNoiseFloor * s_1 (or below `absolute_floor`) count as zero.
double windowed_median(const std::vector<double>& s, double p, std::size_t lo, std::size_t hi,
                       double absolute_floor = 0.0);

/// windowed_median over the late window divided by the one over the early
/// window. Returns 0 when the early window is already at roundoff.
double decay_trend(const std::vector<double>& s, double p, std::size_t early_lo,
                   std::size_t early_hi, std::size_t late_lo, std::size_t late_hi,
                   double absolute_floor = 0.0);

}  // namespace kreinlab::linalg
