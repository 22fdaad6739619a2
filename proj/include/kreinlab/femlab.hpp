#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <filesystem>
#include <string_view>
#include <vector>

#include "kreinlab/linalg.hpp"

namespace kreinlab::femlab {

enum class Geometry { disc, half_disc };

std::string_view to_string(Geometry g);
Geometry geometry_from_string(std::string_view s);

/// Polar P1 mesh: node 0 is the centre, ring k (1..n_r) has radius k/n_r.
/// Disc rings carry n_theta nodes at 2 pi j/n_theta; half-disc rings carry
/// n_theta + 1 nodes at pi j/n_theta (x2 >= 0).
struct FemMesh {
  Geometry geometry = Geometry::disc;
  int n_r = 0;
  int n_theta = 0;
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;
  /// Boundary edges as node pairs; for the half-disc the diameter edges come
  /// first, then the semicircle.
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<bool> on_boundary;

  int node_count() const { return static_cast<int>(nodes.size()); }
};

FemMesh build_mesh(Geometry geometry, int n_r, int n_theta);

double mesh_area(const FemMesh& mesh);
double triangle_area(const FemMesh& mesh, const std::array<int, 3>& t);

/// Writes `x y` per node and `i j k` (zero-based) per triangle.
void export_mesh(const FemMesh& mesh, const std::filesystem::path& nodes_file,
                 const std::filesystem::path& triangles_file);

struct BoundaryCondition {
  enum class Kind { dirichlet, robin, mixed };
  Kind kind = Kind::dirichlet;
  double b = 0.0;
  /// Disc only: Sigma_+ is the arc theta in [0, theta_plus]. On the half-disc
  /// Sigma_+ is always the diameter.
  double theta_plus = 0.0;

  static BoundaryCondition dirichlet() { return {Kind::dirichlet, 0.0, 0.0}; }
  static BoundaryCondition robin(double b) { return {Kind::robin, b, 0.0}; }
  static BoundaryCondition mixed(double theta_plus, double b) { return {Kind::mixed, b, theta_plus}; }
};

/// Stiffness a(u, v) = (grad u, grad v) + alpha^2 (u, v) + b (u, v)_{Sigma_+}
/// and consistent mass on all nodes; `free_dofs` are the nodes not carrying
/// the Dirichlet condition (interface nodes are Dirichlet).
struct FemSystem {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> mass;
  std::vector<int> free_dofs;
  std::vector<int> sigma_plus;   // boundary nodes on Sigma_+ (free)
  std::vector<int> sigma_minus;  // boundary nodes on Sigma_- (Dirichlet)

  Eigen::SparseMatrix<double> reduced_stiffness() const;
  Eigen::SparseMatrix<double> reduced_mass() const;
};

/// Throws IndefiniteError if the reduced stiffness is not positive definite.
FemSystem assemble(const FemMesh& mesh, double alpha, const BoundaryCondition& bc);

/// Smallest `count` eigenvalues of the reduced pencil, ascending. Shift-invert
/// subspace iteration with a sparse LDLT factor.
std::vector<double> realization_spectrum(const FemSystem& sys, int count);

inline constexpr int kDenseNodeBudget = 4000;

/// Eigenvalues of M^{1/2} (E_m K_m^{-1} E_m^T - E_d K_d^{-1} E_d^T) M^{1/2},
/// descending; `count` <= 0 returns all of them.
linalg::SingularSpectrum resolvent_difference_spectrum(const FemMesh& mesh, double alpha,
                                                       double theta_plus, double b, int count);

/// Frobenius residual of (B - l)^{-1} - (B1 - l)^{-1}
///   - (1 + l (B1 - l)^{-1}) (B^{-1} - B1^{-1}) (1 + l (B - l)^{-1})
/// relative to the left side, for the L2 realizations of two systems on one
/// mesh (B from `sys`, B1 from `sys_ref`).
double lambda_shift_check(const FemSystem& sys, const FemSystem& sys_ref, double lambda);

/// Same identity for explicit symmetric matrices.
double lambda_shift_residual(const Eigen::MatrixXd& b, const Eigen::MatrixXd& b1, double lambda);

/// Exact mixed half-disc spectrum {j_{m,k}^2 + alpha^2 : m >= 0} up to `upper`,
/// ascending (Neumann diameter, Dirichlet semicircle).
std::vector<double> half_disc_mixed_exact(double alpha, double upper);

}  // namespace kreinlab::femlab
