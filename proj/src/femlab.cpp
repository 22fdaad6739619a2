#include "kreinlab/femlab.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "kreinlab/error.hpp"
#include "kreinlab/specfun.hpp"

namespace kreinlab::femlab {

namespace {

constexpr double kPi = std::numbers::pi;

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::SparseMatrix<double> submatrix(const Eigen::SparseMatrix<double>& a,
                                      const std::vector<int>& idx) {
  std::vector<int> local(static_cast<std::size_t>(a.rows()), -1);
  for (std::size_t k = 0; k < idx.size(); ++k) local[static_cast<std::size_t>(idx[k])] = static_cast<int>(k);
  Triplets t;
  for (int col = 0; col < a.outerSize(); ++col) {
    const int lc = local[static_cast<std::size_t>(col)];
    if (lc < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it) {
      const int lr = local[static_cast<std::size_t>(it.row())];
      if (lr >= 0) t.emplace_back(lr, lc, it.value());
    }
  }
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::SparseMatrix<double> out(n, n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

// Inclusion of the free dofs into the node space, as a dense n x f matrix.
Eigen::MatrixXd inclusion(int nodes, const std::vector<int>& free) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(nodes, static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) e(free[k], static_cast<Eigen::Index>(k)) = 1.0;
  return e;
}

double node_angle(const Eigen::Vector2d& p) {
  double a = std::atan2(p.y(), p.x());
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

}  // namespace

std::string_view to_string(Geometry g) { return g == Geometry::disc ? "disc" : "half-disc"; }

Geometry geometry_from_string(std::string_view s) {
  if (s == "disc") return Geometry::disc;
  if (s == "half-disc") return Geometry::half_disc;
  throw ConfigError("unknown geometry '" + std::string(s) + "' (expected disc or half-disc)");
}

FemMesh build_mesh(Geometry geometry, int n_r, int n_theta) {
  if (n_r < 4 || n_theta < 8) {
    throw DomainError("build_mesh: need n_r >= 4 and n_theta >= 8, got " + std::to_string(n_r) +
                      " x " + std::to_string(n_theta));
  }
  FemMesh mesh;
  mesh.geometry = geometry;
  mesh.n_r = n_r;
  mesh.n_theta = n_theta;
  const bool disc = geometry == Geometry::disc;
  const int per_ring = disc ? n_theta : n_theta + 1;
  const double dtheta = (disc ? 2.0 * kPi : kPi) / n_theta;
  auto node = [&](int k, int j) {
    if (k == 0) return 0;
    if (disc) j %= n_theta;
    return 1 + (k - 1) * per_ring + j;
  };

  mesh.nodes.emplace_back(0.0, 0.0);
  for (int k = 1; k <= n_r; ++k) {
    const double r = static_cast<double>(k) / n_r;
    for (int j = 0; j < per_ring; ++j) {
      const double th = j * dtheta;
      mesh.nodes.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  }
  if (!disc) {
    // pin the diameter exactly onto x2 = 0
    for (int k = 1; k <= n_r; ++k) mesh.nodes[static_cast<std::size_t>(node(k, n_theta))].y() = 0.0;
  }
  for (int j = 0; j < n_theta; ++j) mesh.triangles.push_back({0, node(1, j), node(1, j + 1)});
  for (int k = 1; k < n_r; ++k) {
    for (int j = 0; j < n_theta; ++j) {
      const int a = node(k, j), b = node(k, j + 1), c = node(k + 1, j), d = node(k + 1, j + 1);
      mesh.triangles.push_back({a, c, d});
      mesh.triangles.push_back({a, d, b});
    }
  }
  if (!disc) {
    for (int k = 0; k < n_r; ++k) mesh.boundary_edges.push_back({node(k, 0), node(k + 1, 0)});
    for (int k = 0; k < n_r; ++k) {
      mesh.boundary_edges.push_back({node(k + 1, n_theta), node(k, n_theta)});
    }
  }
  for (int j = 0; j < n_theta; ++j) mesh.boundary_edges.push_back({node(n_r, j), node(n_r, j + 1)});

  mesh.on_boundary.assign(mesh.nodes.size(), false);
  for (const auto& e : mesh.boundary_edges) {
    mesh.on_boundary[static_cast<std::size_t>(e[0])] = true;
    mesh.on_boundary[static_cast<std::size_t>(e[1])] = true;
  }
  for (const auto& t : mesh.triangles) {
    if (!(triangle_area(mesh, t) > 1e-14)) throw DomainError("build_mesh: degenerate triangle");
  }
  return mesh;
}

double triangle_area(const FemMesh& mesh, const std::array<int, 3>& t) {
  const Eigen::Vector2d& a = mesh.nodes[static_cast<std::size_t>(t[0])];
  const Eigen::Vector2d& b = mesh.nodes[static_cast<std::size_t>(t[1])];
  const Eigen::Vector2d& c = mesh.nodes[static_cast<std::size_t>(t[2])];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double mesh_area(const FemMesh& mesh) {
  double s = 0.0;
  for (const auto& t : mesh.triangles) s += triangle_area(mesh, t);
  return s;
}

void export_mesh(const FemMesh& mesh, const std::filesystem::path& nodes_file,
                 const std::filesystem::path& triangles_file) {
  std::ofstream nf(nodes_file, std::ios::binary);
  std::ofstream tf(triangles_file, std::ios::binary);
  if (!nf || !tf) throw Error("export_mesh: cannot open output files");
  nf.precision(17);
  for (const auto& p : mesh.nodes) nf << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles) tf << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  if (!nf || !tf) throw Error("export_mesh: write failed");
}

Eigen::SparseMatrix<double> FemSystem::reduced_stiffness() const {
  return submatrix(stiffness, free_dofs);
}

Eigen::SparseMatrix<double> FemSystem::reduced_mass() const { return submatrix(mass, free_dofs); }

FemSystem assemble(const FemMesh& mesh, double alpha, const BoundaryCondition& bc) {
  if (!(alpha > 0.0)) throw DomainError("assemble: alpha must be positive");
  if (!std::isfinite(bc.b)) throw DomainError("assemble: b must be finite");
  const int n = mesh.node_count();
  Triplets kt;
  Triplets mt;
  const double a2 = alpha * alpha;
  for (const auto& t : mesh.triangles) {
    const double area = triangle_area(mesh, t);
    Eigen::Vector2d g[3];
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d& pj = mesh.nodes[static_cast<std::size_t>(t[(i + 1) % 3])];
      const Eigen::Vector2d& pk = mesh.nodes[static_cast<std::size_t>(t[(i + 2) % 3])];
      g[i] = Eigen::Vector2d(pj.y() - pk.y(), pk.x() - pj.x()) / (2.0 * area);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double m = area / 12.0 * (i == j ? 2.0 : 1.0);
        kt.emplace_back(t[i], t[j], area * g[i].dot(g[j]) + a2 * m);
        mt.emplace_back(t[i], t[j], m);
      }
    }
  }

  // Boundary partition.
  std::vector<bool> plus_edge(mesh.boundary_edges.size(), false);
  std::vector<bool> free_node(static_cast<std::size_t>(n), true);
  for (int i = 0; i < n; ++i) {
    if (mesh.on_boundary[static_cast<std::size_t>(i)]) free_node[static_cast<std::size_t>(i)] = false;
  }
  using Kind = BoundaryCondition::Kind;
  const bool full_arc = bc.kind == Kind::mixed && mesh.geometry == Geometry::disc &&
                        bc.theta_plus >= 2.0 * kPi * (1.0 - 1e-12);
  if (bc.kind == Kind::robin || full_arc) {
    std::fill(plus_edge.begin(), plus_edge.end(), true);
    std::fill(free_node.begin(), free_node.end(), true);
  } else if (bc.kind == Kind::mixed) {
    if (mesh.geometry == Geometry::half_disc) {
      const std::size_t diameter = 2 * static_cast<std::size_t>(mesh.n_r);
      for (std::size_t e = 0; e < diameter; ++e) plus_edge[e] = true;
    } else {
      if (bc.theta_plus < 0.0) throw DomainError("assemble: theta_plus must be nonnegative");
      const double tol = 1e-12;
      for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& ed = mesh.boundary_edges[e];
        const double a0 = node_angle(mesh.nodes[static_cast<std::size_t>(ed[0])]);
        double a1 = node_angle(mesh.nodes[static_cast<std::size_t>(ed[1])]);
        if (a1 < a0) a1 += 2.0 * kPi;  // the edge that closes the circle
        plus_edge[e] = a1 <= bc.theta_plus + tol;
      }
    }
    // A boundary node is free iff every boundary edge through it is in
    // Sigma_+; interface nodes stay Dirichlet.
    std::vector<int> plus_count(static_cast<std::size_t>(n), 0);
    std::vector<int> edge_count(static_cast<std::size_t>(n), 0);
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
      for (int v : mesh.boundary_edges[e]) {
        ++edge_count[static_cast<std::size_t>(v)];
        if (plus_edge[e]) ++plus_count[static_cast<std::size_t>(v)];
      }
    }
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (edge_count[k] > 0 && plus_count[k] == edge_count[k]) free_node[k] = true;
    }
  }

  if (bc.b != 0.0) {
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
      if (!plus_edge[e]) continue;
      const auto& ed = mesh.boundary_edges[e];
      const double len = (mesh.nodes[static_cast<std::size_t>(ed[0])] -
                          mesh.nodes[static_cast<std::size_t>(ed[1])]).norm();
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) kt.emplace_back(ed[i], ed[j], bc.b * len / 6.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }

  FemSystem sys;
  sys.stiffness.resize(n, n);
  sys.stiffness.setFromTriplets(kt.begin(), kt.end());
  sys.mass.resize(n, n);
  sys.mass.setFromTriplets(mt.begin(), mt.end());
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (free_node[k]) sys.free_dofs.push_back(i);
    if (mesh.on_boundary[k]) (free_node[k] ? sys.sigma_plus : sys.sigma_minus).push_back(i);
  }
  if (!sys.free_dofs.empty()) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.reduced_stiffness());
    const double dmin = ldlt.info() == Eigen::Success ? ldlt.vectorD().minCoeff() : -1.0;
    if (!(dmin > 0.0)) {
      throw IndefiniteError("assemble: reduced stiffness is not positive definite (smallest pivot " +
                                std::to_string(dmin) + ")",
                            dmin);
    }
  }
  return sys;
}

std::vector<double> realization_spectrum(const FemSystem& sys, int count) {
  const auto n = static_cast<int>(sys.free_dofs.size());
  if (count < 1 || count > n / 4) {
    throw DomainError("realization_spectrum: count must lie in [1, dofs/4 = " +
                      std::to_string(n / 4) + "]");
  }
  const Eigen::SparseMatrix<double> k = sys.reduced_stiffness();
  const Eigen::SparseMatrix<double> m = sys.reduced_mass();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(k);
  if (solver.info() != Eigen::Success) throw ConvergenceError("realization_spectrum: factorization failed");

  const int p = std::min(n, std::max(2 * count, count + 8));
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd x(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) x(i, j) = uni(rng);
  }
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(count, std::numeric_limits<double>::infinity());
  for (int it = 0; it < 1000; ++it) {
    const Eigen::MatrixXd y = solver.solve(m * x);
    const Eigen::MatrixXd kr = linalg::symmetrized(y.transpose() * (k * y));
    const Eigen::MatrixXd mr = linalg::symmetrized(y.transpose() * (m * y));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(kr, mr);
    if (ritz.info() != Eigen::Success) throw ConvergenceError("realization_spectrum: Rayleigh-Ritz failed");
    x = y * ritz.eigenvectors();
    const Eigen::VectorXd ev = ritz.eigenvalues().head(count);
    if (((ev - prev).array().abs() <= 1e-13 * ev.array().abs()).all()) {
      return {ev.data(), ev.data() + ev.size()};
    }
    prev = ev;
  }
  throw ConvergenceError("realization_spectrum: subspace iteration did not converge");
}

namespace {

// L_M^T E K_ff^{-1} E^T L_M for the mass Cholesky factor L_M.
Eigen::MatrixXd resolvent_in_l2(const FemSystem& sys, const Eigen::MatrixXd& lmass, double lambda) {
  const int n = static_cast<int>(sys.mass.rows());
  const Eigen::MatrixXd e = inclusion(n, sys.free_dofs);
  Eigen::MatrixXd a = Eigen::MatrixXd(sys.reduced_stiffness()) - lambda * Eigen::MatrixXd(sys.reduced_mass());
  const Eigen::MatrixXd rhs = e.transpose() * lmass;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  const double rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
  if (!(rcond > 1e-13)) {
    throw SingularError("pencil is singular at lambda = " + std::to_string(lambda),
                        rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
  }
  return lmass.transpose() * (e * ldlt.solve(rhs));
}

Eigen::MatrixXd mass_factor(const FemSystem& sys) {
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(sys.mass)};
  if (llt.info() != Eigen::Success) throw IndefiniteError("mass matrix is not positive definite", 0.0);
  return llt.matrixL();
}

void check_budget(int nodes, std::string_view who) {
  if (nodes > kDenseNodeBudget) {
    throw BudgetError(std::string(who) + ": " + std::to_string(nodes) +
                      " nodes exceed the dense budget of " + std::to_string(kDenseNodeBudget));
  }
}

}  // namespace

linalg::SingularSpectrum resolvent_difference_spectrum(const FemMesh& mesh, double alpha,
                                                       double theta_plus, double b, int count) {
  check_budget(mesh.node_count(), "resolvent_difference_spectrum");
  const FemSystem mixed = assemble(mesh, alpha, BoundaryCondition::mixed(theta_plus, b));
  const FemSystem dir = assemble(mesh, alpha, BoundaryCondition::dirichlet());
  const Eigen::MatrixXd lm = mass_factor(dir);
  Eigen::MatrixXd d = -resolvent_in_l2(dir, lm, 0.0);
  if (!mixed.free_dofs.empty()) d += resolvent_in_l2(mixed, lm, 0.0);
  const Eigen::VectorXd ev = linalg::eigvalsh(linalg::symmetrized(d));
  const double tol = 1e-10;
  if (ev.size() && ev(ev.size() - 1) < -tol) {
    throw IndefiniteError("resolvent_difference_spectrum: negative eigenvalue " +
                              std::to_string(ev(ev.size() - 1)),
                          ev(ev.size() - 1));
  }
  linalg::SingularSpectrum s;
  s.route = "fem:resolvent-difference";
  const Eigen::Index keep = count > 0 ? std::min<Eigen::Index>(count, ev.size()) : ev.size();
  for (Eigen::Index i = 0; i < keep; ++i) s.values.push_back(std::max(ev(i), 0.0));
  return s;
}

double lambda_shift_residual(const Eigen::MatrixXd& b, const Eigen::MatrixXd& b1, double lambda) {
  if (b.rows() != b.cols() || b.rows() != b1.rows() || b1.rows() != b1.cols()) {
    throw DomainError("lambda_shift_residual: size mismatch");
  }
  const auto n = b.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  auto inv = [&](const Eigen::MatrixXd& a) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible() || lu.rcond() < 1e-13) {
      throw SingularError("lambda_shift_residual: lambda is an eigenvalue",
                          lu.rcond() > 0 ? 1.0 / lu.rcond() : std::numeric_limits<double>::infinity());
    }
    return Eigen::MatrixXd(lu.inverse());
  };
  const Eigen::MatrixXd r = inv(b - lambda * id);
  const Eigen::MatrixXd r1 = inv(b1 - lambda * id);
  const Eigen::MatrixXd lhs = r - r1;
  const Eigen::MatrixXd rhs = (id + lambda * r1) * (inv(b) - inv(b1)) * (id + lambda * r);
  const double scale = lhs.norm();
  return scale == 0.0 ? (lhs - rhs).norm() : (lhs - rhs).norm() / scale;
}

double lambda_shift_check(const FemSystem& sys, const FemSystem& sys_ref, double lambda) {
  const int n = static_cast<int>(sys.mass.rows());
  if (sys_ref.mass.rows() != n) throw DomainError("lambda_shift_check: systems live on different meshes");
  check_budget(n, "lambda_shift_check");
  const Eigen::MatrixXd lm = mass_factor(sys);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = resolvent_in_l2(sys, lm, lambda);
  const Eigen::MatrixXd r1 = resolvent_in_l2(sys_ref, lm, lambda);
  const Eigen::MatrixXd lhs = r - r1;
  const Eigen::MatrixXd rhs =
      (id + lambda * r1) * (resolvent_in_l2(sys, lm, 0.0) - resolvent_in_l2(sys_ref, lm, 0.0)) *
      (id + lambda * r);
  const double scale = lhs.norm();
  return scale == 0.0 ? (lhs - rhs).norm() : (lhs - rhs).norm() / scale;
}

std::vector<double> half_disc_mixed_exact(double alpha, double upper) {
  const double a2 = alpha * alpha;
  std::vector<double> out;
  if (!(upper > a2)) return out;
  const double bound = std::sqrt(upper - a2);
  // j_{m,1} > m, so orders above the bound contribute nothing
  for (int m = 0; m <= static_cast<int>(bound); ++m) {
    for (double z : specfun::bessel_j_zeros_below(m, bound)) out.push_back(z * z + a2);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kreinlab::femlab
