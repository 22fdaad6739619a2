#include "kreinlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kreinlab/error.hpp"

namespace kreinlab::linalg {

std::string_view to_string(Basis basis) {
  switch (basis) {
    case Basis::circle_grid: return "circle-grid";
    case Basis::arc_grid: return "arc-grid";
    case Basis::halfline_grid: return "halfline-grid";
    case Basis::modal: return "modal";
    case Basis::fem: return "fem";
  }
  return "unknown";
}

double relative_asymmetry(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

void require_finite(const Eigen::MatrixXd& a, std::string_view who) {
  if (!a.allFinite()) {
    throw NonFiniteError(std::string(who) + ": matrix has non-finite entries");
  }
}

void require_symmetric(const Eigen::MatrixXd& a, std::string_view who) {
  require_finite(a, who);
  if (a.rows() != a.cols()) {
    throw NonSymmetricError(std::string(who) + ": matrix is not square",
                            std::numeric_limits<double>::infinity());
  }
  const double asym = relative_asymmetry(a);
  if (asym > 1e-12) {
    throw NonSymmetricError(std::string(who) + ": relative asymmetry " + std::to_string(asym),
                            asym);
  }
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

GridOperator make_operator(Eigen::MatrixXd matrix, Basis basis, double weight, bool symmetric) {
  if (symmetric) require_symmetric(matrix, "make_operator");
  return GridOperator{std::move(matrix), basis, weight, symmetric};
}

GridOperator identity(Eigen::Index n, Basis basis, double weight) {
  return GridOperator{Eigen::MatrixXd::Identity(n, n), basis, weight, true};
}

namespace {

void require_same_basis(const GridOperator& a, const GridOperator& b, std::string_view op) {
  if (a.basis != b.basis) {
    throw BasisMismatchError(std::string(op) + ": basis " + std::string(to_string(a.basis)) +
                             " vs " + std::string(to_string(b.basis)));
  }
  if (a.size() != b.size()) {
    throw BasisMismatchError(std::string(op) + ": size " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
  }
}

}  // namespace

GridOperator sum(const GridOperator& a, const GridOperator& b) {
  require_same_basis(a, b, "sum");
  return GridOperator{a.matrix + b.matrix, a.basis, a.weight, a.symmetric && b.symmetric};
}

GridOperator difference(const GridOperator& a, const GridOperator& b) {
  require_same_basis(a, b, "difference");
  return GridOperator{a.matrix - b.matrix, a.basis, a.weight, a.symmetric && b.symmetric};
}

GridOperator product(const GridOperator& a, const GridOperator& b) {
  require_same_basis(a, b, "product");
  return GridOperator{a.matrix * b.matrix, a.basis, a.weight, false};
}

GridOperator restrict(const GridOperator& a, std::span<const int> indices, Basis basis) {
  if (indices.empty()) throw DomainError("restrict: empty index set");
  const auto n = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd sub(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      sub(i, j) = a.matrix(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
    }
  }
  return GridOperator{std::move(sub), basis, a.weight, a.symmetric};
}

EigenDecomposition eigh(const Eigen::MatrixXd& a) {
  require_symmetric(a, "eigh");
  // Householder tridiagonalization followed by implicit symmetric QR.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eigh: symmetric eigensolver did not converge");
  }
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

EigenDecomposition eigh(const GridOperator& a) { return eigh(a.matrix); }

Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& a) {
  require_symmetric(a, "eigvalsh");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eigvalsh: symmetric eigensolver did not converge");
  }
  return solver.eigenvalues().reverse();
}

std::vector<double> singular_values(const Eigen::MatrixXd& a) {
  require_finite(a, "singular_values");
  if (a.size() == 0) return {};
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& s = svd.singularValues();
  std::vector<double> out(s.data(), s.data() + s.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

SingularSpectrum singular_values(const GridOperator& a, std::string route) {
  return SingularSpectrum{singular_values(a.matrix), std::move(route), {}};
}

namespace {

[[noreturn]] void throw_indefinite(const Eigen::MatrixXd& a, std::string_view who) {
  const Eigen::VectorXd ev = eigvalsh(symmetrized(a));
  const double smallest = ev.size() ? ev(ev.size() - 1) : 0.0;
  throw IndefiniteError(std::string(who) + ": matrix is not positive definite (smallest "
                        "eigenvalue " + std::to_string(smallest) + ")",
                        smallest);
}

}  // namespace

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require_symmetric(a, "solve_spd");
  require_finite(b, "solve_spd");
  if (b.rows() != a.rows()) throw DomainError("solve_spd: right-hand side has wrong row count");
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12)) {
    throw_indefinite(a, "solve_spd");
  }
  return llt.solve(b);
}

Eigen::MatrixXd solve_spd(const GridOperator& a, const Eigen::MatrixXd& b) {
  return solve_spd(a.matrix, b);
}

Eigen::MatrixXd sqrt_spd(const Eigen::MatrixXd& a) {
  const EigenDecomposition ed = eigh(a);
  const Eigen::Index n = ed.values.size();
  if (n == 0) return a;
  const double largest = ed.values(0);
  const double smallest = ed.values(n - 1);
  if (smallest < -1e-12 * std::max(std::abs(largest), 1e-300)) {
    throw IndefiniteError("sqrt_spd: matrix has a negative eigenvalue " + std::to_string(smallest),
                          smallest);
  }
  const Eigen::VectorXd root = ed.values.cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd s = ed.vectors * root.asDiagonal() * ed.vectors.transpose();
  return symmetrized(s);
}

GridOperator sqrt_spd(const GridOperator& a) {
  return GridOperator{sqrt_spd(a.matrix), a.basis, a.weight, true};
}

double spectral_norm(const Eigen::MatrixXd& a) {
  require_finite(a, "spectral_norm");
  if (a.size() == 0) return 0.0;
  if (a.rows() == a.cols() && relative_asymmetry(a) <= 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized(a), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  return singular_values(a).front();
}

SingularSpectrum spectrum_from_eigenvalues(const Eigen::VectorXd& descending, std::string route,
                                           double negative_tolerance) {
  SingularSpectrum out;
  out.route = std::move(route);
  if (descending.size() == 0) return out;
  const double scale = std::max(std::abs(descending(0)),
                                std::abs(descending(descending.size() - 1)));
  out.values.reserve(static_cast<std::size_t>(descending.size()));
  for (Eigen::Index i = 0; i < descending.size(); ++i) {
    double v = descending(i);
    if (v < 0.0) {
      if (v < -negative_tolerance * scale) {
        throw IndefiniteError("spectrum_from_eigenvalues: negative eigenvalue " +
                                  std::to_string(v) + " in route " + out.route,
                              v);
      }
      v = 0.0;
    }
    out.values.push_back(v);
  }
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

double windowed_median(const std::vector<double>& s, double p, std::size_t lo, std::size_t hi,
                       double absolute_floor) {
  if (lo < 1 || hi < lo || hi > s.size()) {
    throw DomainError("windowed_median: window [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "] outside spectrum of length " +
                      std::to_string(s.size()));
  }
  const double floor = std::max(kNoiseFloor * s.front(), absolute_floor);
  std::vector<double> w;
  w.reserve(hi - lo + 1);
  for (std::size_t j = lo; j <= hi; ++j) {
    const double v = s[j - 1] < floor ? 0.0 : s[j - 1];
    w.push_back(v * std::pow(static_cast<double>(j), p));
  }
  const std::size_t mid = w.size() / 2;
  std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(mid), w.end());
  if (w.size() % 2 == 1) return w[mid];
  const double upper = w[mid];
  const double lower = *std::max_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double decay_trend(const std::vector<double>& s, double p, std::size_t early_lo,
                   std::size_t early_hi, std::size_t late_lo, std::size_t late_hi,
                   double absolute_floor) {
  const double early = windowed_median(s, p, early_lo, early_hi, absolute_floor);
  const double late = windowed_median(s, p, late_lo, late_hi, absolute_floor);
  if (early == 0.0) return 0.0;
  return late / early;
}

}  // namespace kreinlab::linalg
