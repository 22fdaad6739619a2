#include <random>

#include "doctest.h"
#include "kreinlab/error.hpp"
#include "kreinlab/linalg.hpp"

using namespace kreinlab;
using namespace kreinlab::linalg;

namespace {
Eigen::MatrixXd random_matrix(int n, std::mt19937& rng, bool symmetric) {
  std::normal_distribution<double> d;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = d(rng);
  if (symmetric) a = 0.5 * (a + a.transpose()).eval();
  return a;
}
}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("singular values are descending, nonnegative and match |eigenvalues|") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = random_matrix(40, rng, true);
      const auto s = singular_values(a);
      REQUIRE(s.size() == 40);
      for (std::size_t j = 1; j < s.size(); ++j) CHECK(s[j] <= s[j - 1]);
      CHECK(s.back() >= 0.0);
      Eigen::VectorXd ev = eigvalsh(a).cwiseAbs();
      std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
      for (int j = 0; j < 40; ++j) CHECK(s[j] == doctest::Approx(ev(j)).epsilon(1e-12));
      CHECK(spectral_norm(a) == doctest::Approx(s.front()).epsilon(1e-12));
    }
  }

  TEST_CASE("Ky Fan inequality s_{j+k-1}(A+B) <= s_j(A) + s_k(B)") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = random_matrix(24, rng, false);
      const auto b = random_matrix(24, rng, false);
      const auto sa = singular_values(a), sb = singular_values(b);
      const auto sab = singular_values(Eigen::MatrixXd(a + b));
      for (int j = 1; j <= 24; ++j)
        for (int k = 1; j + k - 1 <= 24; ++k) CHECK(sab[j + k - 2] <= sa[j - 1] + sb[k - 1] + 1e-12);
    }
  }

  TEST_CASE("weighted operators keep their basis") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4) * 2.0;
    const auto a = make_operator(m, Basis::arc_grid, 0.5, true);
    const auto b = identity(4, Basis::arc_grid, 0.5);
    CHECK(product(a, b).matrix.isApprox(m));
    CHECK(sum(a, b).matrix.isApprox(m + Eigen::MatrixXd::Identity(4, 4)));
    const auto c = identity(4, Basis::circle_grid, 0.5);
    CHECK_THROWS_AS(sum(a, c), BasisMismatchError);
    const std::vector<int> idx{0, 2};
    CHECK(restrict(a, idx, Basis::arc_grid).size() == 2);
  }

  TEST_CASE("symmetry and finiteness guards") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 0, 1;
    CHECK_THROWS_AS(require_symmetric(a, "test"), NonSymmetricError);
    CHECK(relative_asymmetry(symmetrized(a)) == 0.0);
    a(0, 0) = std::nan("");
    CHECK_THROWS_AS(require_finite(a, "test"), NonFiniteError);
  }

  TEST_CASE("SPD solve and square root") {
    std::mt19937 rng(3);
    const auto g = random_matrix(20, rng, false);
    const Eigen::MatrixXd spd = g * g.transpose() + Eigen::MatrixXd::Identity(20, 20);
    const auto r = sqrt_spd(spd);
    CHECK((r * r - spd).norm() < 1e-10 * spd.norm());
    const Eigen::MatrixXd b = Eigen::MatrixXd::Random(20, 3);
    CHECK((spd * solve_spd(spd, b) - b).norm() < 1e-10 * b.norm());
    Eigen::MatrixXd neg = -spd;
    CHECK_THROWS_AS(solve_spd(neg, b), IndefiniteError);
  }

  TEST_CASE("spectrum from eigenvalues clamps roundoff only") {
    Eigen::VectorXd v(3);
    v << 2.0, 1.0, -1e-14;
    const auto s = spectrum_from_eigenvalues(v, "x");
    CHECK(s.s(3) == 0.0);
    v(2) = -0.5;
    CHECK_THROWS_AS(spectrum_from_eigenvalues(v, "x"), IndefiniteError);
  }

  TEST_CASE("windowed median and decay trend treat sub-floor values as zero") {
    std::vector<double> s(200);
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = 1.0 / double(j + 1);
    CHECK(windowed_median(s, 1.0, 10, 50) == doctest::Approx(1.0));
    CHECK(decay_trend(s, 1.0, 10, 20, 100, 200, 0.0) == doctest::Approx(1.0));
    std::vector<double> f(200, 0.0);
    f[0] = 1.0;
    f[20] = 1e-15;
    CHECK(decay_trend(f, 1.0, 10, 30, 100, 200, 0.0) == 0.0);
  }
}
