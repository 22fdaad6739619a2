#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kreinlab/disc.hpp"
#include "kreinlab/error.hpp"

using namespace kreinlab;
using namespace kreinlab::disc;

namespace {
constexpr double kPi = std::numbers::pi;
bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }
}  // namespace

TEST_SUITE("disc") {
  // Reference values: -(m + alpha I_{m+1}/I_m) and int_0^1 (I_m(alpha r)/I_m(alpha))^2 r dr
  // at 30 digits.
  TEST_CASE("Dirichlet-to-Neumann modes") {
    const auto p = dtn_modal(1.0, 100);
    CHECK(close(p(0), -0.44638996589653451, 1e-14));
    CHECK(close(p(1), -1.2401937238700897, 1e-14));
    CHECK(close(p(2), -2.1633061176105341, 1e-14));
    CHECK(close(p(100), -100.00495037492096, 1e-14));
    CHECK(p(-7) == p(7));
  }

  TEST_CASE("Poisson Gram modes") {
    const auto q = poisson_gram_modal(1.0, 100);
    CHECK(close(q(0), 0.40036799917344538, 1e-11));
    CHECK(close(q(1), 0.2309597636366198, 1e-11));
    CHECK(close(q(2), 0.16005332075441893, 1e-11));
    CHECK(close(q(100), 0.0049502547981860818, 1e-11));
    const auto q3 = poisson_gram_modal(3.0, 7);
    CHECK(close(q3(0), 0.17196191178709748, 1e-11));
    CHECK(close(q3(7), 0.058896916776265744, 1e-11));
    // 2 m q_m -> 1 for large m
    const auto big = poisson_gram_modal(1.0, 4096);
    CHECK(2.0 * 4096 * big(4096) == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("modal operators become symmetric circulants with the modal spectrum") {
    const auto p = dtn_modal(1.0, 32);
    const auto g = modal_to_grid(p, 64);
    CHECK(linalg::relative_asymmetry(g.matrix) < 1e-14);
    Eigen::VectorXd ev = linalg::eigvalsh(g.matrix);
    std::vector<double> expected;
    for (int m = -31; m <= 32; ++m) expected.push_back(p(m));
    std::sort(expected.begin(), expected.end());
    std::vector<double> got(ev.data(), ev.data() + ev.size());
    std::sort(got.begin(), got.end());
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(expected[k]).epsilon(1e-11));
    CHECK_THROWS_AS(modal_to_grid(p, 128), DomainError);
  }

  TEST_CASE("arc masks") {
    CHECK(arc_mask(64, kPi).indices.size() == 32);
    CHECK(arc_mask(64, 2 * kPi).indices.size() == 64);
  }

  TEST_CASE("config validation") {
    CHECK_THROWS_AS(validate(DiscConfig{-1.0, 0.0, kPi, 256, 0.0}), ConfigError);
    CHECK_THROWS_AS(validate(DiscConfig{1.0, 0.0, kPi, 100, 0.0}), ConfigError);
    CHECK_THROWS_AS(validate(DiscConfig{1.0, -0.5, kPi, 256, 0.0}), ConfigError);
    CHECK_THROWS_AS(validate(DiscConfig{1.0, 0.0, kPi, 256, 0.5}, true), ConfigError);
    CHECK_NOTHROW(validate(DiscConfig{1.0, 0.0, kPi, 256, 0.2}, true));
  }

  TEST_CASE("both references give the same resolvent difference") {
    DiscConfig cfg{1.0, 0.0, kPi, 256, 0.2};
    const auto a = krein_spectrum_dirichlet_ref(cfg);
    const auto n = krein_spectrum_neumann_ref(cfg);
    REQUIRE(a.route_a.size() == n.size());
    for (std::size_t j = 0; j < 10; ++j) CHECK(close(n.values[j], a.route_a.values[j], 1e-10));
    for (std::size_t j = 1; j < n.size(); ++j) CHECK(n.values[j] <= n.values[j - 1]);
    CHECK(a.route_b.s(1) > 0.0);
  }

  TEST_CASE("singular values grow with the arc") {
    DiscConfig cfg{1.0, 0.0, kPi, 128, 0.0};
    const auto r = birman_monotonicity(cfg, {0.5, 1.5, 3.0, 4.5, 6.0});
    CHECK(r.holds);
    CHECK(r.worst_violation <= 1e-8);
  }

  TEST_CASE("full boundary spectrum is the modal one") {
    const auto s = full_boundary_spectrum(1.0, 0.5, 16);
    const auto p = dtn_modal(1.0, 16);
    const auto q = poisson_gram_modal(1.0, 16);
    CHECK(s.size() == 32);
    for (std::size_t j = 1; j < s.size(); ++j) CHECK(s[j] <= s[j - 1]);
    CHECK(s.front() == doctest::Approx(q(0) / (0.5 - p(0))).epsilon(1e-12));
  }
}
