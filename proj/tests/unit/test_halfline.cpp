#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kreinlab/error.hpp"
#include "kreinlab/halfline.hpp"

using namespace kreinlab;
using namespace kreinlab::halfline;

TEST_SUITE("halfline") {
  TEST_CASE("grid and reflection") {
    const auto g = make_grid(10.0, 256);
    const auto m = plus_mask(g);
    REQUIRE(m.indices.size() == 128);
    REQUIRE(m.minus.size() == 128);
    for (std::size_t k = 0; k < m.indices.size(); ++k) {
      CHECK(g.point(m.indices[k]) > 0.0);
      CHECK(g.point(m.reflected[k]) == doctest::Approx(-g.point(m.indices[k])).epsilon(1e-14));
    }
    CHECK(g.spacing() == doctest::Approx(20.0 / 256));
  }

  TEST_CASE("symbol factorization holds pointwise") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> tau(-200.0, 200.0);
    for (double alpha : {0.3, 1.0, 4.0}) {
      for (int k = 0; k < 50; ++k) {
        const double t = tau(rng);
        const auto full = symbol_value({SymbolKind::sqrt_full, alpha}, t);
        const auto lp = symbol_value({SymbolKind::lambda_plus, alpha}, t);
        const auto lm = symbol_value({SymbolKind::lambda_minus, alpha}, t);
        const auto p0 = symbol_value({SymbolKind::p0_nu_gamma, alpha}, t);
        CHECK(std::abs(lp * lm * full - 1.0) < 1e-13);
        CHECK(std::abs(p0 * full + 1.0) < 1e-13);
        CHECK(std::abs(lp - std::conj(lm)) < 1e-14);
      }
    }
  }

  TEST_CASE("kernel closed form") {
    CHECK(hankel_kernel(1.0, 1.0) == doctest::Approx(std::exp(-1.0) / std::sqrt(std::numbers::pi)));
    CHECK_THROWS_AS(hankel_kernel(1.0, 0.0), DomainError);
  }

  TEST_CASE("truncation defect equals the Hankel product") {
    const auto g = make_grid(10.0, 256);
    const auto m = plus_mask(g);
    const auto lp = op_symbol({SymbolKind::lambda_plus, 1.0}, g);
    const auto lm = op_symbol({SymbolKind::lambda_minus, 1.0}, g);
    const auto prod = op_multiplier([](double t) { return std::complex<double>(1.0 / std::hypot(t, 1.0)); }, g);
    CHECK(truncation_defect_gap(lm, lp, prod, m) < 1e-12);
  }

  TEST_CASE("inverse of the truncated operator on a small grid") {
    const auto g = make_grid(10.0, 256);
    const auto m = plus_mask(g);
    const auto r = decomposition_check(1.0, g, m);
    CHECK(r.residual_fft < 1e-12);
    CHECK(r.adjoint_gap < 1e-12);
    CHECK(r.norm_l0_inverse > 0.0);
  }

  TEST_CASE("factorization stays supported on the half-line") {
    const auto g = make_grid(10.0, 256);
    const auto m = plus_mask(g);
    const auto f = factorization_check(1.0, g, m);
    CHECK(f.plus_leakage_cut < 1e-4);
    CHECK(f.minus_leakage_cut < 1e-4);
    CHECK(f.left_residual < 1e-3);
  }

  TEST_CASE("windowed Hankel part is bounded by its operator norm") {
    const auto g = make_grid(10.0, 256);
    const auto m = plus_mask(g);
    const auto d = gplus_decay(1.0, g, m);
    CHECK(d.spectrum.s(1) <= d.bound * (1.0 + 1e-12));
    CHECK(d.trend < 0.7);
    for (std::size_t j = 1; j < d.spectrum.size(); ++j) CHECK(d.spectrum.values[j] <= d.spectrum.values[j - 1]);
  }
}
