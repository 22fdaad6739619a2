#include <cmath>

#include "doctest.h"
#include "kreinlab/error.hpp"
#include "kreinlab/specfun.hpp"

using namespace kreinlab;
using namespace kreinlab::specfun;

namespace {
bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }
}  // namespace

// Reference values from 30-digit arbitrary-precision evaluation.
TEST_SUITE("specfun") {
  TEST_CASE("I_m values and derivatives") {
    struct Row { int m; double x, v, d; };
    const Row rows[] = {{0, 1.0, 1.2660658777520083, 0.56515910399248503},
                        {1, 2.5, 2.5167162452886984, 2.2831526459346437},
                        {5, 0.3, 6.3518936427803162e-7, 1.0602360639707175e-5},
                        {50, 10.0, 4.7568945607268399e-30, 2.4246518205830818e-29},
                        {3, 7.5, 142.06144236359168, 144.78090379036919}};
    for (const auto& r : rows) {
      const auto e = bessel_i(r.m, r.x);
      CHECK(close(e.value, r.v, 1e-13));
      CHECK(close(e.derivative, r.d, 1e-12));
    }
  }

  TEST_CASE("log-scaled I_m far outside double range") {
    CHECK(close(bessel_i_log(1000, 500.0).log_value, -330.03012578722849, 1e-13));
    CHECK(close(bessel_i_log(200, 1000.0).log_value, 975.68337405979812, 1e-13));
    CHECK(close(bessel_i_log(0, 800.0).log_value, 795.73891195074502, 1e-13));
    CHECK_THROWS_AS(bessel_i(200, 1000.0), FloatingRangeError);
  }

  TEST_CASE("ratio and log derivative") {
    CHECK(close(bessel_i_ratio(3, 7.5), 0.61914285383515488, 1e-14));
    CHECK(close(bessel_i_ratio(1000, 500.0), 0.2358681116238136, 1e-13));
    CHECK(close(bessel_i_ratio(200, 1000.0), 0.81932303822974002, 1e-13));
    const auto e = bessel_i(3, 7.5);
    CHECK(close(bessel_i_log_derivative(3, 7.5), e.derivative / e.value, 1e-13));
  }

  TEST_CASE("radial profiles") {
    CHECK(close(bessel_i_profile(4, 2.0, 0.3), 0.0067737126920623833, 1e-13));
    CHECK(bessel_i_profile(4, 2.0, 1.0) == doctest::Approx(1.0));
    // profile = r^m * entire ratio
    CHECK(close(bessel_i_entire_ratio(4, 2.0, 0.3) * std::pow(0.3, 4), 0.0067737126920623833, 1e-13));
    CHECK(bessel_i_entire_ratio(7, 1.0, 0.0) > 0.0);
    CHECK_THROWS_AS(bessel_i_profile(1, 1.0, 1.5), DomainError);
  }

  TEST_CASE("J_m and its zeros") {
    CHECK(close(bessel_j(2, 3.7), 0.42832965620657587, 1e-13));
    CHECK(close(bessel_j(0, 50.0), 0.055812327669251815, 1e-11));
    CHECK(close(bessel_j_zero(0, 1), 2.4048255576957728, 1e-14));
    CHECK(close(bessel_j_zero(1, 3), 10.173468135062722, 1e-14));
    CHECK(close(bessel_j_zero(10, 5), 28.887375063530457, 1e-14));
    CHECK(close(bessel_j_zero(0, 100), 313.37426607752784, 1e-14));
    const auto z = bessel_j_zeros(3, 20);
    REQUIRE(z.size() == 20);
    for (std::size_t k = 1; k < z.size(); ++k) {
      CHECK(z[k] > z[k - 1]);
      CHECK(std::abs(bessel_j(3, z[k])) < 1e-12);
    }
    const auto below = bessel_j_zeros_below(0, 10.0);
    CHECK(below.size() == 3);
    CHECK(below.back() <= 10.0);
    CHECK_THROWS_AS(bessel_j_zero(0, 0), DomainError);
  }

  TEST_CASE("gamma") {
    CHECK(close(gamma_fn(4.5), 11.631728396567449, 1e-14));
    CHECK(close(gamma_fn(0.5), 1.772453850905516, 1e-14));
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(51.0), DomainError);
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(bessel_i(-1, 1.0), DomainError);
    CHECK_THROWS_AS(bessel_i(0, -1.0), DomainError);
    CHECK_THROWS_AS(bessel_j(-1, 1.0), DomainError);
  }
}
