#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "kreinlab/error.hpp"
#include "kreinlab/experiments.hpp"

using namespace kreinlab;
using namespace kreinlab::experiments;

namespace {
constexpr double kPi = std::numbers::pi;

std::filesystem::path scratch(const char* name) {
  auto d = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}
}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("Weyl constants") {
    const auto r2 = constants(2, kPi, 2 * kPi, kPi);
    CHECK(r2.c_n == doctest::Approx(0.2250790790392765).epsilon(1e-14));
    CHECK(r2.C0_plus == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(r2.C_A == doctest::Approx(0.25).epsilon(1e-14));
    const auto r3 = constants(3, 1.0, 4 * kPi, 1.0);
    CHECK(r3.c_n == doctest::Approx(1.0 / (8 * kPi)).epsilon(1e-14));
    CHECK(r3.C_A == doctest::Approx(1.0 / (6 * kPi * kPi)).epsilon(1e-14));
    CHECK_THROWS_AS(constants(1, 1.0, 1.0, 1.0), DomainError);
  }

  TEST_CASE("fit recovers the limit of a synthetic spectrum with one correction") {
    std::vector<double> s;
    for (int j = 1; j <= 4000; ++j) s.push_back(0.5 * (1.0 + 0.3 * std::pow(j, -0.5)) / (double(j) * j));
    const auto f = weyl_fit(s, 2.0, 100, 1000, 1, 0.5, 0.5);
    CHECK(f.extrapolated == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(f.relative_error) < 1e-12);
    CHECK(f.fit_residual < 1e-13);
    CHECK(f.raw > 0.5);
    const auto flat = weyl_fit(s, 2.0, 100, 1000, 0, 0.5);
    CHECK(flat.extrapolated == doctest::Approx(flat.raw));
    CHECK_THROWS_AS(weyl_fit(s, 2.0, 0, 10), DomainError);
    CHECK_THROWS_AS(weyl_fit(s, 2.0, 10, 5000), DomainError);
  }

  TEST_CASE("window fractions") {
    const auto [lo, hi] = window_from_fractions(1.0 / 16, 0.25, 2048, 1024);
    CHECK(lo == 128);
    CHECK(hi == 512);
  }

  TEST_CASE("circle functions wrap around") {
    const auto arc = CircleFunction::indicator(-1.0, 1.0);
    CHECK(arc(0.5) == 1.0);
    CHECK(arc(2 * kPi - 0.5) == 1.0);
    CHECK(arc(2.0) == 0.0);
    CHECK(CircleFunction::constant(3.0)(1.0) == 3.0);
  }

  TEST_CASE("composed constant of an arc-localized composition") {
    const auto arc = CircleFunction::indicator(0.0, kPi);
    const auto one = CircleFunction::constant(1.0);
    const double c = composed_constant({0.5, 1.0, 0.5}, {std::sqrt(0.5), 1.0, std::sqrt(0.5)}, {arc, one, one, arc});
    CHECK(c == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(composed_constant({1.0}, {2.0}, {one, one}) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK_THROWS_AS(composed_constant({2.0, 2.0}, {1.0, 1.0}, {one, one, one}), DomainError);
  }

  TEST_CASE("spectrum CSV round trip and validation") {
    const auto dir = scratch("kreinlab_csv_test");
    const std::vector<double> s{3.0, 2.0, 1.0 / 3.0};
    write_atomic(dir / "s.csv", spectrum_csv(s));
    CHECK(read_spectrum_csv(dir / "s.csv") == s);
    write_atomic(dir / "bad.csv", "j,s_j\n1,1\n2,3\n");
    CHECK_THROWS_AS(read_spectrum_csv(dir / "bad.csv"), ConfigError);
    CHECK(plot_csv(s, 1.0).rfind("j,s_j,s_j_jp\n", 0) == 0);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("runner exit codes") {
    const auto dir = scratch("kreinlab_runner_test");
    std::string out;
    CHECK(run_experiment_text(R"({"experiment":"constants"})", dir, &out) == kPass);
    CHECK(std::filesystem::exists(dir / "constants_summary.json"));
    CHECK(run_experiment_text(R"({"experiment":"constants","bogus":1})", dir) == kConfigError);
    CHECK(run_experiment_text(R"({"experiment":"nope"})", dir) == kConfigError);
    CHECK(run_experiment_text("{not json", dir) == kConfigError);
    CHECK(run_experiment_text(R"({"experiment":"disc","grid_n":100})", dir) == kConfigError);
    CHECK(run_experiment_text(R"({"experiment":"disc","checks":{"unknown":true}})", dir) == kConfigError);

    std::vector<double> s;
    for (int j = 1; j <= 256; ++j) s.push_back(1.0 / (double(j) * j));
    write_atomic(dir / "s.csv", spectrum_csv(s));
    const std::string base = R"({"experiment":"weyl-fit","spectrum_file":")" + (dir / "s.csv").string() + R"(","fit_order":0,)";
    CHECK(run_experiment_text(base + R"("predicted":1.0})", dir) == kPass);
    CHECK(run_experiment_text(base + R"("predicted":2.0})", dir) == kCheckFailure);
    CHECK(run_experiment_text(R"({"experiment":"weyl-fit","spectrum_file":"/nonexistent.csv"})", dir) == kConfigError);

    CHECK(run_experiment_text(R"([{"experiment":"constants","name":"c1"},{"experiment":"constants","n":3,"name":"c2"}])",
                              dir, &out) == kPass);
    CHECK(std::filesystem::exists(dir / "c2_summary.json"));
    CHECK(run_experiment_text(R"([{"experiment":"constants"},{"experiment":"constants","n":1}])", dir) == kConfigError);
    std::filesystem::remove_all(dir);
  }
}
