#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "kreinlab/error.hpp"
#include "kreinlab/femlab.hpp"
#include "kreinlab/specfun.hpp"

using namespace kreinlab;
using namespace kreinlab::femlab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("femlab") {
  TEST_CASE("meshes tile the inscribed polygon") {
    const auto disc = build_mesh(Geometry::disc, 8, 32);
    CHECK(mesh_area(disc) == doctest::Approx(16.0 * std::sin(2 * kPi / 32)).epsilon(1e-12));
    for (const auto& t : disc.triangles) CHECK(triangle_area(disc, t) > 0.0);
    const auto half = build_mesh(Geometry::half_disc, 8, 32);
    CHECK(mesh_area(half) == doctest::Approx(16.0 * std::sin(kPi / 32)).epsilon(1e-12));
    CHECK(geometry_from_string("half-disc") == Geometry::half_disc);
    CHECK_THROWS_AS(geometry_from_string("square"), ConfigError);
    CHECK_THROWS_AS(build_mesh(Geometry::disc, 2, 32), DomainError);
  }

  TEST_CASE("mesh export writes nodes and triangles") {
    const auto mesh = build_mesh(Geometry::disc, 4, 8);
    const auto dir = std::filesystem::temp_directory_path() / "kreinlab_mesh_test";
    std::filesystem::create_directories(dir);
    export_mesh(mesh, dir / "nodes.csv", dir / "triangles.csv");
    std::ifstream n(dir / "nodes.csv"), t(dir / "triangles.csv");
    CHECK(n.good());
    CHECK(t.good());
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("Dirichlet eigenvalues approach j_{0,1}^2 + alpha^2 from above") {
    const double exact = std::pow(specfun::bessel_j_zero(0, 1), 2) + 1.0;
    const auto coarse = realization_spectrum(assemble(build_mesh(Geometry::disc, 8, 16), 1.0,
                                                      BoundaryCondition::dirichlet()), 1);
    const auto fine = realization_spectrum(assemble(build_mesh(Geometry::disc, 16, 32), 1.0,
                                                    BoundaryCondition::dirichlet()), 1);
    CHECK(fine[0] > exact);
    CHECK(coarse[0] > fine[0]);
    CHECK(fine[0] == doctest::Approx(exact).epsilon(0.02));
  }

  TEST_CASE("mixed half-disc problem against separation of variables") {
    const auto exact = half_disc_mixed_exact(1.0, 40.0);
    REQUIRE(exact.size() >= 4);
    CHECK(exact[0] == doctest::Approx(std::pow(specfun::bessel_j_zero(0, 1), 2) + 1.0).epsilon(1e-13));
    const auto sys = assemble(build_mesh(Geometry::half_disc, 16, 32), 1.0, BoundaryCondition::mixed(0.0, 0.0));
    const auto ev = realization_spectrum(sys, 4);
    for (int k = 0; k < 4; ++k) CHECK(ev[k] == doctest::Approx(exact[k]).epsilon(0.02));
  }

  TEST_CASE("Sigma_+ nodes are free and Sigma_- nodes are clamped") {
    const auto mesh = build_mesh(Geometry::disc, 8, 32);
    const auto rob = assemble(mesh, 1.0, BoundaryCondition::robin(0.0));
    const auto dir = assemble(mesh, 1.0, BoundaryCondition::dirichlet());
    const auto mix = assemble(mesh, 1.0, BoundaryCondition::mixed(kPi, 0.0));
    CHECK(rob.free_dofs.size() == static_cast<std::size_t>(mesh.node_count()));
    CHECK(dir.free_dofs.size() + 32 == static_cast<std::size_t>(mesh.node_count()));
    CHECK(mix.sigma_plus.size() + mix.sigma_minus.size() == 32);
    CHECK(mix.free_dofs.size() > dir.free_dofs.size());
  }

  TEST_CASE("resolvent difference is nonnegative and the shift identity holds") {
    const auto mesh = build_mesh(Geometry::disc, 8, 32);
    const auto rd = resolvent_difference_spectrum(mesh, 1.0, kPi, 0.0, 0);
    CHECK(rd.s(1) > 0.0);
    CHECK(rd.values.back() >= 0.0);
    const auto mix = assemble(mesh, 1.0, BoundaryCondition::mixed(kPi, 0.0));
    const auto dir = assemble(mesh, 1.0, BoundaryCondition::dirichlet());
    CHECK(lambda_shift_check(mix, dir, -1.0) < 1e-10);
    CHECK_THROWS_AS(resolvent_difference_spectrum(build_mesh(Geometry::disc, 64, 128), 1.0, kPi, 0.0, 0),
                    BudgetError);
  }

  TEST_CASE("Robin coefficient too negative breaks coercivity") {
    const auto mesh = build_mesh(Geometry::disc, 8, 32);
    CHECK_THROWS_AS(assemble(mesh, 1.0, BoundaryCondition::robin(-50.0)), IndefiniteError);
  }
}
