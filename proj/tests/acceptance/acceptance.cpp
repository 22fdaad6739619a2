// Acceptance runner: one PASS/FAIL line per criterion, tolerances fixed here.
//
//   acceptance [--strict] [--expect-fail AC7 ...] [AC1 AC3 ...]
//
// Exit status is 0 when every criterion that ran matches its expectation
// (pass, or fail when listed in --expect-fail). --strict ignores the
// expectation list. A criterion that throws counts as a failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kreinlab/disc.hpp"
#include "kreinlab/experiments.hpp"
#include "kreinlab/femlab.hpp"
#include "kreinlab/halfline.hpp"
#include "kreinlab/linalg.hpp"

using namespace kreinlab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double top_gap(const std::vector<double>& x, const std::vector<double>& y, std::size_t k) {
  double worst = 0.0;
  for (std::size_t j = 0; j < k; ++j) worst = std::max(worst, std::abs(x[j] / y[j] - 1.0));
  return worst;
}

// r(2N) <= max(r(N) / 2, floor): values below the floor count as converged.
bool halves(double coarse, double fine, double floor = 1e-13) { return fine <= std::max(coarse / 2.0, floor); }

Verdict ac1() {
  const auto r = experiments::constants(2, kPi, 2 * kPi, kPi);
  const double e1 = std::abs(r.c_n - 1.0 / (std::sqrt(2.0) * kPi));
  const double e2 = std::abs(r.C0 - std::sqrt(2.0));
  const double e3 = std::abs(r.C0_plus - 1.0 / std::sqrt(2.0));
  const double e4 = std::abs(r.C_A - 0.25);
  const double worst = std::max({e1, e2, e3, e4});
  return {worst <= 1e-12, fmt("c2=%.16f C0=%.16f C0+=%.16f CA=%.16f max err %.2e (tol 1e-12)", r.c_n, r.C0,
                              r.C0_plus, r.C_A, worst)};
}

Verdict ac2() {
  const auto s = disc::full_boundary_spectrum(1.0, 0.0, 8192);
  const auto f = experiments::weyl_fit(s, 2.0, 512, 2048, 1, 0.5, 2.0);
  return {std::abs(f.relative_error) <= 0.02,
          fmt("extrapolated s_j j^2 = %.6f over [512, 2048], target 2, rel err %.2e (tol 2e-2)", f.extrapolated,
              f.relative_error)};
}

Verdict ac3() {
  const auto fit_for = [](double theta) {
    const auto k = disc::krein_spectrum_dirichlet_ref({1.0, 0.0, theta, 2048, 0.0});
    const auto [lo, hi] = experiments::window_from_fractions(1.0 / 16, 0.25, 2048, k.route_b.size());
    return experiments::weyl_fit(k.route_b.values, 2.0, lo, hi, 1, 0.5).extrapolated;
  };
  const double main = fit_for(kPi);
  const double quarter = fit_for(kPi / 2);
  const double three = fit_for(1.5 * kPi);
  // fitted limits should scale as theta^2 relative to theta = pi
  const double r1 = (quarter / main) / 0.25;
  const double r3 = (three / main) / 2.25;
  const bool ok = main >= 0.45 && main <= 0.55 && std::abs(r1 - 1.0) <= 0.15 && std::abs(r3 - 1.0) <= 0.15;
  return {ok, fmt("limit %.6f in [0.45, 0.55]; theta^2 scaling ratios %.4f (pi/2), %.4f (3pi/2), tol 15%%", main,
                  r1, r3)};
}

Verdict ac4() {
  disc::DiscConfig cfg{1.0, 0.0, kPi, 1024, 0.2};
  const auto a = disc::krein_spectrum_dirichlet_ref(cfg);
  const auto n = disc::krein_spectrum_neumann_ref(cfg);
  const double gap = top_gap(n.values, a.route_a.values, 10);
  return {gap <= 0.02, fmt("top-10 max relative gap %.3e (tol 2e-2)", gap)};
}

Verdict ac5() {
  const auto mesh = femlab::build_mesh(femlab::Geometry::disc, 32, 64);
  const auto fem = femlab::resolvent_difference_spectrum(mesh, 1.0, kPi, 0.0, 0);
  const auto modal = disc::krein_spectrum_dirichlet_ref({1.0, 0.0, kPi, 1024, 0.0});
  const double gap = top_gap(fem.values, modal.route_a.values, 5);
  return {gap <= 0.05, fmt("top-5 max relative gap %.3e (tol 5e-2); s1 fem %.6f modal %.6f", gap, fem.s(1),
                           modal.route_a.s(1))};
}

Verdict ac6() {
  const auto sys = femlab::assemble(femlab::build_mesh(femlab::Geometry::half_disc, 64, 128), 1.0,
                                    femlab::BoundaryCondition::mixed(0.0, 0.0));
  const auto ev = femlab::realization_spectrum(sys, 4);
  const double ref[] = {6.78319, 15.68198, 27.37459, 31.47128};
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(ev[k] / ref[k] - 1.0));
  return {worst <= 0.01, fmt("eigenvalues %.5f %.5f %.5f %.5f, max rel err %.2e (tol 1e-2)", ev[0], ev[1], ev[2],
                             ev[3], worst)};
}

Verdict ac7() {
  struct Row {
    halfline::DecompositionReport t;
    halfline::FactorizationReport f;
  };
  const auto run = [](int n) {
    const auto g = halfline::make_grid(20.0, n);
    const auto m = halfline::plus_mask(g);
    return Row{halfline::decomposition_check(1.0, g, m), halfline::factorization_check(1.0, g, m)};
  };
  const Row c = run(2048);
  const Row f = run(4096);
  const double fac_c = std::max(c.f.right_residual, c.f.left_residual);
  const double fac_f = std::max(f.f.right_residual, f.f.left_residual);
  const bool fft_ok = f.t.residual_fft <= 1e-6 && halves(c.t.residual_fft, f.t.residual_fft);
  const bool kern_ok = f.t.residual_kernel <= 1e-3 && halves(c.t.residual_kernel, f.t.residual_kernel);
  const bool fac_ok = fac_f <= 1e-6 && halves(fac_c, fac_f);
  return {fft_ok && kern_ok && fac_ok,
          fmt("decomposition fft %.2e -> %.2e (tol 1e-6) %s; kernel %.2e -> %.2e (tol 1e-3) %s; "
              "factorization %.2e -> %.2e (tol 1e-6) %s; N = 2048 -> 4096",
              c.t.residual_fft, f.t.residual_fft, fft_ok ? "ok" : "FAIL", c.t.residual_kernel,
              f.t.residual_kernel, kern_ok ? "ok" : "FAIL", fac_c, fac_f, fac_ok ? "ok" : "FAIL")};
}

// median of s_j(R) / s_j(L^{-1}) over a fixed window; sub-floor s_j(R) count as zero
double remainder_ratio(const disc::RemainderReport& r, std::size_t lo, std::size_t hi) {
  const double floor = linalg::kNoiseFloor * r.remainder.s(1);
  std::vector<double> q;
  for (std::size_t j = lo; j <= hi; ++j) {
    const double v = r.remainder.s(j) < floor ? 0.0 : r.remainder.s(j);
    q.push_back(v / r.l_inverse.s(j));
  }
  std::nth_element(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(q.size() / 2), q.end());
  return q[q.size() / 2];
}

Verdict ac8() {
  const auto coarse = disc::remainder_check({1.0, 0.0, kPi, 1024, 0.0});
  const auto fine = disc::remainder_check({1.0, 0.0, kPi, 2048, 0.0});
  const double tc = remainder_ratio(coarse, 64, 512);
  const double tf = remainder_ratio(fine, 64, 512);
  return {tf <= 0.5 && tf <= tc, fmt("median ratio over [64, 512]: %.3e at N = 1024, %.3e at N = 2048 (tol 0.5, "
                                     "non-increasing)", tc, tf)};
}

Verdict ac9() {
  std::mt19937 rng(20240607);
  std::normal_distribution<double> d;
  double worst_sum = 0.0, worst_prod = 0.0;
  for (int pair = 0; pair < 50; ++pair) {
    const int n = 8 + pair % 17;
    Eigen::MatrixXd a(n, n), b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a(i, j) = d(rng);
        b(i, j) = d(rng);
      }
    const auto sa = linalg::singular_values(a), sb = linalg::singular_values(b);
    const auto ssum = linalg::singular_values(Eigen::MatrixXd(a + b));
    const auto sprod = linalg::singular_values(Eigen::MatrixXd(a * b));
    for (int j = 1; j <= n; ++j)
      for (int k = 1; j + k - 1 <= n; ++k) {
        worst_sum = std::max(worst_sum, ssum[j + k - 2] - (sa[j - 1] + sb[k - 1]));
        worst_prod = std::max(worst_prod, sprod[j + k - 2] - sa[j - 1] * sb[k - 1]);
      }
  }
  const bool ky_fan = worst_sum <= 1e-10 && worst_prod <= 1e-10;

  const auto mono = disc::birman_monotonicity({1.0, 0.0, kPi, 512, 0.0},
                                              {kPi / 4, kPi / 2, 3 * kPi / 4, kPi, 5 * kPi / 4, 3 * kPi / 2, 2 * kPi},
                                              1e-8);

  const auto mesh = femlab::build_mesh(femlab::Geometry::disc, 16, 32);
  const auto dir = femlab::assemble(mesh, 1.0, femlab::BoundaryCondition::dirichlet());
  double shift = 0.0;
  for (double b : {0.0, 0.5}) {
    const auto mix = femlab::assemble(mesh, 1.0, femlab::BoundaryCondition::mixed(kPi, b));
    shift = std::max(shift, femlab::lambda_shift_check(mix, dir, -1.0));
  }

  const auto exact = femlab::half_disc_mixed_exact(1.0, 2000.0);
  const double ca = experiments::constants(2, 1.0, 1.0, kPi / 2).C_A;
  const double count_ratio = static_cast<double>(exact.size()) / (ca * 2000.0);

  const bool ok = ky_fan && mono.holds && mono.worst_violation <= 1e-8 && shift <= 1e-9 && count_ratio >= 0.95 &&
                  count_ratio <= 1.05;
  return {ok, fmt("Ky Fan excess sum %.1e prod %.1e (tol 1e-10); Birman violation %.1e (tol 1e-8); "
                  "shift residual %.1e (tol 1e-9); N(2000)/(C_A 2000) = %.4f in [0.95, 1.05]",
                  worst_sum, worst_prod, mono.worst_violation, shift, count_ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}};
  bool strict = false;
  std::set<std::string> expect_fail, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--strict") {
      strict = true;
    } else if (a == "--expect-fail" && i + 1 < argc) {
      expect_fail.insert(argv[++i]);
    } else {
      only.insert(a);
    }
  }
  int mismatches = 0, passed = 0, ran = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s  %s  [%.1f s]\n", name.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    passed += v.pass;
    const bool expected_fail = !strict && expect_fail.count(name);
    if (v.pass == expected_fail) ++mismatches;
  }
  std::printf("acceptance: %d/%d criteria pass", passed, ran);
  if (!strict && !expect_fail.empty()) {
    std::printf(" (known failures:");
    for (const auto& e : expect_fail) std::printf(" %s", e.c_str());
    std::printf(")");
  }
  std::printf("\n");
  return mismatches == 0 ? 0 : 1;
}
