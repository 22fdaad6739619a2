#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "kreinlab/disc.hpp"
#include "kreinlab/error.hpp"
#include "kreinlab/experiments.hpp"
#include "kreinlab/femlab.hpp"
#include "kreinlab/halfline.hpp"

namespace kreinlab::experiments {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Config {
  std::string experiment;
  std::string name;
  double alpha = 1.0;
  double b = 0.0;
  double theta_plus = kPi;
  int grid_n = 0;
  double extent = 20.0;
  double shift_k = 0.2;
  std::string geometry = "disc";
  int n_r = 32;
  int n_theta = 64;
  double fit_lo = 1.0 / 16;
  double fit_hi = 0.25;
  bool has_fit_range = false;
  std::size_t range_lo = 0;
  std::size_t range_hi = 0;
  double fit_exponent = 2.0;
  int fit_order = 1;
  double fit_correction = 0.5;
  std::vector<std::string> routes{"b"};
  std::string out_dir = "out";
  std::map<std::string, bool> checks;
  int n = 2;
  int count = 4;
  double predicted = std::numeric_limits<double>::quiet_NaN();
  double fit_tolerance = 0.1;
  std::vector<double> symbol_orders;
  std::vector<double> symbol_coefficients;
  std::vector<CircleFunction> multipliers;
  std::string spectrum_file;
  json raw;
};

const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> v{"constants", "halfline", "disc", "fem",
                                          "compare", "composed", "weyl-fit"};
  return v;
}

// name -> enabled by default, per experiment
const std::map<std::string, bool>& check_defaults(const std::string& experiment) {
  static const std::map<std::string, std::map<std::string, bool>> table{
      {"constants", {{"positive", true}, {"proportional", true}}},
      {"halfline",
       {{"decomposition_fft", true},
        {"adjoint_pairing", true},
        {"plus_support", true},
        {"decay_trend", true},
        {"decomposition_kernel", false},
        {"hankel_agreement", false},
        {"factorization", false}}},
      {"disc",
       {{"weyl_fit", true},
        {"positivity", true},
        {"remainder_trend", false},
        {"corrections_trend", false},
        {"birman", false}}},
      {"fem",
       {{"exact_spectrum", true}, {"weyl_count", true}, {"modal_agreement", true}, {"lambda_shift", true}}},
      {"compare", {{"cross_route", true}, {"fem_oracle", true}}},
      {"composed", {{"composed_fit", true}, {"prediction_consistency", true}}},
      {"weyl-fit", {{"weyl_fit", true}}},
  };
  return table.at(experiment);
}

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

template <class T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("config key '") + key + "' has the wrong type");
  }
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(std::string("config key '") + key + "' must be a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) bad(std::string("config key '") + key + "' must be finite");
  return v;
}

int get_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad(std::string("config key '") + key + "' must be an integer");
  return j.at(key).get<int>();
}

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

Config parse_config(const json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  static const std::vector<std::string> keys{
      "experiment", "name", "alpha", "b", "theta_plus", "grid_n", "extent", "shift_k",
      "geometry", "n_r", "n_theta", "fit_window", "fit_range", "fit_exponent", "fit_order",
      "fit_correction", "routes", "out_dir", "checks", "n", "count", "predicted",
      "fit_tolerance", "symbol_orders", "symbol_coefficients", "multipliers", "spectrum_file"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) bad("unknown config key '" + k + "'");
  }
  Config c;
  c.raw = j;
  c.experiment = get<std::string>(j, "experiment", "");
  if (std::find(known_experiments().begin(), known_experiments().end(), c.experiment) ==
      known_experiments().end()) {
    bad("config key 'experiment' must be one of constants, halfline, disc, fem, compare, "
        "composed, weyl-fit");
  }
  c.name = get<std::string>(j, "name", c.experiment);
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) bad("invalid 'name'");
  c.alpha = get_number(j, "alpha", 1.0);
  c.b = get_number(j, "b", 0.0);
  c.theta_plus = get_number(j, "theta_plus", kPi);
  const int default_n = c.experiment == "halfline" ? 4096
                        : c.experiment == "compare" ? 1024
                        : c.experiment == "fem"     ? 1024
                                                    : 2048;
  c.grid_n = get_int(j, "grid_n", default_n);
  c.extent = get_number(j, "extent", 20.0);
  c.shift_k = get_number(j, "shift_k", 0.2);
  c.geometry = get<std::string>(j, "geometry", "disc");
  c.n_r = get_int(j, "n_r", c.experiment == "fem" && c.geometry == "half-disc" ? 64 : 32);
  c.n_theta = get_int(j, "n_theta", c.experiment == "fem" && c.geometry == "half-disc" ? 128 : 64);
  if (j.contains("fit_window")) {
    const auto w = get<std::vector<double>>(j, "fit_window", {});
    if (w.size() != 2 || !(w[0] > 0.0) || !(w[1] >= w[0])) bad("'fit_window' must be [lo_frac, hi_frac] with 0 < lo <= hi");
    c.fit_lo = w[0];
    c.fit_hi = w[1];
  }
  if (j.contains("fit_range")) {
    const auto w = get<std::vector<long long>>(j, "fit_range", {});
    if (w.size() != 2 || w[0] < 1 || w[1] < w[0]) bad("'fit_range' must be [j_lo, j_hi] with 1 <= j_lo <= j_hi");
    c.has_fit_range = true;
    c.range_lo = static_cast<std::size_t>(w[0]);
    c.range_hi = static_cast<std::size_t>(w[1]);
  }
  c.fit_exponent = get_number(j, "fit_exponent", c.experiment == "halfline" ? 0.5 : 2.0);
  c.fit_order = get_int(j, "fit_order", 1);
  c.fit_correction = get_number(j, "fit_correction", 0.5);
  c.routes = get<std::vector<std::string>>(j, "routes", {"b"});
  c.out_dir = get<std::string>(j, "out_dir", "out");
  c.n = get_int(j, "n", 2);
  c.count = get_int(j, "count", c.experiment == "fem" ? 4 : 10);
  c.predicted = get_number(j, "predicted", std::numeric_limits<double>::quiet_NaN());
  c.fit_tolerance = get_number(j, "fit_tolerance", 0.1);
  c.spectrum_file = get<std::string>(j, "spectrum_file", "");

  c.checks = check_defaults(c.experiment);
  if (j.contains("checks")) {
    if (!j.at("checks").is_object()) bad("'checks' must be an object of booleans");
    for (const auto& [k, v] : j.at("checks").items()) {
      if (!c.checks.count(k)) bad("unknown check '" + k + "' for experiment " + c.experiment);
      if (!v.is_boolean()) bad("check '" + k + "' must be true or false");
      c.checks[k] = v.get<bool>();
    }
  }

  if (!(c.alpha > 0.0) || c.alpha > 1000.0) bad("'alpha' must lie in (0, 1000]");
  if (!(c.theta_plus >= 0.0) || c.theta_plus > 2.0 * kPi + 1e-12) bad("'theta_plus' must lie in [0, 2 pi]");
  if (!power_of_two(c.grid_n) || c.grid_n < 16 || c.grid_n > 16384) {
    bad("'grid_n' must be a power of two in [16, 16384]");
  }
  if (!(c.extent > 0.0)) bad("'extent' must be positive");
  if (!(c.shift_k >= 0.0)) bad("'shift_k' must be nonnegative");
  if (c.geometry != "disc" && c.geometry != "half-disc") bad("'geometry' must be disc or half-disc");
  if (c.n_r < 4 || c.n_theta < 8) bad("'n_r' must be >= 4 and 'n_theta' >= 8");
  if (c.fit_order < 0 || c.fit_order > 4) bad("'fit_order' must lie in [0, 4]");
  if (!(c.fit_correction > 0.0)) bad("'fit_correction' must be positive");
  if (c.n < 2 || c.n > 60) bad("'n' must lie in [2, 60]");
  if (c.count < 1) bad("'count' must be positive");
  for (const auto& r : c.routes) {
    if (r != "a" && r != "b" && r != "neumann") bad("'routes' entries must be a, b or neumann");
  }
  if (c.routes.empty()) bad("'routes' must not be empty");
  if ((c.experiment == "halfline") && c.grid_n < 64) bad("halfline needs 'grid_n' >= 64");
  if (c.experiment == "disc" || c.experiment == "compare") {
    if (!(c.theta_plus > 0.0)) bad("'theta_plus' must be positive for the disc model");
  }
  if (c.experiment == "composed") {
    if (c.grid_n < 512) bad("composed needs 'grid_n' >= 512");
    c.symbol_orders = get<std::vector<double>>(j, "symbol_orders", {0.5, 1.0, 0.5});
    c.symbol_coefficients = get<std::vector<double>>(
        j, "symbol_coefficients",
        j.contains("symbol_orders") ? std::vector<double>(c.symbol_orders.size(), 1.0)
                                    : std::vector<double>{std::sqrt(0.5), 1.0, std::sqrt(0.5)});
    if (j.contains("multipliers")) {
      const json& m = j.at("multipliers");
      if (!m.is_array()) bad("'multipliers' must be an array");
      for (const auto& f : m) {
        if (f.is_number()) {
          c.multipliers.push_back(CircleFunction::constant(f.get<double>()));
          continue;
        }
        if (!f.is_array()) bad("each multiplier is a number or a list of [start, end, value]");
        CircleFunction cf;
        for (const auto& arc : f) {
          if (!arc.is_array() || arc.size() != 3 || !arc[0].is_number() || !arc[1].is_number() ||
              !arc[2].is_number()) {
            bad("multiplier arcs must be [start, end, value]");
          }
          const double s = arc[0].get<double>(), e = arc[1].get<double>();
          if (!(e > s) || e - s > 2.0 * kPi + 1e-12) bad("multiplier arc needs start < end <= start + 2 pi");
          cf.arcs.push_back({s, e, arc[2].get<double>()});
        }
        c.multipliers.push_back(cf);
      }
    } else {
      const CircleFunction arc = CircleFunction::indicator(0.0, c.theta_plus);
      c.multipliers = {arc, CircleFunction::constant(1.0), CircleFunction::constant(1.0), arc};
      if (j.contains("symbol_orders")) {
        c.multipliers.assign(c.symbol_orders.size() + 1, CircleFunction::constant(1.0));
        c.multipliers.front() = arc;
        c.multipliers.back() = arc;
      }
    }
    if (c.symbol_orders.empty() || c.symbol_orders.size() > 3) bad("'symbol_orders' needs 1 to 3 entries");
    if (c.symbol_coefficients.size() != c.symbol_orders.size()) bad("'symbol_coefficients' length mismatch");
    if (c.multipliers.size() != c.symbol_orders.size() + 1) bad("need one more multiplier than symbol orders");
    double t = 0.0;
    for (double o : c.symbol_orders) {
      if (!(o > 0.0)) bad("'symbol_orders' must be positive");
      t += o;
    }
    if (t > 3.0 + 1e-12) bad("total symbol order must not exceed 3");
  }
  if (c.experiment == "weyl-fit" && c.spectrum_file.empty()) bad("weyl-fit needs 'spectrum_file'");
  return c;
}

struct CheckResult {
  bool enabled = true;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct Outcome {
  json summary;
  std::map<std::string, CheckResult> checks;
};

json to_json(const WeylFitResult& f) {
  json j{{"exponent", f.exponent},
         {"window", {f.j_lo, f.j_hi}},
         {"points_used", f.used},
         {"raw", f.raw},
         {"extrapolated", f.extrapolated},
         {"coefficients", f.coefficients},
         {"correction_exponent", f.correction_exponent},
         {"order", f.order},
         {"raw_residual", f.raw_residual},
         {"fit_residual", f.fit_residual},
         {"condition", f.condition},
         {"ill_conditioned", f.ill_conditioned}};
  j["predicted"] = std::isfinite(f.predicted) ? json(f.predicted) : json(nullptr);
  j["relative_error"] = std::isfinite(f.relative_error) ? json(f.relative_error) : json(nullptr);
  return j;
}

json to_json(const ConstantsReport& r) {
  return json{{"n", r.n},           {"c_n", r.c_n},
              {"C0_plus", r.C0_plus}, {"C0", r.C0},
              {"C_A", r.C_A},       {"arc_length", r.arc_length},
              {"boundary_length", r.boundary_length}, {"domain_measure", r.domain_measure}};
}

// Records a check; `value <= tolerance` passes unless `pass` is given.
void record(Outcome& o, const Config& c, const std::string& name, double value, double tolerance,
            std::optional<bool> pass = std::nullopt) {
  CheckResult r;
  r.enabled = c.checks.at(name);
  r.value = value;
  r.tolerance = tolerance;
  r.pass = pass.has_value() ? *pass : (std::isfinite(value) && value <= tolerance);
  o.checks[name] = r;
}

bool wanted(const Config& c, const std::string& name) { return c.checks.at(name); }

std::string digest(const json& j) {
  std::ostringstream s;
  s << std::hex << std::hash<std::string>{}(j.dump());
  return s.str();
}

class Artifacts {
 public:
  Artifacts(std::filesystem::path dir, std::string prefix) : dir_(std::move(dir)), prefix_(std::move(prefix)) {}

  std::string spectrum(const std::string& label, const std::vector<double>& s, double p) {
    const auto file = dir_ / (prefix_ + "_" + label + ".csv");
    write_atomic(file, spectrum_csv(s));
    write_atomic(dir_ / (prefix_ + "_" + label + "_plot.csv"), plot_csv(s, p));
    return file.string();
  }
  std::string raw(const std::string& label, const std::string& header, const std::vector<double>& v) {
    const auto file = dir_ / (prefix_ + "_" + label + ".csv");
    std::string out = header + "\n";
    char buf[64];
    for (std::size_t k = 0; k < v.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k + 1, v[k]);
      out += buf;
    }
    write_atomic(file, out);
    return file.string();
  }

 private:
  std::filesystem::path dir_;
  std::string prefix_;
};

WeylFitResult fit_with(const Config& c, const std::vector<double>& s, double predicted,
                       std::size_t scale_n) {
  std::size_t lo = 0, hi = 0;
  if (c.has_fit_range) {
    lo = c.range_lo;
    hi = std::min(c.range_hi, s.size());
  } else {
    std::tie(lo, hi) = window_from_fractions(c.fit_lo, c.fit_hi, scale_n, s.size());
  }
  return weyl_fit(s, c.fit_exponent, lo, hi, c.fit_order, c.fit_correction, predicted);
}

Outcome run_constants(const Config& c, Artifacts&) {
  Outcome o;
  const double domain = c.n == 2 ? kPi : 1.0;
  const ConstantsReport r = constants(c.n, c.theta_plus, 2.0 * kPi, domain);
  o.summary["constants"] = to_json(r);
  const bool positive = r.c_n > 0.0 && r.C0 > 0.0 && r.C_A > 0.0 && r.C0_plus >= 0.0;
  record(o, c, "positive", positive ? 0.0 : 1.0, 0.0, positive);
  const double prop = std::abs(r.C0_plus - r.c_n * r.arc_length) + std::abs(r.C0 - r.c_n * r.boundary_length);
  record(o, c, "proportional", prop, 1e-12);
  return o;
}

Outcome run_halfline(const Config& c, Artifacts& art) {
  Outcome o;
  const auto grid = halfline::make_grid(c.extent, c.grid_n);
  const auto mask = halfline::plus_mask(grid);
  const auto dec = halfline::decomposition_check(c.alpha, grid, mask);
  const auto fac = halfline::factorization_check(c.alpha, grid, mask);
  auto decay = halfline::gplus_decay(c.alpha, grid, mask);
  decay.spectrum.config_digest = digest(c.raw);
  o.summary["spectra"]["psi_gplus"] = art.spectrum("psi_gplus", decay.spectrum.values, c.fit_exponent);
  o.summary["results"] = {
      {"decomposition_residual_fft", dec.residual_fft},
      {"decomposition_residual_kernel", dec.residual_kernel},
      {"hankel_gap", dec.hankel_gap},
      {"adjoint_gap", dec.adjoint_gap},
      {"norm_l0_inverse", dec.norm_l0_inverse},
      {"factorization_right", fac.right_residual},
      {"factorization_left", fac.left_residual},
      {"factorization_right_interior", fac.right_residual_interior},
      {"factorization_left_interior", fac.left_residual_interior},
      {"plus_leakage_cut", fac.plus_leakage_cut},
      {"plus_leakage_seam", fac.plus_leakage_seam},
      {"minus_leakage_cut", fac.minus_leakage_cut},
      {"minus_leakage_seam", fac.minus_leakage_seam},
      {"decay_trend", decay.trend},
      {"decay_s1", decay.spectrum.s(1)},
      {"decay_bound", decay.bound}};
  record(o, c, "decomposition_fft", dec.residual_fft, 1e-6);
  record(o, c, "decomposition_kernel", dec.residual_kernel, 1e-3);
  record(o, c, "hankel_agreement", dec.hankel_gap, 1e-3);
  record(o, c, "adjoint_pairing", dec.adjoint_gap, 1e-10);
  record(o, c, "plus_support", std::max(fac.plus_leakage_cut, fac.minus_leakage_cut), 1e-6);
  record(o, c, "factorization", std::max(fac.right_residual, fac.left_residual), 1e-6);
  record(o, c, "decay_trend", decay.trend, 0.7, decay.trend < 0.7 && decay.spectrum.s(1) <= decay.bound * (1 + 1e-12));
  return o;
}

Outcome run_disc(const Config& c, Artifacts& art) {
  Outcome o;
  disc::DiscConfig dc{c.alpha, c.b, c.theta_plus, c.grid_n, c.shift_k};
  disc::validate(dc);
  const ConstantsReport k = constants(2, c.theta_plus, 2.0 * kPi, kPi);
  o.summary["constants"] = to_json(k);
  const double predicted = std::pow(k.C0_plus, c.fit_exponent);
  const auto kr = disc::krein_spectrum_dirichlet_ref(dc);
  std::map<std::string, linalg::SingularSpectrum> spectra{{"a", kr.route_a}, {"b", kr.route_b}};
  if (std::find(c.routes.begin(), c.routes.end(), "neumann") != c.routes.end()) {
    disc::validate(dc, true);
    spectra["neumann"] = disc::krein_spectrum_neumann_ref(dc);
  }
  json fits = json::array();
  double min_value = std::numeric_limits<double>::infinity();
  const WeylFitResult* primary = nullptr;
  std::vector<WeylFitResult> all;
  all.reserve(c.routes.size());
  for (const auto& r : c.routes) {
    auto& s = spectra.at(r);
    s.config_digest = digest(c.raw);
    o.summary["spectra"][r] = art.spectrum("route_" + r, s.values, c.fit_exponent);
    all.push_back(fit_with(c, s.values, predicted, static_cast<std::size_t>(c.grid_n)));
    json f = to_json(all.back());
    f["route"] = r;
    fits.push_back(f);
    min_value = std::min(min_value, s.values.back());
  }
  for (std::size_t i = 0; i < c.routes.size(); ++i) {
    if (c.routes[i] == "b" || !primary) primary = &all[i];
  }
  o.summary["fits"] = fits;
  record(o, c, "weyl_fit", std::abs(primary->relative_error), c.fit_tolerance);
  record(o, c, "positivity", -min_value, 0.0, min_value > 0.0);
  if (wanted(c, "remainder_trend")) {
    const auto rem = disc::remainder_check(dc);
    o.summary["results"]["remainder_trend"] = rem.trend;
    o.summary["results"]["remainder_norm"] = rem.norm_remainder;
    o.summary["spectra"]["remainder"] = art.spectrum("remainder", rem.remainder.values, 1.0);
    record(o, c, "remainder_trend", rem.trend, 0.5);
  }
  if (wanted(c, "corrections_trend")) {
    const auto g = disc::g_corrections(dc);
    o.summary["results"]["g_one_trend"] = g.trend_one;
    o.summary["results"]["g_half_trend"] = g.trend_half;
    o.summary["spectra"]["g_one"] = art.spectrum("g_one", g.g_one.values, 1.0);
    o.summary["spectra"]["g_half"] = art.spectrum("g_half", g.g_half.values, 0.5);
    record(o, c, "corrections_trend", std::max(g.trend_one, g.trend_half), 1.0,
           g.trend_one < 1.0 && g.trend_half < 1.0);
  }
  if (wanted(c, "birman")) {
    const auto mono = disc::birman_monotonicity(dc, {kPi / 2, kPi, 1.5 * kPi, c.theta_plus});
    o.summary["results"]["birman_worst_violation"] = mono.worst_violation;
    record(o, c, "birman", mono.worst_violation, 1e-8);
  }
  return o;
}

double top_gap(const std::vector<double>& x, const std::vector<double>& y, std::size_t k) {
  if (x.size() < k || y.size() < k) throw DomainError("spectrum shorter than the compared head");
  double worst = 0.0;
  for (std::size_t j = 0; j < k; ++j) worst = std::max(worst, std::abs(x[j] / y[j] - 1.0));
  return worst;
}

Outcome run_fem(const Config& c, Artifacts& art) {
  Outcome o;
  const auto geom = femlab::geometry_from_string(c.geometry);
  const auto mesh = femlab::build_mesh(geom, c.n_r, c.n_theta);
  o.summary["results"]["mesh_nodes"] = mesh.node_count();
  o.summary["results"]["mesh_area"] = femlab::mesh_area(mesh);
  if (geom == femlab::Geometry::half_disc) {
    const auto sys = femlab::assemble(mesh, c.alpha, femlab::BoundaryCondition::mixed(0.0, 0.0));
    const auto ev = femlab::realization_spectrum(sys, c.count);
    const auto exact = femlab::half_disc_mixed_exact(c.alpha, 2000.0);
    o.summary["spectra"]["mixed_eigenvalues"] = art.raw("mixed_eigenvalues", "j,lambda_j", ev);
    double worst = 0.0;
    for (std::size_t j = 0; j < ev.size() && j < exact.size(); ++j) {
      worst = std::max(worst, std::abs(ev[j] / exact[j] - 1.0));
    }
    o.summary["results"]["exact_head"] =
        std::vector<double>(exact.begin(), exact.begin() + std::min<std::ptrdiff_t>(c.count, std::ssize(exact)));
    record(o, c, "exact_spectrum", worst, 0.01);
    const ConstantsReport k = constants(2, 2.0, kPi + 2.0, kPi / 2);
    const double ratio = static_cast<double>(exact.size()) / (k.C_A * 2000.0);
    o.summary["results"]["weyl_count_ratio"] = ratio;
    record(o, c, "weyl_count", std::abs(ratio - 1.0), 0.05);
    o.checks["modal_agreement"] = {false, true, 0.0, 0.0};
    o.checks["lambda_shift"] = {false, true, 0.0, 0.0};
    return o;
  }
  o.checks["exact_spectrum"] = {false, true, 0.0, 0.0};
  o.checks["weyl_count"] = {false, true, 0.0, 0.0};
  const auto sys = femlab::assemble(mesh, c.alpha, femlab::BoundaryCondition::mixed(c.theta_plus, c.b));
  const auto ev = femlab::realization_spectrum(sys, std::min(c.count, static_cast<int>(sys.free_dofs.size()) / 4));
  o.summary["spectra"]["mixed_eigenvalues"] = art.raw("mixed_eigenvalues", "j,lambda_j", ev);
  if (mesh.node_count() <= femlab::kDenseNodeBudget) {
    auto rd = femlab::resolvent_difference_spectrum(mesh, c.alpha, c.theta_plus, c.b, 0);
    o.summary["spectra"]["resolvent_difference"] = art.spectrum("resolvent_difference", rd.values, c.fit_exponent);
    if (wanted(c, "modal_agreement")) {
      disc::DiscConfig dc{c.alpha, c.b, c.theta_plus, c.grid_n, c.shift_k};
      const auto kr = disc::krein_spectrum_dirichlet_ref(dc);
      record(o, c, "modal_agreement", top_gap(rd.values, kr.route_a.values, 5), 0.05);
    } else {
      o.checks["modal_agreement"] = {false, true, 0.0, 0.0};
    }
    if (wanted(c, "lambda_shift")) {
      const auto dir = femlab::assemble(mesh, c.alpha, femlab::BoundaryCondition::dirichlet());
      record(o, c, "lambda_shift", femlab::lambda_shift_check(sys, dir, -1.0), 1e-9);
    } else {
      o.checks["lambda_shift"] = {false, true, 0.0, 0.0};
    }
  } else {
    o.checks["modal_agreement"] = {false, true, 0.0, 0.0};
    o.checks["lambda_shift"] = {false, true, 0.0, 0.0};
    o.summary["results"]["dense_oracle"] = "skipped: mesh exceeds the dense node budget";
  }
  return o;
}

Outcome run_compare(const Config& c, Artifacts& art) {
  Outcome o;
  disc::DiscConfig dc{c.alpha, c.b, c.theta_plus, c.grid_n, c.shift_k};
  disc::validate(dc, true);
  const auto kr = disc::krein_spectrum_dirichlet_ref(dc);
  const auto nr = disc::krein_spectrum_neumann_ref(dc);
  o.summary["spectra"]["a"] = art.spectrum("route_a", kr.route_a.values, c.fit_exponent);
  o.summary["spectra"]["neumann"] = art.spectrum("route_neumann", nr.values, c.fit_exponent);
  const double gap = top_gap(nr.values, kr.route_a.values, static_cast<std::size_t>(c.count));
  o.summary["results"]["cross_route_gap"] = gap;
  record(o, c, "cross_route", gap, 0.02);
  if (wanted(c, "fem_oracle")) {
    const auto mesh = femlab::build_mesh(femlab::Geometry::disc, c.n_r, c.n_theta);
    const auto rd = femlab::resolvent_difference_spectrum(mesh, c.alpha, c.theta_plus, c.b, 0);
    o.summary["spectra"]["fem"] = art.spectrum("fem", rd.values, c.fit_exponent);
    const double fg = top_gap(rd.values, kr.route_a.values, 5);
    o.summary["results"]["fem_oracle_gap"] = fg;
    record(o, c, "fem_oracle", fg, 0.05);
  } else {
    o.checks["fem_oracle"] = {false, true, 0.0, 0.0};
  }
  return o;
}

Outcome run_composed(const Config& c, Artifacts& art) {
  Outcome o;
  auto res = composed_operator_check(c.symbol_orders, c.symbol_coefficients, c.multipliers,
                                     c.grid_n, c.fit_lo, c.fit_hi, c.fit_order, c.fit_correction);
  o.summary["spectra"]["composed"] = art.spectrum("composed", res.spectrum.values, res.total_order);
  json f = to_json(res.fit);
  o.summary["fits"] = json::array({f});
  o.summary["results"] = {{"total_order", res.total_order}, {"c_p", res.c_p}, {"predicted", res.predicted},
                          {"relative_gap", res.relative_gap}};
  record(o, c, "composed_fit", std::abs(res.relative_gap), c.fit_tolerance);
  if (!c.raw.contains("symbol_orders") && !c.raw.contains("multipliers")) {
    const ConstantsReport k = constants(2, c.theta_plus, 2.0 * kPi, kPi);
    o.summary["constants"] = to_json(k);
    record(o, c, "prediction_consistency", std::abs(res.c_p - k.C0_plus), 1e-12);
  } else {
    o.checks["prediction_consistency"] = {false, true, 0.0, 0.0};
  }
  return o;
}

Outcome run_weyl_fit(const Config& c, Artifacts&) {
  Outcome o;
  const auto s = read_spectrum_csv(c.spectrum_file);
  if (s.empty()) throw ConfigError("spectrum file is empty");
  const auto n = c.raw.contains("grid_n") ? static_cast<std::size_t>(c.grid_n) : s.size();
  const auto f = fit_with(c, s, c.predicted, n);
  o.summary["fits"] = json::array({to_json(f)});
  if (std::isfinite(c.predicted)) {
    record(o, c, "weyl_fit", std::abs(f.relative_error), c.fit_tolerance);
  } else {
    o.checks["weyl_fit"] = {false, true, 0.0, 0.0};
  }
  return o;
}

struct RunResult {
  int code = kPass;
  json summary;
};

RunResult run_one(const json& j, const std::filesystem::path& out_override) {
  RunResult rr;
  Config c;
  try {
    c = parse_config(j);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    rr.code = kConfigError;
    rr.summary = {{"error", e.what()}, {"exit_code", rr.code}};
    return rr;
  }
  const std::filesystem::path dir = out_override.empty() ? std::filesystem::path(c.out_dir) : out_override;
  Artifacts art(dir, c.name);
  Outcome o;
  try {
    if (c.experiment == "constants") o = run_constants(c, art);
    else if (c.experiment == "halfline") o = run_halfline(c, art);
    else if (c.experiment == "disc") o = run_disc(c, art);
    else if (c.experiment == "fem") o = run_fem(c, art);
    else if (c.experiment == "compare") o = run_compare(c, art);
    else if (c.experiment == "composed") o = run_composed(c, art);
    else o = run_weyl_fit(c, art);
  } catch (const ConfigError& e) {
    std::cerr << c.name << ": config error: " << e.what() << '\n';
    rr.code = kConfigError;
    rr.summary = {{"config", c.raw}, {"error", e.what()}, {"exit_code", rr.code}};
    return rr;
  } catch (const std::exception& e) {
    std::cerr << c.name << ": computation failed: " << e.what() << '\n';
    rr.code = kComputationError;
    rr.summary = {{"config", c.raw}, {"error", e.what()}, {"exit_code", rr.code}};
    return rr;
  }
  json checks = json::object();
  bool failed = false;
  for (const auto& [name, r] : o.checks) {
    if (!r.enabled) continue;
    checks[name] = {{"pass", r.pass}, {"value", r.value}, {"tolerance", r.tolerance}};
    if (!r.pass) {
      failed = true;
      std::cerr << c.name << ": check " << name << " failed (value " << r.value << ", tolerance "
                << r.tolerance << ")\n";
    }
  }
  json s = o.summary;
  s["config"] = c.raw;
  s["config_digest"] = digest(c.raw);
  s["experiment"] = c.experiment;
  s["checks"] = checks;
  if (!s.contains("spectra")) s["spectra"] = json::object();
  if (!s.contains("fits")) s["fits"] = json::array();
  if (!s.contains("constants")) s["constants"] = nullptr;
  rr.code = failed ? kCheckFailure : kPass;
  s["exit_code"] = rr.code;
  rr.summary = s;
  try {
    write_atomic(dir / (c.name + "_summary.json"), s.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << c.name << ": cannot write summary: " << e.what() << '\n';
    rr.code = kComputationError;
  }
  return rr;
}

int severity(int code) {
  switch (code) {
    case kConfigError: return 3;
    case kComputationError: return 2;
    case kCheckFailure: return 1;
    default: return 0;
  }
}

}  // namespace

int run_experiment_text(const std::string& json_text, const std::filesystem::path& out_dir_override,
                        std::string* summary_out) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  if (!doc.is_array()) {
    RunResult r = run_one(doc, out_dir_override);
    if (summary_out) *summary_out = r.summary.dump(2);
    return r.code;
  }
  if (doc.empty()) {
    std::cerr << "config error: empty batch\n";
    return kConfigError;
  }
  std::vector<RunResult> results(doc.size());
  int threads = 1;
  if (const char* env = std::getenv("KREINLAB_THREADS")) {
    threads = std::max(1, std::atoi(env));
  }
  threads = std::min<int>(threads, static_cast<int>(doc.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < doc.size(); ++i) results[i] = run_one(doc[i], out_dir_override);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < doc.size();) results[i] = run_one(doc[i], out_dir_override);
      });
    }
    for (auto& th : pool) th.join();
  }
  int code = kPass;
  json all = json::array();
  for (const auto& r : results) {
    if (severity(r.code) > severity(code)) code = r.code;
    all.push_back(r.summary);
  }
  if (summary_out) *summary_out = all.dump(2);
  return code;
}

int run_experiment(const std::filesystem::path& config_file,
                   const std::filesystem::path& out_dir_override) {
  std::ifstream in(config_file);
  if (!in) {
    std::cerr << "config error: cannot open " << config_file.string() << '\n';
    return kConfigError;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return run_experiment_text(buf.str(), out_dir_override);
}

}  // namespace kreinlab::experiments
