// kreinlab command-line front end. Each subcommand either reads a JSON config
// (--config) or assembles one from flags; the runner does the rest.
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kreinlab/experiments.hpp"

namespace {

using nlohmann::json;

struct Flags {
  std::string config;
  std::string out;
  bool print = false;
  std::map<std::string, double> numbers;
  std::map<std::string, int> ints;
  std::map<std::string, std::string> strings;
  std::vector<std::string> routes;
  std::vector<double> fit_window;
  std::vector<std::string> checks;
};

void add_number(CLI::App* app, Flags& f, const std::string& key, const std::string& help) {
  app->add_option_function<double>("--" + key, [&f, key](double v) { f.numbers[key] = v; }, help);
}
void add_int(CLI::App* app, Flags& f, const std::string& key, const std::string& help) {
  app->add_option_function<int>("--" + key, [&f, key](int v) { f.ints[key] = v; }, help);
}
void add_string(CLI::App* app, Flags& f, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>("--" + key, [&f, key](const std::string& v) { f.strings[key] = v; },
                                        help);
}

std::optional<std::string> build_config(const std::string& experiment, const Flags& f) {
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) {
      std::cerr << "config error: cannot open " << f.config << '\n';
      return std::nullopt;
    }
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }
  json j{{"experiment", experiment}};
  for (const auto& [k, v] : f.numbers) j[k] = v;
  for (const auto& [k, v] : f.ints) j[k] = v;
  for (const auto& [k, v] : f.strings) j[k] = v;
  if (!f.routes.empty()) j["routes"] = f.routes;
  if (!f.fit_window.empty()) j["fit_window"] = f.fit_window;
  for (const auto& c : f.checks) {
    const auto eq = c.find('=');
    const std::string name = c.substr(0, eq);
    const std::string val = eq == std::string::npos ? "on" : c.substr(eq + 1);
    j["checks"][name] = !(val == "off" || val == "false" || val == "0");
  }
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral asymptotics of Krein resolvent differences: numerical experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"constants", "Weyl constants for a dimension and boundary arc"},
      {"halfline", "Wiener-Hopf factorization checks on the truncated half-line"},
      {"disc", "Krein resolvent difference spectra on the unit disc"},
      {"fem", "Finite-element realizations and the dense oracle"},
      {"compare", "Cross-route agreement of the disc spectra"},
      {"composed", "Asymptotics of composed pseudodifferential operators on the circle"},
      {"weyl-fit", "Fit s_j j^p on a stored spectrum"},
  };
  std::map<std::string, Flags> flags;
  for (const auto& [name, help] : commands) {
    Flags& f = flags[name];
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", f.config, "JSON config file (single object or batch array)");
    sub->add_option("--out", f.out, "Output directory (overrides out_dir)");
    sub->add_flag("--print", f.print, "Print the summary JSON to stdout");
    sub->add_option("--check", f.checks, "Enable or disable a check: name[=on|off]");
    add_string(sub, f, "name", "Prefix for output files");
    add_number(sub, f, "alpha", "Spectral parameter magnitude (lambda = -alpha^2)");
    add_number(sub, f, "b", "Robin coefficient on the plus arc");
    add_number(sub, f, "theta_plus", "Length of the plus arc");
    add_int(sub, f, "grid_n", "Boundary or half-line grid size (power of two)");
    add_number(sub, f, "extent", "Half-line truncation length T");
    add_number(sub, f, "shift_k", "Shift K for the Neumann-reference route");
    add_string(sub, f, "geometry", "disc or half-disc");
    add_int(sub, f, "n_r", "Radial mesh layers");
    add_int(sub, f, "n_theta", "Angular mesh cells");
    sub->add_option("--fit_window", f.fit_window, "Fit window fractions of grid_n: lo hi")->expected(2);
    add_number(sub, f, "fit_exponent", "Exponent p in s_j j^p");
    add_int(sub, f, "fit_order", "Extrapolation order");
    add_number(sub, f, "fit_correction", "Correction exponent q");
    add_number(sub, f, "fit_tolerance", "Relative tolerance of the fit check");
    add_number(sub, f, "predicted", "Predicted limit for weyl-fit");
    sub->add_option("--routes", f.routes, "Disc routes: a, b, neumann");
    add_int(sub, f, "n", "Dimension for constants");
    add_int(sub, f, "count", "Number of eigenvalues or compared singular values");
    add_string(sub, f, "spectrum_file", "Spectrum CSV for weyl-fit");
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, help] : commands) {
    if (!app.got_subcommand(name)) continue;
    const Flags& f = flags[name];
    const auto text = build_config(name, f);
    if (!text) return kreinlab::experiments::kConfigError;
    std::string summary;
    const int code = kreinlab::experiments::run_experiment_text(*text, f.out, &summary);
    if (f.print) std::cout << summary << '\n';
    return code;
  }
  return kreinlab::experiments::kConfigError;
}
