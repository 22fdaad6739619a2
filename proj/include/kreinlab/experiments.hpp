#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "kreinlab/linalg.hpp"

namespace kreinlab::experiments {

// ---- constants -----------------------------------------------------------

struct ConstantsReport {
  int n = 2;
  double c_n = 0.0;
  double C0_plus = 0.0;
  double C0 = 0.0;
  double C_A = 0.0;
  double arc_length = 0.0;
  double boundary_length = 0.0;
  double domain_measure = 0.0;
};

/// c_n = (2 pi)^{-(n-1)/2} 2^{1-n} / Gamma(1 + (n-1)/2); C0_plus = c_n |Sigma_+|,
/// C0 = c_n |Sigma|, C_A = (2 pi)^{-n} |Omega| |unit ball in R^n|.
ConstantsReport constants(int n, double arc_length, double boundary_length, double domain_measure);

// ---- Weyl fits -----------------------------------------------------------

struct WeylFitResult {
  double exponent = 0.0;
  std::size_t j_lo = 0;
  std::size_t j_hi = 0;
  std::size_t used = 0;  // window points above the noise floor
  double raw = 0.0;      // mean of s_j j^p over the window
  double extrapolated = 0.0;
  std::vector<double> coefficients;  // C, D_1, ... of C + sum_k D_k j^{-k q}
  double correction_exponent = 0.5;
  int order = 1;
  double raw_residual = 0.0;  // rms of s_j j^p - raw
  double fit_residual = 0.0;  // rms of the model residual
  double condition = 1.0;     // of the column-scaled design matrix
  bool ill_conditioned = false;
  double predicted = std::numeric_limits<double>::quiet_NaN();
  double relative_error = std::numeric_limits<double>::quiet_NaN();
};

/// Least-squares fit of s_j j^p = C + sum_{k=1..order} D_k j^{-k q} over the
/// 1-based window [j_lo, j_hi]; values below kNoiseFloor s_1 are excluded.
/// `predicted` (if finite) fills relative_error of the extrapolated value.
WeylFitResult weyl_fit(const std::vector<double>& s, double p, std::size_t j_lo, std::size_t j_hi,
                       int order = 1, double q = 0.5,
                       double predicted = std::numeric_limits<double>::quiet_NaN());

/// Window [lo_frac * n, hi_frac * n] clipped to [1, length].
std::pair<std::size_t, std::size_t> window_from_fractions(double lo_frac, double hi_frac,
                                                          std::size_t n, std::size_t length);

// ---- composed operators ---------------------------------------------------

/// Piecewise-constant function on the circle [0, 2 pi): value on each
/// half-open arc [start, end) (end may exceed 2 pi to wrap), zero elsewhere.
struct CircleFunction {
  struct Arc {
    double start = 0.0;
    double end = 0.0;
    double value = 0.0;
  };
  std::vector<Arc> arcs;

  static CircleFunction constant(double c);
  static CircleFunction indicator(double start, double end);
  double operator()(double theta) const;
};

struct ComposedCheck {
  double total_order = 0.0;
  double c_p = 0.0;        // (1/2pi) 2 int |prod b|^{1/t} |prod coef|^{1/t}
  double predicted = 0.0;  // c_p^t
  WeylFitResult fit;
  double relative_gap = 0.0;
  linalg::SingularSpectrum spectrum;
};

/// Closed-form prediction c(P) for P = b_1 P_1 ... b_l P_l b_{l+1} with P_i of
/// symbol coef_i |m|^{-t_i}.
double composed_constant(const std::vector<double>& orders, const std::vector<double>& coefficients,
                         const std::vector<CircleFunction>& multipliers);

/// Assembles P on the N-point circle grid (P_i = grid(coef_i |m|^{-t_i}),
/// value coef_i at m = 0), fits s_j j^t and compares with c(P)^t.
ComposedCheck composed_operator_check(const std::vector<double>& orders,
                                      const std::vector<double>& coefficients,
                                      const std::vector<CircleFunction>& multipliers, int n,
                                      double lo_frac = 1.0 / 16, double hi_frac = 0.25,
                                      int order = 1, double q = 0.5);

// ---- persistence -----------------------------------------------------------

/// `j,s_j` with 17 significant digits and LF endings.
std::string spectrum_csv(const std::vector<double>& s);
/// `j,s_j,s_j_jp` for plotting s_j j^p.
std::string plot_csv(const std::vector<double>& s, double p);
/// Reads a `j,s_j` file (header required).
std::vector<double> read_spectrum_csv(const std::filesystem::path& path);

/// Writes via a temporary sibling file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// ---- runner ----------------------------------------------------------------

enum ExitCode : int { kPass = 0, kComputationError = 1, kCheckFailure = 2, kConfigError = 3 };

/// Runs one config object or an array of them (JSON text). Artifacts go to
/// each config's out_dir (or `out_dir_override` when non-empty). Batches run
/// on KREINLAB_THREADS worker threads when that variable is set.
int run_experiment_text(const std::string& json_text, const std::filesystem::path& out_dir_override,
                        std::string* summary_out = nullptr);

int run_experiment(const std::filesystem::path& config_file,
                   const std::filesystem::path& out_dir_override = {});

}  // namespace kreinlab::experiments
