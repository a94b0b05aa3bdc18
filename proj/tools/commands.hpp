#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "nrw/analytic.hpp"
#include "nrw/verification.hpp"

namespace nrw::cli {

enum ExitCode { kPass = 0, kCheckFailed = 1, kConfigError = 2, kNumericalAbort = 3 };

// Tolerances pinned by the acceptance criteria.
namespace tol {
inline constexpr double equirepartition = 0.03;
inline constexpr double exterior_bound = 0.03;
inline constexpr double xi_invisible = 1e-3;
inline constexpr double form_ratio_cv = 0.05;
inline constexpr double hankel_margin = 0.05;  // max ratio < pi - margin
inline constexpr double truncated_reach = 0.05;  // ratio >= (1 - reach) pi
inline constexpr double hankel_ll = 1e-6;
inline constexpr double w_residual = 1e-10;
inline constexpr double w_tail = 1e-3;  // relative
inline constexpr double w_evolution = 1e-2;
inline constexpr double slope = 0.25;
inline constexpr double ell_exact = 1e-9;  // relative
inline constexpr double dalembert = 1e-4;
inline constexpr double order_lo = 1.8;
inline constexpr double order_hi = 2.2;
inline constexpr double energy_drift = 5e-3;
inline constexpr double geometric_exact = 1e-12;
}  // namespace tol

struct CommandResult {
  int status = kPass;
  std::vector<CheckRow> rows;
  std::string summary;  // plain text, deterministic
  std::string message;  // error text for status 2 / 3
  // Files written next to the main CSV: name -> body.
  std::vector<std::pair<std::string, std::string>> artifacts;
  std::vector<double> seconds;  // wall time per case; kept out of the CSV
};

const std::vector<std::string>& command_names();

// Runs one command; never throws. Config and precondition errors map to
// status 2, numerical aborts (blow-up, truncation, failed quadrature) to 3.
CommandResult run_command(const std::string& name, const Config& cfg);

// Runs the command (or a sweep over [sweep] lists when name is "sweep") and writes <out>/<name>.csv, <out>/<name>_summary.txt and
// artifacts. Header lines carry the command, a timestamp and the config echo.
int run_and_write(const std::string& name, const Config& cfg, const std::string& out_dir);

// Data presets: gaussian, gaussian[w], bump[a,b], w_soliton, w_soliton[lambda],
// xi_tail[k], mixture, mixture[seed], zero. `amp` scales every preset.
AnalyticPair make_preset(const std::string& spec, Dim d, const Config& cfg, const std::string& key = "data");

}  // namespace nrw::cli
