#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nrw/radial_core.hpp"

namespace nrw {

struct Nonlinearity {
  enum class Kind { linear, full, truncated };
  Kind kind = Kind::linear;
  double cone_radius = 0.0;  // truncated only: F acts where r > R + |t|

  static Nonlinearity linear() { return {Kind::linear, 0.0}; }
  static Nonlinearity full() { return {Kind::full, 0.0}; }
  static Nonlinearity truncated(double R) { return {Kind::truncated, R}; }
};

struct SolveConfig {
  Nonlinearity nonlinearity;
  double cfl = 0.5;
  double t_final = 1.0;
  double r_max = 0.0;  // 0 means "the grid end"; otherwise the grid must reach it
  std::size_t snapshot_every = 1;
  int direction = 1;  // -1 runs backward in time
  double blowup_threshold = 1e6;
};

enum class RunStatus { completed, blowup };

struct Trajectory {
  SolveConfig config;
  std::vector<double> times;  // signed; strictly monotone in the run direction
  std::vector<StatePair> states;
  RunStatus status = RunStatus::completed;
  std::string message;
};

// Largest CFL number for which the leapfrog scheme with the origin stencil is stable.
double max_stable_cfl(Dim d);

// Leapfrog for u_tt = u_rr + (N-1)/r u_r + F(u) on an origin grid.
// The last node is Dirichlet: driven by the freely evolved power tail when the
// state carries one, frozen otherwise.
Trajectory evolve(const StatePair& init, const SolveConfig& cfg);

// d'Alembert through w = r u for N = 3.
double exact_n3(const AnalyticPair& init, double t, double r);
double exact_n3_dt(const AnalyticPair& init, double t, double r);

// Fills r < R so that the data is C^3 across r = R: a cubic Taylor polynomial
// at R blended by a C^3 smoothstep over [blend_start R, R] into a constant.
struct ExtensionRecipe {
  double blend_start = 0.5;
  double inner_bump = 0.0;  // extra position bump on [0.1R, 0.4R] for consistency checks
};

StatePair extend_inside(const AnalyticPair& data, double R, const RadialGrid& g, const ExtensionRecipe& rc = {});
StatePair extend_inside(const StatePair& sampled, double R, const ExtensionRecipe& rc = {});

// Only r > R + |t| of the result is trusted.
Trajectory evolve_exterior(const AnalyticPair& data, double R, const RadialGrid& g, const SolveConfig& cfg,
                           const ExtensionRecipe& rc = {});
Trajectory evolve_exterior(const StatePair& sampled, double R, const SolveConfig& cfg, const ExtensionRecipe& rc = {});

struct ConvergenceResult {
  double order = 0.0;
  std::vector<double> h;
  std::vector<double> errors;
  bool inconclusive = false;
};

// Runs at h0, h0/2, ... (refinements >= 3 grids). With an N = 3 oracle the
// errors are against exact_n3; otherwise successive differences are used.
ConvergenceResult convergence_order(const std::function<StatePair(const RadialGrid&)>& make_init, double h0,
                                    double r_max, const SolveConfig& cfg, int refinements = 3,
                                    const AnalyticPair* n3_oracle = nullptr);

// One CSV per snapshot plus index `t,filename`; header lines carry the config echo.
void export_trajectory(const Trajectory& tr, const std::string& dir, const std::string& stem);
std::string config_echo(const SolveConfig& cfg);

}  // namespace nrw
