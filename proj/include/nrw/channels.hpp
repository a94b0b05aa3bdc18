#pragma once

#include <iosfwd>
#include <vector>

#include "nrw/pspace.hpp"
#include "nrw/wave_solver.hpp"

namespace nrw {

struct ChannelReport {
  double R = 0.0;
  std::vector<double> times;  // |t| at each snapshot, shared by both branches
  std::vector<double> ext_energy_fwd;
  std::vector<double> ext_energy_bwd;
  double limit_fwd = 0.0;
  double limit_bwd = 0.0;
  double limit_error = 0.0;
};

// E(t) = int_{R+|t|}^inf (u_r^2 + u_t^2) r^{N-1} dr at every snapshot.
std::vector<double> exterior_energy_series(const Trajectory& tr, double R);

struct LimitEstimate {
  double limit = 0.0;
  double error = 0.0;
};

// Past the last incoming wave, E(t) is a polynomial of degree N-2 in
// 1/(R+|t|) for odd N; its constant term is the limit. Even N uses the same
// fit as a truncated asymptotic expansion. The error compares two windows.
LimitEstimate extrapolate_limit(const std::vector<double>& abs_t, const std::vector<double>& E, double R, Dim d);

ChannelReport channel_report(const Trajectory& fwd, const Trajectory& bwd, double R);
void write_channel_csv(std::ostream& os, const ChannelReport& rep);

// Grid and time-stepping knobs for the channel experiments.
struct ChannelRun {
  double h = 1.0 / 512;
  double cfl = 0.5;
  double t_final = 0.0;  // 0: 8 x support radius (or R + 8 x (support - R) for R > 0)
  std::size_t snapshots = 80;
  Nonlinearity nonlinearity = Nonlinearity::linear();
};

// Runs both time directions from `data` (extended inside R when R > 0).
ChannelReport run_channels(const AnalyticPair& data, double R, const ChannelRun& run);

struct EquirepartitionResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
  ChannelReport report;
};

EquirepartitionResult verify_equirepartition(const AnalyticPair& data, const ChannelRun& run = {});

struct ExteriorBoundResult {
  double sum_limits = 0.0;
  double proj_residual_sq = 0.0;
  double norm_sq = 0.0;
  double rel_err = 0.0;
  ChannelReport report;
};

ExteriorBoundResult verify_exterior_lower_bound(const AnalyticPair& data, double R, const ChannelRun& run = {});

// Radius beyond which the data carries no energy (compact part), used to size runs.
double data_support_radius(const AnalyticPair& data);

}  // namespace nrw
