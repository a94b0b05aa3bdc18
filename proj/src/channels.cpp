#include "nrw/channels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "nrw/fit.hpp"

namespace nrw {

std::vector<double> exterior_energy_series(const Trajectory& tr, double R) {
  require(R >= 0.0, "cone radius must be >= 0");
  if (tr.status != RunStatus::completed) throw NumericalAbort(tr.message);
  std::vector<double> E;
  E.reserve(tr.states.size());
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const auto& s = tr.states[i];
    double rc = R + std::abs(tr.times[i]);
    if (rc > s.grid.back()) throw NumericalAbort("light cone exits the grid");
    E.push_back(std::max(0.0, exterior_norm_sq(s, rc)));
  }
  return E;
}

namespace {

double fit_intercept(const std::vector<double>& t, const std::vector<double>& E, double R, double t_lo, int deg) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_lo && t[i] > 0.0) {
      x.push_back(1.0 / (R + t[i]));
      y.push_back(E[i]);
    }
  if (static_cast<int>(x.size()) < deg + 3) throw PreconditionError("too few late snapshots to extrapolate the channel limit");
  return polyfit(x, y, deg)[0];
}

}  // namespace

LimitEstimate extrapolate_limit(const std::vector<double>& abs_t, const std::vector<double>& E, double R, Dim d) {
  require(abs_t.size() == E.size() && !E.empty(), "series length mismatch");
  double tf = *std::max_element(abs_t.begin(), abs_t.end());
  double scale = *std::max_element(E.begin(), E.end());
  if (scale == 0.0) return {0.0, 0.0};
  int deg = d.odd() ? d.n() - 2 : 3;
  double a = fit_intercept(abs_t, E, R, 0.25 * tf, deg);
  double b = fit_intercept(abs_t, E, R, 0.5 * tf, deg);
  // Exterior energies are nonnegative; a fit can undershoot zero by round-off.
  return {std::max(a, 0.0), std::abs(a - b)};
}

ChannelReport channel_report(const Trajectory& fwd, const Trajectory& bwd, double R) {
  require(!fwd.states.empty() && !bwd.states.empty(), "empty trajectory");
  require(fwd.states.front().dim == bwd.states.front().dim, "trajectories differ in dimension");
  require(fwd.times.size() == bwd.times.size(), "forward and backward runs must share the snapshot schedule");
  const auto& a = fwd.states.front();
  const auto& b = bwd.states.front();
  require(a.u0 == b.u0 && a.u1 == b.u1, "trajectories must share the initial state");
  ChannelReport rep;
  rep.R = R;
  for (double t : fwd.times) rep.times.push_back(std::abs(t));
  rep.ext_energy_fwd = exterior_energy_series(fwd, R);
  rep.ext_energy_bwd = exterior_energy_series(bwd, R);
  const Dim d = a.dim;
  auto f = extrapolate_limit(rep.times, rep.ext_energy_fwd, R, d);
  std::vector<double> tb;
  for (double t : bwd.times) tb.push_back(std::abs(t));
  auto g = extrapolate_limit(tb, rep.ext_energy_bwd, R, d);
  rep.limit_fwd = f.limit;
  rep.limit_bwd = g.limit;
  rep.limit_error = f.error + g.error;
  return rep;
}

void write_channel_csv(std::ostream& os, const ChannelReport& rep) {
  char buf[128];
  os << "t,E_ext_fwd,E_ext_bwd\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", rep.times[i], rep.ext_energy_fwd[i], rep.ext_energy_bwd[i]);
    os << buf;
  }
  os << "R,limit_fwd,limit_bwd,limit_error\n";
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", rep.R, rep.limit_fwd, rep.limit_bwd, rep.limit_error);
  os << buf;
}

double data_support_radius(const AnalyticPair& data) {
  double end = data.compact_end();
  if (end == 0.0) return 0.0;
  // Scan the compact part for the last point with non-negligible data.
  const int n = 20000;
  double peak = 0.0;
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) {
    double r = end * i / n;
    double x = 0.0;
    for (const auto& p : data.profiles()) {
      if (r < p.lo || r > p.hi) continue;
      x = std::max(x, std::abs(p.coeff * p.f(r)));
      if (p.df) x = std::max(x, std::abs(p.coeff * p.df(r)));
    }
    v[i] = x;
    peak = std::max(peak, x);
  }
  for (int i = n; i >= 0; --i)
    if (v[i] > 1e-13 * peak) return std::min(end, end * (i + 1) / n);
  return 0.0;
}

ChannelReport run_channels(const AnalyticPair& data, double R, const ChannelRun& run) {
  require(R >= 0.0, "cone radius must be >= 0");
  require(run.snapshots >= 8, "need at least 8 snapshots");
  const double rho = std::max(data_support_radius(data), R);
  double tf = run.t_final;
  if (tf <= 0.0) tf = 8.0 * std::max(rho, R > 0.0 ? R : 0.25);
  const double r_max = rho + tf + 1.0;
  RadialGrid g = RadialGrid::covering(run.h, r_max);
  SolveConfig cfg;
  cfg.nonlinearity = run.nonlinearity;
  cfg.cfl = run.cfl;
  cfg.t_final = tf;
  std::size_t steps = static_cast<std::size_t>(std::ceil(tf / (run.cfl * run.h) - 1e-9));
  cfg.snapshot_every = std::max<std::size_t>(1, steps / run.snapshots);
  StatePair init = extend_inside(data, R, g);
  Trajectory fwd = evolve(init, cfg);
  cfg.direction = -1;
  Trajectory bwd = evolve(init, cfg);
  if (fwd.status != RunStatus::completed) throw NumericalAbort(fwd.message);
  if (bwd.status != RunStatus::completed) throw NumericalAbort(bwd.message);
  return channel_report(fwd, bwd, R);
}

EquirepartitionResult verify_equirepartition(const AnalyticPair& data, const ChannelRun& run) {
  require(data.dim().odd(), "equirepartition holds in odd dimensions");
  require(data.only_compact(), "equirepartition needs finite-energy compact data");
  EquirepartitionResult res;
  res.report = run_channels(data, 0.0, run);
  res.lhs = res.report.limit_fwd + res.report.limit_bwd;
  res.rhs = norm_sq(data, 0.0);
  res.rel_err = res.rhs > 0.0 ? std::abs(res.lhs - res.rhs) / res.rhs : std::abs(res.lhs);
  return res;
}

ExteriorBoundResult verify_exterior_lower_bound(const AnalyticPair& data, double R, const ChannelRun& run) {
  require(data.dim().odd(), "the projected exterior bound is an odd-dimensional statement");
  require(R > 0.0, "R must be > 0");
  ExteriorBoundResult res;
  auto proj = project(data, build_basis(data.dim()), R);
  res.proj_residual_sq = proj.residual_sq;
  res.norm_sq = proj.norm_sq;
  res.report = run_channels(data, R, run);
  res.sum_limits = res.report.limit_fwd + res.report.limit_bwd;
  if (res.proj_residual_sq > 1e-12 * res.norm_sq)
    res.rel_err = std::abs(res.sum_limits - res.proj_residual_sq) / res.proj_residual_sq;
  else
    res.rel_err = res.norm_sq > 0.0 ? std::abs(res.sum_limits) / res.norm_sq : std::abs(res.sum_limits);
  return res;
}

}  // namespace nrw
