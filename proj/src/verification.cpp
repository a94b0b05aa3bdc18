#include "nrw/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "nrw/quad.hpp"

namespace nrw {

void write_check_csv(std::ostream& os, const std::vector<CheckRow>& rows) {
  os << "check,instance,param,observed,expected,tolerance,pass\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%d\n", r.observed, r.expected, r.tolerance, r.pass ? 1 : 0);
    os << r.check << ',' << r.instance << ',' << r.param << buf;
  }
}

WTailRates w_tail_rates(Dim d, double R0, int levels) {
  require(d.odd(), "the W tail expansion is stated for odd N");
  require(R0 > 0.0, "R0 must be > 0");
  require(levels >= 3, "an exponent fit needs at least 3 levels");
  const int m = d.require_m();
  const PBasis b = build_basis(d);
  const auto W = AnalyticPair::of(d, Soliton(d, 1.0));
  WTailRates out;
  out.target_slope = -(m + 1.5);
  out.ell_expected = w_tail_coefficient(d);
  std::vector<double> theta_m;
  for (int n = 0; n < levels; ++n) {
    double R = std::ldexp(R0, n);
    out.R.push_back(R);
    out.defect.push_back(std::sqrt(soliton_defect_norm_sq(d, R)));
    theta_m.push_back(project(W, b, R).element.theta(m - 1));
  }
  out.fit = fit_loglog(out.R, out.defect);
  out.flagged = out.fit.residual > kFitResidualMax;
  out.ell = theta_m.back();
  bool up = true, down = true;
  for (std::size_t i = 1; i < theta_m.size(); ++i) {
    up = up && theta_m[i] >= theta_m[i - 1];
    down = down && theta_m[i] <= theta_m[i - 1];
  }
  out.monotone = up || down;
  return out;
}

Asymptotics extract_asymptotics(const SweepRow& row, const PBasis& b) {
  Asymptotics a;
  double best = 0.0;
  for (int k = 1; k <= b.m(); ++k) {
    double w = std::abs(row.theta(k - 1)) * b.c[k - 1] / std::pow(row.R, k - 0.5);
    if (w > best) {
      best = w;
      a.k0 = k;
      a.ell = row.theta(k - 1);
    }
  }
  return a;
}

namespace {

double shell_sum(const Eigen::VectorXd& theta, double R) {
  double s = 0.0;
  for (int k = 1; k <= theta.size(); ++k) s += std::abs(theta(k - 1)) / std::pow(R, k - 0.5);
  return s;
}

// ||u||_{H(R)} by direct quadrature, so that differences of nearly equal tails
// cancel pointwise rather than in a sum of large inner products.
double direct_norm(const AnalyticPair& u, double R) {
  const double N = u.dim().n();
  auto e = [&](double r) {
    double a = u.du0(r), b = u.u1(r);
    return (a * a + b * b) * std::pow(r, N - 1.0);
  };
  double s = 0.0, lo = R;
  for (const auto& p : u.profiles())
    if (p.hi > lo) {
      s += quad::integrate(e, lo, p.hi, 1e-12);
      lo = p.hi;
    }
  s += quad::integrate(e, lo, std::numeric_limits<double>::infinity(), 1e-12);
  return std::sqrt(std::max(0.0, s));
}

}  // namespace

RateCheck theorem1_rate_check(const AnalyticPair& data, int k0_expected, double ell_expected, double R1, int levels) {
  const Dim d = data.dim();
  require(d.odd(), "coordinates on P(R) need odd N");
  require(R1 > 0.0, "R1 must be > 0");
  require(levels >= 3, "need at least 3 dyadic levels");
  const PBasis b = build_basis(d);
  require(k0_expected >= 1 && k0_expected <= b.m(), "k0 out of range");
  const double R_start = 2.0 * R1;
  if (norm_sq(data, R_start) > kSmallNorm * kSmallNorm)
    throw PreconditionError("instance is not small in H(2 R1); move R1 outward");

  RateCheck out;
  out.rows = dyadic_sweep(data, b, R_start, levels);
  out.found = extract_asymptotics(out.rows.back(), b);
  out.k0_ok = out.found.k0 == k0_expected;
  out.ell_ok = std::abs(out.found.ell - ell_expected) <= 1e-9 * std::abs(ell_expected);

  const double k0 = k0_expected, p = d.power();
  out.required_slope = -std::min(k0 + 0.5, (k0 - 0.5) * p) + 0.25;
  const AnalyticPair defect = data - b.xi(k0_expected).scaled(ell_expected);
  std::vector<double> R, D;
  for (const auto& row : out.rows) {
    double v = direct_norm(defect, row.R);
    out.defect.push_back(v);
    if (v > 0.0) {
      R.push_back(row.R);
      D.push_back(v);
    }
  }
  if (R.size() >= 3) {
    out.fit = fit_loglog(R, D);
    out.rate_ok = out.fit->slope <= out.required_slope;
  } else {
    // The defect vanishes on (almost) every shell: faster than any rate.
    out.rate_ok = R.empty();
  }

  out.shell_ok = true;
  for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
    const double Ri = out.rows[i].R;
    double lhs = shell_sum(out.rows[i].theta - out.rows[i + 1].theta, Ri);
    double A = shell_sum(out.rows[i].theta, Ri);
    double ratio = lhs == 0.0 ? 0.0 : (A > 0.0 ? lhs / std::pow(A, p) : std::numeric_limits<double>::infinity());
    out.shell_ratio.push_back(ratio);
    out.shell_ok = out.shell_ok && ratio <= kShellConstant;
  }
  return out;
}

AnalyticPair xi_tail_instance(Dim d, int k, double R1, double scale, double bump_amp) {
  const PBasis b = build_basis(d);
  require(k >= 1 && k <= b.m(), "k out of range");
  require(R1 > 0.0, "R1 must be > 0");
  const double ell = scale * std::pow(2.0 * R1, k - 0.5) / b.c[k - 1];
  AnalyticPair out = b.xi(k).scaled(ell);
  if (bump_amp != 0.0) out.add(bump_profile(Slot::position, 0.5 * R1, R1, bump_amp));
  return out;
}

std::vector<InvarianceRow> time_invariance_check(const AnalyticPair& data, double R, const std::vector<double>& T_list,
                                                 const TimeInvarianceOptions& opt) {
  require(!T_list.empty(), "need at least one time");
  require(opt.levels >= 1, "levels must be >= 1");
  const Dim d = data.dim();
  const PBasis b = build_basis(d);
  const RadialGrid g = RadialGrid::covering(opt.h, opt.r_max);
  const double R0 = std::ldexp(g.back(), -opt.levels);
  std::vector<InvarianceRow> out;
  for (double T : T_list) {
    require(T >= 0.0, "times must be >= 0");
    require(R + T < R0, "sweep radii must lie outside the cone R + T");
    StatePair s = extend_inside(data, R, g);
    if (T > 0.0) {
      SolveConfig cfg;
      cfg.nonlinearity = Nonlinearity::truncated(R);
      cfg.cfl = opt.cfl;
      cfg.t_final = T;
      cfg.snapshot_every = static_cast<std::size_t>(-1);
      Trajectory tr = evolve_exterior(data, R, g, cfg);
      if (tr.status != RunStatus::completed) throw NumericalAbort(tr.message);
      s = tr.states.back();
    }
    auto rows = dyadic_sweep(s, b, R0, opt.levels);
    InvarianceRow row;
    row.T = T;
    row.found = extract_asymptotics(rows.back(), b);
    row.classification = row.found.k0 == 0 ? "zero" : "k0=" + std::to_string(row.found.k0);
    out.push_back(row);
  }
  return out;
}

namespace {

// Tail integrals int_{r_j}^{end} (u_r^2 + u_t^2) r^{N-1} dr at every node.
std::vector<double> tail_energy(const StatePair& s) {
  auto du = radial_derivative(s.u0, s.grid.h);
  const double N = s.dim.n();
  const std::size_t n = s.grid.n;
  std::vector<double> e(n), tail(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) e[j] = (du[j] * du[j] + s.u1[j] * s.u1[j]) * std::pow(s.grid.node(j), N - 1.0);
  for (std::size_t j = n - 1; j-- > 0;) tail[j] = tail[j + 1] + 0.5 * s.grid.h * (e[j] + e[j + 1]);
  return tail;
}

}  // namespace

double support_radius(const StatePair& s, double eps_rel, double total) {
  require(eps_rel > 0.0 && eps_rel < 1.0, "epsilon_rel must be in (0, 1)");
  if (s.tail) throw PreconditionError("support radius needs compactly supported data");
  if (total <= 0.0) return 0.0;
  auto tail = tail_energy(s);
  const double thr = eps_rel * total;
  if (tail.front() <= thr) return s.grid.r0;
  std::size_t j = 0;
  while (j + 1 < tail.size() && tail[j + 1] > thr) ++j;
  if (j + 1 == tail.size()) return s.grid.back();
  // Linear interpolation of the tail between r_j (above thr) and r_{j+1}.
  double w = (tail[j] - thr) / (tail[j] - tail[j + 1]);
  return s.grid.node(j) + w * s.grid.h;
}

SupportTrace support_trace(const Trajectory& fwd, const Trajectory& bwd, double eps_rel, double probe) {
  require(!fwd.states.empty() && fwd.states.size() == bwd.states.size(), "trajectories must share a schedule");
  if (fwd.status != RunStatus::completed) throw NumericalAbort(fwd.message);
  if (bwd.status != RunStatus::completed) throw NumericalAbort(bwd.message);
  const StatePair& s0 = fwd.states.front();
  SupportTrace tr;
  tr.epsilon_rel = eps_rel;
  tr.h = s0.grid.h;
  tr.probe = probe;
  const double total = exterior_norm_sq(s0, s0.grid.r0);
  for (std::size_t i = 0; i < fwd.states.size(); ++i) {
    tr.times.push_back(std::abs(fwd.times[i]));
    tr.rho_fwd.push_back(support_radius(fwd.states[i], eps_rel, total));
    tr.rho_bwd.push_back(support_radius(bwd.states[i], eps_rel, total));
  }
  if (total <= 0.0) {
    tr.direction = 1;
    tr.law_ok = tr.eighth_ok = true;
    tr.eighth_ratio = 1.0;
    return tr;
  }
  const double rho0 = tr.rho_fwd.front();
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    tr.dev_fwd = std::max(tr.dev_fwd, std::abs(tr.rho_fwd[i] - rho0 - tr.times[i]));
    tr.dev_bwd = std::max(tr.dev_bwd, std::abs(tr.rho_bwd[i] - rho0 - tr.times[i]));
  }
  const double tol = 2.0 * tr.h;
  if (tr.dev_fwd <= tol)
    tr.direction = 1;
  else if (tr.dev_bwd <= tol)
    tr.direction = -1;
  tr.law_ok = tr.direction != 0;

  const double rho = std::max(s0.grid.r0, rho0 - probe);
  const double base = exterior_norm_sq(s0, rho);
  auto min_ratio = [&](const Trajectory& t) {
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.states.size(); ++i)
      mn = std::min(mn, exterior_norm_sq(t.states[i], rho + std::abs(t.times[i])) / base);
    return mn;
  };
  double rf = min_ratio(fwd), rb = min_ratio(bwd);
  tr.eighth_ratio = tr.direction == 1 ? rf : tr.direction == -1 ? rb : std::max(rf, rb);
  tr.eighth_ok = tr.eighth_ratio >= 0.125 * (1.0 - kEighthSlack);
  return tr;
}

SupportTrace run_support_trace(const AnalyticPair& data, const SupportRun& run, double eps_rel) {
  require(data.only_compact(), "support propagation needs compactly supported data");
  require(run.t_final > 0.0 && run.snapshots >= 2, "need t_final > 0 and at least 2 snapshots");
  RadialGrid g = RadialGrid::covering(run.h, data.compact_end() + run.t_final + 1.0);
  StatePair init = StatePair::sample(data, g);
  SolveConfig cfg;
  cfg.nonlinearity = run.nonlinearity;
  cfg.cfl = run.cfl;
  cfg.t_final = run.t_final;
  std::size_t steps = static_cast<std::size_t>(std::ceil(run.t_final / (run.cfl * run.h) - 1e-9));
  cfg.snapshot_every = std::max<std::size_t>(1, steps / run.snapshots);
  Trajectory fwd = evolve(init, cfg);
  cfg.direction = -1;
  Trajectory bwd = evolve(init, cfg);
  return support_trace(fwd, bwd, eps_rel);
}

SeqConstants sequence_constants(double q, double r, double c0, double beta) {
  require(q > 0.0 && q < 1.0 && r > 0.0 && r < 1.0, "q and r must lie in (0, 1)");
  require(c0 >= 0.0, "c0 must be >= 0");
  require(beta > 1.0, "beta must be > 1");
  SeqConstants k;
  if (c0 == 0.0) {
    // Pure geometric recursion; epsilon plays no role.
    k.epsilon = 1.0;
    k.C = q == r ? 1.0 / r : std::max(1.0, 1.0 / std::abs(r - q));
    return k;
  }
  if (q < r) {
    // q + c0 eps^{beta-1} = (q + r)/2
    k.epsilon = std::pow((r - q) / (2.0 * c0), 1.0 / (beta - 1.0));
    k.C = std::max(1.0, 2.0 / (r - q));
    return k;
  }
  // q >= r: a = q + c0 eps^{beta-1} halfway between q and q^{1/beta}, so a^beta < q.
  const double a = 0.5 * (q + std::pow(q, 1.0 / beta));
  k.epsilon = std::pow((a - q) / c0, 1.0 / (beta - 1.0));
  const double C1 = std::max(1.0, 1.0 / (a - r));
  const double qp = std::pow(a, beta);
  const double extra = c0 * std::pow(C1, beta) * std::pow(2.0 * k.epsilon, beta - 1.0);
  if (q > r) {
    const double s = std::max(qp, r);
    k.C = 1.0 + (1.0 + extra) / (q - s);
  } else {
    const double Bp = extra / (q - qp);
    k.C = std::max(1.0 + Bp, 1.0 / r + Bp);
  }
  return k;
}

double sequence_bound(const SeqParams& p, const SeqConstants& k, int n) {
  if (p.q == p.r) return k.C * (p.mu0 + p.nu0 * (1.0 + n)) * std::pow(p.r, n);
  return k.C * (p.mu0 + p.nu0) * std::pow(std::max(p.q, p.r), n);
}

std::optional<double> sequence_rollout(const SeqParams& p, const SeqConstants& k, const std::vector<double>& slack) {
  require(static_cast<int>(slack.size()) >= p.n_max, "need one slack factor per step");
  if (p.mu0 < 0.0 || p.mu0 > k.epsilon || p.nu0 < 0.0 || p.nu0 > k.epsilon) return std::nullopt;
  double mu = p.mu0, worst = 0.0;
  for (int n = 0; n <= p.n_max; ++n) {
    double bound = sequence_bound(p, k, n);
    if (mu > 0.0) worst = std::max(worst, bound > 0.0 ? mu / bound : std::numeric_limits<double>::infinity());
    if (n == p.n_max) break;
    mu = slack[n] * (p.q * mu + p.c0 * std::pow(mu, p.beta) + p.nu0 * std::pow(p.r, n));
    if (mu > k.epsilon) return std::nullopt;
  }
  return worst;
}

namespace {

void record(SequenceReport& rep, const SeqParams& p, const std::optional<double>& ratio) {
  ++rep.draws;
  if (!ratio) {
    ++rep.rejected;
    return;
  }
  // Relative round-off allowance of the rollout itself.
  if (*ratio > 1.0 + 1e-12) ++rep.counterexamples;
  if (*ratio >= rep.worst_ratio) {
    rep.worst_ratio = *ratio;
    rep.worst = p;
  }
}

std::vector<double> draw_slack(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> s(n, 1.0);
  // Half of the rollouts saturate the recursion; the rest use slack biased toward 1.
  if (U(rng) < 0.5) return s;
  for (auto& x : s) x = 1.0 - std::pow(U(rng), 3.0);
  return s;
}

}  // namespace

SequenceReport sequence_claim_check(int trials, std::uint64_t seed) {
  require(trials >= 1, "need at least one trial");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  SequenceReport rep;
  for (int t = 0; t < trials; ++t) {
    SeqParams p;
    p.q = 0.05 + 0.9 * U(rng);
    p.r = U(rng) < 0.2 ? p.q : 0.05 + 0.9 * U(rng);
    p.c0 = U(rng) < 0.2 ? 0.0 : 3.0 * U(rng);
    p.beta = 1.1 + 2.9 * U(rng);
    SeqConstants k = sequence_constants(p.q, p.r, p.c0, p.beta);
    p.mu0 = k.epsilon * U(rng) * U(rng);
    p.nu0 = k.epsilon * U(rng) * U(rng);
    record(rep, p, sequence_rollout(p, k, draw_slack(rng, p.n_max)));
  }
  return rep;
}

SequenceReport sequence_claim_check(const SeqParams& base, int trials, std::uint64_t seed) {
  require(trials >= 1, "need at least one trial");
  SeqConstants k = sequence_constants(base.q, base.r, base.c0, base.beta);
  require(base.mu0 >= 0.0 && base.mu0 <= k.epsilon && base.nu0 >= 0.0 && base.nu0 <= k.epsilon,
          "mu0 and nu0 must lie in [0, epsilon]");
  std::mt19937_64 rng(seed);
  SequenceReport rep;
  for (int t = 0; t < trials; ++t) record(rep, base, sequence_rollout(base, k, draw_slack(rng, base.n_max)));
  return rep;
}

RadiativeVerdict compact_nonradiative_check(const AnalyticPair& data, const ChannelRun& run, double probe) {
  require(data.only_compact(), "the exclusion is tested on compactly supported data");
  RadiativeVerdict v;
  if (norm_sq(data, 0.0) == 0.0) {
    v.verdict = "zero";
    v.pass = true;
    return v;
  }
  v.rho0 = data_support_radius(data);
  v.tail0 = norm_sq(data, std::max(0.0, v.rho0 - probe));
  auto rep = run_channels(data, 0.0, run);
  v.sum_limits = rep.limit_fwd + rep.limit_bwd;
  v.pass = v.sum_limits > 0.0 && v.sum_limits >= 0.125 * (1.0 - kEighthSlack) * v.tail0;
  v.verdict = v.sum_limits > 0.0 ? "radiative" : "nonradiative";
  return v;
}

}  // namespace nrw
