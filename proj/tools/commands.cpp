#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "nrw/channels.hpp"
#include "nrw/fourier_side.hpp"
#include "nrw/pspace.hpp"
#include "nrw/wave_solver.hpp"

namespace nrw::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
std::string g10(double v) { return fmt("%.10g", v); }

// Instance labels end up in CSV cells.
std::string cell(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

CheckRow row(const std::string& check, const std::string& instance, const std::string& param, double observed,
             double expected, double tolerance, bool pass) {
  return {check, cell(instance), cell(param), observed, expected, tolerance, pass};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Dim> dims_of(const Config& cfg) {
  std::vector<Dim> out;
  for (int n : cfg.ints("dim")) {
    if (n < 3) cfg.fail("dim", "dimensions start at 3, got " + std::to_string(n));
    out.emplace_back(n);
  }
  return out;
}

void require_odd(const Config& cfg, Dim d, const char* what) {
  if (!d.odd()) cfg.fail("dim", std::string(what) + " needs odd N, got " + std::to_string(d.n()));
}

double positive(const Config& cfg, const std::string& key, double fallback) {
  double v = cfg.num(key, fallback);
  if (!(v > 0.0)) cfg.fail(key, "must be > 0");
  return v;
}

long count(const Config& cfg, const std::string& key, long fallback) {
  long v = cfg.integer(key, fallback);
  if (v < 1) cfg.fail(key, "must be >= 1");
  return v;
}

ChannelRun channel_run(const Config& cfg, double h_default) {
  ChannelRun run;
  run.h = positive(cfg, "h", h_default);
  run.cfl = positive(cfg, "cfl", 0.5);
  run.t_final = cfg.num("t_final", 0.0);
  if (run.t_final < 0.0) cfg.fail("t_final", "must be >= 0");
  run.snapshots = static_cast<std::size_t>(count(cfg, "snapshots", 80));
  return run;
}

// ---- presets ----------------------------------------------------------------

struct PresetSpec {
  std::string name;
  std::vector<double> args;
};

PresetSpec parse_preset(const std::string& spec, const Config& cfg, const std::string& key) {
  PresetSpec p;
  auto lb = spec.find('[');
  if (lb == std::string::npos) {
    p.name = trim(spec);
    return p;
  }
  if (spec.back() != ']') cfg.fail(key, "malformed preset '" + spec + "'");
  p.name = trim(spec.substr(0, lb));
  for (const auto& a : split_list(spec.substr(lb + 1, spec.size() - lb - 2))) {
    Config tmp = Config::parse("x = " + a, "preset");
    double v;
    try {
      v = tmp.num("x");
    } catch (const ConfigError&) {
      cfg.fail(key, "bad argument '" + a + "' in preset '" + spec + "'");
    }
    p.args.push_back(v);
  }
  return p;
}

AnalyticPair mixture(Dim d, std::uint64_t seed, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  AnalyticPair out(d);
  const int terms = 2 + static_cast<int>(2.0 * U(rng));
  for (int i = 0; i < terms; ++i) {
    Slot slot = U(rng) < 0.5 ? Slot::position : Slot::velocity;
    double w = 0.5 + U(rng);
    double a = amp * (2.0 * U(rng) - 1.0);
    int k = U(rng) < 0.5 ? 0 : 1;
    out.add(gaussian_profile(slot, w, a, k));
  }
  return out;
}

}  // namespace

AnalyticPair make_preset(const std::string& spec, Dim d, const Config& cfg, const std::string& key) {
  const PresetSpec p = parse_preset(spec, cfg, key);
  const double amp = cfg.num("amp", 1.0);
  auto nargs = [&](std::size_t lo, std::size_t hi) {
    if (p.args.size() < lo || p.args.size() > hi)
      cfg.fail(key, "preset '" + p.name + "' takes " + std::to_string(lo) + ".." + std::to_string(hi) + " arguments");
  };
  if (p.name == "gaussian") {
    nargs(0, 1);
    double w = p.args.empty() ? positive(cfg, "width", 1.0) : p.args[0];
    if (!(w > 0.0)) cfg.fail(key, "gaussian width must be > 0");
    return AnalyticPair::of(d, gaussian_profile(Slot::position, w, amp));
  }
  if (p.name == "bump") {
    nargs(2, 2);
    if (!(p.args[0] >= 0.0 && p.args[1] > p.args[0])) cfg.fail(key, "bump[a,b] needs 0 <= a < b");
    return AnalyticPair::of(d, bump_profile(Slot::position, p.args[0], p.args[1], amp));
  }
  if (p.name == "w_soliton") {
    nargs(0, 1);
    double lambda = p.args.empty() ? positive(cfg, "lambda", 1.0) : p.args[0];
    if (!(lambda > 0.0)) cfg.fail(key, "w_soliton scale must be > 0");
    return AnalyticPair::of(d, Soliton(d, lambda)).scaled(amp);
  }
  if (p.name == "xi_tail") {
    nargs(1, 1);
    if (!d.odd()) cfg.fail(key, "xi_tail needs odd N");
    const PBasis b = build_basis(d);
    int k = static_cast<int>(p.args[0]);
    if (k != p.args[0] || k < 1 || k > b.m())
      cfg.fail(key, "xi_tail[k] needs 1 <= k <= " + std::to_string(b.m()) + " for N = " + std::to_string(d.n()));
    return b.xi(k).scaled(amp);
  }
  if (p.name == "mixture") {
    nargs(0, 1);
    double s = p.args.empty() ? static_cast<double>(cfg.integer("seed", 1)) : p.args[0];
    if (s < 0.0 || s != std::floor(s)) cfg.fail(key, "mixture seed must be a non-negative integer");
    return mixture(d, static_cast<std::uint64_t>(s), amp);
  }
  if (p.name == "zero") {
    nargs(0, 0);
    return AnalyticPair(d);
  }
  cfg.fail(key, "unknown preset '" + p.name + "' (known: gaussian, bump[a,b], w_soliton, xi_tail[k], mixture, zero)");
}

namespace {

struct Context {
  const Config& cfg;
  CommandResult& out;
  std::ostringstream summary;
};

// ---- channels -------------------------------------------------------------------

void cmd_equirepartition(Context& c) {
  const auto dims = dims_of(c.cfg);
  const auto data = c.cfg.list("data", "gaussian,bump[0.5,1.5],mixture[1],mixture[2],mixture[3]");
  const ChannelRun run = channel_run(c.cfg, 1.0 / 512);
  for (Dim d : dims) {
    require_odd(c.cfg, d, "equirepartition");
    for (const auto& spec : data) {
      const AnalyticPair a = make_preset(spec, d, c.cfg);
      if (!a.only_compact() || a.empty()) c.cfg.fail("data", "equirepartition needs nonzero compact data, got " + spec);
      auto t0 = std::chrono::steady_clock::now();
      const auto res = verify_equirepartition(a, run);
      const std::string inst = "N=" + std::to_string(d.n()) + " " + spec;
      c.out.rows.push_back(row("equirepartition", inst, "R=0", res.rel_err, 0.0, tol::equirepartition,
                               res.rel_err <= tol::equirepartition));
      c.out.seconds.push_back(seconds_since(t0));
      c.summary << inst << ": limits " << g10(res.report.limit_fwd) << " + " << g10(res.report.limit_bwd)
                << " vs energy " << g10(res.rhs) << ", rel_err " << fmt("%.3e", res.rel_err) << " (extrapolation "
                << fmt("%.1e", res.report.limit_error) << ")\n";
      std::ostringstream csv;
      write_channel_csv(csv, res.report);
      c.out.artifacts.emplace_back("channels_N" + std::to_string(d.n()) + "_" + spec + ".csv", csv.str());
    }
  }
}

void cmd_exterior_bound(Context& c) {
  const auto dims = dims_of(c.cfg);
  const auto Rs = c.cfg.nums("R", {0.5, 1.0, 2.0});
  for (double R : Rs)
    if (!(R > 0.0)) c.cfg.fail("R", "radii must be > 0");
  const auto data = c.cfg.list("data", "mixture[1],mixture[2],mixture[3],mixture[4],mixture[5],xi_tail");
  const ChannelRun run = channel_run(c.cfg, 1.0 / 512);
  for (Dim d : dims) {
    require_odd(c.cfg, d, "the exterior bound");
    std::vector<std::string> specs;
    for (const auto& s : data) {
      if (s == "xi_tail")
        for (int k = 1; k <= d.require_m(); ++k) specs.push_back("xi_tail[" + std::to_string(k) + "]");
      else
        specs.push_back(s);
    }
    for (const auto& spec : specs) {
      const AnalyticPair a = make_preset(spec, d, c.cfg);
      const bool invisible = spec.rfind("xi_tail", 0) == 0;
      for (double R : Rs) {
        auto t0 = std::chrono::steady_clock::now();
        const auto res = verify_exterior_lower_bound(a, R, run);
        c.out.seconds.push_back(seconds_since(t0));
        const std::string inst = "N=" + std::to_string(d.n()) + " " + spec;
        const std::string param = "R=" + g10(R);
        if (invisible) {
          double ratio = (res.report.limit_fwd + res.report.limit_bwd) / res.norm_sq;
          c.out.rows.push_back(row("xi_invisible", inst, param, ratio, 0.0, tol::xi_invisible,
                                   std::abs(ratio) <= tol::xi_invisible));
        } else {
          c.out.rows.push_back(row("exterior_bound", inst, param, res.rel_err, 0.0, tol::exterior_bound,
                                   res.rel_err <= tol::exterior_bound));
        }
        c.summary << inst << " " << param << ": limits " << g10(res.sum_limits) << ", residual "
                  << g10(res.proj_residual_sq) << ", norm " << g10(res.norm_sq) << "\n";
      }
    }
  }
}

// ---- Fourier side -----------------------------------------------------------------

std::function<double(double)> log_bumps(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  struct B {
    double a, c, s;
  };
  std::vector<B> bs;
  int n = 1 + static_cast<int>(3.0 * U(rng));
  for (int i = 0; i < n; ++i) bs.push_back({2.0 * U(rng) - 1.0, 4.0 * U(rng) - 2.0, 0.3 + 0.7 * U(rng)});
  return [bs](double rho) {
    double x = std::log(rho), v = 0.0;
    for (const auto& b : bs) v += b.a * std::exp(-0.5 * (x - b.c) * (x - b.c) / (b.s * b.s));
    return v;
  };
}

void cmd_even_form(Context& c) {
  const auto dims = dims_of(c.cfg);
  const long samples = count(c.cfg, "samples", 100);
  const long states = count(c.cfg, "states", 10);
  const auto seed = static_cast<std::uint64_t>(c.cfg.integer("seed", 1));
  ChannelRun run = channel_run(c.cfg, 1.0 / 256);
  run.nonlinearity = Nonlinearity::linear();
  for (Dim d : dims) {
    if (d.odd()) c.cfg.fail("dim", "the even form needs even N, got " + std::to_string(d.n()));
    const std::string N = "N=" + std::to_string(d.n());
    // Positivity on random Fourier-side pairs.
    const LogGrid g = LogGrid::span(std::exp(-20.0), std::exp(12.0), 0.02);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = HUGE_VAL;
    int nonpositive = 0;
    for (long i = 0; i < samples; ++i) {
      double pick = U(rng);
      auto f0 = log_bumps(rng);
      auto f1 = log_bumps(rng);
      FourierSidePair p{d, HalfLineFn::sample(g, f0), HalfLineFn::sample(g, f1)};
      if (pick < 0.15) std::fill(p.u0_hat.v.begin(), p.u0_hat.v.end(), 0.0);
      else if (pick < 0.3) std::fill(p.u1_hat.v.begin(), p.u1_hat.v.end(), 0.0);
      for (HalfLineFn* f : {&p.u0_hat, &p.u1_hat}) f->vanish_below = f->vanish_above = true;
      const FormTerms t = even_exterior_terms(p);
      worst = std::min(worst, t.value / t.kinetic);
      if (!(t.value > 0.0)) ++nonpositive;
    }
    c.out.rows.push_back(row("form_positive", N + " random pairs", "samples=" + std::to_string(samples), worst, 0.0,
                             0.0, nonpositive == 0));
    c.summary << N << ": min form/kinetic over " << samples << " pairs " << g10(worst) << ", nonpositive "
              << nonpositive << "\n";

    // Time-domain channel sum against the Fourier-side form.
    std::vector<double> ratios;
    for (long i = 0; i < states; ++i) {
      const AnalyticPair a = mixture(d, seed * 1000 + static_cast<std::uint64_t>(i), 1.0);
      const auto rep = run_channels(a, 0.0, run);
      const RadialGrid rg = RadialGrid::covering(1.0 / 512, a.compact_end() + 0.5);
      const auto p = radial_fourier(StatePair::sample(a, rg), LogGrid::span(std::exp(-25.0), std::exp(4.5), 0.02));
      const double form = even_exterior_form(p);
      ratios.push_back((rep.limit_fwd + rep.limit_bwd) / form);
      c.summary << N << " state " << i << ": channels " << g10(rep.limit_fwd + rep.limit_bwd) << ", form " << g10(form)
                << ", ratio " << g10(ratios.back()) << "\n";
    }
    const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    const double cv = std::sqrt(var / static_cast<double>(ratios.size())) / std::abs(mean);
    c.out.rows.push_back(row("form_ratio_cv", N + " mixtures", "states=" + std::to_string(states), cv, 0.0,
                             tol::form_ratio_cv, cv <= tol::form_ratio_cv));
    c.summary << N << ": measured constant " << g10(mean) << " (1/pi = " << g10(1.0 / M_PI) << "), cv " << g10(cv)
              << "\n";
  }
}

HalfLineFn minus(const HalfLineFn& a, const HalfLineFn& b) {
  HalfLineFn out = a;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] -= b.v[i];
  return out;
}

void cmd_hankel(Context& c) {
  const long samples = count(c.cfg, "samples", 1000);
  const long functions = count(c.cfg, "functions", 50);
  const auto seed = static_cast<std::uint64_t>(c.cfg.integer("seed", 7));
  const double T = positive(c.cfg, "T", 1e8);
  if (T <= 1.0) c.cfg.fail("T", "must be > 1");

  const auto ns = operator_norm_check(static_cast<int>(samples), seed);
  double hi = 0.0, lo = HUGE_VAL;
  std::ostringstream csv;
  csv << "sample_id,ratio\n";
  for (const auto& s : ns) {
    hi = std::max(hi, s.ratio);
    lo = std::min(lo, s.ratio);
    csv << s.id << "," << g10(s.ratio) << "\n";
  }
  c.out.artifacts.emplace_back("hankel_samples.csv", csv.str());
  c.out.rows.push_back(row("hankel_strict", "random test functions", "samples=" + std::to_string(samples), hi, M_PI,
                           tol::hankel_margin, lo > 0.0 && hi < M_PI - tol::hankel_margin));
  c.summary << "ratio range [" << g10(lo) << ", " << g10(hi) << "], pi - max = " << g10(M_PI - hi) << "\n";

  const double reach = truncated_power_ratio(T) / M_PI;
  c.out.rows.push_back(row("truncated_family", "sigma^-1/2 on [1/T;T]", "T=" + g10(T), reach, 1.0,
                           tol::truncated_reach, reach >= 1.0 - tol::truncated_reach && reach < 1.0));
  for (double t : {1e4, 1e6, 1e10}) c.summary << "truncated T=" << g10(t) << ": " << g10(truncated_power_ratio(t) / M_PI) << " pi\n";
  c.summary << "truncated T=" << g10(T) << ": " << g10(reach) << " pi\n";

  double worst = 0.0;
  for (const auto& phi : random_test_functions(static_cast<int>(functions), seed + 1)) {
    const HalfLineFn H = hankel_H(phi);
    const HalfLineFn LL = laplace_L(laplace_L(phi));
    worst = std::max(worst, l2_norm(minus(H, LL)) / l2_norm(H));
  }
  c.out.rows.push_back(row("H_equals_LL", "random test functions", "functions=" + std::to_string(functions), worst,
                           0.0, tol::hankel_ll, worst <= tol::hankel_ll));
  c.summary << "max ||H phi - L L phi|| / ||H phi|| = " << g10(worst) << "\n";
}

// ---- ground state -------------------------------------------------------------------

void cmd_w(Context& c) {
  const auto dims = dims_of(c.cfg);
  const double h = positive(c.cfg, "h", 1.0 / 512);
  const double t_final = positive(c.cfg, "t_final", 2.0);
  const double r_max = positive(c.cfg, "r_max", 8.0);
  for (Dim d : dims) {
    const std::string N = "N=" + std::to_string(d.n());
    const double p = d.power();
    double res = 0.0;
    for (int i = 0; i < 100; ++i) {
      double r = std::pow(10.0, -2.0 + 4.0 * i / 99.0);
      double w = eval_W(d, 1.0, r);
      double lhs = eval_d2W(d, 1.0, r) + (d.n() - 1.0) / r * eval_dW(d, 1.0, r);
      double scale = std::abs(eval_d2W(d, 1.0, r)) + std::abs((d.n() - 1.0) / r * eval_dW(d, 1.0, r));
      res = std::max(res, std::abs(lhs + std::pow(std::abs(w), p - 1.0) * w) / std::max(scale, 1.0));
    }
    c.out.rows.push_back(row("w_residual", N, "100 radii in [1e-2;1e2]", res, 0.0, tol::w_residual,
                             res <= tol::w_residual));

    const double ell = w_tail_coefficient(d);
    const double tail = std::pow(1e3, d.n() - 2.0) * eval_W(d, 1.0, 1e3);
    const double rel = std::abs(tail / ell - 1.0);
    c.out.rows.push_back(row("w_tail_coefficient", N, "r=1000", tail, ell, tol::w_tail, rel <= tol::w_tail));
    c.summary << N << ": residual " << g10(res) << ", r^(N-2) W(1000) = " << g10(tail) << " vs " << g10(ell)
              << " (relative " << g10(rel) << ", absolute " << g10(std::abs(tail - ell)) << ")\n";

    const AnalyticPair W = AnalyticPair::of(d, Soliton(d, 1.0));
    const RadialGrid g = RadialGrid::covering(h, r_max);
    const StatePair init = StatePair::sample(W, g);
    SolveConfig cfg;
    cfg.nonlinearity = Nonlinearity::full();
    cfg.cfl = positive(c.cfg, "cfl", 0.5);
    cfg.t_final = t_final;
    std::size_t steps = static_cast<std::size_t>(std::ceil(t_final / (cfg.cfl * h)));
    cfg.snapshot_every = std::max<std::size_t>(1, steps / 20);
    const Trajectory tr = evolve(init, cfg);
    if (tr.status != RunStatus::completed) throw NumericalAbort("W evolution: " + tr.message);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      const StatePair& s = tr.states[i];
      std::vector<double> u0(s.u0.size());
      for (std::size_t j = 0; j < u0.size(); ++j) u0[j] = s.u0[j] - init.u0[j];
      // Past the grid the boundary holds W exactly, so the difference vanishes there.
      StatePair diff(d, s.grid, std::move(u0), s.u1, AnalyticPair(d));
      worst = std::max(worst, std::sqrt(exterior_norm_sq(diff, 1.0 + std::abs(tr.times[i]))));
    }
    c.out.rows.push_back(row("w_evolution", N, "h=" + g10(h) + " t<=" + g10(t_final), worst, 0.0, tol::w_evolution,
                             worst <= tol::w_evolution));
    c.summary << N << ": max ||u(t) - W||_H(1+t) = " << g10(worst) << "\n";
  }
}

// ---- rates ------------------------------------------------------------------------

void w_tail_rows(Context& c, Dim d, double R0, int levels) {
  require_odd(c.cfg, d, "the W tail sweep");
  const std::string N = "N=" + std::to_string(d.n());
  const WTailRates w = w_tail_rates(d, R0, levels);
  const std::string param = "R0=" + g10(R0) + " levels=" + std::to_string(levels);
  c.out.rows.push_back(row("w_tail_slope", N, param, w.fit.slope, w.target_slope, tol::slope,
                           std::abs(w.fit.slope - w.target_slope) <= tol::slope && !w.flagged));
  c.summary << N << ": slope " << g10(w.fit.slope) << " (target " << g10(w.target_slope) << ", fit residual "
            << g10(w.fit.residual) << (w.flagged ? ", flagged" : "") << "), theta_m -> " << g10(w.ell) << " vs "
            << g10(w.ell_expected) << (w.monotone ? ", monotone" : ", not monotone") << "\n";
  for (std::size_t i = 0; i < w.R.size(); ++i)
    c.summary << "  R=" << g10(w.R[i]) << " defect " << g10(w.defect[i]) << "\n";
}

void cmd_w_tail_rates(Context& c) {
  const double R0 = positive(c.cfg, "R0", 32.0);
  const long levels = count(c.cfg, "levels", 6);
  for (Dim d : dims_of(c.cfg)) w_tail_rows(c, d, R0, static_cast<int>(levels));
}

void cmd_rates(Context& c) {
  const double R0 = positive(c.cfg, "R0", 32.0);
  const int levels = static_cast<int>(count(c.cfg, "levels", 6));
  const double R1 = positive(c.cfg, "R1", 2.0);
  for (Dim d : dims_of(c.cfg)) {
    require_odd(c.cfg, d, "the rate check");
    const std::string N = "N=" + std::to_string(d.n());
    const int m = d.require_m();
    w_tail_rows(c, d, R0, levels);
    const WTailRates w = w_tail_rates(d, R0, levels);
    const double rel = std::abs(w.ell / w.ell_expected - 1.0);
    c.out.rows.push_back(row("w_theta_limit", N, "R=" + g10(w.R.back()), w.ell, w.ell_expected, tol::w_tail,
                             rel <= tol::w_tail && w.monotone));

    // W itself, from the first dyadic radius where it is small.
    const AnalyticPair W = AnalyticPair::of(d, Soliton(d, 1.0));
    double Rw = 1.0;
    while (norm_sq(W, 2.0 * Rw) > kSmallNorm) Rw *= 2.0;
    const RateCheck rw = theorem1_rate_check(W, m, w_tail_coefficient(d), Rw, levels);
    const double shell_w = *std::max_element(rw.shell_ratio.begin(), rw.shell_ratio.end());
    c.out.rows.push_back(row("w_k0", N, "R1=" + g10(Rw), rw.found.k0, m, 0.0, rw.k0_ok));
    c.out.rows.push_back(row("w_shell", N, "R1=" + g10(Rw), shell_w, kShellConstant, 0.0, rw.shell_ok));
    c.out.rows.push_back(row("w_rate", N, "R1=" + g10(Rw), rw.fit ? rw.fit->slope : 0.0, rw.required_slope,
                             tol::slope, rw.rate_ok));

    const PBasis b = build_basis(d);
    for (int k = 1; k <= m; ++k) {
      const AnalyticPair data = xi_tail_instance(d, k, R1, 0.5, 0.1);
      const double ell = 0.5 * std::pow(2.0 * R1, k - 0.5) / b.c[k - 1];
      const RateCheck rc = theorem1_rate_check(data, k, ell, R1, levels);
      const std::string inst = N + " xi_tail[" + std::to_string(k) + "]+bump";
      const std::string param = "R1=" + g10(R1);
      const double shell = *std::max_element(rc.shell_ratio.begin(), rc.shell_ratio.end());
      c.out.rows.push_back(row("xi_k0", inst, param, rc.found.k0, k, 0.0, rc.k0_ok));
      c.out.rows.push_back(row("xi_ell", inst, param, rc.found.ell, ell, tol::ell_exact, rc.ell_ok));
      c.out.rows.push_back(row("xi_shell", inst, param, shell, kShellConstant, 0.0, rc.shell_ok));
      c.out.rows.push_back(row("xi_rate", inst, param, rc.fit ? rc.fit->slope : 0.0, rc.required_slope, tol::slope,
                               rc.rate_ok));
      c.summary << inst << ": k0 " << rc.found.k0 << ", l " << g10(rc.found.ell) << " vs " << g10(ell)
                << ", max shell ratio " << g10(shell) << "\n";
      std::ostringstream csv;
      write_sweep_csv(csv, rc.rows, m);
      c.out.artifacts.emplace_back("sweep_N" + std::to_string(d.n()) + "_xi" + std::to_string(k) + ".csv", csv.str());
    }
    c.summary << N << " W from R1=" << g10(Rw) << ": k0 " << rw.found.k0 << ", max shell ratio " << g10(shell_w)
              << ", defect slope " << (rw.fit ? g10(rw.fit->slope) : std::string("none")) << " (required <= "
              << g10(rw.required_slope) << ")\n";
  }
}

// ---- support --------------------------------------------------------------------------

void cmd_support(Context& c) {
  const auto dims = dims_of(c.cfg);
  SupportRun run;
  run.h = positive(c.cfg, "h", 1.0 / 512);
  run.cfl = positive(c.cfg, "cfl", 0.5);
  run.t_final = positive(c.cfg, "t_final", 2.0);
  run.snapshots = static_cast<std::size_t>(count(c.cfg, "snapshots", 40));
  const double eps = positive(c.cfg, "eps", kSupportEps);
  const double amp_nl = positive(c.cfg, "amp", 0.3);
  for (Dim d : dims) {
    struct Case {
      std::string name;
      AnalyticPair data;
      Nonlinearity nl;
    };
    const std::vector<Case> cases = {
        {"linear bump[1,2]", AnalyticPair::of(d, bump_profile(Slot::position, 1.0, 2.0, 1.0)), Nonlinearity::linear()},
        {"nonlinear bump[1,2] amp " + g10(amp_nl), AnalyticPair::of(d, bump_profile(Slot::position, 1.0, 2.0, amp_nl)),
         Nonlinearity::full()},
    };
    for (const auto& k : cases) {
      run.nonlinearity = k.nl;
      const SupportTrace tr = run_support_trace(k.data, run, eps);
      const std::string inst = "N=" + std::to_string(d.n()) + " " + k.name;
      const double dev = std::min(tr.dev_fwd, tr.dev_bwd);
      c.out.rows.push_back(row("support_law", inst, "eps=" + g10(eps), dev, 0.0, 2.0 * tr.h, tr.law_ok));
      c.out.rows.push_back(row("one_eighth", inst, "probe=" + g10(tr.probe), tr.eighth_ratio, 0.125, kEighthSlack,
                               tr.eighth_ok));
      c.summary << inst << ": rho(0) " << g10(tr.rho_fwd.front()) << ", deviation fwd " << g10(tr.dev_fwd) << " bwd "
                << g10(tr.dev_bwd) << " (2h = " << g10(2.0 * tr.h) << "), direction " << tr.direction
                << ", tail ratio " << g10(tr.eighth_ratio) << "\n";
      for (double e : {1e-6, 1e-10}) {
        const SupportTrace alt = run_support_trace(k.data, run, e);
        c.summary << "  eps=" << g10(e) << ": rho(0) " << g10(alt.rho_fwd.front()) << ", deviation "
                  << g10(std::min(alt.dev_fwd, alt.dev_bwd)) << "\n";
      }
    }
  }
}

// ---- compact exclusion ------------------------------------------------------------

void cmd_compact(Context& c) {
  const auto dims = dims_of(c.cfg);
  const auto data = c.cfg.list("data", "bump[0.5,1.5],gaussian,mixture[3],zero");
  ChannelRun run = channel_run(c.cfg, 1.0 / 256);
  run.nonlinearity = Nonlinearity::full();
  for (Dim d : dims) {
    for (const auto& spec : data) {
      const AnalyticPair a = make_preset(spec, d, c.cfg);
      if (!a.only_compact()) c.cfg.fail("data", "compact data only, got " + spec);
      const RadiativeVerdict v = compact_nonradiative_check(a, run);
      const std::string inst = "N=" + std::to_string(d.n()) + " " + spec;
      const bool zero = v.verdict == "zero";
      c.out.rows.push_back(row(zero ? "zero_datum" : "radiative", inst, "amp=" + g10(c.cfg.num("amp", 1.0)),
                               v.sum_limits, zero ? 0.0 : 0.125 * v.tail0, zero ? 0.0 : kEighthSlack, v.pass));
      c.summary << inst << ": " << v.verdict << ", channel sum " << g10(v.sum_limits) << ", initial tail "
                << g10(v.tail0) << " beyond " << g10(std::max(0.0, v.rho0 - 0.1)) << "\n";
    }
  }
}

// ---- sequences ------------------------------------------------------------------------

// mu_{n+1} = q mu_n + nu0 r^n against its closed form.
double geometric_mismatch(double q, double r, double mu0, double nu0, int n_max) {
  double mu = mu0, worst = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    mu = q * mu + nu0 * std::pow(r, n - 1);
    double closed = std::pow(q, n) * mu0 +
                    (q == r ? nu0 * n * std::pow(r, n - 1) : nu0 * (std::pow(r, n) - std::pow(q, n)) / (r - q));
    worst = std::max(worst, std::abs(mu - closed) / closed);
  }
  return worst;
}

void cmd_sequences(Context& c) {
  const long trials = count(c.cfg, "trials", 10000);
  const auto seed = static_cast<std::uint64_t>(c.cfg.integer("seed", 7));
  const SequenceReport rep = sequence_claim_check(static_cast<int>(trials), seed);
  c.out.rows.push_back(row("random_draws", "hypothesis draws", "trials=" + std::to_string(trials),
                           rep.counterexamples, 0.0, 0.0, rep.counterexamples == 0 && rep.draws > rep.rejected));
  c.summary << trials << " draws: " << rep.rejected << " left [0;eps] (outside the hypothesis), "
            << rep.counterexamples << " counterexamples, worst mu_n/bound_n " << g10(rep.worst_ratio) << " at q="
            << g10(rep.worst.q) << " r=" << g10(rep.worst.r) << " c0=" << g10(rep.worst.c0) << " beta="
            << g10(rep.worst.beta) << "\n";

  double geo = 0.0, geo_ratio = 0.0;
  for (auto [q, r] : {std::pair{0.3, 0.6}, {0.6, 0.3}, {0.5, 0.5}, {0.9, 0.1}, {0.1, 0.9}}) {
    geo = std::max(geo, geometric_mismatch(q, r, 0.4, 0.3, 200));
    SeqParams p{q, r, 0.0, 2.0, 0.4, 0.3, 200};
    auto ratio = sequence_rollout(p, sequence_constants(q, r, 0.0, 2.0), std::vector<double>(200, 1.0));
    geo_ratio = std::max(geo_ratio, ratio.value_or(HUGE_VAL));
  }
  c.out.rows.push_back(row("geometric_exact", "c0=0 saturated", "5 (q;r) pairs", geo, 0.0, tol::geometric_exact,
                           geo <= tol::geometric_exact && geo_ratio <= 1.0));
  c.summary << "c0=0: rollout vs closed form " << g10(geo) << ", max mu_n/bound_n " << g10(geo_ratio) << "\n";

  struct Fixed {
    const char* name;
    double q, r;
  };
  for (const Fixed f : {Fixed{"q<r", 0.25, 0.5}, Fixed{"q>r", 0.5, 0.25}, Fixed{"q=r", 0.5, 0.5}}) {
    const SeqConstants k = sequence_constants(f.q, f.r, 1.0, 2.0);
    SeqParams p{f.q, f.r, 1.0, 2.0, k.epsilon / 2, k.epsilon / 4, 200};
    const SequenceReport s = sequence_claim_check(p, 1000, seed);
    const std::string param = "q=" + g10(f.q) + " r=" + g10(f.r) + " c0=1 beta=2";
    c.out.rows.push_back(row("fixed_case", f.name, param, s.worst_ratio, 1.0, 0.0,
                             s.counterexamples == 0 && s.draws > s.rejected));
    c.summary << f.name << " (" << param << "): eps " << g10(k.epsilon) << ", C " << g10(k.C) << ", worst "
              << g10(s.worst_ratio) << "\n";
  }
}

// ---- solver ---------------------------------------------------------------------------

void cmd_solver(Context& c) {
  const auto dims = dims_of(c.cfg);
  const double h = positive(c.cfg, "h", 1.0 / 512);
  const double cfl = positive(c.cfg, "cfl", 0.5);
  const double t_final = positive(c.cfg, "t_final", 2.0);
  for (Dim d : dims) {
    const std::string N = "N=" + std::to_string(d.n());
    const AnalyticPair a = AnalyticPair::of(d, gaussian_profile(Slot::position, 1.0, 1.0));
    const double r_max = a.compact_end() + t_final + 1.0;
    SolveConfig cfg;
    cfg.cfl = cfl;
    cfg.t_final = 1.0;
    const auto make = [&](const RadialGrid& g) { return StatePair::sample(a, g); };
    const bool n3 = d.n() == 3;
    // Four halvings ending at h for the oracle; the self-convergence runs stop at 4h.
    const ConvergenceResult cv = convergence_order(make, n3 ? 16.0 * h : 32.0 * h, r_max, cfg, n3 ? 5 : 4,
                                                   n3 ? &a : nullptr);
    if (n3) {
      c.out.rows.push_back(row("dalembert_error", N, "h=" + g10(cv.h.back()) + " t=1", cv.errors.back(), 0.0,
                               tol::dalembert, cv.errors.back() <= tol::dalembert));
    }
    c.out.rows.push_back(row("convergence_order", N, n3 ? "exact oracle" : "self-differences", cv.order, 2.0,
                             0.2, !cv.inconclusive && cv.order >= tol::order_lo && cv.order <= tol::order_hi));
    c.summary << N << ": errors";
    for (std::size_t i = 0; i < cv.errors.size(); ++i) c.summary << " " << fmt("%.3e", cv.errors[i]);
    c.summary << ", order " << g10(cv.order) << "\n";

    const AnalyticPair small = AnalyticPair::of(d, gaussian_profile(Slot::position, 1.0, 0.5));
    SolveConfig nl;
    nl.nonlinearity = Nonlinearity::full();
    nl.cfl = cfl;
    nl.t_final = t_final;
    nl.snapshot_every = std::max<std::size_t>(1, static_cast<std::size_t>(t_final / (cfl * h)) / 40);
    const Trajectory tr = evolve(StatePair::sample(small, RadialGrid::covering(h, r_max)), nl);
    if (tr.status != RunStatus::completed) throw NumericalAbort("energy run: " + tr.message);
    const double E0 = nonlinear_energy(tr.states.front());
    double drift = 0.0;
    for (const auto& s : tr.states) drift = std::max(drift, std::abs(nonlinear_energy(s) - E0) / std::abs(E0));
    c.out.rows.push_back(row("energy_drift", N + " gaussian amp 0.5", "t<=" + g10(t_final), drift, 0.0,
                             tol::energy_drift, drift <= tol::energy_drift));
    c.summary << N << ": energy " << g10(E0) << ", drift " << g10(drift) << "\n";
  }
}

// ---- dispatch ------------------------------------------------------------------------

struct Command {
  std::function<void(Context&)> run;
  std::set<std::string> keys;
};

const std::set<std::string> kCommon = {"command", "output", "workers", "base"};

const std::map<std::string, Command>& table() {
  static const std::map<std::string, Command> t = {
      {"verify-equirepartition", {cmd_equirepartition, {"dim", "data", "amp", "width", "h", "cfl", "t_final", "snapshots", "seed"}}},
      {"verify-exterior-bound", {cmd_exterior_bound, {"dim", "data", "amp", "width", "R", "h", "cfl", "t_final", "snapshots", "seed"}}},
      {"check-even-form", {cmd_even_form, {"dim", "samples", "states", "seed", "h", "cfl", "t_final", "snapshots"}}},
      {"check-hankel", {cmd_hankel, {"samples", "functions", "seed", "T"}}},
      {"check-w", {cmd_w, {"dim", "h", "cfl", "t_final", "r_max"}}},
      {"check-rates", {cmd_rates, {"dim", "R0", "R1", "levels"}}},
      {"w-tail-rates", {cmd_w_tail_rates, {"dim", "R0", "levels"}}},
      {"check-support", {cmd_support, {"dim", "h", "cfl", "t_final", "snapshots", "eps", "amp"}}},
      {"check-compact", {cmd_compact, {"dim", "data", "amp", "width", "h", "cfl", "t_final", "snapshots", "seed"}}},
      {"check-sequences", {cmd_sequences, {"trials", "seed"}}},
      {"check-solver", {cmd_solver, {"dim", "h", "cfl", "t_final"}}},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : table()) v.push_back(k);
    v.push_back("sweep");
    return v;
  }();
  return names;
}

CommandResult run_command(const std::string& name, const Config& cfg) {
  CommandResult out;
  try {
    auto it = table().find(name);
    if (it == table().end()) throw ConfigError("unknown command '" + name + "'");
    for (const auto& [key, e] : cfg.entries())
      if (!kCommon.count(key) && !it->second.keys.count(key)) cfg.fail(key, "not used by command " + name);
    Context c{cfg, out, {}};
    it->second.run(c);
    out.summary = c.summary.str();
    out.status = std::all_of(out.rows.begin(), out.rows.end(), [](const CheckRow& r) { return r.pass; }) ? kPass
                                                                                                         : kCheckFailed;
  } catch (const ConfigError& e) {
    out.status = kConfigError;
    out.message = e.what();
  } catch (const PreconditionError& e) {
    out.status = kConfigError;
    out.message = std::string("precondition: ") + e.what();
  } catch (const NumericalAbort& e) {
    out.status = kNumericalAbort;
    out.message = std::string("numerical abort: ") + e.what();
  } catch (const std::exception& e) {
    out.status = kNumericalAbort;
    out.message = std::string("numerical failure: ") + e.what();
  }
  return out;
}

namespace {

std::string header(const std::string& name, const Config& cfg) {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return "# nrw " + name + "\n# generated " + stamp + "\n# config " + cfg.source() + "\n" + cfg.echo();
}

fs::path output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("output: cannot create directory '" + dir + "': " + ec.message());
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw ConfigError("output: cannot write '" + p.string() + "'");
  f << text;
}

const char* status_word(int s) {
  switch (s) {
    case kPass: return "pass";
    case kCheckFailed: return "fail";
    case kConfigError: return "config-error";
    default: return "numerical-abort";
  }
}

void write_outputs(const std::string& name, const Config& cfg, const fs::path& dir, const CommandResult& r) {
  const std::string head = header(name, cfg);
  std::ostringstream csv;
  write_check_csv(csv, r.rows);
  write_file(dir / (name + ".csv"), head + csv.str());
  std::ostringstream sum;
  sum << head << "status " << r.status << " (" << status_word(r.status) << ")\n";
  if (!r.message.empty()) sum << r.message << "\n";
  for (const auto& row : r.rows)
    sum << (row.pass ? "PASS " : "FAIL ") << row.check << " [" << row.instance << "; " << row.param
        << "] observed " << g10(row.observed) << ", expected " << g10(row.expected) << ", tolerance "
        << g10(row.tolerance) << "\n";
  sum << r.summary;
  if (!r.seconds.empty()) {
    sum << "# runtime per case (s):";
    for (double s : r.seconds) sum << " " << fmt("%.1f", s);
    sum << "\n";
  }
  write_file(dir / (name + "_summary.txt"), sum.str());
  for (const auto& [file, body] : r.artifacts) write_file(dir / cell(file), head + body);
}

int run_sweep(const Config& cfg, const std::string& out_dir) {
  const std::string base = cfg.str("base");
  if (base == "sweep" || !table().count(base)) cfg.fail("base", "unknown base command '" + base + "'");
  const auto& grid = cfg.sweep();
  std::vector<std::vector<std::string>> cases;
  if (!grid.empty()) {
    cases.push_back({});
    for (const auto& [key, values] : grid) {
      std::vector<std::vector<std::string>> next;
      for (const auto& c : cases)
        for (const auto& v : values) {
          auto e = c;
          e.push_back(v);
          next.push_back(std::move(e));
        }
      cases = std::move(next);
    }
  }
  const fs::path dir = output_dir(out_dir);
  std::vector<CommandResult> results(cases.size());
  std::atomic<std::size_t> next{0};
  long workers = cfg.integer("workers", std::max(1u, std::thread::hardware_concurrency()));
  if (workers < 1) cfg.fail("workers", "must be >= 1");
  auto work = [&] {
    for (std::size_t i; (i = next++) < cases.size();) {
      Config c = cfg;
      for (std::size_t k = 0; k < grid.size(); ++k) c.set(grid[k].first, cases[i][k], "sweep");
      results[i] = run_command(base, c);
      char sub[32];
      std::snprintf(sub, sizeof sub, "case_%03zu", i);
      try {
        write_outputs(base, c, output_dir((dir / sub).string()), results[i]);
      } catch (const ConfigError& e) {
        results[i].status = kConfigError;
        results[i].message = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (long w = 0; w < std::min<long>(workers, static_cast<long>(cases.size())); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "case";
  for (const auto& [key, _] : grid) csv << "," << key;
  csv << ",status,pass,check,instance,observed,expected,tolerance\n";
  int status = kPass;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const CommandResult& r = results[i];
    csv << i;
    for (const auto& v : cases[i]) csv << "," << cell(v);
    // The first failing row represents the case; a passing case shows its first row.
    const CheckRow* shown = nullptr;
    for (const auto& row : r.rows)
      if (!row.pass) {
        shown = &row;
        break;
      }
    if (!shown && !r.rows.empty()) shown = &r.rows.front();
    const bool pass = r.status == kPass;
    csv << "," << status_word(r.status) << "," << (pass ? 1 : 0);
    if (shown)
      csv << "," << shown->check << "," << shown->instance << "," << g10(shown->observed) << ","
          << g10(shown->expected) << "," << g10(shown->tolerance) << "\n";
    else
      csv << ",error," << cell(r.message) << ",nan,nan,nan\n";
    if (!pass) status = kCheckFailed;
  }
  write_file(dir / "sweep.csv", header("sweep", cfg) + csv.str());
  std::printf("sweep over %s: %zu cases, %s\n", base.c_str(), cases.size(), status_word(status));
  return status;
}

}  // namespace

int run_and_write(const std::string& name, const Config& cfg, const std::string& out_dir) {
  try {
    if (name == "sweep") return run_sweep(cfg, out_dir);
    CommandResult r = run_command(name, cfg);
    write_outputs(name, cfg, output_dir(out_dir), r);
    if (!r.message.empty()) std::fprintf(stderr, "%s\n", r.message.c_str());
    std::printf("%s: %s (%zu checks)\n", name.c_str(), status_word(r.status), r.rows.size());
    return r.status;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kConfigError;
  }
}

}  // namespace nrw::cli
