#include "nrw/wave_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nrw/quad.hpp"

namespace nrw {

namespace {

// Conservative radial Laplacian: finite-volume fluxes through r_{j+-1/2}
// divided by the cell volume. At j = 0 this is 2N (u_1 - u_0) / h^2.
struct RadialLaplacian {
  std::vector<double> up, down;

  RadialLaplacian(Dim d, const RadialGrid& g) : up(g.n, 0.0), down(g.n, 0.0) {
    const double N = d.n(), h = g.h;
    for (std::size_t j = 0; j + 1 < g.n; ++j) {
      double rp = (j + 0.5) * h, rm = j == 0 ? 0.0 : (j - 0.5) * h;
      double vol = (std::pow(rp, N) - std::pow(rm, N)) / N;
      up[j] = std::pow(rp, N - 1.0) / (h * vol);
      down[j] = j == 0 ? 0.0 : std::pow(rm, N - 1.0) / (h * vol);
    }
  }

  double at(const double* u, std::size_t j) const {
    double v = up[j] * (u[j + 1] - u[j]);
    if (j > 0) v -= down[j] * (u[j] - u[j - 1]);
    return v;
  }
};

// |u|^{4/(N-2)} u with the cheap cases spelled out.
struct Power {
  int n;
  double operator()(double u) const {
    double a = std::abs(u);
    switch (n) {
      case 3: return u * u * u * u * u;
      case 4: return u * u * u;
      case 5: return std::cbrt(a * a * a * a) * u;
      case 6: return a * u;
      default: return std::pow(a, 4.0 / (n - 2.0)) * u;
    }
  }
};

double support_radius(const StatePair& s) {
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t j = 0; j < s.grid.n; ++j) {
    m0 = std::max(m0, std::abs(s.u0[j]));
    m1 = std::max(m1, std::abs(s.u1[j]));
  }
  for (std::size_t j = s.grid.n; j-- > 0;)
    if (std::abs(s.u0[j]) > 1e-13 * m0 || std::abs(s.u1[j]) > 1e-13 * m1) return s.grid.node(j);
  return 0.0;
}

AnalyticPair without_profiles(const AnalyticPair& a) {
  AnalyticPair out(a.dim());
  for (const auto& p : a.powers()) out.add(p);
  for (const auto& s : a.solitons()) out.add(s.s, s.coeff);
  return out;
}

double smoothstep7(double x) { return x * x * x * x * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x))); }

double taylor(const Jet& J, double R, double r) {
  double d = r - R;
  return J.d[0] + d * (J.d[1] + d * (J.d[2] / 2.0 + d * J.d[3] / 6.0));
}

double blended(const Jet& J, double R, double Rb, double r) {
  double c = taylor(J, R, Rb);
  if (r <= Rb) return c;
  double x = (r - Rb) / (R - Rb);
  return c + smoothstep7(x) * (taylor(J, R, r) - c);
}

Jet forward_jet(const std::vector<double>& f, std::size_t k, double h) {
  require(k + 3 < f.size(), "not enough nodes past R for the extension");
  double f0 = f[k], f1 = f[k + 1], f2 = f[k + 2], f3 = f[k + 3];
  Jet J{};
  J.d[0] = f0;
  J.d[1] = (-11.0 * f0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / (6.0 * h);
  J.d[2] = (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h);
  J.d[3] = (-f0 + 3.0 * f1 - 3.0 * f2 + f3) / (h * h * h);
  return J;
}

}  // namespace

double max_stable_cfl(Dim d) {
  // Leapfrog is stable iff dt^2 lambda_max(-L) < 4; the origin row dominates.
  RadialGrid g(0.0, 1.0, 400);
  RadialLaplacian L(d, g);
  std::vector<double> x(g.n, 0.0), y(g.n, 0.0);
  for (std::size_t j = 0; j + 1 < g.n; ++j) x[j] = (j % 2 ? -1.0 : 1.0) / (1.0 + j);
  double lam = 0.0;
  for (int it = 0; it < 4000; ++it) {
    double nrm = 0.0;
    for (std::size_t j = 0; j + 1 < g.n; ++j) {
      y[j] = -L.at(x.data(), j);
      nrm += y[j] * y[j];
    }
    double xn = 0.0;
    for (std::size_t j = 0; j + 1 < g.n; ++j) xn += x[j] * x[j];
    lam = std::sqrt(nrm / xn);
    nrm = std::sqrt(nrm);
    for (std::size_t j = 0; j + 1 < g.n; ++j) x[j] = y[j] / nrm;
  }
  return 2.0 / std::sqrt(lam);
}

Trajectory evolve(const StatePair& init, const SolveConfig& cfg) {
  const RadialGrid& g = init.grid;
  require(g.at_origin(), "the solver needs a grid starting at r = 0");
  require(g.n >= 4, "the solver needs at least 4 nodes");
  require(cfg.cfl > 0.0 && cfg.cfl <= 0.9, "CFL violation: cfl must lie in (0, 0.9]");
  double cmax = max_stable_cfl(init.dim);
  if (cfg.cfl >= 0.995 * cmax) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "CFL violation: cfl %.3g exceeds the origin-stencil stability limit %.3g for N=%d",
                  cfg.cfl, 0.995 * cmax, init.dim.n());
    throw PreconditionError(buf);
  }
  require(cfg.t_final >= 0.0 && std::isfinite(cfg.t_final), "t_final must be >= 0");
  require(cfg.direction == 1 || cfg.direction == -1, "direction must be +1 or -1");
  require(cfg.snapshot_every >= 1, "snapshot_every must be >= 1");
  if (cfg.r_max > 0.0) require(g.back() >= cfg.r_max - 1e-9 * cfg.r_max, "grid does not reach r_max");
  const double r_last = g.back();

  if (!init.tail) {
    if (support_radius(init) + cfg.t_final + 2.0 * g.h > r_last + 1e-12)
      throw PreconditionError("domain-of-dependence guard: data support + t_final + 2h exceeds r_max");
  } else if (init.tail->compact_end() + cfg.t_final + 2.0 * g.h > r_last + 1e-12) {
    throw PreconditionError("domain-of-dependence guard: compact part of the tail reaches the boundary");
  }

  const std::size_t n = g.n;
  const std::size_t steps = cfg.t_final > 0.0 ? static_cast<std::size_t>(std::ceil(cfg.t_final / (cfg.cfl * g.h) - 1e-9)) : 0;
  const double dt = steps ? cfg.direction * cfg.t_final / static_cast<double>(steps) : 0.0;
  const double dt2 = dt * dt;

  RadialLaplacian L(init.dim, g);
  Power F{init.dim.n()};
  const bool nonlinear = cfg.nonlinearity.kind != Nonlinearity::Kind::linear;
  const bool truncated = cfg.nonlinearity.kind == Nonlinearity::Kind::truncated;
  const double Rc = cfg.nonlinearity.cone_radius;

  std::optional<AnalyticPair> bnd;
  if (init.tail) bnd = without_profiles(*init.tail);
  auto boundary = [&](double t) { return bnd ? bnd->evolve_powers(t).u0(r_last) : init.u0[n - 1]; };

  auto force = [&](const std::vector<double>& u, double t, std::size_t j) {
    if (!nonlinear) return 0.0;
    if (truncated && !(g.node(j) > Rc + std::abs(t))) return 0.0;
    return F(u[j]);
  };

  Trajectory tr;
  tr.config = cfg;
  auto snapshot = [&](double t, std::vector<double> u, std::vector<double> v) {
    std::optional<AnalyticPair> tail;
    if (init.tail) tail = init.tail->evolve_powers(t);
    tr.times.push_back(t);
    tr.states.emplace_back(init.dim, g, std::move(u), std::move(v), std::move(tail));
  };

  std::vector<double> prev = init.u0, cur(n), next(n);
  for (std::size_t j = 0; j + 1 < n; ++j)
    cur[j] = prev[j] + dt * init.u1[j] + 0.5 * dt2 * (L.at(prev.data(), j) + force(prev, 0.0, j));
  cur[n - 1] = boundary(dt);
  snapshot(0.0, init.u0, init.u1);
  if (steps == 0) return tr;

  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = dt * static_cast<double>(k);
    double sup = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      next[j] = 2.0 * cur[j] - prev[j] + dt2 * (L.at(cur.data(), j) + force(cur, t, j));
      sup = std::max(sup, std::abs(cur[j]));
    }
    next[n - 1] = boundary(t + dt);
    if (!(sup <= cfg.blowup_threshold)) {
      tr.status = RunStatus::blowup;
      char buf[128];
      std::snprintf(buf, sizeof buf, "type I blow-up suspected: sup|u| exceeded %.3g at t = %.6g", cfg.blowup_threshold, t);
      tr.message = buf;
      return tr;
    }
    if (k % cfg.snapshot_every == 0 || k == steps) {
      std::vector<double> v(n);
      for (std::size_t j = 0; j < n; ++j) v[j] = (next[j] - prev[j]) / (2.0 * dt);
      snapshot(k == steps ? cfg.direction * cfg.t_final : t, cur, std::move(v));
    }
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  return tr;
}

double exact_n3(const AnalyticPair& init, double t, double r) {
  require(init.dim().n() == 3, "exact_n3 needs N = 3");
  require(r >= 0.0, "radius must be >= 0");
  auto w1 = [&](double s) { return s * init.u1(std::abs(s)); };
  if (r < 1e-7 * std::max(1.0, std::abs(t))) {
    double at = std::abs(t);
    if (at == 0.0) return init.u0(0.0);
    return init.u0(at) + at * init.du0(at) + t * init.u1(at);
  }
  auto w0 = [&](double s) { return s * init.u0(std::abs(s)); };
  double w = 0.5 * (w0(r + t) + w0(r - t));
  if (t != 0.0) {
    double lo = std::min(r - t, r + t), hi = std::max(r - t, r + t);
    double sgn = t > 0.0 ? 1.0 : -1.0;
    // Split at 0 so the kink of s u1(|s|) never sits inside a panel.
    double I = lo < 0.0 && hi > 0.0 ? quad::integrate(w1, lo, 0.0, 1e-12) + quad::integrate(w1, 0.0, hi, 1e-12)
                                    : quad::integrate(w1, lo, hi, 1e-12);
    w += 0.5 * sgn * I;
  }
  return w / r;
}

double exact_n3_dt(const AnalyticPair& init, double t, double r) {
  require(init.dim().n() == 3, "exact_n3 needs N = 3");
  double rr = std::max(r, 1e-6);
  auto dw0 = [&](double s) {
    double a = std::abs(s);
    return init.u0(a) + a * init.du0(a);
  };
  auto w1 = [&](double s) { return s * init.u1(std::abs(s)); };
  double wt = 0.5 * (dw0(rr + t) - dw0(rr - t)) + 0.5 * (w1(rr + t) + w1(rr - t));
  return wt / rr;
}

StatePair extend_inside(const AnalyticPair& data, double R, const RadialGrid& g, const ExtensionRecipe& rc) {
  require(g.at_origin(), "extension needs an origin grid");
  require(R >= 0.0 && R < g.back(), "R must lie inside the grid");
  require(rc.blend_start > 0.0 && rc.blend_start < 1.0, "blend_start must lie in (0, 1)");
  if (R == 0.0) return StatePair::sample(data, g);
  const double Rb = rc.blend_start * R;
  Jet J0 = jet(data, Slot::position, R), J1 = jet(data, Slot::velocity, R);
  std::vector<double> a(g.n), b(g.n);
  Profile bump;
  if (rc.inner_bump != 0.0) bump = bump_profile(Slot::position, 0.1 * R, 0.4 * R, rc.inner_bump);
  for (std::size_t j = 0; j < g.n; ++j) {
    double r = g.node(j);
    if (r >= R) {
      a[j] = data.u0(r);
      b[j] = data.u1(r);
    } else {
      a[j] = blended(J0, R, Rb, r);
      b[j] = blended(J1, R, Rb, r);
      if (rc.inner_bump != 0.0) a[j] += bump.f(r);
    }
  }
  std::optional<AnalyticPair> tail;
  if (!data.only_compact()) tail = data;
  else require(data.compact_end() <= g.back(), "compact data extends past the grid");
  return StatePair(data.dim(), g, std::move(a), std::move(b), std::move(tail));
}

StatePair extend_inside(const StatePair& s, double R, const ExtensionRecipe& rc) {
  const RadialGrid& g = s.grid;
  require(g.at_origin(), "extension needs an origin grid");
  require(R >= 0.0 && R < g.back(), "R must lie inside the grid");
  if (R == 0.0) return s;
  std::size_t k = g.first_at_or_above(R);
  const double Rk = g.node(k), Rb = rc.blend_start * Rk;
  Jet J0 = forward_jet(s.u0, k, g.h), J1 = forward_jet(s.u1, k, g.h);
  std::vector<double> a(s.u0), b(s.u1);
  Profile bump;
  if (rc.inner_bump != 0.0) bump = bump_profile(Slot::position, 0.1 * R, 0.4 * R, rc.inner_bump);
  for (std::size_t j = 0; j < k; ++j) {
    double r = g.node(j);
    a[j] = blended(J0, Rk, Rb, r);
    b[j] = blended(J1, Rk, Rb, r);
    if (rc.inner_bump != 0.0) a[j] += bump.f(r);
  }
  return StatePair(s.dim, g, std::move(a), std::move(b), s.tail);
}

Trajectory evolve_exterior(const AnalyticPair& data, double R, const RadialGrid& g, const SolveConfig& cfg,
                           const ExtensionRecipe& rc) {
  return evolve(extend_inside(data, R, g, rc), cfg);
}

Trajectory evolve_exterior(const StatePair& sampled, double R, const SolveConfig& cfg, const ExtensionRecipe& rc) {
  return evolve(extend_inside(sampled, R, rc), cfg);
}

namespace {

StatePair restrict_to(const StatePair& fine, const RadialGrid& coarse, std::size_t ratio) {
  std::vector<double> a(coarse.n), b(coarse.n);
  for (std::size_t j = 0; j < coarse.n; ++j) {
    a[j] = fine.u0[j * ratio];
    b[j] = fine.u1[j * ratio];
  }
  return StatePair(fine.dim, coarse, std::move(a), std::move(b));
}

double diff_norm(const StatePair& x, const StatePair& y) {
  std::vector<double> a(x.grid.n), b(x.grid.n);
  for (std::size_t j = 0; j < x.grid.n; ++j) {
    a[j] = x.u0[j] - y.u0[j];
    b[j] = x.u1[j] - y.u1[j];
  }
  StatePair d(x.dim, x.grid, std::move(a), std::move(b));
  return std::sqrt(exterior_norm_sq(d, x.grid.r0));
}

}  // namespace

ConvergenceResult convergence_order(const std::function<StatePair(const RadialGrid&)>& make_init, double h0,
                                    double r_max, const SolveConfig& cfg, int refinements, const AnalyticPair* oracle) {
  require(refinements >= 3, "convergence_order needs at least 3 grids");
  ConvergenceResult res;
  std::vector<StatePair> finals;
  for (int i = 0; i < refinements; ++i) {
    double h = std::ldexp(h0, -i);
    RadialGrid g = RadialGrid::covering(h, r_max);
    SolveConfig c = cfg;
    c.snapshot_every = static_cast<std::size_t>(-1);
    Trajectory tr = evolve(make_init(g), c);
    if (tr.status != RunStatus::completed) throw NumericalAbort(tr.message);
    res.h.push_back(h);
    finals.push_back(tr.states.back());
  }
  const double t = cfg.direction * cfg.t_final;
  if (oracle) {
    for (const auto& s : finals) {
      std::vector<double> a(s.grid.n), b(s.grid.n);
      for (std::size_t j = 0; j < s.grid.n; ++j) {
        a[j] = exact_n3(*oracle, t, s.grid.node(j));
        b[j] = exact_n3_dt(*oracle, t, s.grid.node(j));
      }
      res.errors.push_back(diff_norm(s, StatePair(s.dim, s.grid, std::move(a), std::move(b))));
    }
  } else {
    for (int i = 0; i + 1 < refinements; ++i)
      res.errors.push_back(diff_norm(finals[i], restrict_to(finals[i + 1], finals[i].grid, 2)));
  }
  const std::size_t e = res.errors.size();
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < e; ++i) monotone = monotone && res.errors[i + 1] < res.errors[i];
  if (!monotone || res.errors[e - 1] <= 0.0 || !std::isfinite(res.errors[e - 1])) {
    res.inconclusive = true;
    res.order = std::nan("");
    return res;
  }
  res.order = std::log2(res.errors[e - 2] / res.errors[e - 1]);
  return res;
}

std::string config_echo(const SolveConfig& cfg) {
  std::ostringstream os;
  const char* kind = cfg.nonlinearity.kind == Nonlinearity::Kind::linear ? "linear"
                     : cfg.nonlinearity.kind == Nonlinearity::Kind::full ? "full"
                                                                          : "truncated";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  os << "nonlinearity = " << kind << "\n";
  if (cfg.nonlinearity.kind == Nonlinearity::Kind::truncated) os << "cone_radius = " << num(cfg.nonlinearity.cone_radius) << "\n";
  os << "cfl = " << num(cfg.cfl) << "\n"
     << "t_final = " << num(cfg.t_final) << "\n"
     << "r_max = " << num(cfg.r_max) << "\n"
     << "snapshot_every = " << cfg.snapshot_every << "\n"
     << "direction = " << cfg.direction << "\n";
  return os.str();
}

void export_trajectory(const Trajectory& tr, const std::string& dir, const std::string& stem) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream idx(fs::path(dir) / (stem + "_index.csv"));
  if (!idx) throw PreconditionError("cannot write to " + dir);
  std::istringstream echo(config_echo(tr.config));
  for (std::string line; std::getline(echo, line);) idx << "# " << line << "\n";
  idx << "t,filename\n";
  char name[64], tb[64];
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    std::snprintf(name, sizeof name, "%s_%05zu.csv", stem.c_str(), i);
    std::ofstream f(fs::path(dir) / name);
    write_csv(f, tr.states[i]);
    std::snprintf(tb, sizeof tb, "%.17g", tr.times[i]);
    idx << tb << "," << name << "\n";
  }
}

}  // namespace nrw
