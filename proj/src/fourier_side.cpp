#include "nrw/fourier_side.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "nrw/quad.hpp"

namespace nrw {

namespace {

constexpr double kPi = std::numbers::pi;

// Power-law continuation past one end of the grid: f ~ value * (sigma/sigma_end)^exponent.
struct EndTail {
  bool present = false;
  double value = 0.0;
  double sigma = 0.0;
  double exponent = 0.0;
  bool noise = false;  // end value at round-off level relative to the peak
};

double peak_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

EndTail end_tail(const HalfLineFn& f, bool lower) {
  EndTail t;
  const std::size_t n = f.v.size();
  double peak = peak_abs(f.v);
  std::size_t e = lower ? 0 : n - 1, e2 = lower ? 1 : n - 2;
  if (f.v[e] == 0.0 || (lower ? f.vanish_below : f.vanish_above)) return t;
  double ratio = f.v[e2] / f.v[e];
  t.noise = std::abs(f.v[e]) <= 1e-9 * peak;
  if (!(ratio > 0.0)) {
    // A sign change at a round-off sized end is noise, not a tail.
    if (t.noise) return EndTail{};
    throw NumericalAbort("cannot extrapolate a sign-changing tail at the grid end");
  }
  t.present = true;
  t.value = f.v[e];
  t.sigma = f.grid.at(e);
  t.exponent = std::log(ratio) / f.grid.dlog * (lower ? 1.0 : -1.0);
  return t;
}

double trap_weight(std::size_t j, std::size_t n) { return (j == 0 || j + 1 == n) ? 0.5 : 1.0; }

void check_tail_share(const std::vector<double>& total, const std::vector<double>& tail, const LogGrid& g) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < total.size(); ++i) {
    double w = trap_weight(i, total.size()) * g.at(i);
    a += total[i] * total[i] * w;
    b += tail[i] * tail[i] * w;
  }
  if (b > 1e-4 * a) throw NumericalAbort("half-line grid too short: extrapolated tail exceeds 1% of the value");
}

}  // namespace

LogGrid LogGrid::span(double sigma_min, double sigma_max, double dlog) {
  require(sigma_min > 0.0 && sigma_max > sigma_min, "log grid needs 0 < sigma_min < sigma_max");
  require(dlog > 0.0, "log spacing must be > 0");
  LogGrid g;
  g.log_min = std::log(sigma_min);
  g.dlog = dlog;
  g.n = static_cast<std::size_t>(std::ceil((std::log(sigma_max) - g.log_min) / dlog - 1e-9)) + 1;
  return g;
}

double LogGrid::at(std::size_t i) const { return std::exp(log_min + dlog * static_cast<double>(i)); }

HalfLineFn HalfLineFn::sample(const LogGrid& g, const std::function<double(double)>& f) {
  HalfLineFn out{g, std::vector<double>(g.n)};
  for (std::size_t i = 0; i < g.n; ++i) out.v[i] = f(g.at(i));
  return out;
}

double l2_inner(const HalfLineFn& a, const HalfLineFn& b) {
  require(a.grid.n == b.grid.n && a.grid.log_min == b.grid.log_min && a.grid.dlog == b.grid.dlog,
          "half-line functions must share a grid");
  const std::size_t n = a.grid.n;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += trap_weight(i, n) * a.v[i] * b.v[i] * a.grid.at(i);
  s *= a.grid.dlog;
  EndTail la = end_tail(a, true), lb = end_tail(b, true);
  if (la.present && lb.present) {
    double e = la.exponent + lb.exponent + 1.0;
    if (e > 0.0)
      s += la.value * lb.value * la.sigma / e;
    else if (!(la.noise || lb.noise))
      throw NumericalAbort("function is not square integrable at 0");
  }
  EndTail ua = end_tail(a, false), ub = end_tail(b, false);
  if (ua.present && ub.present) {
    double e = -(ua.exponent + ub.exponent) - 1.0;
    if (e > 0.0)
      s += ua.value * ub.value * ua.sigma / e;
    else if (!(ua.noise || ub.noise))
      throw NumericalAbort("function is not square integrable at infinity");
  }
  return s;
}

double l2_norm(const HalfLineFn& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

HalfLineFn hankel_H(const HalfLineFn& phi) {
  const LogGrid& g = phi.grid;
  const std::size_t n = g.n;
  // sigma_j / (rho_i + sigma_j) = 1 / (1 + e^{(i-j) dlog}): a Toeplitz kernel.
  std::vector<double> K(2 * n - 1);
  for (std::size_t m = 0; m < 2 * n - 1; ++m) {
    double x = (static_cast<double>(m) - static_cast<double>(n - 1)) * g.dlog;
    K[m] = 1.0 / (1.0 + std::exp(x));
  }
  std::vector<double> wphi(n);
  for (std::size_t j = 0; j < n; ++j) wphi[j] = trap_weight(j, n) * phi.v[j] * g.dlog;
  HalfLineFn out{g, std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double* k = &K[i + n - 1];
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += wphi[j] * *(k - j);
    out.v[i] = s;
  }

  EndTail lo = end_tail(phi, true), up = end_tail(phi, false);
  if (lo.noise && !(lo.exponent > -1.0)) lo = EndTail{};
  if (up.noise && !(up.exponent < 0.0)) up = EndTail{};
  if (lo.present || up.present) {
    if (lo.present && !(lo.exponent > -1.0)) throw NumericalAbort("H: function not integrable against the kernel at 0");
    if (up.present && !(up.exponent < 0.0)) throw NumericalAbort("H: function not integrable against the kernel at infinity");
    std::vector<double> tail(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double rho = g.at(i), t = 0.0;
      if (lo.present) {
        // int_0^1 u^a / (q + u) du with u = w^{1/(a+1)}
        double q = rho / lo.sigma, a1 = lo.exponent + 1.0;
        t += lo.value / a1 *
             quad::integrate([&](double w) { return 1.0 / (q + std::pow(w, 1.0 / a1)); }, 0.0, 1.0, 1e-10);
      }
      if (up.present) {
        // int_1^inf u^b / (q + u) du with u = z^{-1/(-b)}
        double q = rho / up.sigma, mb = -up.exponent;
        t += up.value / mb *
             quad::integrate([&](double z) { return 1.0 / (q * std::pow(z, 1.0 / mb) + 1.0); }, 0.0, 1.0, 1e-10);
      }
      tail[i] = t;
      out.v[i] += t;
    }
    check_tail_share(out.v, tail, g);
  }
  return out;
}

HalfLineFn laplace_L(const HalfLineFn& f) {
  const LogGrid& g = f.grid;
  const std::size_t n = g.n;
  // s_i t_j = exp(2 log_min + (i+j) dlog): a Hankel-structured kernel.
  std::vector<double> G(2 * n - 1);
  for (std::size_t k = 0; k < 2 * n - 1; ++k) G[k] = std::exp(-std::exp(2.0 * g.log_min + static_cast<double>(k) * g.dlog));
  std::vector<double> wf(n);
  for (std::size_t j = 0; j < n; ++j) wf[j] = trap_weight(j, n) * f.v[j] * g.at(j) * g.dlog;
  HalfLineFn out{g, std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += wf[j] * G[i + j];
    out.v[i] = s;
  }

  EndTail lo = end_tail(f, true), up = end_tail(f, false);
  if (lo.noise && !(lo.exponent > -1.0)) lo = EndTail{};
  if (lo.present || up.present) {
    if (lo.present && !(lo.exponent > -1.0)) throw NumericalAbort("L: function not integrable at 0");
    std::vector<double> tail(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = g.at(i), t = 0.0;
      if (lo.present) {
        double a1 = lo.exponent + 1.0, k = s * lo.sigma;
        t += lo.value * lo.sigma / a1 *
             quad::integrate([&](double w) { return std::exp(-k * std::pow(w, 1.0 / a1)); }, 0.0, 1.0, 1e-10);
      }
      if (up.present) {
        double k = s * up.sigma, b = up.exponent;
        if (k < 700.0)
          t += up.value * up.sigma *
               quad::integrate([&](double u) { return std::pow(u, b) * std::exp(-k * u); }, 1.0,
                               std::numeric_limits<double>::infinity(), 1e-10);
      }
      tail[i] = t;
      out.v[i] += t;
    }
    check_tail_share(out.v, tail, g);
  }
  return out;
}

namespace {

// One random L^2 test function; all are well inside [e^-30, e^30].
std::function<double(double)> random_test_function(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto one = [&]() -> std::function<double(double)> {
    int kind = static_cast<int>(U(rng) * 3.0);
    if (kind == 0) {
      double c = std::exp(-7.0 + 14.0 * U(rng)), w = c * (0.05 + 0.95 * U(rng));
      return [c, w](double s) { return std::exp(-0.5 * (s - c) * (s - c) / (w * w)); };
    }
    if (kind == 1) {
      double m = -5.0 + 10.0 * U(rng), sd = 0.3 + 2.7 * U(rng);
      return [m, sd](double s) {
        double x = std::log(s) - m;
        return std::exp(-0.5 * x * x / (sd * sd)) / std::sqrt(s);
      };
    }
    double eps = -0.2 + 0.4 * U(rng), a = std::exp(-8.0 + 8.0 * U(rng)), b = a * std::exp(1.0 + 15.0 * U(rng));
    return [eps, a, b](double s) { return (s >= a && s <= b) ? std::pow(s, -0.5 + eps) : 0.0; };
  };
  int parts = 1 + static_cast<int>(U(rng) * 3.0);
  std::vector<std::pair<double, std::function<double(double)>>> terms;
  for (int p = 0; p < parts; ++p) terms.emplace_back(U(rng) < 0.3 ? -U(rng) : U(rng) + 0.1, one());
  return [terms](double s) {
    double v = 0.0;
    for (const auto& [c, f] : terms) v += c * f(s);
    return v;
  };
}

}  // namespace

LogGrid test_function_grid() { return LogGrid::span(std::exp(-45.0), std::exp(45.0), 0.05); }

std::vector<HalfLineFn> random_test_functions(int count, std::uint64_t seed) {
  require(count >= 1, "need at least one sample");
  std::mt19937_64 rng(seed);
  const LogGrid g = test_function_grid();
  std::vector<HalfLineFn> out;
  while (static_cast<int>(out.size()) < count) {
    HalfLineFn phi = HalfLineFn::sample(g, random_test_function(rng));
    if (peak_abs(phi.v) > 0.0) out.push_back(std::move(phi));
  }
  return out;
}

std::vector<NormSample> operator_norm_check(int samples, std::uint64_t seed) {
  std::vector<NormSample> out;
  int id = 0;
  for (const auto& phi : random_test_functions(samples, seed)) out.push_back({id++, l2_norm(hankel_H(phi)) / l2_norm(phi)});
  return out;
}

double truncated_power_ratio(double T, double dlog) {
  require(T > 1.0, "truncation T must be > 1");
  const double L = std::log(T), pad = 25.0;
  LogGrid g;
  g.dlog = dlog;
  std::size_t steps = static_cast<std::size_t>(std::ceil(pad / dlog));
  g.log_min = -L - steps * dlog;
  g.n = 2 * steps + static_cast<std::size_t>(std::ceil(2.0 * L / dlog)) + 1;
  HalfLineFn phi{g, std::vector<double>(g.n, 0.0)};
  for (std::size_t i = 0; i < g.n; ++i) {
    double x = g.log_min + i * dlog;
    if (x < -L - 1e-9 || x > L + 1e-9) continue;
    double v = std::exp(-0.5 * x);
    // Half values at the jumps keep the trapezoid rule second order.
    if (std::abs(x + L) < 0.5 * dlog || std::abs(x - L) < 0.5 * dlog) v *= 0.5;
    phi.v[i] = v;
  }
  return l2_norm(hankel_H(phi)) / l2_norm(phi);
}

double kernel_K(Dim d, double x) {
  const double nu = (d.n() - 2.0) / 2.0;
  if (x < 1e-4) return (1.0 - x * x / (4.0 * (nu + 1.0))) / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
  return std::cyl_bessel_j(nu, x) * std::pow(x, -nu);
}

RadialFourier::RadialFourier(Dim d, const RadialGrid& rg, const LogGrid& pg)
    : dim_(d), r_grid_(rg), rho_grid_(pg), kernel_(pg.n * rg.n) {
  const double N = d.n();
  for (std::size_t i = 0; i < pg.n; ++i) {
    double rho = pg.at(i);
    for (std::size_t j = 0; j < rg.n; ++j) {
      double r = rg.node(j);
      double w = trap_weight(j, rg.n) * rg.h * std::pow(r, N - 1.0);
      kernel_[i * rg.n + j] = w * kernel_K(d, r * rho);
    }
  }
}

HalfLineFn RadialFourier::transform(const std::vector<double>& u) const {
  require(u.size() == r_grid_.n, "sample length must match the radial grid");
  // Smooth compact data has a rapidly decaying transform; past the grid end the
  // samples are quadrature noise, not a power tail.
  HalfLineFn out{rho_grid_, std::vector<double>(rho_grid_.n, 0.0), false, true};
  for (std::size_t i = 0; i < rho_grid_.n; ++i) {
    const double* k = &kernel_[i * r_grid_.n];
    double s = 0.0;
    for (std::size_t j = 0; j < r_grid_.n; ++j) s += k[j] * u[j];
    out.v[i] = s;
  }
  return out;
}

FourierSidePair RadialFourier::apply(const StatePair& s) const {
  require(s.dim == dim_, "dimension mismatch");
  require(s.grid.n == r_grid_.n && s.grid.h == r_grid_.h && s.grid.r0 == r_grid_.r0, "grid mismatch");
  if (s.tail) throw PreconditionError("radial_fourier needs data that decays inside the grid");
  require_contained(s, "radial_fourier");
  double m = 0.0;
  for (std::size_t j = 0; j < s.grid.n; ++j) m = std::max(m, std::abs(s.u0[j]) + std::abs(s.u1[j]));
  double last = std::abs(s.u0.back()) + std::abs(s.u1.back());
  if (last > 1e-10 * m) throw PreconditionError("insufficient decay: data is not small at the grid end");
  return FourierSidePair{dim_, transform(s.u0), transform(s.u1)};
}

FourierSidePair radial_fourier(const StatePair& s, const LogGrid& rho_grid) {
  return RadialFourier(s.dim, s.grid, rho_grid).apply(s);
}

double fourier_mass(const HalfLineFn& u, Dim d) {
  HalfLineFn f = u;
  for (std::size_t i = 0; i < f.grid.n; ++i) f.v[i] *= std::pow(f.grid.at(i), (d.n() - 1.0) / 2.0);
  return l2_inner(f, f);
}

FormTerms even_exterior_terms(const FourierSidePair& p) {
  require(!p.dim.odd(), "the Fourier-side exterior form is an even-dimensional statement");
  const double N = p.dim.n();
  HalfLineFn f0 = p.u0_hat, f1 = p.u1_hat;
  for (std::size_t i = 0; i < f0.grid.n; ++i) {
    double rho = f0.grid.at(i);
    f0.v[i] *= std::pow(rho, (N + 1.0) / 2.0);
    f1.v[i] *= std::pow(rho, (N - 1.0) / 2.0);
  }
  FormTerms t;
  t.kinetic = kPi * (l2_inner(f0, f0) + l2_inner(f1, f1));
  t.h0 = l2_inner(hankel_H(f0), f0);
  t.h1 = l2_inner(hankel_H(f1), f1);
  double sgn = (p.dim.n() / 2) % 2 == 0 ? 1.0 : -1.0;
  t.value = t.kinetic + sgn * (t.h0 - t.h1);
  return t;
}

double even_exterior_form(const FourierSidePair& p) { return even_exterior_terms(p).value; }

void write_fourier_csv(std::ostream& os, const FourierSidePair& p) {
  os << "rho,u0hat,u1hat\n";
  char buf[96];
  for (std::size_t i = 0; i < p.u0_hat.grid.n; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.u0_hat.grid.at(i), p.u0_hat.v[i], p.u1_hat.v[i]);
    os << buf;
  }
}

SectorProblem sector_reduce(const StatePair& u, int nu) {
  require(nu >= 0, "harmonic degree must be >= 0");
  require(u.grid.at_origin(), "sector reduction needs an origin grid");
  Dim D(u.dim.n() + 2 * nu);
  if (D.parity() != u.dim.parity()) throw PreconditionError("dimension parity bookkeeping mismatch");
  if (nu == 0) return SectorProblem{D, 0, StatePair(D, u.grid, u.u0, u.u1)};
  std::vector<double> a(u.grid.n), b(u.grid.n);
  for (std::size_t j = 1; j < u.grid.n; ++j) {
    double w = std::pow(u.grid.node(j), -static_cast<double>(nu));
    a[j] = u.u0[j] * w;
    b[j] = u.u1[j] * w;
  }
  // v is even in r: v(0) = (4 v(h) - v(2h)) / 3.
  a[0] = (4.0 * a[1] - a[2]) / 3.0;
  b[0] = (4.0 * b[1] - b[2]) / 3.0;
  return SectorProblem{D, nu, StatePair(D, u.grid, std::move(a), std::move(b))};
}

StatePair sector_expand(const StatePair& v, int nu, Dim N) {
  require(nu >= 0, "harmonic degree must be >= 0");
  if (v.dim.n() != N.n() + 2 * nu) throw PreconditionError("dimension parity bookkeeping mismatch: D != N + 2 nu");
  std::vector<double> a(v.grid.n), b(v.grid.n);
  for (std::size_t j = 0; j < v.grid.n; ++j) {
    double w = nu == 0 ? 1.0 : std::pow(v.grid.node(j), static_cast<double>(nu));
    a[j] = v.u0[j] * w;
    b[j] = v.u1[j] * w;
  }
  return StatePair(N, v.grid, std::move(a), std::move(b));
}

double sector_exterior_energy(const StatePair& u, int nu, double R) {
  double e = exterior_norm_sq(u, R);
  if (nu == 0) return e;
  const double N = u.dim.n(), c = nu * (nu + N - 2.0);
  std::vector<double> dens(u.grid.n, 0.0);
  for (std::size_t j = 1; j < u.grid.n; ++j) {
    double r = u.grid.node(j);
    dens[j] = c * u.u0[j] * u.u0[j] * std::pow(r, N - 3.0);
  }
  // Trapezoid of the potential density from R on (same rule as the H(R) norm).
  std::size_t k = u.grid.first_at_or_above(R);
  double pot = 0.0;
  if (k > 0 && u.grid.node(k) > R) {
    double w = (u.grid.node(k) - R) / u.grid.h;
    double dR = dens[k] + (dens[k - 1] - dens[k]) * w;
    pot += 0.5 * (dR + dens[k]) * (u.grid.node(k) - R);
  }
  for (std::size_t j = k; j + 1 < u.grid.n; ++j) pot += 0.5 * u.grid.h * (dens[j] + dens[j + 1]);
  return e + pot;
}

}  // namespace nrw
