#include <cmath>
#include <random>

#include "doctest.h"
#include "nrw/fourier_side.hpp"

using namespace nrw;

namespace {

// e^x E1(x): power series below 1, modified Lentz continued fraction above
// (scaled form, so large x does not underflow).
double exp_e1_oracle(double x) {
  if (x < 1.0) {
    double sum = -0.57721566490153286 - std::log(x), term = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= -x / k;
      sum -= term / k;
    }
    return std::exp(x) * sum;
  }
  double b = x + 1.0, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

double e1_oracle(double x) { return std::exp(-x) * exp_e1_oracle(x); }

LogGrid wide() { return LogGrid::span(std::exp(-40.0), std::exp(40.0), 0.05); }

double max_rel_error(const HalfLineFn& got, const std::function<double(double)>& want, double lo, double hi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.grid.n; ++i) {
    double s = got.grid.at(i);
    if (s < lo || s > hi) continue;
    worst = std::max(worst, std::abs(got.v[i] / want(s) - 1.0));
  }
  return worst;
}

}  // namespace

TEST_CASE("E1 oracle at tabulated points") {
  CHECK(e1_oracle(0.5) == doctest::Approx(0.5597735947761608).epsilon(1e-14));
  CHECK(e1_oracle(1.0) == doctest::Approx(0.2193839343955203).epsilon(1e-14));
  CHECK(e1_oracle(5.0) == doctest::Approx(0.001148295591275326).epsilon(1e-13));
}

TEST_CASE("Hankel transform of exp(-sigma) is exp(rho) E1(rho)") {
  HalfLineFn phi = HalfLineFn::sample(wide(), [](double s) { return std::exp(-s); });
  phi.vanish_above = true;
  HalfLineFn H = hankel_H(phi);
  CHECK(max_rel_error(H, exp_e1_oracle, 1e-3, 1e3) < 1e-5);

  HalfLineFn zero = HalfLineFn::sample(wide(), [](double) { return 0.0; });
  for (double v : hankel_H(zero).v) CHECK(v == 0.0);
  for (double v : laplace_L(zero).v) CHECK(v == 0.0);
}

TEST_CASE("Laplace transform and the factorization H = L L") {
  HalfLineFn f = HalfLineFn::sample(wide(), [](double t) { return std::exp(-t); });
  f.vanish_above = true;
  HalfLineFn Lf = laplace_L(f);
  CHECK(max_rel_error(Lf, [](double s) { return 1.0 / (1.0 + s); }, 1e-6, 1e6) < 1e-6);
  HalfLineFn LLf = laplace_L(Lf);
  CHECK(max_rel_error(LLf, exp_e1_oracle, 1e-3, 1e3) < 1e-5);
}

TEST_CASE("Hankel operator is symmetric and strictly below pi") {
  auto fs = random_test_functions(10, 11);
  for (std::size_t i = 0; i + 1 < fs.size(); i += 2) {
    double a = l2_inner(hankel_H(fs[i]), fs[i + 1]);
    double b = l2_inner(fs[i], hankel_H(fs[i + 1]));
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
  }
  for (const auto& s : operator_norm_check(40, 5)) {
    CHECK(s.ratio > 0.0);
    CHECK(s.ratio < M_PI);
  }
}

TEST_CASE("truncated inverse square root approaches pi slowly") {
  // The deficit shrinks like 1/log(T)^2: at T = 1e6 the ratio is 0.936 pi, short of 0.95 pi.
  double r6 = truncated_power_ratio(1e6) / M_PI;
  CHECK(r6 == doctest::Approx(0.9363).epsilon(2e-3));
  double r8 = truncated_power_ratio(1e8) / M_PI;
  CHECK(r8 >= 0.95);
  CHECK(r8 < 1.0);
  CHECK(truncated_power_ratio(1e4) < truncated_power_ratio(1e6));
}

TEST_CASE("N=4 Gaussian is self-reciprocal") {
  Dim d(4);
  AnalyticPair g = AnalyticPair::of(d, gaussian_profile(Slot::position, std::sqrt(2.0), 1.0));
  StatePair s = StatePair::sample(g, RadialGrid::covering(1.0 / 256, 14.0));
  FourierSidePair p = radial_fourier(s, LogGrid::span(1e-3, 6.0, 0.05));
  for (std::size_t i = 0; i < p.u0_hat.grid.n; ++i) {
    double rho = p.u0_hat.grid.at(i);
    CHECK(p.u0_hat.v[i] == doctest::Approx(std::exp(-rho * rho / 2)).epsilon(1e-6).scale(1e-3));
    CHECK(p.u1_hat.v[i] == 0.0);
  }
}

TEST_CASE("Parseval with unit constant across random states") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n : {4, 6}) {
    Dim d(n);
    for (int k = 0; k < 10; ++k) {
      AnalyticPair a(d);
      for (int j = 0; j < 2; ++j) a.add(gaussian_profile(Slot::position, 0.6 + 0.8 * U(rng), U(rng) - 0.5, j));
      StatePair s = StatePair::sample(a, RadialGrid::covering(1.0 / 256, a.compact_end() + 0.5));
      FourierSidePair p = radial_fourier(s, LogGrid::span(std::exp(-12.0), std::exp(3.5), 0.02));
      double mass = 0.0;
      for (std::size_t j = 0; j < s.grid.n; ++j)
        mass += (j == 0 || j + 1 == s.grid.n ? 0.5 : 1.0) * s.u0[j] * s.u0[j] * std::pow(s.grid.node(j), n - 1.0);
      mass *= s.grid.h;
      CHECK(fourier_mass(p.u0_hat, d) == doctest::Approx(mass).epsilon(5e-3));
    }
  }
}

TEST_CASE("even exterior form: sign symmetry, zero and the Cauchy-Schwarz chain") {
  Dim d(4);
  LogGrid g = LogGrid::span(std::exp(-15.0), std::exp(10.0), 0.02);
  auto bump = [](double c, double s) {
    return [c, s](double r) { return std::exp(-0.5 * std::pow((std::log(r) - c) / s, 2)); };
  };
  FourierSidePair p{d, HalfLineFn::sample(g, bump(0.3, 0.7)), HalfLineFn::sample(g, bump(-0.5, 0.4))};
  for (HalfLineFn* f : {&p.u0_hat, &p.u1_hat}) f->vanish_below = f->vanish_above = true;
  FormTerms t = even_exterior_terms(p);
  CHECK(t.value > 0.0);
  // |<H f, f>| <= pi ||f||^2 for each term.
  CHECK(std::abs(t.h0 - t.h1) <= t.kinetic);
  CHECK(t.value >= t.kinetic - std::abs(t.h0) - std::abs(t.h1) - 1e-12);

  FourierSidePair flipped = p;
  for (double& v : flipped.u0_hat.v) v = -v;
  CHECK(even_exterior_form(flipped) == doctest::Approx(t.value).epsilon(1e-12));
  for (double& v : flipped.u1_hat.v) v = -v;
  CHECK(even_exterior_form(flipped) == doctest::Approx(t.value).epsilon(1e-12));

  FourierSidePair z = p;
  std::fill(z.u0_hat.v.begin(), z.u0_hat.v.end(), 0.0);
  std::fill(z.u1_hat.v.begin(), z.u1_hat.v.end(), 0.0);
  CHECK(even_exterior_form(z) == 0.0);
  FourierSidePair odd{Dim(5), p.u0_hat, p.u1_hat};
  CHECK_THROWS_AS(even_exterior_form(odd), PreconditionError);
}

TEST_CASE("sector reduction") {
  Dim n4(4);
  RadialGrid g = RadialGrid::covering(1.0 / 128, 12.0);
  AnalyticPair base = AnalyticPair::of(n4, gaussian_profile(Slot::position, 1.0, 1.0, 1));
  StatePair u = StatePair::sample(base, g);

  SectorProblem same = sector_reduce(u, 0);
  CHECK(same.D.n() == 4);
  CHECK(same.v.u0 == u.u0);

  SectorProblem sp = sector_reduce(u, 1);
  CHECK(sp.D.n() == 6);
  StatePair back = sector_expand(sp.v, 1, n4);
  for (std::size_t j = 1; j < g.n; j += 64) CHECK(back.u0[j] == doctest::Approx(u.u0[j]).epsilon(1e-12));
  CHECK_THROWS_AS(sector_expand(sp.v, 2, n4), PreconditionError);

  // Evolve v in D = 6 and check the sector equation for u = r v by finite differences.
  SolveConfig c;
  c.t_final = 1.0;
  c.snapshot_every = 1;
  Trajectory tr = evolve(sp.v, c);
  const std::size_t k = tr.states.size() / 2;
  const double dt = tr.times[k + 1] - tr.times[k], h = g.h;
  StatePair um = sector_expand(tr.states[k - 1], 1, n4), u0 = sector_expand(tr.states[k], 1, n4),
            up = sector_expand(tr.states[k + 1], 1, n4);
  double worst = 0.0, scale = 0.0;
  for (std::size_t j = g.first_at_or_above(0.5); j < g.first_at_or_above(4.0); ++j) {
    double r = g.node(j);
    double utt = (up.u0[j] - 2 * u0.u0[j] + um.u0[j]) / (dt * dt);
    double urr = (u0.u0[j + 1] - 2 * u0.u0[j] + u0.u0[j - 1]) / (h * h);
    double ur = (u0.u0[j + 1] - u0.u0[j - 1]) / (2 * h);
    double res = utt - urr - 3.0 / r * ur + 3.0 / (r * r) * u0.u0[j];
    worst = std::max(worst, std::abs(res));
    scale = std::max(scale, std::abs(utt));
  }
  CHECK(worst <= 1e-2 * scale);

  // The sector radiates: exterior energy past the cone stays positive.
  const StatePair& last = tr.states.back();
  CHECK(sector_exterior_energy(sector_expand(last, 1, n4), 1, 0.5 + std::abs(tr.times.back())) > 0.0);
}
