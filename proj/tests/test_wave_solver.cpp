#include <cmath>

#include "doctest.h"
#include "nrw/wave_solver.hpp"

using namespace nrw;

namespace {

AnalyticPair gaussian(Dim d, double amp = 1.0) { return AnalyticPair::of(d, gaussian_profile(Slot::position, 1.0, amp)); }

double linear_energy(const StatePair& s) { return exterior_norm_sq(s, 0.0); }

SolveConfig linear_run(double t_final, std::size_t every = 1) {
  SolveConfig c;
  c.t_final = t_final;
  c.snapshot_every = every;
  return c;
}

}  // namespace

TEST_CASE("zero data stays zero") {
  Dim d(5);
  Trajectory tr = evolve(StatePair::zero(d, RadialGrid::covering(1.0 / 64, 4.0)), linear_run(1.0, 8));
  CHECK(tr.status == RunStatus::completed);
  for (const auto& s : tr.states)
    for (std::size_t j = 0; j < s.grid.n; ++j) {
      // Leapfrog precursors run ahead of the cone at tiny amplitude.
      CHECK(std::abs(s.u0[j]) <= 1e-6);
      CHECK(std::abs(s.u1[j]) <= 1e-6);
    }
}

TEST_CASE("d'Alembert oracle closed forms") {
  Dim d(3);
  AnalyticPair g = gaussian(d);
  for (double r : {0.0, 0.3, 1.7}) CHECK(exact_n3(g, 0.0, r) == doctest::Approx(g.u0(r)));
  for (double t : {0.4, 1.3})
    for (double r : {0.2, 0.9, 2.5}) {
      double want = ((r + t) * std::exp(-(r + t) * (r + t)) + (r - t) * std::exp(-(r - t) * (r - t))) / (2 * r);
      CHECK(exact_n3(g, t, r) == doctest::Approx(want).epsilon(1e-12));
    }
  AnalyticPair inv = AnalyticPair::of(d, PowerPair{Slot::position, 1.0, 1.0});
  for (double r : {1.5, 3.0}) CHECK(exact_n3(inv, 1.0, r) == doctest::Approx(1.0 / r));
  CHECK_THROWS_AS(exact_n3(gaussian(Dim(5)), 1.0, 1.0), PreconditionError);
}

TEST_CASE("N=3 Gaussian against d'Alembert at t = 1") {
  Dim d(3);
  AnalyticPair g = gaussian(d);
  const double h = 1.0 / 256;
  Trajectory tr = evolve(StatePair::sample(g, RadialGrid::covering(h, 12.0)), linear_run(1.0, 1000000));
  const StatePair& s = tr.states.back();
  REQUIRE(tr.times.back() == doctest::Approx(1.0));
  double worst = 0.0;
  for (std::size_t j = 0; j < s.grid.n; j += 16) worst = std::max(worst, std::abs(s.u0[j] - exact_n3(g, 1.0, s.grid.node(j))));
  CHECK(worst < 1e-4);
}

TEST_CASE("convergence order with and without the oracle") {
  Dim d3(3);
  AnalyticPair g = gaussian(d3);
  auto make = [&](const RadialGrid& grid) { return StatePair::sample(g, grid); };
  ConvergenceResult c = convergence_order(make, 1.0 / 32, 12.0, linear_run(1.0), 3, &g);
  CHECK(c.order >= 1.8);
  CHECK(c.order <= 2.2);
  CHECK_FALSE(c.inconclusive);

  Dim d5(5);
  AnalyticPair g5 = gaussian(d5, 0.5);
  SolveConfig nl = linear_run(1.0);
  nl.nonlinearity = Nonlinearity::full();
  ConvergenceResult cw = convergence_order([&](const RadialGrid& grid) { return StatePair::sample(g5, grid); }, 1.0 / 16,
                                           g5.compact_end() + 2.0, nl, 4);
  CHECK(cw.order >= 1.8);
  CHECK(cw.order <= 2.2);

  ConvergenceResult z = convergence_order([&](const RadialGrid& grid) { return StatePair::zero(d5, grid); }, 1.0 / 16,
                                          4.0, linear_run(0.5), 3);
  CHECK(z.inconclusive);
}

TEST_CASE("energy conservation") {
  for (int n : {3, 4, 5}) {
    Dim d(n);
    Trajectory lin = evolve(StatePair::sample(gaussian(d), RadialGrid::covering(1.0 / 256, 12.0)), linear_run(2.0, 32));
    double e0 = linear_energy(lin.states.front()), drift = 0.0;
    for (const auto& s : lin.states) drift = std::max(drift, std::abs(linear_energy(s) - e0) / e0);
    CHECK(drift <= 5e-3);

    SolveConfig nl = linear_run(2.0, 32);
    nl.nonlinearity = Nonlinearity::full();
    Trajectory tr = evolve(StatePair::sample(gaussian(d, 0.5), RadialGrid::covering(1.0 / 256, 12.0)), nl);
    double E0 = nonlinear_energy(tr.states.front()), nd = 0.0;
    for (const auto& s : tr.states) nd = std::max(nd, std::abs(nonlinear_energy(s) - E0) / std::abs(E0));
    CHECK(nd <= 5e-3);
  }
}

TEST_CASE("finite speed of propagation") {
  Dim d(4);
  const double h = 1.0 / 128;
  AnalyticPair b = AnalyticPair::of(d, bump_profile(Slot::position, 0.5, 1.0, 1.0));
  Trajectory tr = evolve(StatePair::sample(b, RadialGrid::covering(h, 5.0)), linear_run(2.0, 16));
  double peak = 0.0;
  for (const auto& s : tr.states)
    for (double v : s.u1) peak = std::max(peak, std::abs(v));
  // Leapfrog precursors run ahead of the cone but die off within a few cells.
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const StatePair& s = tr.states[i];
    const double front = 1.0 + tr.times[i];
    for (std::size_t j = s.grid.first_at_or_above(front + 2 * h); j < s.grid.n; ++j) {
      const double lim = s.grid.node(j) >= front + 0.2 ? 1e-10 : 1e-4 * peak;
      CHECK(std::abs(s.u0[j]) <= lim);
      CHECK(std::abs(s.u1[j]) <= lim);
    }
  }
}

TEST_CASE("time reversal symmetry") {
  Dim d(5);
  AnalyticPair a = gaussian(d);
  a.add(gaussian_profile(Slot::velocity, 0.8, 0.6, 1));
  RadialGrid g = RadialGrid::covering(1.0 / 128, 12.0);
  StatePair fwd_init = StatePair::sample(a, g);
  StatePair rev_init = fwd_init;
  for (double& v : rev_init.u1) v = -v;
  SolveConfig f = linear_run(1.0, 64), b = f;
  f.nonlinearity = b.nonlinearity = Nonlinearity::full();
  b.direction = -1;
  Trajectory tf = evolve(fwd_init, f), tb = evolve(rev_init, b);
  REQUIRE(tf.states.size() == tb.states.size());
  CHECK(tb.times.back() == doctest::Approx(-1.0));
  const StatePair &x = tf.states.back(), &y = tb.states.back();
  for (std::size_t j = 0; j < g.n; ++j) {
    CHECK(x.u0[j] == doctest::Approx(y.u0[j]).epsilon(1e-13).scale(1.0));
    CHECK(x.u1[j] == doctest::Approx(-y.u1[j]).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("solver preconditions and blow-up sentinel") {
  Dim d(3);
  RadialGrid g = RadialGrid::covering(1.0 / 64, 4.0);
  SolveConfig c = linear_run(1.0);
  c.cfl = 0.95;
  CHECK_THROWS_AS(evolve(StatePair::zero(d, g), c), PreconditionError);
  // Support reaching the frozen boundary within t_final.
  AnalyticPair wide = AnalyticPair::of(d, bump_profile(Slot::position, 1.0, 3.0, 1.0));
  CHECK_THROWS_AS(evolve(StatePair::sample(wide, g), linear_run(2.0)), PreconditionError);

  SolveConfig nl = linear_run(3.0, 50);
  nl.nonlinearity = Nonlinearity::full();
  Trajectory tr = evolve(StatePair::sample(gaussian(d, 3.0), RadialGrid::covering(1.0 / 64, 14.0)), nl);
  CHECK(tr.status == RunStatus::blowup);
  CHECK(tr.message.find("blow-up") != std::string::npos);
  CHECK(tr.times.size() >= 1);
}

TEST_CASE("exterior evolution only trusts the cone") {
  Dim d3(3);
  const double R = 1.0, h = 1.0 / 256;
  RadialGrid g = RadialGrid::covering(h, 6.0);
  SolveConfig c = linear_run(2.0, 64);
  AnalyticPair inv = AnalyticPair::of(d3, PowerPair{Slot::position, 1.0, 1.0});
  Trajectory tr = evolve_exterior(inv, R, g, c);
  for (std::size_t i = 0; i < tr.states.size(); ++i)
    for (std::size_t j = g.first_at_or_above(R + std::abs(tr.times[i]) + 2 * h); j < g.n; ++j)
      CHECK(tr.states[i].u0[j] == doctest::Approx(1.0 / g.node(j)).epsilon(1e-4));

  // Two interior extensions agree outside the cone.
  Dim d5(5);
  AnalyticPair data = AnalyticPair::of(d5, gaussian_profile(Slot::position, 1.5, 0.8));
  RadialGrid g5 = RadialGrid::covering(h, 18.0);
  SolveConfig c5 = linear_run(2.0, 1000000);
  c5.nonlinearity = Nonlinearity::truncated(R);
  Trajectory a = evolve_exterior(data, R, g5, c5);
  Trajectory b = evolve_exterior(data, R, g5, c5, ExtensionRecipe{0.3, 0.5});
  const double t = std::abs(a.times.back());
  for (std::size_t j = g5.first_at_or_above(R + t + 2 * h); j < g5.n; ++j)
    CHECK(std::abs(a.states.back().u0[j] - b.states.back().u0[j]) <= 1e-6);

  // W outside the cone is stationary, up to a front layer a few cells wide.
  AnalyticPair W = AnalyticPair::of(d5, Soliton(d5, 1.0));
  Trajectory w = evolve_exterior(W, R, RadialGrid::covering(h, 8.0), c5);
  const StatePair& s = w.states.back();
  for (std::size_t j = s.grid.first_at_or_above(R + t + 0.05); j < s.grid.n; j += 8)
    CHECK(s.u0[j] == doctest::Approx(eval_W(d5, 1.0, s.grid.node(j))).epsilon(1e-5));
}
