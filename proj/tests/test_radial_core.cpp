#include <cmath>
#include <sstream>

#include "doctest.h"
#include "nrw/radial_core.hpp"

using namespace nrw;

namespace {

// Tail-less sample of a compact profile on an origin grid.
StatePair bump_state(Dim d, double h, double amp = 1.0) {
  return StatePair::sample(AnalyticPair::of(d, bump_profile(Slot::position, 0.5, 2.0, amp)), RadialGrid::covering(h, 4.0));
}

}  // namespace

TEST_CASE("W profile at tabulated radii") {
  CHECK(eval_W(Dim(3), 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(eval_W(Dim(3), 1.0, std::sqrt(3.0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  const double r = 1e4;
  CHECK(std::pow(r, 3) * eval_W(Dim(5), 1.0, r) == doctest::Approx(std::pow(15.0, 1.5)).epsilon(1e-6));
  CHECK(w_tail_coefficient(Dim(7)) == doctest::Approx(std::pow(35.0, 2.5)));
  CHECK_THROWS_AS(Soliton(Dim(3), -1.0), PreconditionError);
}

TEST_CASE("W solves the stationary equation with exact derivatives") {
  for (int n : {3, 5, 7}) {
    Dim d(n);
    for (int i = 0; i < 100; ++i) {
      double r = std::pow(10.0, -2.0 + 4.0 * i / 99.0);
      double w = eval_W(d, 1.0, r);
      double lap = eval_d2W(d, 1.0, r) + (n - 1.0) / r * eval_dW(d, 1.0, r);
      CHECK(std::abs(lap + std::pow(w, d.power())) <= 1e-10);
    }
  }
}

TEST_CASE("scaled W keeps the scaling law and its derivative matches a difference quotient") {
  Dim d(5);
  const double lam = 2.0, r = 0.7, e = 1e-6;
  CHECK(eval_W(d, lam, r) == doctest::Approx(std::pow(lam, -1.5) * eval_W(d, 1.0, r / lam)));
  double fd = (eval_W(d, lam, r + e) - eval_W(d, lam, r - e)) / (2 * e);
  CHECK(eval_dW(d, lam, r) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("exterior norms of power tails") {
  CHECK(norm_sq(AnalyticPair::of(Dim(3), PowerPair{Slot::position, 1.0, 1.0}), 1.0) == doctest::Approx(1.0));
  CHECK(norm_sq(AnalyticPair::of(Dim(5), PowerPair{Slot::position, 3.0, 1.0}), 1.0) == doctest::Approx(3.0));
  CHECK(norm_sq(AnalyticPair(Dim(5)), 2.0) == 0.0);

  // The same tails attached to a sampled state: grid quadrature plus closed-form rest.
  Dim d(3);
  AnalyticPair tail = AnalyticPair::of(d, PowerPair{Slot::position, 1.0, 1.0});
  RadialGrid g(1.0, 1.0 / 256, 1025);
  StatePair s = StatePair::sample(tail, g);
  CHECK(exterior_norm_sq(s, 1.0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(exterior_norm_sq(StatePair::zero(d, g), 1.5) == 0.0);
}

TEST_CASE("exterior norm is nonincreasing in R and scale invariant") {
  Dim d(5);
  StatePair s = bump_state(d, 1.0 / 512);
  double prev = HUGE_VAL;
  for (double R = 0.0; R <= 3.0; R += 0.25) {
    double e = exterior_norm_sq(s, R);
    CHECK(e <= prev + 1e-15);
    prev = e;
  }
  AnalyticPair a = AnalyticPair::of(d, bump_profile(Slot::position, 0.5, 2.0, 1.0));
  CHECK(norm_sq(a.rescaled(2.0), 1.6) == doctest::Approx(norm_sq(a, 0.8)).epsilon(1e-9));
  CHECK(exterior_norm_sq(rescale(s, 2.0), 1.6) == doctest::Approx(exterior_norm_sq(s, 0.8)).epsilon(1e-3));
}

TEST_CASE("truncated support is refused") {
  Dim d(3);
  AnalyticPair a = AnalyticPair::of(d, bump_profile(Slot::position, 0.5, 2.0, 1.0));
  CHECK_THROWS_AS(StatePair::sample(a, RadialGrid::covering(1.0 / 64, 1.0)), PreconditionError);
}

TEST_CASE("nonlinear energy of W is scale independent and converges in h") {
  Dim d(5);
  auto energy = [&](double lam, double h) {
    return nonlinear_energy(StatePair::sample(AnalyticPair::of(d, Soliton(d, lam)), RadialGrid::covering(h, 1000.0)));
  };
  double e1 = energy(1.0, 1.0 / 16), e2 = energy(1.0, 1.0 / 32);
  CHECK(e1 > 0.0);
  CHECK(std::abs(e1 - e2) / e2 < 1e-3);
  CHECK(energy(2.0, 1.0 / 32) == doctest::Approx(e2).epsilon(1e-3));
  CHECK(nonlinear_energy(StatePair::zero(d, RadialGrid::covering(0.1, 1.0))) == 0.0);
}

TEST_CASE("radial Sobolev sup") {
  Dim d3(3);
  StatePair inv = StatePair::sample(AnalyticPair::of(d3, PowerPair{Slot::position, 1.0, 1.0}), RadialGrid(1.0, 0.01, 501));
  CHECK(radial_sobolev_bound(inv, 1.0) == doctest::Approx(1.0));
  Dim d5(5);
  StatePair w = StatePair::sample(AnalyticPair::of(d5, Soliton(d5, 1.0)), RadialGrid::covering(1.0 / 16, 400.0));
  // r^{3/2} W(r) peaks at sqrt(15) and decreases after it.
  CHECK(radial_sobolev_bound(w, 10.0) == doctest::Approx(std::pow(10.0, 1.5) * eval_W(d5, 1.0, 10.0)).epsilon(1e-9));
  CHECK(radial_sobolev_bound(w, 1.0) == doctest::Approx(std::pow(15.0, 0.75) * eval_W(d5, 1.0, std::sqrt(15.0))).epsilon(1e-3));
}

TEST_CASE("state CSV round trip keeps 15 digits") {
  Dim d(3);
  StatePair s = bump_state(d, 1.0 / 32);
  std::stringstream ss;
  write_csv(ss, s);
  CHECK(ss.str().rfind("r,u0,u1", 0) == 0);
  StatePair back = read_csv(ss, d);
  REQUIRE(back.u0.size() == s.u0.size());
  for (std::size_t j = 0; j < s.u0.size(); ++j) CHECK(back.u0[j] == doctest::Approx(s.u0[j]).epsilon(1e-15));
}
