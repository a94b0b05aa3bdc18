#include <cmath>
#include <sstream>

#include "doctest.h"
#include "nrw/verification.hpp"

using namespace nrw;

TEST_CASE("W tail rates") {
  for (int n : {3, 5, 7}) {
    Dim d(n);
    WTailRates w = w_tail_rates(d, 32.0, 6);
    const int m = d.require_m();
    CHECK(w.target_slope == doctest::Approx(-(m + 1.5)));
    CHECK(std::abs(w.fit.slope - w.target_slope) <= 0.25);
    CHECK_FALSE(w.flagged);
    CHECK(w.monotone);
    CHECK(w.ell_expected == doctest::Approx(w_tail_coefficient(d)));
    CHECK(std::abs(w.ell / w.ell_expected - 1.0) <= 1e-3);
  }
  WTailRates w5 = w_tail_rates(Dim(5), 32.0, 6);
  CHECK(w5.fit.slope >= -3.7);
  CHECK(w5.fit.slope <= -3.3);
}

TEST_CASE("the defect of W against its tail matches direct quadrature") {
  Dim d(5);
  AnalyticPair diff = AnalyticPair::of(d, Soliton(d, 1.0)) - build_basis(d).xi(2).scaled(w_tail_coefficient(d));
  for (double R : {4.0, 64.0}) CHECK(soliton_defect_norm_sq(d, R) == doctest::Approx(norm_sq(diff, R)).epsilon(1e-6));
}

TEST_CASE("asymptotic extraction") {
  PBasis b = build_basis(Dim(5));
  SweepRow row{4.0, Eigen::Vector2d(3.0, 0.0), 0.0};
  Asymptotics a = extract_asymptotics(row, b);
  CHECK(a.k0 == 1);
  CHECK(a.ell == 3.0);
  row.theta = Eigen::Vector2d(0.0, 0.0);
  CHECK(extract_asymptotics(row, b).k0 == 0);
}

TEST_CASE("exact tail instances keep their coordinates") {
  Dim d(7);
  PBasis b = build_basis(d);
  for (int k = 1; k <= 3; ++k) {
    AnalyticPair data = b.xi(k).scaled(0.05);
    RateCheck rc = theorem1_rate_check(data, k, 0.05, 2.0);
    CHECK(rc.k0_ok);
    CHECK(rc.ell_ok);
    CHECK(rc.rate_ok);
    CHECK(rc.shell_ok);
    CHECK_FALSE(rc.fit.has_value());
    for (const auto& r : rc.rows) CHECK(r.residual_sq <= 1e-20);
  }
}

TEST_CASE("tail plus bump instances recover k0 and l") {
  for (int n : {5, 7}) {
    Dim d(n);
    PBasis b = build_basis(d);
    for (int k = 1; k <= b.m(); ++k) {
      AnalyticPair data = xi_tail_instance(d, k, 2.0, 0.5, 0.1);
      CHECK(std::sqrt(norm_sq(data, 4.0)) == doctest::Approx(0.5));
      double ell = 0.5 * std::pow(4.0, k - 0.5) / b.c[k - 1];
      RateCheck rc = theorem1_rate_check(data, k, ell, 2.0);
      CHECK(rc.found.k0 == k);
      CHECK(rc.found.ell == doctest::Approx(ell).epsilon(1e-9));
      CHECK(rc.shell_ok);
      CHECK(rc.rate_ok);
    }
  }
}

TEST_CASE("W as an instance of the rate theorem") {
  Dim d(5);
  AnalyticPair W = AnalyticPair::of(d, Soliton(d, 1.0));
  RateCheck rc = theorem1_rate_check(W, 2, w_tail_coefficient(d), 16.0);
  CHECK(rc.k0_ok);
  CHECK(rc.rate_ok);
  CHECK(rc.shell_ok);
  REQUIRE(rc.fit.has_value());
  CHECK(rc.fit->slope <= rc.required_slope);
  // Too large in H(2 R1): outside the small-data regime.
  CHECK_THROWS_AS(theorem1_rate_check(W, 2, w_tail_coefficient(d), 1.0), PreconditionError);
}

TEST_CASE("k0 and l do not move in time") {
  Dim d(5);
  TimeInvarianceOptions opt;
  opt.h = 1.0 / 128;
  auto w = time_invariance_check(AnalyticPair::of(d, Soliton(d, 1.0)), 1.0, {0.0, 0.5, 1.0}, opt);
  for (const auto& row : w) {
    CHECK(row.found.k0 == 2);
    CHECK(row.found.ell == doctest::Approx(w.front().found.ell).epsilon(1e-6));
  }
  auto xi = time_invariance_check(xi_tail_instance(d, 1, 1.0, 0.2, 0.05), 1.0, {0.0, 0.5}, opt);
  CHECK(xi[0].found.k0 == 1);
  CHECK(xi[1].found.k0 == 1);
  CHECK(std::abs(xi[1].found.ell / xi[0].found.ell - 1.0) <= 0.02);
  for (const auto& row : time_invariance_check(AnalyticPair(d), 1.0, {0.0, 0.5}, opt)) CHECK(row.classification == "zero");
}

TEST_CASE("support law and the one-eighth bound") {
  SupportRun run;  // the law is checked to 2h; at h = 1/256 the front sits right at 2h
  for (int n : {3, 4}) {
    Dim d(n);
    SupportTrace lin = run_support_trace(AnalyticPair::of(d, bump_profile(Slot::position, 1.0, 2.0, 1.0)), run);
    CHECK(lin.law_ok);
    CHECK(lin.eighth_ok);
    // Time-symmetric data: both directions obey the law.
    CHECK(lin.dev_fwd <= 2 * lin.h);
    CHECK(lin.dev_bwd <= 2 * lin.h);
    CHECK(lin.rho_fwd.front() == doctest::Approx(2.0).epsilon(0.02));

    run.nonlinearity = Nonlinearity::full();
    SupportTrace nl = run_support_trace(AnalyticPair::of(d, bump_profile(Slot::position, 1.0, 2.0, 0.3)), run);
    CHECK(nl.law_ok);
    CHECK(nl.eighth_ok);
    run.nonlinearity = Nonlinearity::linear();
  }
  SupportTrace z = run_support_trace(AnalyticPair(Dim(3)), run);
  for (double r : z.rho_fwd) CHECK(r == 0.0);
  CHECK(z.law_ok);
  CHECK_THROWS_AS(run_support_trace(AnalyticPair::of(Dim(3), Soliton(Dim(3), 1.0)), run), PreconditionError);
}

TEST_CASE("sequence claim constants and rollouts") {
  // c0 = 0, nu0 = 0: mu_n = q^n mu0 exactly.
  SeqParams p{0.4, 0.2, 0.0, 2.0, 0.3, 0.0, 50};
  SeqConstants k = sequence_constants(p.q, p.r, p.c0, p.beta);
  auto ratio = sequence_rollout(p, k, std::vector<double>(50, 1.0));
  REQUIRE(ratio.has_value());
  CHECK(*ratio == doctest::Approx(1.0 / k.C).epsilon(1e-12));

  SequenceReport rep = sequence_claim_check(2000, 3);
  CHECK(rep.counterexamples == 0);
  CHECK(rep.draws == 2000);
  CHECK(rep.worst_ratio <= 1.0);

  SeqParams fixed{0.5, 0.25, 1.0, 2.0, 0.0, 0.0, 200};
  SeqConstants kf = sequence_constants(0.5, 0.25, 1.0, 2.0);
  fixed.mu0 = kf.epsilon / 2;
  fixed.nu0 = kf.epsilon / 4;
  CHECK(sequence_claim_check(fixed, 200, 1).counterexamples == 0);

  SeqParams eq{0.5, 0.5, 1.0, 2.0, 0.0, 0.0, 200};
  SeqConstants ke = sequence_constants(0.5, 0.5, 1.0, 2.0);
  eq.mu0 = ke.epsilon / 2;
  eq.nu0 = ke.epsilon / 3;
  // The q = r bound grows like (1 + n) r^n.
  CHECK(sequence_bound(eq, ke, 10) == doctest::Approx(ke.C * (eq.mu0 + eq.nu0 * 11) * std::pow(0.5, 10)));
  CHECK(sequence_claim_check(eq, 200, 1).counterexamples == 0);

  CHECK_THROWS_AS(sequence_constants(1.2, 0.5, 0.0, 2.0), PreconditionError);
  CHECK_THROWS_AS(sequence_constants(0.5, 0.5, 1.0, 1.0), PreconditionError);
}

TEST_CASE("compact data radiate") {
  ChannelRun run;
  run.h = 1.0 / 128;
  run.nonlinearity = Nonlinearity::full();
  for (int n : {3, 4}) {
    Dim d(n);
    RadiativeVerdict v = compact_nonradiative_check(AnalyticPair::of(d, bump_profile(Slot::position, 0.5, 1.5, 0.2)), run);
    CHECK(v.verdict == "radiative");
    CHECK(v.pass);
    CHECK(v.sum_limits > 0.0);
    CHECK(compact_nonradiative_check(AnalyticPair(d), run).verdict == "zero");
  }
}

TEST_CASE("check CSV layout") {
  std::ostringstream os;
  write_check_csv(os, {{"a", "b", "c", 1.5, 2.0, 0.5, true}});
  CHECK(os.str() == "check,instance,param,observed,expected,tolerance,pass\na,b,c,1.5,2,0.5,1\n");
}
