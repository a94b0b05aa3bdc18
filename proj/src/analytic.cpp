#include "nrw/analytic.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "nrw/error.hpp"
#include "nrw/quad.hpp"

namespace nrw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double conformal_c(Dim d) { return static_cast<double>(d.n()) * (d.n() - 2); }

// int_S^inf s^p (1+s)^{-q} ds through the non-normalized incomplete beta.
double tail_beta(double p, double q, double S) {
  double x0 = 1.0 / (1.0 + S);
  return boost::math::beta(q - p - 1.0, p + 1.0, x0);
}

}  // namespace

bool PowerPair::finite_norm(Dim d) const noexcept {
  if (!(a > 0.0)) return false;
  return slot == Slot::position ? 2.0 * a + 2.0 - d.n() > 0.0 : 2.0 * a - d.n() > 0.0;
}

double PowerPair::value(double r) const { return coeff * std::pow(r, -a); }
double PowerPair::deriv(double r) const { return -a * coeff * std::pow(r, -a - 1.0); }

Soliton::Soliton(Dim d, double lambda_, int sign_) : dim(d), lambda(lambda_), sign(sign_) {
  require(lambda > 0.0 && std::isfinite(lambda), "soliton scale must be > 0");
  require(sign == 1 || sign == -1, "soliton sign must be +1 or -1");
}

double Soliton::value(double r) const { return sign * eval_W(dim, lambda, r); }
double Soliton::deriv(double r) const { return sign * eval_dW(dim, lambda, r); }
double Soliton::second_deriv(double r) const { return sign * eval_d2W(dim, lambda, r); }

double eval_W(Dim d, double lambda, double r) {
  require(lambda > 0.0, "soliton scale must be > 0");
  require(r >= 0.0, "radius must be >= 0");
  double N = d.n(), x = r / lambda;
  return std::pow(lambda, -(N - 2.0) / 2.0) * std::pow(1.0 + x * x / conformal_c(d), -(N - 2.0) / 2.0);
}

double eval_dW(Dim d, double lambda, double r) {
  require(lambda > 0.0, "soliton scale must be > 0");
  double N = d.n(), x = r / lambda;
  return -std::pow(lambda, -N / 2.0) * (x / N) * std::pow(1.0 + x * x / conformal_c(d), -N / 2.0);
}

double eval_d2W(Dim d, double lambda, double r) {
  require(lambda > 0.0, "soliton scale must be > 0");
  double N = d.n(), x = r / lambda, s = x * x / conformal_c(d);
  double v = -std::pow(1.0 + s, -N / 2.0) / N + s * std::pow(1.0 + s, -N / 2.0 - 1.0);
  return std::pow(lambda, -N / 2.0 - 1.0) * v;
}

double w_tail_coefficient(Dim d) { return std::pow(conformal_c(d), (d.n() - 2.0) / 2.0); }

Profile bump_profile(Slot slot, double a, double b, double amp, int p) {
  require(b > a && a >= 0.0, "bump support must satisfy 0 <= a < b");
  require(p >= 2, "bump smoothness exponent must be >= 2");
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  Profile pr;
  pr.slot = slot;
  pr.lo = a;
  pr.hi = b;
  pr.f = [=](double r) {
    double x = (r - mid) / half;
    return std::abs(x) >= 1.0 ? 0.0 : amp * std::pow(1.0 - x * x, p);
  };
  pr.df = [=](double r) {
    double x = (r - mid) / half;
    if (std::abs(x) >= 1.0) return 0.0;
    return amp * p * std::pow(1.0 - x * x, p - 1) * (-2.0 * x) / half;
  };
  return pr;
}

Profile gaussian_profile(Slot slot, double w, double amp, int k) {
  require(w > 0.0, "gaussian width must be > 0");
  require(k >= 0, "gaussian power must be >= 0");
  Profile pr;
  pr.slot = slot;
  pr.lo = 0.0;
  // Cut at 9 widths: exp(-81) ~ 7e-36, far below any tolerance in use.
  pr.hi = 9.0 * w;
  pr.f = [=](double r) {
    double x = r / w;
    return amp * std::pow(r, 2 * k) * std::exp(-x * x);
  };
  pr.df = [=](double r) {
    double x = r / w;
    double e = std::exp(-x * x);
    double lead = k > 0 ? 2.0 * k * std::pow(r, 2 * k - 1) : 0.0;
    return amp * e * (lead - 2.0 * r / (w * w) * std::pow(r, 2 * k));
  };
  return pr;
}

AnalyticPair AnalyticPair::of(Dim d, PowerPair p) { return AnalyticPair(d).add(p); }
AnalyticPair AnalyticPair::of(Dim d, const Soliton& s) { return AnalyticPair(d).add(s); }
AnalyticPair AnalyticPair::of(Dim d, Profile p) { return AnalyticPair(d).add(std::move(p)); }

AnalyticPair& AnalyticPair::add(PowerPair p) {
  require(p.a > 0.0, "power exponent must be > 0");
  if (p.coeff != 0.0) powers_.push_back(p);
  return *this;
}

AnalyticPair& AnalyticPair::add(const Soliton& s, double coeff) {
  require(s.dim == dim_, "soliton dimension mismatch");
  if (coeff != 0.0) solitons_.push_back({s, coeff});
  return *this;
}

AnalyticPair& AnalyticPair::add(Profile p) {
  require(static_cast<bool>(p.f), "profile needs a value function");
  require(p.slot == Slot::velocity || static_cast<bool>(p.df), "position profile needs a derivative");
  require(p.hi > p.lo && p.lo >= 0.0, "profile support must be a nonempty interval in r >= 0");
  if (p.coeff != 0.0) profiles_.push_back(std::move(p));
  return *this;
}

AnalyticPair& AnalyticPair::add(const AnalyticPair& o, double coeff) {
  require(o.dim_ == dim_, "dimension mismatch");
  for (auto p : o.powers_) {
    p.coeff *= coeff;
    add(p);
  }
  for (const auto& s : o.solitons_) add(s.s, s.coeff * coeff);
  for (auto p : o.profiles_) {
    p.coeff *= coeff;
    add(std::move(p));
  }
  return *this;
}

AnalyticPair AnalyticPair::scaled(double c) const { return AnalyticPair(dim_).add(*this, c); }
AnalyticPair AnalyticPair::rescaled(double lambda) const {
  require(lambda > 0.0, "scale must be > 0");
  const double N = dim_.n();
  const double k0 = std::pow(lambda, -(N - 2.0) / 2.0), k1 = std::pow(lambda, -N / 2.0);
  AnalyticPair out(dim_);
  for (auto p : powers_) {
    p.coeff *= (p.slot == Slot::position ? k0 : k1) * std::pow(lambda, p.a);
    out.add(p);
  }
  for (const auto& s : solitons_) out.add(Soliton(dim_, s.s.lambda * lambda, s.s.sign), s.coeff);
  for (const auto& p : profiles_) {
    Profile q = p;
    double k = p.slot == Slot::position ? k0 : k1;
    auto f = p.f;
    q.f = [f, k, lambda](double r) { return k * f(r / lambda); };
    if (p.df) {
      auto df = p.df;
      q.df = [df, k, lambda](double r) { return k / lambda * df(r / lambda); };
    }
    q.lo = p.lo * lambda;
    q.hi = p.hi * lambda;
    out.add(std::move(q));
  }
  return out;
}

AnalyticPair AnalyticPair::operator+(const AnalyticPair& o) const { return AnalyticPair(*this).add(o, 1.0); }
AnalyticPair AnalyticPair::operator-(const AnalyticPair& o) const { return AnalyticPair(*this).add(o, -1.0); }

double AnalyticPair::u0(double r) const {
  double v = 0.0;
  for (const auto& p : powers_)
    if (p.slot == Slot::position) v += p.value(r);
  for (const auto& s : solitons_) v += s.coeff * s.s.value(r);
  for (const auto& p : profiles_)
    if (p.slot == Slot::position && r >= p.lo && r <= p.hi) v += p.coeff * p.f(r);
  return v;
}

double AnalyticPair::du0(double r) const {
  double v = 0.0;
  for (const auto& p : powers_)
    if (p.slot == Slot::position) v += p.deriv(r);
  for (const auto& s : solitons_) v += s.coeff * s.s.deriv(r);
  for (const auto& p : profiles_)
    if (p.slot == Slot::position && r >= p.lo && r <= p.hi) v += p.coeff * p.df(r);
  return v;
}

double AnalyticPair::u1(double r) const {
  double v = 0.0;
  for (const auto& p : powers_)
    if (p.slot == Slot::velocity) v += p.value(r);
  for (const auto& p : profiles_)
    if (p.slot == Slot::velocity && r >= p.lo && r <= p.hi) v += p.coeff * p.f(r);
  return v;
}

double AnalyticPair::compact_end() const noexcept {
  double e = 0.0;
  for (const auto& p : profiles_) e = std::max(e, p.hi);
  return e;
}

AnalyticPair AnalyticPair::evolve_powers(double t) const {
  AnalyticPair out(dim_);
  const double N = dim_.n();
  for (const auto& p : powers_) {
    // Delta r^{-a} = a(a+2-N) r^{-a-2}; the series stops once a hits N-2.
    double a = p.a, c = p.coeff, fact = 1.0;
    for (int j = 0;; ++j) {
      // c currently multiplies Delta^j r^{-a_0} = c r^{-a}
      double tj = (j == 0) ? 1.0 : std::pow(t, 2 * j) / fact;
      double tj1 = std::pow(t, 2 * j + 1) / (fact * (2 * j + 1));
      if (p.slot == Slot::position) {
        out.add(PowerPair{Slot::position, a, c * tj});
        if (j > 0) out.add(PowerPair{Slot::velocity, a, c * std::pow(t, 2 * j - 1) / (fact / (2 * j))});
      } else {
        out.add(PowerPair{Slot::position, a, c * tj1});
        out.add(PowerPair{Slot::velocity, a, c * tj});
      }
      double lap = a * (a + 2.0 - N);
      if (lap == 0.0 || c == 0.0) break;
      if (j >= 64) throw PreconditionError("power tail r^-" + std::to_string(p.a) + " is not a finite free-wave series");
      c *= lap;
      a += 2.0;
      fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
  }
  for (const auto& s : solitons_) out.add(s.s, s.coeff);
  for (const auto& p : profiles_) out.add(p);
  return out;
}

double power_inner(Dim d, const PowerPair& p, const PowerPair& q, double R) {
  require(R > 0.0, "power-law inner products need R > 0");
  if (p.slot != q.slot) return 0.0;
  const double N = d.n();
  if (p.slot == Slot::position) {
    double e = p.a + q.a + 2.0 - N;
    if (!(e > 0.0)) throw PreconditionError("divergent H(R) inner product of position powers");
    return p.coeff * q.coeff * p.a * q.a / e * std::pow(R, -e);
  }
  double e = p.a + q.a - N;
  if (!(e > 0.0)) throw PreconditionError("divergent H(R) inner product of velocity powers");
  return p.coeff * q.coeff / e * std::pow(R, -e);
}

double soliton_power_inner(Dim d, double lambda, double a, double R) {
  // <W_lambda, (r^{-a},0)>_{H(R)} = lambda^{N/2-1-a} <W, (r^{-a},0)>_{H(R/lambda)}
  const double N = d.n(), c = conformal_c(d);
  require(a > 0.0 && a < N, "soliton/power inner product needs 0 < a < N");
  double S = R / lambda;
  double base = (a / N) * 0.5 * std::pow(c, (N - a) / 2.0) * tail_beta((N - a) / 2.0 - 1.0, N / 2.0, S * S / c);
  return std::pow(lambda, N / 2.0 - 1.0 - a) * base;
}

double soliton_norm_sq(Dim d, double R) {
  const double N = d.n(), c = conformal_c(d);
  return std::pow(c, N / 2.0 + 1.0) / (2.0 * N * N) * tail_beta(N / 2.0, N, R * R / c);
}

double soliton_potential(Dim d, double R) {
  const double N = d.n(), c = conformal_c(d);
  return 0.5 * std::pow(c, N / 2.0) * tail_beta(N / 2.0 - 1.0, N, R * R / c);
}

double soliton_defect_norm_sq(Dim d, double R) {
  require(R > 0.0, "defect norm needs R > 0");
  const double N = d.n(), c = conformal_c(d), l = w_tail_coefficient(d);
  // t = c/r^2, then t = tau^2 to remove the half-integer powers at 0.
  auto g = [N](double tau) {
    double t = tau * tau;
    double br = -std::expm1(-0.5 * N * std::log1p(t));
    return 2.0 * std::pow(tau, N - 3.0) * br * br;
  };
  double upper = std::sqrt(c) / R;
  double I = quad::gauss_legendre(g, 0.0, upper, upper > 4.0 ? 64 : 8);
  return (N - 2.0) * (N - 2.0) * l * l * 0.5 * std::pow(c, 1.0 - N / 2.0) * I;
}

double inner(const AnalyticPair& u, const AnalyticPair& v, double R) {
  require(u.dim() == v.dim(), "dimension mismatch");
  require(R >= 0.0, "radius must be >= 0");
  const Dim d = u.dim();
  const double N = d.n();
  double total = 0.0;

  for (const auto& p : u.powers())
    for (const auto& q : v.powers()) total += power_inner(d, p, q, R);

  auto soliton_vs_powers = [&](const AnalyticPair& sols, const AnalyticPair& pows) {
    double acc = 0.0;
    for (const auto& s : sols.solitons())
      for (const auto& p : pows.powers())
        if (p.slot == Slot::position)
          acc += s.coeff * s.s.sign * p.coeff * soliton_power_inner(d, s.s.lambda, p.a, R);
    return acc;
  };
  total += soliton_vs_powers(u, v) + soliton_vs_powers(v, u);

  for (const auto& s : u.solitons())
    for (const auto& t : v.solitons()) {
      double k = s.coeff * t.coeff;
      if (s.s.lambda == t.s.lambda) {
        total += k * s.s.sign * t.s.sign * soliton_norm_sq(d, R / s.s.lambda);
      } else {
        auto f = [&](double r) { return s.s.deriv(r) * t.s.deriv(r) * std::pow(r, N - 1.0); };
        total += k * quad::integrate(f, R, kInf);
      }
    }

  // Anything touching a compact profile is integrated over its support.
  auto profile_vs_all = [&](const Profile& pr, const AnalyticPair& other, bool skip_profiles) {
    double lo = std::max(pr.lo, R), hi = pr.hi;
    if (!(hi > lo)) return 0.0;
    AnalyticPair rest(d);
    for (const auto& p : other.powers()) rest.add(p);
    for (const auto& s : other.solitons()) rest.add(s.s, s.coeff);
    if (!skip_profiles)
      for (const auto& q : other.profiles()) rest.add(q);
    if (rest.empty()) return 0.0;
    auto f = [&](double r) {
      double w = std::pow(r, N - 1.0);
      if (pr.slot == Slot::position) return pr.coeff * pr.df(r) * rest.du0(r) * w;
      return pr.coeff * pr.f(r) * rest.u1(r) * w;
    };
    return quad::integrate(f, lo, hi);
  };
  for (const auto& pr : u.profiles()) total += profile_vs_all(pr, v, false);
  for (const auto& pr : v.profiles()) total += profile_vs_all(pr, u, true);
  return total;
}

double norm_sq(const AnalyticPair& u, double R) { return inner(u, u, R); }

double potential_integral(const AnalyticPair& u, double R) {
  const Dim d = u.dim();
  const double N = d.n(), p = d.sobolev_exponent();
  if (u.powers().empty() && u.profiles().empty() && u.solitons().size() == 1) {
    const auto& s = u.solitons().front();
    return std::pow(std::abs(s.coeff), p) * soliton_potential(d, R / s.s.lambda);
  }
  auto f = [&](double r) { return std::pow(std::abs(u.u0(r)), p) * std::pow(r, N - 1.0); };
  if (u.only_compact()) return quad::integrate(f, std::max(R, 0.0), std::max(R, u.compact_end()));
  double split = std::max(R, u.compact_end());
  return quad::integrate(f, R, split) + quad::integrate(f, split, kInf);
}

Jet jet(const AnalyticPair& u, Slot slot, double r) {
  auto f = [&](double x) { return slot == Slot::position ? u.u0(x) : u.u1(x); };
  // 7-point central stencils; only continuity of the extension depends on these.
  double h = 1e-2 * std::max(r, 1e-2);
  double f0 = f(r), fp1 = f(r + h), fm1 = f(r - h), fp2 = f(r + 2 * h), fm2 = f(r - 2 * h), fp3 = f(r + 3 * h),
         fm3 = f(r - 3 * h);
  Jet j{};
  j.d[0] = f0;
  j.d[1] = (fp3 - 9 * fp2 + 45 * fp1 - 45 * fm1 + 9 * fm2 - fm3) / (60 * h);
  j.d[2] = (2 * fp3 - 27 * fp2 + 270 * fp1 - 490 * f0 + 270 * fm1 - 27 * fm2 + 2 * fm3) / (180 * h * h);
  j.d[3] = (-fp3 + 8 * fp2 - 13 * fp1 + 13 * fm1 - 8 * fm2 + fm3) / (8 * h * h * h);
  return j;
}

}  // namespace nrw
