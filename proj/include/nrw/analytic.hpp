#pragma once

#include <functional>
#include <vector>

#include "nrw/dim.hpp"

namespace nrw {

enum class Slot { position, velocity };

// coeff * (r^{-a}, 0) or coeff * (0, r^{-a}).
struct PowerPair {
  Slot slot = Slot::position;
  double a = 1.0;
  double coeff = 1.0;

  bool finite_norm(Dim d) const noexcept;
  double value(double r) const;
  double deriv(double r) const;
};

// sign * W_lambda with W(r) = (1 + r^2/(N(N-2)))^{-(N-2)/2}.
struct Soliton {
  Dim dim;
  double lambda = 1.0;
  int sign = 1;

  Soliton(Dim d, double lambda_, int sign_ = 1);
  double value(double r) const;
  double deriv(double r) const;
  double second_deriv(double r) const;
};

double eval_W(Dim d, double lambda, double r);
double eval_dW(Dim d, double lambda, double r);
double eval_d2W(Dim d, double lambda, double r);
// Limit of r^{N-2} W(r): (N(N-2))^{(N-2)/2}.
double w_tail_coefficient(Dim d);

// A smooth profile vanishing outside [lo, hi] in one slot.
struct Profile {
  Slot slot = Slot::position;
  std::function<double(double)> f;
  std::function<double(double)> df;
  double lo = 0.0;
  double hi = 0.0;
  double coeff = 1.0;
};

// Compactly supported C^k bumps and Gaussians used throughout tests and presets.
// amp * (1 - x^2)^p with x = (2r - a - b)/(b - a), supported on [a, b].
Profile bump_profile(Slot slot, double a, double b, double amp, int p = 4);
// amp * r^{2k} exp(-r^2/w^2), cut off at r = 9w.
Profile gaussian_profile(Slot slot, double w, double amp, int k = 0);

// Sum of power tails, solitons and compact profiles, known in closed form.
class AnalyticPair {
 public:
  explicit AnalyticPair(Dim d) : dim_(d) {}

  static AnalyticPair of(Dim d, PowerPair p);
  static AnalyticPair of(Dim d, const Soliton& s);
  static AnalyticPair of(Dim d, Profile p);

  AnalyticPair& add(PowerPair p);
  AnalyticPair& add(const Soliton& s, double coeff = 1.0);
  AnalyticPair& add(Profile p);
  AnalyticPair& add(const AnalyticPair& other, double coeff = 1.0);

  AnalyticPair scaled(double c) const;
  // f_(lambda): u0 -> lambda^{-(N-2)/2} u0(r/lambda), u1 -> lambda^{-N/2} u1(r/lambda).
  AnalyticPair rescaled(double lambda) const;
  AnalyticPair operator+(const AnalyticPair& o) const;
  AnalyticPair operator-(const AnalyticPair& o) const;

  Dim dim() const noexcept { return dim_; }
  double u0(double r) const;
  double du0(double r) const;
  double u1(double r) const;

  struct SolitonTerm {
    Soliton s;
    double coeff;
  };
  const std::vector<PowerPair>& powers() const noexcept { return powers_; }
  const std::vector<SolitonTerm>& solitons() const noexcept { return solitons_; }
  const std::vector<Profile>& profiles() const noexcept { return profiles_; }

  bool empty() const noexcept { return powers_.empty() && solitons_.empty() && profiles_.empty(); }
  // Largest right end of a profile support (0 if none).
  double compact_end() const noexcept;
  bool only_compact() const noexcept { return powers_.empty() && solitons_.empty(); }

  // Free linear evolution of the power terms by the terminating series in t;
  // solitons and profiles are carried unchanged (frozen boundary data).
  AnalyticPair evolve_powers(double t) const;

 private:
  Dim dim_;
  std::vector<PowerPair> powers_;
  std::vector<SolitonTerm> solitons_;
  std::vector<Profile> profiles_;
};

// <u, v>_{H(R)} = int_R^inf (u0' v0' + u1 v1) r^{N-1} dr, closed form where possible.
double inner(const AnalyticPair& u, const AnalyticPair& v, double R);
double norm_sq(const AnalyticPair& u, double R);
// int_R^inf |u0|^{2N/(N-2)} r^{N-1} dr
double potential_integral(const AnalyticPair& u, double R);

// Closed forms used by the above and by tests.
double power_inner(Dim d, const PowerPair& p, const PowerPair& q, double R);
double soliton_power_inner(Dim d, double lambda, double a, double R);
double soliton_norm_sq(Dim d, double R);
double soliton_potential(Dim d, double R);
// ||W - l Xi_m||^2_{H(R)} without cancellation.
double soliton_defect_norm_sq(Dim d, double R);

// Local Taylor data (value and first three derivatives) of a slot at r.
struct Jet {
  double d[4];
};
Jet jet(const AnalyticPair& u, Slot slot, double r);

}  // namespace nrw
