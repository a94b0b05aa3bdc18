#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "nrw/radial_core.hpp"
#include "nrw/wave_solver.hpp"

namespace nrw {

// sigma_i = exp(log_min + i * dlog), i = 0..n-1.
struct LogGrid {
  double log_min = 0.0;
  double dlog = 0.05;
  std::size_t n = 2;

  static LogGrid span(double sigma_min, double sigma_max, double dlog);
  double at(std::size_t i) const;
};

// Samples of a function on (0, inf). Beyond the grid ends the function is
// continued as a power law fitted to the two end samples, unless the end
// sample vanishes or the end is flagged as rapidly decaying (then it is taken
// to vanish past the end).
struct HalfLineFn {
  LogGrid grid;
  std::vector<double> v;
  bool vanish_below = false;
  bool vanish_above = false;

  static HalfLineFn sample(const LogGrid& g, const std::function<double(double)>& f);
};

double l2_inner(const HalfLineFn& a, const HalfLineFn& b);
double l2_norm(const HalfLineFn& a);

// (H phi)(rho) = int_0^inf phi(sigma) / (rho + sigma) d sigma on the same grid.
HalfLineFn hankel_H(const HalfLineFn& phi);
// (L f)(s) = int_0^inf f(t) e^{-st} dt on the same grid.
HalfLineFn laplace_L(const HalfLineFn& f);

struct NormSample {
  int id;
  double ratio;
};

// Random L^2 test functions living inside [e^-30, e^30]: Gaussians in sigma,
// log-normal bumps times sigma^{-1/2}, truncated powers sigma^{-1/2 + eps}.
// The grid spans [e^-45, e^45] so that H phi settles into its power tails.
LogGrid test_function_grid();
std::vector<HalfLineFn> random_test_functions(int count, std::uint64_t seed);
// Ratios ||H phi|| / ||phi|| over random_test_functions(samples, seed).
std::vector<NormSample> operator_norm_check(int samples, std::uint64_t seed);
// sigma^{-1/2} on [1/T, T].
double truncated_power_ratio(double T, double dlog = 0.02);

struct FourierSidePair {
  Dim dim;
  HalfLineFn u0_hat;
  HalfLineFn u1_hat;
};

// u_hat(rho) = int_0^inf u(r) K_N(r rho) r^{N-1} dr with K_N(x) = x^{-nu} J_nu(x),
// nu = (N-2)/2. With this kernel the Parseval constant is 1.
class RadialFourier {
 public:
  RadialFourier(Dim d, const RadialGrid& r_grid, const LogGrid& rho_grid);
  FourierSidePair apply(const StatePair& s) const;
  HalfLineFn transform(const std::vector<double>& u) const;

 private:
  Dim dim_;
  RadialGrid r_grid_;
  LogGrid rho_grid_;
  std::vector<double> kernel_;  // rho-major, trapezoid weights folded in
};

double kernel_K(Dim d, double x);
FourierSidePair radial_fourier(const StatePair& s, const LogGrid& rho_grid);
// int |u_hat|^2 rho^{N-1} d rho
double fourier_mass(const HalfLineFn& u_hat, Dim d);

// pi int (rho^2 |u0^|^2 + |u1^|^2) rho^{N-1} + (-1)^{N/2} (<H f0, f0> - <H f1, f1>)
// with f0 = rho^{(N+1)/2} u0^, f1 = rho^{(N-1)/2} u1^.
double even_exterior_form(const FourierSidePair& p);
struct FormTerms {
  double kinetic = 0.0;  // pi (||f0||^2 + ||f1||^2)
  double h0 = 0.0;       // <H f0, f0>
  double h1 = 0.0;       // <H f1, f1>
  double value = 0.0;
};
FormTerms even_exterior_terms(const FourierSidePair& p);

void write_fourier_csv(std::ostream& os, const FourierSidePair& p);

// Degree-nu spherical-harmonic sector: v = r^{-nu} u solves the radial wave
// equation in dimension D = N + 2 nu.
struct SectorProblem {
  Dim D;
  int nu;
  StatePair v;
};

SectorProblem sector_reduce(const StatePair& u_k, int nu);
StatePair sector_expand(const StatePair& v, int nu, Dim N);
// int_R^inf (u_r^2 + u_t^2 + nu(nu+N-2) u^2 / r^2) r^{N-1} dr
double sector_exterior_energy(const StatePair& u_k, int nu, double R);

}  // namespace nrw
