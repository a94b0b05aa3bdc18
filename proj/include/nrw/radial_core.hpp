#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "nrw/analytic.hpp"
#include "nrw/dim.hpp"
#include "nrw/error.hpp"

namespace nrw {

// Radial data (u, d_t u) on a grid. If `tail` is set, the state coincides with
// it for r >= grid.back(), and integrals past the grid use it in closed form.
struct StatePair {
  Dim dim;
  RadialGrid grid;
  std::vector<double> u0;
  std::vector<double> u1;
  std::optional<AnalyticPair> tail;

  StatePair(Dim d, RadialGrid g, std::vector<double> u0_, std::vector<double> u1_,
            std::optional<AnalyticPair> tail_ = std::nullopt);

  static StatePair zero(Dim d, RadialGrid g);
  // Samples `data` at the nodes; attaches it as tail unless it is compactly
  // supported inside the grid.
  static StatePair sample(const AnalyticPair& data, RadialGrid g);
};

// d/dr: centered inside, second-order one-sided at both ends.
std::vector<double> radial_derivative(const std::vector<double>& u, double h);

// Throws NumericalAbort when a tail-less state still carries energy at the last node.
void require_contained(const StatePair& s, const char* what);

double exterior_norm_sq(const StatePair& s, double R);
// <a, b>_{H(R)} for two states on the same grid.
double exterior_inner(const StatePair& a, const StatePair& b, double R);
double nonlinear_energy(const StatePair& s);
double radial_sobolev_bound(const StatePair& s, double R);
StatePair rescale(const StatePair& s, double lambda);

void write_csv(std::ostream& os, const StatePair& s);
StatePair read_csv(std::istream& is, Dim d);

}  // namespace nrw
