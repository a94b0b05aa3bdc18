#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <utility>
#include <vector>

#include "nrw/radial_core.hpp"

namespace nrw {

// Generators Xi_1..Xi_m of P(R), ordered so that ||Xi_k||_{H(R)} = c_k / R^{k-1/2}.
struct PBasis {
  Dim dim;
  std::vector<PowerPair> elements;
  std::vector<double> c;

  int m() const noexcept { return static_cast<int>(elements.size()); }
  AnalyticPair xi(int k) const;  // 1-based, as in Xi_k
};

PBasis build_basis(Dim d);
Eigen::MatrixXd gram(const PBasis& b, double R);

struct PElement {
  PBasis basis;
  Eigen::VectorXd theta;
  double R;

  AnalyticPair as_pair() const;
};

struct Projection {
  PElement element;
  double residual_sq;  // ||pi_{P(R)^perp} state||^2
  double norm_sq;      // ||state||^2
};

Projection project(const AnalyticPair& data, const PBasis& b, double R);
// Moments and Gram entries both use the grid quadrature plus the closed-form
// tail, so the discrete projection stays orthogonal.
Projection project(const StatePair& s, const PBasis& b, double R);

// ||U||_{H(R)} / sum_k |theta_k| / R^{k-1/2}; 1 when theta = 0.
double coord_norm_equiv(const PElement& e, double R);
// The window [1/C*, C*] the ratio must lie in, from the R = 1 Gram spectrum.
std::pair<double, double> coord_window(const PBasis& b);

struct SweepRow {
  double R;
  Eigen::VectorXd theta;
  double residual_sq;
};

// Rows at R0, 2R0, ..., 2^{levels-1} R0.
std::vector<SweepRow> dyadic_sweep(const AnalyticPair& data, const PBasis& b, double R0, int levels);
std::vector<SweepRow> dyadic_sweep(const StatePair& s, const PBasis& b, double R0, int levels);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, int m);

}  // namespace nrw
