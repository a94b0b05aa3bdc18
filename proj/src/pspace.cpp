#include "nrw/pspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace nrw {

namespace {

Projection finish(const PBasis& b, double R, const Eigen::MatrixXd& G, const Eigen::VectorXd& mom, double nsq) {
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw NumericalAbort("Gram matrix is not positive definite");
  Eigen::VectorXd theta = llt.solve(mom);
  double res = nsq - theta.dot(G * theta);
  if (res < 0.0) {
    if (res < -1e-12 * std::max(nsq, 1e-300)) throw NumericalAbort("negative projection residual beyond tolerance");
    res = 0.0;
  }
  return Projection{PElement{b, theta, R}, res, nsq};
}

// Xi_k sampled on g; nodes below R/2 never enter H(R) quantities and are
// clamped so the power stays finite at the origin.
StatePair sample_generator(const PBasis& b, int k, const RadialGrid& g, double R) {
  AnalyticPair xi = b.xi(k);
  std::vector<double> a(g.n), v(g.n);
  for (std::size_t j = 0; j < g.n; ++j) {
    double r = std::max(g.node(j), 0.5 * R);
    a[j] = xi.u0(r);
    v[j] = xi.u1(r);
  }
  return StatePair(b.dim, g, std::move(a), std::move(v), xi);
}

}  // namespace

AnalyticPair PBasis::xi(int k) const {
  require(k >= 1 && k <= m(), "basis index out of range");
  return AnalyticPair::of(dim, elements[k - 1]);
}

PBasis build_basis(Dim d) {
  const int N = d.n();
  const int m = d.require_m();
  PBasis b{d, std::vector<PowerPair>(m), std::vector<double>(m)};
  // Position generators r^{-(N-2k1)} carry index k = (N-4k1+3)/2,
  // velocity generators r^{-(N-2k2)} carry k = (N-4k2+1)/2.
  for (int k1 = 1; k1 <= (N + 2) / 4; ++k1) {
    int k = (N - 4 * k1 + 3) / 2;
    double a = N - 2 * k1;
    b.elements[k - 1] = PowerPair{Slot::position, a, 1.0};
    b.c[k - 1] = std::sqrt(a * a / (N - 4.0 * k1 + 2.0));
  }
  for (int k2 = 1; k2 <= N / 4; ++k2) {
    int k = (N - 4 * k2 + 1) / 2;
    b.elements[k - 1] = PowerPair{Slot::velocity, static_cast<double>(N - 2 * k2), 1.0};
    b.c[k - 1] = std::sqrt(1.0 / (N - 4.0 * k2));
  }
  return b;
}

Eigen::MatrixXd gram(const PBasis& b, double R) {
  require(R > 0.0, "Gram matrix needs R > 0");
  const int m = b.m();
  Eigen::MatrixXd G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = power_inner(b.dim, b.elements[i], b.elements[j], R);
  return G;
}

AnalyticPair PElement::as_pair() const {
  AnalyticPair out(basis.dim);
  for (int k = 0; k < basis.m(); ++k) {
    PowerPair p = basis.elements[k];
    p.coeff = theta(k);
    out.add(p);
  }
  return out;
}

Projection project(const AnalyticPair& data, const PBasis& b, double R) {
  require(data.dim() == b.dim, "dimension mismatch");
  require(R > 0.0, "projection needs R > 0");
  Eigen::VectorXd mom(b.m());
  for (int k = 1; k <= b.m(); ++k) mom(k - 1) = inner(data, b.xi(k), R);
  return finish(b, R, gram(b, R), mom, norm_sq(data, R));
}

Projection project(const StatePair& s, const PBasis& b, double R) {
  require(s.dim == b.dim, "dimension mismatch");
  require(R > 0.0, "projection needs R > 0");
  const int m = b.m();
  std::vector<StatePair> xs;
  xs.reserve(m);
  for (int k = 1; k <= m; ++k) xs.push_back(sample_generator(b, k, s.grid, R));
  Eigen::MatrixXd G(m, m);
  Eigen::VectorXd mom(m);
  for (int i = 0; i < m; ++i) {
    mom(i) = exterior_inner(s, xs[i], R);
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = exterior_inner(xs[i], xs[j], R);
  }
  return finish(b, R, G, mom, exterior_norm_sq(s, R));
}

double coord_norm_equiv(const PElement& e, double R) {
  require(R > 0.0, "R must be > 0");
  double sum = 0.0;
  for (int k = 1; k <= e.basis.m(); ++k) sum += std::abs(e.theta(k - 1)) / std::pow(R, k - 0.5);
  if (sum == 0.0) return 1.0;
  double nsq = e.theta.dot(gram(e.basis, R) * e.theta);
  return std::sqrt(std::max(nsq, 0.0)) / sum;
}

std::pair<double, double> coord_window(const PBasis& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram(b, 1.0));
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  double cstar = std::max(std::sqrt(hi), std::sqrt(b.m() / lo));
  return {1.0 / cstar, cstar};
}

std::vector<SweepRow> dyadic_sweep(const AnalyticPair& data, const PBasis& b, double R0, int levels) {
  require(levels >= 1, "levels must be >= 1");
  require(R0 > 0.0, "R0 must be > 0");
  std::vector<SweepRow> rows;
  for (int n = 0; n < levels; ++n) {
    double R = std::ldexp(R0, n);
    auto p = project(data, b, R);
    rows.push_back({R, p.element.theta, p.residual_sq});
  }
  return rows;
}

std::vector<SweepRow> dyadic_sweep(const StatePair& s, const PBasis& b, double R0, int levels) {
  require(levels >= 1, "levels must be >= 1");
  require(R0 > 0.0, "R0 must be > 0");
  std::vector<SweepRow> rows;
  for (int n = 0; n < levels; ++n) {
    double R = std::ldexp(R0, n);
    auto p = project(s, b, R);
    rows.push_back({R, p.element.theta, p.residual_sq});
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, int m) {
  os << "R";
  for (int k = 1; k <= m; ++k) os << ",theta_" << k;
  os << ",residual_sq\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", row.R);
    os << buf;
    for (int k = 0; k < m; ++k) {
      std::snprintf(buf, sizeof buf, ",%.17g", row.theta(k));
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", row.residual_sq);
    os << buf;
  }
}

}  // namespace nrw
