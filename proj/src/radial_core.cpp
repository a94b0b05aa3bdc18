#include "nrw/radial_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace nrw {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Trapezoid of nodal density e over [R, back], with the partial first cell
// handled by linear interpolation of e.
double trapezoid_from(const RadialGrid& g, const std::vector<double>& e, double R) {
  require(R >= g.r0 - 1e-12 * std::max(1.0, g.r0), "R is below the grid");
  require(R <= g.back() + 1e-12 * std::max(1.0, g.back()), "R is beyond the last grid node");
  std::size_t k = g.first_at_or_above(R);
  double total = 0.0;
  double rk = g.node(k);
  if (k > 0 && rk > R) {
    double w = (rk - R) / g.h;
    double eR = e[k] + (e[k - 1] - e[k]) * w;
    total += 0.5 * (eR + e[k]) * (rk - R);
  }
  for (std::size_t j = k; j + 1 < g.n; ++j) total += 0.5 * g.h * (e[j] + e[j + 1]);
  return total;
}

std::vector<double> weights_r(const StatePair& s) {
  std::vector<double> w(s.grid.n);
  for (std::size_t j = 0; j < s.grid.n; ++j) w[j] = std::pow(s.grid.node(j), s.dim.n() - 1.0);
  return w;
}

}  // namespace

StatePair::StatePair(Dim d, RadialGrid g, std::vector<double> a, std::vector<double> b,
                     std::optional<AnalyticPair> t)
    : dim(d), grid(g), u0(std::move(a)), u1(std::move(b)), tail(std::move(t)) {
  require(u0.size() == grid.n && u1.size() == grid.n, "state arrays must match the grid length");
  require(all_finite(u0) && all_finite(u1), "state samples must be finite");
  if (tail) require(tail->dim() == dim, "tail dimension mismatch");
}

StatePair StatePair::zero(Dim d, RadialGrid g) {
  return StatePair(d, g, std::vector<double>(g.n, 0.0), std::vector<double>(g.n, 0.0));
}

StatePair StatePair::sample(const AnalyticPair& data, RadialGrid g) {
  std::vector<double> a(g.n), b(g.n);
  for (std::size_t j = 0; j < g.n; ++j) {
    double r = g.node(j);
    a[j] = data.u0(r);
    b[j] = data.u1(r);
  }
  std::optional<AnalyticPair> tail;
  if (!data.only_compact()) {
    tail = data;
  } else if (data.compact_end() > g.back()) {
    throw PreconditionError("compact data extends past the grid");
  }
  return StatePair(data.dim(), g, std::move(a), std::move(b), std::move(tail));
}

std::vector<double> radial_derivative(const std::vector<double>& u, double h) {
  const std::size_t n = u.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) {
    if (n == 2) d[0] = d[1] = (u[1] - u[0]) / h;
    return d;
  }
  for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (u[j + 1] - u[j - 1]) / (2.0 * h);
  d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
  d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
  return d;
}

void require_contained(const StatePair& s, const char* what) {
  if (s.tail) return;
  auto du = radial_derivative(s.u0, s.grid.h);
  double peak = 0.0;
  for (std::size_t j = 0; j < s.grid.n; ++j)
    peak = std::max(peak, std::pow(s.grid.node(j), s.dim.n() - 1.0) * (du[j] * du[j] + s.u1[j] * s.u1[j]));
  std::size_t last = s.grid.n - 1;
  double e_last = std::pow(s.grid.back(), s.dim.n() - 1.0) * (du[last] * du[last] + s.u1[last] * s.u1[last]);
  if (e_last > 1e-10 * peak)
    throw NumericalAbort(std::string(what) + ": state support reaches the last grid node (truncation)");
}

double exterior_inner(const StatePair& a, const StatePair& b, double R) {
  require(a.dim == b.dim, "dimension mismatch");
  require(a.grid.n == b.grid.n && a.grid.h == b.grid.h && a.grid.r0 == b.grid.r0, "states must share a grid");
  require_contained(a, "exterior_inner");
  require_contained(b, "exterior_inner");
  auto da = radial_derivative(a.u0, a.grid.h), db = radial_derivative(b.u0, b.grid.h);
  auto w = weights_r(a);
  std::vector<double> e(a.grid.n);
  for (std::size_t j = 0; j < a.grid.n; ++j) e[j] = (da[j] * db[j] + a.u1[j] * b.u1[j]) * w[j];
  double total = trapezoid_from(a.grid, e, R);
  if (a.tail && b.tail) total += inner(*a.tail, *b.tail, a.grid.back());
  return total;
}

double exterior_norm_sq(const StatePair& s, double R) { return exterior_inner(s, s, R); }

double nonlinear_energy(const StatePair& s) {
  require_contained(s, "nonlinear_energy");
  const double N = s.dim.n(), p = s.dim.sobolev_exponent();
  auto du = radial_derivative(s.u0, s.grid.h);
  auto w = weights_r(s);
  std::vector<double> e(s.grid.n);
  for (std::size_t j = 0; j < s.grid.n; ++j)
    e[j] = (0.5 * (du[j] * du[j] + s.u1[j] * s.u1[j]) - (N - 2.0) / (2.0 * N) * std::pow(std::abs(s.u0[j]), p)) * w[j];
  double total = trapezoid_from(s.grid, e, s.grid.r0);
  if (s.tail) {
    double b = s.grid.back();
    total += 0.5 * norm_sq(*s.tail, b) - (N - 2.0) / (2.0 * N) * potential_integral(*s.tail, b);
  }
  return total;
}

double radial_sobolev_bound(const StatePair& s, double R) {
  require(R >= s.grid.r0 && R <= s.grid.back(), "R outside grid coverage");
  const double k = (s.dim.n() - 2.0) / 2.0;
  double best = 0.0;
  std::size_t j0 = s.grid.first_at_or_above(R);
  if (j0 > 0 && s.grid.node(j0) > R) {
    double w = (s.grid.node(j0) - R) / s.grid.h;
    double uR = s.u0[j0] + (s.u0[j0 - 1] - s.u0[j0]) * w;
    best = std::pow(R, k) * std::abs(uR);
  }
  for (std::size_t j = j0; j < s.grid.n; ++j) best = std::max(best, std::pow(s.grid.node(j), k) * std::abs(s.u0[j]));
  return best;
}

StatePair rescale(const StatePair& s, double lambda) {
  require(lambda > 0.0, "scale must be > 0");
  const double N = s.dim.n();
  const double k0 = std::pow(lambda, -(N - 2.0) / 2.0), k1 = std::pow(lambda, -N / 2.0);
  std::vector<double> a(s.u0), b(s.u1);
  for (auto& x : a) x *= k0;
  for (auto& x : b) x *= k1;
  std::optional<AnalyticPair> tail;
  if (s.tail) tail = s.tail->rescaled(lambda);
  return StatePair(s.dim, RadialGrid(s.grid.r0 * lambda, s.grid.h * lambda, s.grid.n), std::move(a), std::move(b),
                   std::move(tail));
}

void write_csv(std::ostream& os, const StatePair& s) {
  os << "r,u0,u1\n";
  char buf[96];
  for (std::size_t j = 0; j < s.grid.n; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.grid.node(j), s.u0[j], s.u1[j]);
    os << buf;
  }
}

StatePair read_csv(std::istream& is, Dim d) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), "empty state CSV");
  require(line.rfind("r,u0,u1", 0) == 0, "state CSV must start with header r,u0,u1");
  std::vector<double> r, a, b;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    double x[3];
    char c1 = 0, c2 = 0;
    ls >> x[0] >> c1 >> x[1] >> c2 >> x[2];
    require(!ls.fail() && c1 == ',' && c2 == ',', "malformed state CSV at line " + std::to_string(lineno));
    r.push_back(x[0]);
    a.push_back(x[1]);
    b.push_back(x[2]);
  }
  require(r.size() >= 2, "state CSV needs at least 2 rows");
  double h = r[1] - r[0];
  for (std::size_t j = 1; j < r.size(); ++j)
    require(std::abs(r[j] - r[j - 1] - h) <= 1e-9 * std::max(1.0, std::abs(r[j])), "state CSV grid is not uniform");
  return StatePair(d, RadialGrid(r[0], h, r.size()), std::move(a), std::move(b));
}

}  // namespace nrw
