#include "nrw/dim.hpp"

#include <cmath>
#include <string>

#include "nrw/error.hpp"

namespace nrw {

Dim::Dim(int n) : n_(n) {
  require(n >= 3, "dimension N must be >= 3, got " + std::to_string(n));
}

std::optional<int> Dim::m() const noexcept {
  if (odd()) return (n_ - 1) / 2;
  return std::nullopt;
}

int Dim::require_m() const {
  require(odd(), "P(R) is only defined for odd N, got N=" + std::to_string(n_));
  return (n_ - 1) / 2;
}

RadialGrid::RadialGrid(double r0_, double h_, std::size_t n_) : r0(r0_), h(h_), n(n_) {
  require(std::isfinite(r0) && r0 >= 0.0, "grid inner radius must be >= 0");
  require(std::isfinite(h) && h > 0.0, "grid spacing must be > 0");
  require(n >= 2, "grid needs at least 2 nodes");
}

RadialGrid RadialGrid::covering(double h, double r_max) {
  require(h > 0.0 && r_max > 0.0, "grid spacing and r_max must be > 0");
  auto n = static_cast<std::size_t>(std::ceil(r_max / h - 1e-9)) + 1;
  return RadialGrid(0.0, h, n);
}

std::size_t RadialGrid::first_at_or_above(double r) const {
  if (r <= r0) return 0;
  double x = (r - r0) / h;
  auto j = static_cast<std::size_t>(std::ceil(x - 1e-12));
  return j >= n ? n - 1 : j;
}

}  // namespace nrw
