#pragma once

#include <cstddef>
#include <optional>

namespace nrw {

enum class Parity { odd, even };

class Dim {
 public:
  explicit Dim(int n);

  int n() const noexcept { return n_; }
  Parity parity() const noexcept { return n_ % 2 ? Parity::odd : Parity::even; }
  bool odd() const noexcept { return n_ % 2 == 1; }
  std::optional<int> m() const noexcept;
  int require_m() const;  // throws for even N

  // Exponent p in |u|^{p-1}u, and the Sobolev exponent 2N/(N-2).
  double power() const noexcept { return (n_ + 2.0) / (n_ - 2.0); }
  double sobolev_exponent() const noexcept { return 2.0 * n_ / (n_ - 2.0); }

  friend bool operator==(Dim, Dim) = default;

 private:
  int n_;
};

// Uniform grid r_j = r0 + j h, j = 0..n-1.
struct RadialGrid {
  double r0;
  double h;
  std::size_t n;

  RadialGrid(double r0, double h, std::size_t n);
  // Origin grid reaching at least r_max.
  static RadialGrid covering(double h, double r_max);

  double node(std::size_t j) const noexcept { return r0 + h * static_cast<double>(j); }
  double back() const noexcept { return node(n - 1); }
  bool at_origin() const noexcept { return r0 == 0.0; }
  // Smallest j with r_j >= r (clamped to n-1).
  std::size_t first_at_or_above(double r) const;
};

}  // namespace nrw
