#include "nrw/fit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "nrw/error.hpp"

namespace nrw {

ExponentFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "fit needs matching arrays");
  require(x.size() >= 3, "an exponent fit needs at least 3 points");
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "log-log fit needs positive data");
    A(i, 0) = 1.0;
    A(i, 1) = std::log(x[i]);
    b(i) = std::log(y[i]);
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  ExponentFit f;
  f.intercept = c(0);
  f.slope = c(1);
  f.residual = std::sqrt((A * c - b).squaredNorm() / n);
  f.points = n;
  return f;
}

std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int deg) {
  require(x.size() == y.size(), "fit needs matching arrays");
  require(deg >= 0 && static_cast<int>(x.size()) > deg, "not enough points for the polynomial degree");
  const int n = static_cast<int>(x.size());
  // Scale x to [0, 1] for conditioning, then undo.
  double s = 0.0;
  for (double v : x) s = std::max(s, std::abs(v));
  if (s == 0.0) s = 1.0;
  Eigen::MatrixXd A(n, deg + 1);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int k = 0; k <= deg; ++k) {
      A(i, k) = p;
      p *= x[i] / s;
    }
    b(i) = y[i];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  std::vector<double> out(deg + 1);
  for (int k = 0; k <= deg; ++k) out[k] = c(k) / std::pow(s, k);
  return out;
}

}  // namespace nrw
