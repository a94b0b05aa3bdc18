#include "nrw/quad.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "nrw/error.hpp"

namespace nrw::quad {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  double v = gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol, &err);
  if (!std::isfinite(v)) throw NumericalAbort("quadrature produced a non-finite value");
  return v;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels) {
  using boost::math::quadrature::gauss;
  require(panels >= 1, "need at least one panel");
  double w = (b - a) / panels, sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * w;
    sum += gauss<double, 30>::integrate(f, lo, lo + w);
  }
  return sum;
}

}  // namespace nrw::quad
