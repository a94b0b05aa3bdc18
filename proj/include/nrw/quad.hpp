#pragma once

#include <functional>

namespace nrw::quad {

// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13);

// Composite 30-point Gauss-Legendre on [a, b] split into equal panels.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels = 8);

}  // namespace nrw::quad
