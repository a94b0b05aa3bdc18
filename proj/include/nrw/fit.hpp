#pragma once

#include <vector>

namespace nrw {

// Least-squares fit of log(y) = intercept + slope * log(x).
struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log residuals
  int points = 0;
};

ExponentFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Coefficients c_0..c_deg of the least-squares polynomial in x.
std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int deg);

}  // namespace nrw
