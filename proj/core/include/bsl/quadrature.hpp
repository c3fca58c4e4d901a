#pragma once

#include <functional>

namespace bsl {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_depth = 60;
};

/// Adaptive Simpson integration of f over [lo, hi].
/// Throws QuadratureFailure if the recursion cannot reach tolerance.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureOptions& opt = {});

/// Maximize a unimodal function on [lo, hi] by golden-section search.
/// Returns the argmax; the interval is refined below x_tol.
double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double x_tol = 1e-6);

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;  // standard error of the slope
};

/// Ordinary least squares y ~ a + b x. Needs at least three points for a
/// finite standard error.
LineFit fit_line(const double* x, const double* y, std::size_t n);

}  // namespace bsl
