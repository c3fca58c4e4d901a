#include "bsl/quadrature.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "bsl/errors.hpp"

namespace bsl {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double fa, double fm, double fb, double whole, double tol,
             int depth, const QuadratureOptions& opt) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol || (b - a) < 1e-14 * (std::fabs(a) + 1.0)) {
    return left + right + delta / 15.0;
  }
  if (depth >= opt.max_depth) {
    throw QuadratureFailure("adaptive quadrature did not converge");
  }
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, opt) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, opt);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureOptions& opt) {
  if (!(hi > lo)) return 0.0;
  const double fa = f(lo);
  const double fb = f(hi);
  const double fm = f(0.5 * (lo + hi));
  const double whole = simpson(fa, fm, fb, hi - lo);
  const double tol =
      std::max(opt.abs_tol, opt.rel_tol * std::fabs(whole));
  if (!std::isfinite(whole)) {
    throw QuadratureFailure("non-finite integrand");
  }
  return adapt(f, lo, hi, fa, fm, fb, whole, tol, 0, opt);
}

double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double x_tol) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

LineFit fit_line(const double* x, const double* y, std::size_t n) {
  LineFit out;
  if (n < 2) return out;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (out.intercept + out.slope * x[i]);
      ss += r * r;
    }
    out.slope_se = std::sqrt(ss / (static_cast<double>(n - 2) * sxx));
  } else {
    out.slope_se = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace bsl
