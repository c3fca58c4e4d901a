#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

// Shared statistical helpers for the test suites. Everything here is
// independent of the library's own numeric paths: integration uses composite
// Gauss-Legendre, not the adaptive Simpson the implementation relies on.
namespace testsup {

struct MeanSE {
  double mean = 0;
  double se = 0;
};

inline MeanSE mean_se(const std::vector<double>& x) {
  MeanSE out;
  if (x.empty()) return out;
  double s = 0;
  for (double v : x) s += v;
  out.mean = s / static_cast<double>(x.size());
  double ss = 0;
  for (double v : x) ss += (v - out.mean) * (v - out.mean);
  if (x.size() > 1) {
    out.se = std::sqrt(ss / (static_cast<double>(x.size() - 1) * static_cast<double>(x.size())));
  }
  return out;
}

// Composite 5-point Gauss-Legendre.
inline double gauss_integrate(const std::function<double(double)>& f, double lo, double hi,
                              int panels = 256) {
  static const double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                  0.5384693101056831, 0.9061798459386640};
  static const double weights[5] = {0.2369268850561891, 0.4786286704993665,
                                    0.5688888888888889, 0.4786286704993665,
                                    0.2369268850561891};
  double total = 0;
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    const double mid = a + 0.5 * h;
    double acc = 0;
    for (int i = 0; i < 5; ++i) acc += weights[i] * f(mid + 0.5 * h * nodes[i]);
    total += acc * 0.5 * h;
  }
  return total;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// Critical value at level 0.01: c * sqrt((n+m)/(n m)), c(0.01) = 1.628.
inline double ks_two_sample_critical_01(std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return 1.628 * std::sqrt((nn + mm) / (nn * mm));
}

// One-sample KS statistic against a cdf.
inline double ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = cdf(x[i]);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - c));
    d = std::max(d, std::fabs(c - static_cast<double>(i) / n));
  }
  return d;
}

inline double ks_one_sample_critical_01(std::size_t n) {
  return 1.628 / std::sqrt(static_cast<double>(n));
}

}  // namespace testsup
