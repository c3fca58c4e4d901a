#include "bsl/random.hpp"

#include <cmath>

namespace bsl {

double RandomStream::next_exponential(double rate) {
  return -std::log(next_open()) / rate;
}

std::uint64_t RandomStream::next_poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 10.0) {
    // multiplication method
    const double limit = std::exp(-mean);
    double prod = 1.0;
    std::uint64_t k = 0;
    do {
      prod *= next_open();
      ++k;
    } while (prod > limit);
    return k - 1;
  }
  // PTRS transformed rejection (Hormann), exact for large means.
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = next_open() - 0.5;
    const double v = next_open();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * loglam - mean - std::lgamma(kf + 1.0)) {
      return static_cast<std::uint64_t>(kf);
    }
  }
}

}  // namespace bsl
