#include <cmath>
#include <vector>

#include "bsl/random.hpp"
#include "doctest.h"
#include "support.hpp"

using bsl::RandomStream;

TEST_CASE("identical seed and path reproduce the draw sequence bitwise") {
  const std::uint64_t path[] = {3, 0, 17};
  RandomStream a = RandomStream::from_path(42, path);
  RandomStream b = RandomStream::from_path(42, path);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("distinct paths decorrelate") {
  RandomStream base(7);
  const std::size_t n = 100000;
  RandomStream x = base.child(1);
  RandomStream y = base.child(2);
  double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = x.next_double();
    const double v = y.next_double();
    sx += u;
    sy += v;
    sxy += u * v;
    sxx += u * u;
    syy += v * v;
  }
  const double nn = static_cast<double>(n);
  const double corr = (sxy - sx * sy / nn) /
                      std::sqrt((sxx - sx * sx / nn) * (syy - sy * sy / nn));
  CHECK(std::fabs(corr) < 4.0 / std::sqrt(nn));
}

TEST_CASE("child derivation does not disturb the parent") {
  RandomStream a(9), b(9);
  (void)a.child(5);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform doubles live in the half-open unit interval") {
  RandomStream s(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = s.next_open();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("exponential draws match their mean") {
  RandomStream s(11);
  std::vector<double> draws;
  draws.reserve(100000);
  for (int i = 0; i < 100000; ++i) draws.push_back(s.next_exponential(2.5));
  const auto ms = testsup::mean_se(draws);
  CHECK(std::fabs(ms.mean - 0.4) < 3.0 * ms.se);
}

TEST_CASE("poisson draws match their mean across both regimes") {
  RandomStream s(13);
  for (double mean : {0.3, 4.0, 25.0, 400.0}) {
    std::vector<double> draws;
    draws.reserve(40000);
    for (int i = 0; i < 40000; ++i) {
      draws.push_back(static_cast<double>(s.next_poisson(mean)));
    }
    const auto ms = testsup::mean_se(draws);
    CHECK(std::fabs(ms.mean - mean) < 4.0 * ms.se);
    // variance of a Poisson equals its mean
    double ss = 0;
    for (double d : draws) ss += (d - ms.mean) * (d - ms.mean);
    const double var = ss / (draws.size() - 1);
    CHECK(var == doctest::Approx(mean).epsilon(0.1));
  }
}
