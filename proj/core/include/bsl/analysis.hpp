#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bsl/engine.hpp"
#include "bsl/families.hpp"
#include "bsl/random.hpp"
#include "bsl/trace.hpp"

namespace bsl {

enum class Verdict { infinite_limit, finite_limit, indeterminate };

struct ClassificationVerdict {
  Verdict verdict = Verdict::indeterminate;
  double limit = 0;  // reconciled exponent limit, +inf allowed
  double tol = 0;
};

/// Classify whether the eventual minimum is infinite (limit > tol), finite
/// (limit < -tol) or indeterminate (|limit| <= tol; both outcomes occur in
/// that regime, so no guess is made).
ClassificationVerdict classify(const CharacteristicCouple& couple, double tol = 1e-6);

/// Exact tail law of the eventual minimum for the branching Poisson family
/// with step rate r below split rate rho: returns P(min >= k) for k=0..k_max.
std::vector<double> bp_min_tail(double r, double rho, int k_max);

/// Empirical law of the eventual bp minimum from the site-by-site level
/// process: each site runs a birth-death population (split +1 at rate rho,
/// emigrate right -1 at rate r); a site whose population reaches the
/// threshold survives with the exact probability 1-(r/rho)^n, and otherwise
/// continues under the extinction-conditioned dynamics (rates swapped).
struct LevelOracleResult {
  std::vector<std::uint64_t> histogram;  // histogram[k] = replicas with minimum k
  std::uint64_t replicas = 0;            // completed replicas
  std::uint64_t aborted = 0;             // hit the per-replica event guard
  std::vector<double> tail(int k_max) const;
};
LevelOracleResult bp_min_tail_mc(double r, double rho, std::uint64_t replicas,
                                 int survival_threshold, RandomStream stream,
                                 std::uint64_t event_guard = 50'000'000);

/// Pointwise medians of the leftmost trace across independent replicas.
/// Replica i reseeds the template config through the stream path [i].
struct MedianTrace {
  std::vector<double> times;
  std::vector<double> medians;
  std::vector<std::size_t> support;  // replicas valid at each time
  std::size_t replicas = 0;
  double invalid_fraction = 0;  // replicas not valid through the last time
};
MedianTrace median_leftmost_trace(const CharacteristicCouple& couple, std::size_t replicas,
                                  const SimConfig& config_template);

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
  double t_lo = 0, t_hi = 0;
  std::size_t replicas = 0;
  double invalid_fraction = 0;
  std::vector<double> log_t;       // fitted abscissae
  std::vector<double> log_median;  // fitted ordinates
};

/// Slope of log median-minimum against log time over the dyadic window
/// [2^k_lo, 2^k_hi]. Throws InsufficientData when more than half the replicas
/// fail to cover the window or fewer than three fit points remain.
ExponentFit estimate_growth_exponent(const CharacteristicCouple& couple, std::size_t replicas,
                                     int k_lo, int k_hi, SimConfig config_template);

/// Predicted sub-linear growth exponent for the stable-motion families.
double predicted_growth_exponent(const FamilyDescriptor& family);

/// Almost-sure linear speed of the minimum for measures with exponential
/// moments (bp, custom): sup over lambda of kappa(lambda)/lambda, floored at
/// zero. Unsupported for the stable-motion families.
double linear_speed(const CharacteristicCouple& couple);

/// Grid upper estimate of the linear growth bound:
/// drift + min over a of max over lambda of (phi - drift*lambda - M_a)/lambda.
double linear_speed_upper_bound(const CharacteristicCouple& couple,
                                std::span<const double> a_grid,
                                std::span<const double> lambda_grid);

/// Chernoff upper bound for log P(min(t) < m t^gamma) at the canonical tilt
/// lambda(t) = c1 (m t^gamma)^sigma; diagnostic for the lower-deviation rate.
double lower_deviation_exponent(const CharacteristicCouple& couple, double m, double t,
                                double sigma, double c1);

}  // namespace bsl
