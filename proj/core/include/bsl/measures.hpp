#pragma once

#include <span>
#include <vector>

#include "bsl/families.hpp"

namespace bsl {

/// Laplace exponent of the canonical trajectory:
/// drift * lambda + integral of (1 - e^{-lambda x_1}).
double trajectory_exponent(const CharacteristicCouple& couple, double lambda);

/// First branching moment at truncation a: the integral of
/// sum_{k>=2} e^{-lambda x_k} over child entries below a.
double branch_moment(const CharacteristicCouple& couple, double a, double lambda);

/// Second branching moment (the square of the inner sum under the measure).
double branch_moment2(const CharacteristicCouple& couple, double a, double lambda);

/// Truncated Laplace exponent: trajectory_exponent - branch_moment.
/// Requires a above the truncation floor.
double truncated_exponent(const CharacteristicCouple& couple, double a, double lambda);

/// Independent single-pass evaluation of the truncated exponent, available
/// for custom measures (and bp, where it is closed form). Used to cross-check
/// the difference path.
double truncated_exponent_direct(const CharacteristicCouple& couple, double a, double lambda);

/// Total rate of genuine branch events at truncation a.
double branch_rate(const CharacteristicCouple& couple, double a);

/// Mean number of children born per unit time at displacements below a.
double offspring_mass(const CharacteristicCouple& couple, double a);

struct ExponentLimit {
  double value = 0;       // reconciled limit, +inf allowed
  double structural = 0;  // per-family closed-form evaluation
  double swept = 0;       // monotone lambda-sweep estimate (inf if diverged)
  bool diverged = false;
};

/// Large-lambda limit of the truncated exponent, evaluated both structurally
/// and by a monotone lambda sweep. Throws Inconsistent if the two routes
/// disagree beyond tolerance.
ExponentLimit exponent_limit(const CharacteristicCouple& couple);

/// Tabulated exponent calculus on a lambda grid at one truncation level.
struct LaplaceTable {
  double a = 0;
  std::vector<double> lambda;
  std::vector<double> phi;       // trajectory exponent
  std::vector<double> moment;    // branch moment
  std::vector<double> kappa;     // truncated exponent
  double limit_value = 0;
};
LaplaceTable laplace_table(const CharacteristicCouple& couple, double a,
                           std::span<const double> lambdas);

struct AuditRow {
  double a = 0;
  double log_mass_ratio = 0;    // log(mu[0,a)) / a^{1+sigma}
  double moment_high = 0;       // M_a(c1 a^sigma), should stay bounded
  double log_moment_low = 0;    // log(M_a(c2 a^sigma)) / a^{1+sigma}, should stay positive
  double variance_ratio = 0;    // M_{2,a}(c2 a^sigma) / M_a(c2 a^sigma)^2
};

struct AuditReport {
  double sigma = 0, c1 = 0, c2 = 0;
  std::vector<AuditRow> rows;
  // grid-level verdicts; "consistent over the tested grid", never a proof
  bool mass_growth_bounded = false;
  bool mass_growth_positive = false;
  bool moment_high_bounded = false;
  bool moment_low_positive = false;
  bool variance_bounded = false;
  bool consistent() const {
    return mass_growth_bounded && mass_growth_positive && moment_high_bounded &&
           moment_low_positive && variance_bounded;
  }
};

/// Tabulate the growth-regularity diagnostics over an increasing grid of
/// truncation levels. Requires c1 > c2 > 0.
AuditReport audit_regularity(const CharacteristicCouple& couple, double sigma,
                             double c1, double c2, std::span<const double> a_grid);

struct EnvelopeRow {
  double a = 0;
  double moment = 0;        // M_a(ell a^{theta-1})
  double upper = 0;         // a^{1-theta} e^{a^theta}
  double lower = 0;         // NaN when ell >= 1/3
};

struct EnvelopeReport {
  double theta = 0, ell = 0, delta = 0;
  std::vector<EnvelopeRow> rows;
  double worst_upper_margin = 0;  // min over grid of (upper - moment)
  double worst_lower_margin = 0;  // min over grid of (moment - lower)
};

/// Check the analytic envelopes of the mb branching moment along a grid.
/// Throws BoundViolation if an envelope fails beyond quadrature tolerance.
EnvelopeReport mb_envelope_check(double theta, double ell,
                                 std::span<const double> a_grid);

}  // namespace bsl
