#pragma once

#include "bsl/families.hpp"
#include "bsl/random.hpp"

namespace bsl {

/// One draw of a one-sided alpha-stable subordinator increment over time t,
/// normalized so that E[e^{-lambda X(1)}] = e^{-lambda^alpha}.
/// Uses the exact uniform-exponential representation; always positive.
double stable_increment(double alpha, double t, RandomStream& rng);

/// One exact draw of the canonical-trajectory increment over a duration,
/// between branch events, at truncation level a: drift plus the stable part
/// (ri/mb/mt) or the finite-activity compound-Poisson part (bp/custom; for
/// custom measures, atoms whose children all truncate away contribute their
/// continuing jump as plain motion).
/// A nonpositive duration consumes no randomness and returns zero.
double trajectory_increment(const CharacteristicCouple& couple, double a,
                            double duration, RandomStream& rng);

/// Draw one branching transition from the truncated measure restricted to
/// genuine branchings. Throws TruncationTooSmall when no branch mass exists
/// below a.
DisplacementAtom sample_branch_atom(const CharacteristicCouple& couple, double a,
                                    RandomStream& rng);

namespace detail {
// As sample_branch_atom, without the branch-mass precondition check.
DisplacementAtom sample_atom(const CharacteristicCouple& couple, double a, RandomStream& rng);
}  // namespace detail

}  // namespace bsl
