#include "bsl/sampling.hpp"

#include <cmath>
#include <numbers>

#include "bsl/errors.hpp"
#include "bsl/measures.hpp"

namespace bsl {

double stable_increment(double alpha, double t, RandomStream& rng) {
  if (!(alpha > 0 && alpha < 1)) throw InvalidParams("stable index must lie in (0,1)");
  if (!(t > 0)) throw InvalidParams("duration must be positive");
  const double u = rng.next_open() * std::numbers::pi;
  const double e = rng.next_exponential(1.0);
  // log of Zolotarev's function at u
  const double log_b = (alpha * std::log(std::sin(alpha * u)) +
                        (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * u)) -
                        std::log(std::sin(u))) /
                       (1.0 - alpha);
  const double unit = std::exp((1.0 - alpha) / alpha * (log_b - std::log(e)));
  return std::pow(t, 1.0 / alpha) * unit;
}

double trajectory_increment(const CharacteristicCouple& couple, double a,
                            double duration, RandomStream& rng) {
  if (!(duration > 0)) return 0.0;
  const FamilyDescriptor& f = couple.family;
  double inc = couple.drift * duration;
  switch (f.tag) {
    case Family::bp:
      inc += static_cast<double>(rng.next_poisson(f.r * duration));
      break;
    case Family::ri:
    case Family::mb:
    case Family::mt:
      inc += stable_increment(f.alpha, duration, rng);
      break;
    case Family::custom:
      for (const JumpComponent& j : f.custom.jumps) {
        inc += j.size * static_cast<double>(rng.next_poisson(j.rate * duration));
      }
      // atoms whose every child truncates away act as pure jumps
      for (const BranchComponent& b : f.custom.branches) {
        const bool branches_below = b.atom.child_count() > 0 && b.atom.entries[1] < a;
        if (!branches_below && b.atom.continuing_jump() > 0) {
          inc += b.atom.continuing_jump() *
                 static_cast<double>(rng.next_poisson(b.rate * duration));
        }
      }
      break;
  }
  return inc;
}

namespace {

// Z with density proportional to e^{z^theta} on [0, a): exact rejection from
// the exponential envelope e^{cz} with c = a^{theta-1}; acceptance stays
// above 1/theta uniformly in a.
double sample_mb_displacement(double theta, double a, RandomStream& rng) {
  const double c = std::pow(a, theta - 1.0);
  const double ca = c * a;
  for (;;) {
    const double u = rng.next_open();
    // inverse CDF of the envelope, written against underflow of e^{-ca}
    const double z = a + std::log(u + (1.0 - u) * std::exp(-ca)) / c;
    const double log_accept = std::pow(z, theta) - c * z;  // <= 0 on [0, a]
    if (std::log(rng.next_open()) < log_accept) return z;
  }
}

}  // namespace

namespace detail {

// Precondition (checked by callers): positive branch mass below a.
DisplacementAtom sample_atom(const CharacteristicCouple& couple, double a,
                             RandomStream& rng) {
  const FamilyDescriptor& f = couple.family;
  DisplacementAtom atom;
  switch (f.tag) {
    case Family::bp:
      atom.entries = {0.0, 0.0};
      break;
    case Family::ri: {
      // deterministic: displacements (log k)^beta while below a
      if (std::exp(std::pow(a, 1.0 / f.beta)) > 4.0e6) {
        throw InvalidParams("truncation implies more children per branching than can be materialized");
      }
      atom.entries.push_back(0.0);
      for (std::uint64_t k = 2;; ++k) {
        const double z = std::pow(std::log(static_cast<double>(k)), f.beta);
        if (!(z < a)) break;
        atom.entries.push_back(z);
      }
      break;
    }
    case Family::mb: {
      const double z = sample_mb_displacement(f.theta, a, rng);
      atom.entries = {0.0, z};
      break;
    }
    case Family::mt: {
      const double z = sample_mb_displacement(f.theta, a, rng);
      atom.entries = {0.0, z, z};
      break;
    }
    case Family::custom: {
      double total = 0.0;
      for (const BranchComponent& b : f.custom.branches) {
        if (b.atom.child_count() > 0 && b.atom.entries[1] < a) total += b.rate;
      }
      double pick = rng.next_open() * total;
      const BranchComponent* chosen = nullptr;
      for (const BranchComponent& b : f.custom.branches) {
        if (b.atom.child_count() > 0 && b.atom.entries[1] < a) {
          chosen = &b;
          pick -= b.rate;
          if (pick <= 0) break;
        }
      }
      auto truncated = truncate_atom(chosen->atom, a);
      atom = *truncated;  // the second entry is below a, never a no-op
      break;
    }
  }
  return atom;
}

}  // namespace detail

DisplacementAtom sample_branch_atom(const CharacteristicCouple& couple, double a,
                                    RandomStream& rng) {
  if (!(branch_rate(couple, a) > 0)) {
    throw TruncationTooSmall("no branch mass below the requested truncation");
  }
  return detail::sample_atom(couple, a, rng);
}

}  // namespace bsl
