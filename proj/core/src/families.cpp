#include "bsl/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bsl/errors.hpp"

namespace bsl {

bool DisplacementAtom::valid() const {
  if (entries.empty()) return false;
  double prev = -0.0;
  for (double e : entries) {
    if (!(e >= 0.0) || !std::isfinite(e)) return false;
    if (e < prev) return false;
    prev = e;
  }
  return true;
}

FamilyDescriptor FamilyDescriptor::bp(double r, double rho) {
  FamilyDescriptor f;
  f.tag = Family::bp;
  f.r = r;
  f.rho = rho;
  return f;
}

FamilyDescriptor FamilyDescriptor::ri(double alpha, double beta) {
  FamilyDescriptor f;
  f.tag = Family::ri;
  f.alpha = alpha;
  f.beta = beta;
  return f;
}

FamilyDescriptor FamilyDescriptor::mb(double alpha, double theta) {
  FamilyDescriptor f;
  f.tag = Family::mb;
  f.alpha = alpha;
  f.theta = theta;
  return f;
}

FamilyDescriptor FamilyDescriptor::mt(double alpha, double theta) {
  FamilyDescriptor f = mb(alpha, theta);
  f.tag = Family::mt;
  return f;
}

FamilyDescriptor FamilyDescriptor::custom_measure(CustomMeasure m) {
  FamilyDescriptor f;
  f.tag = Family::custom;
  f.custom = std::move(m);
  return f;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (ok() ? "valid" : "invalid")
     << " params=" << params_ok
     << " integrable=" << small_jumps_integrable
     << " branching=" << branches_present
     << " light=" << light
     << " light_sq=" << light_sq
     << " a0=" << a0;
  return os.str();
}

double truncation_floor(const CharacteristicCouple& couple) {
  const FamilyDescriptor& f = couple.family;
  switch (f.tag) {
    case Family::bp:
      return 0.0;  // split atom has both entries at zero
    case Family::ri:
      return std::pow(std::log(2.0), f.beta);  // second entry of the branch atom
    case Family::mb:
    case Family::mt:
      return 0.0;  // branch intensity charges every right neighborhood of 0
    case Family::custom: {
      double a0 = std::numeric_limits<double>::infinity();
      for (const BranchComponent& b : f.custom.branches) {
        if (b.atom.child_count() > 0) a0 = std::min(a0, b.atom.entries[1]);
      }
      return a0;
    }
  }
  return 0.0;
}

ValidationReport validate(const CharacteristicCouple& couple) {
  const FamilyDescriptor& f = couple.family;
  ValidationReport rep;
  if (!(couple.drift >= 0.0) || !std::isfinite(couple.drift)) {
    throw InvalidParams("drift must be a nonnegative real");
  }
  switch (f.tag) {
    case Family::bp:
      if (!(f.r > 0) || !(f.rho > 0)) throw InvalidParams("bp requires r > 0 and rho > 0");
      rep.params_ok = true;
      // finite measure with a single split atom: every condition is immediate
      rep.small_jumps_integrable = true;
      rep.branches_present = true;
      rep.light = true;
      rep.light_sq = true;
      break;
    case Family::ri:
      if (!(f.alpha > 0 && f.alpha < 1)) throw InvalidParams("ri requires alpha in (0,1)");
      if (!(f.beta > 0 && f.beta < 1)) throw InvalidParams("ri requires beta in (0,1)");
      rep.params_ok = true;
      // stable part integrates (1 ^ x); branch part is one finite-rate atom
      // whose below-a card count is finite for every a
      rep.small_jumps_integrable = true;
      rep.branches_present = true;
      rep.light = true;
      rep.light_sq = true;
      break;
    case Family::mb:
    case Family::mt:
      if (!(f.alpha > 0 && f.alpha < 1)) throw InvalidParams("mb/mt requires alpha in (0,1)");
      if (!(f.theta > 1)) throw InvalidParams("mb/mt requires theta > 1");
      rep.params_ok = true;
      // below-a child count integrates to int_0^a e^{z^theta} dz < inf
      rep.small_jumps_integrable = true;
      rep.branches_present = true;
      rep.light = true;
      rep.light_sq = true;
      break;
    case Family::custom: {
      bool any_charge = false;
      bool any_branch = false;
      for (const JumpComponent& j : f.custom.jumps) {
        if (!(j.rate > 0) || !std::isfinite(j.rate)) throw InvalidParams("jump rates must be positive finite");
        if (!(j.size > 0) || !std::isfinite(j.size)) throw InvalidParams("jump sizes must be positive finite");
        any_charge = true;
      }
      for (const BranchComponent& b : f.custom.branches) {
        if (!(b.rate > 0) || !std::isfinite(b.rate)) throw InvalidParams("atom rates must be positive finite");
        if (!b.atom.valid()) throw InvalidParams("atom entries must be finite, nonnegative, nondecreasing");
        if (b.atom.is_noop()) throw NoOpMeasure("custom atom equals the do-nothing transition");
        any_charge = true;
        if (b.atom.child_count() > 0) any_branch = true;
      }
      if (!any_charge) throw NoOpMeasure("custom measure charges nothing");
      rep.params_ok = true;
      rep.small_jumps_integrable = true;  // finite total rate
      rep.branches_present = any_branch;
      rep.light = true;                   // finitely many finite atoms
      rep.light_sq = true;
      break;
    }
  }
  rep.a0 = truncation_floor(couple);
  return rep;
}

std::optional<DisplacementAtom> truncate_atom(const DisplacementAtom& atom, double a) {
  DisplacementAtom out;
  out.entries.push_back(atom.continuing_jump());
  for (std::size_t i = 1; i < atom.entries.size(); ++i) {
    if (atom.entries[i] < a) out.entries.push_back(atom.entries[i]);
  }
  if (out.is_noop()) return std::nullopt;
  return out;
}

}  // namespace bsl
