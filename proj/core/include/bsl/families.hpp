#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bsl {

/// Built-in jump-branching measure families.
///
/// bp     branching Poisson: step right at one rate, split in two at another.
/// ri     stable motion, rate-one branchings into infinitely many children
///        at displacements (log k)^beta, k >= 2.
/// mb     stable motion, binary branchings at intensity e^{z^theta} dz.
/// mt     as mb but each branching creates two children at the same spot.
/// custom finite list of weighted displacement atoms plus an optional
///        finite-activity jump component for the non-branching motion.
enum class Family { bp, ri, mb, mt, custom };

/// One branching transition, relative to the pre-branch parent position.
/// entries are nondecreasing and nonnegative; entries[0] is the jump of the
/// continuing particle, the rest are child displacements.
struct DisplacementAtom {
  std::vector<double> entries;

  DisplacementAtom() = default;
  explicit DisplacementAtom(std::vector<double> e) : entries(std::move(e)) {}

  double continuing_jump() const { return entries.empty() ? 0.0 : entries.front(); }
  std::size_t child_count() const { return entries.empty() ? 0 : entries.size() - 1; }

  /// True for the do-nothing transition (0, no children).
  bool is_noop() const {
    return entries.size() == 1 && entries.front() == 0.0;
  }

  bool valid() const;

  friend bool operator==(const DisplacementAtom&, const DisplacementAtom&) = default;
};

struct JumpComponent {
  double rate = 0;
  double size = 0;
};

struct BranchComponent {
  double rate = 0;
  DisplacementAtom atom;
};

struct CustomMeasure {
  std::vector<JumpComponent> jumps;      // pure motion jumps, finite activity
  std::vector<BranchComponent> branches; // weighted displacement atoms
};

struct FamilyDescriptor {
  Family tag = Family::bp;
  double r = 1, rho = 1;    // bp: step rate, split rate
  double alpha = 0.5;       // stable index of the motion (ri/mb/mt)
  double beta = 0.5;        // ri: displacement scale exponent
  double theta = 2;         // mb/mt: branch intensity exponent
  CustomMeasure custom;

  static FamilyDescriptor bp(double r, double rho);
  static FamilyDescriptor ri(double alpha, double beta);
  static FamilyDescriptor mb(double alpha, double theta);
  static FamilyDescriptor mt(double alpha, double theta);
  static FamilyDescriptor custom_measure(CustomMeasure m);
};

/// Drift plus jump-branching measure; the full model parameterization.
struct CharacteristicCouple {
  double drift = 0;
  FamilyDescriptor family;
};

struct ValidationReport {
  bool params_ok = false;
  bool small_jumps_integrable = false;  // integral of (1 ^ x_1) finite
  bool branches_present = false;        // positive mass on genuine branchings
  bool light = false;                   // first cardinality condition
  bool light_sq = false;                // squared cardinality condition
  double a0 = 0;                        // smallest truncation with branch mass

  bool ok() const {
    return params_ok && small_jumps_integrable && branches_present && light && light_sq;
  }
  std::string summary() const;
};

/// Validate parameter domains and measure-level conditions.
/// Throws InvalidParams for out-of-domain parameters and NoOpMeasure when a
/// custom measure only charges the do-nothing transition.
ValidationReport validate(const CharacteristicCouple& couple);

/// a_0: truncations strictly above this level carry positive branch mass.
double truncation_floor(const CharacteristicCouple& couple);

/// Drop child entries at or above a; the continuing jump is kept.
/// Returns nullopt when the result would be the do-nothing transition.
std::optional<DisplacementAtom> truncate_atom(const DisplacementAtom& atom, double a);

}  // namespace bsl
