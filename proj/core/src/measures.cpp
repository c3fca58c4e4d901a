#include "bsl/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "bsl/errors.hpp"
#include "bsl/quadrature.hpp"

namespace bsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Largest k-range summed term by term; beyond this the series is evaluated
// through its counting-function integral (absolute error below one).
constexpr double kRiExactLimit = 4.0e6;

double ri_cutoff(double beta, double a) {
  return std::exp(std::pow(a, 1.0 / beta));  // children have k < cutoff
}

double ri_count(double beta, double a) {
  if (!(a > 0)) return 0.0;
  const double cutoff = ri_cutoff(beta, a);
  if (cutoff <= 2.0) return 0.0;
  if (cutoff < 9.0e18) return std::floor(cutoff) - 1.0;
  return cutoff - 1.0;  // beyond exact integer range
}

double ri_moment(double beta, double a, double lambda) {
  if (!(a > 0)) return 0.0;
  const double cutoff = ri_cutoff(beta, a);
  if (cutoff <= 2.0) return 0.0;
  if (cutoff <= kRiExactLimit) {
    double sum = 0.0;
    for (std::uint64_t k = 2;; ++k) {
      const double z = std::pow(std::log(static_cast<double>(k)), beta);
      if (!(z < a)) break;
      sum += std::exp(-lambda * z);
    }
    return sum;
  }
  // Counting-function form: M = e^{-la} n(a) + l int_{z0}^{a} e^{-ls} n(s) ds,
  // with the integer count n(s) smoothed to e^{s^{1/beta}} - 3/2 (|err| <= 1/2,
  // so the total absolute error stays below one).
  const double z0 = std::pow(std::log(2.0), beta);
  const double n_a = ri_count(beta, a);
  double tail = std::exp(-lambda * a) * n_a;
  if (lambda > 0.0) {
    const double inv_beta = 1.0 / beta;
    tail += lambda * integrate(
                         [&](double s) {
                           const double n = std::exp(std::pow(s, inv_beta)) - 1.5;
                           return n > 0.0 ? std::exp(-lambda * s) * n : 0.0;
                         },
                         z0, a, {1e-9, 1e-9, 60});
  }
  return tail;
}

double mb_moment(double theta, double a, double lambda) {
  if (!(a > 0)) return 0.0;
  return integrate([&](double z) { return std::exp(std::pow(z, theta) - lambda * z); },
                   0.0, a);
}

double mb_mass(double theta, double a) {
  if (!(a > 0)) return 0.0;
  return integrate([&](double z) { return std::exp(std::pow(z, theta)); }, 0.0, a);
}

double custom_inner_sum(const DisplacementAtom& atom, double a, double lambda) {
  double s = 0.0;
  for (std::size_t i = 1; i < atom.entries.size(); ++i) {
    if (atom.entries[i] < a) s += std::exp(-lambda * atom.entries[i]);
  }
  return s;
}

}  // namespace

double trajectory_exponent(const CharacteristicCouple& couple, double lambda) {
  if (!(lambda >= 0)) throw InvalidParams("lambda must be nonnegative");
  const FamilyDescriptor& f = couple.family;
  double jumps = 0.0;
  switch (f.tag) {
    case Family::bp:
      jumps = f.r * (1.0 - std::exp(-lambda));
      break;
    case Family::ri:
    case Family::mb:
    case Family::mt:
      jumps = std::pow(lambda, f.alpha);  // normalized stable component
      break;
    case Family::custom:
      for (const JumpComponent& j : f.custom.jumps) {
        jumps += j.rate * (1.0 - std::exp(-lambda * j.size));
      }
      for (const BranchComponent& b : f.custom.branches) {
        jumps += b.rate * (1.0 - std::exp(-lambda * b.atom.continuing_jump()));
      }
      break;
  }
  return couple.drift * lambda + jumps;
}

double branch_moment(const CharacteristicCouple& couple, double a, double lambda) {
  if (!(a > 0)) throw InvalidParams("truncation must be positive");
  if (!(lambda >= 0)) throw InvalidParams("lambda must be nonnegative");
  const FamilyDescriptor& f = couple.family;
  switch (f.tag) {
    case Family::bp:
      return f.rho;  // the split atom's child sits at zero
    case Family::ri:
      return ri_moment(f.beta, a, lambda);
    case Family::mb:
      return mb_moment(f.theta, a, lambda);
    case Family::mt:
      return 2.0 * mb_moment(f.theta, a, lambda);
    case Family::custom: {
      double s = 0.0;
      for (const BranchComponent& b : f.custom.branches) {
        s += b.rate * custom_inner_sum(b.atom, a, lambda);
      }
      return s;
    }
  }
  return 0.0;
}

double branch_moment2(const CharacteristicCouple& couple, double a, double lambda) {
  if (!(a > 0)) throw InvalidParams("truncation must be positive");
  const FamilyDescriptor& f = couple.family;
  switch (f.tag) {
    case Family::bp:
    case Family::mb:
      // binary branchings: second moment equals the first at doubled lambda
      return branch_moment(couple, a, 2.0 * lambda);
    case Family::mt:
      return 4.0 * mb_moment(f.theta, a, 2.0 * lambda);
    case Family::ri:
      // a single atom carries all children
      return std::pow(ri_moment(f.beta, a, lambda), 2);
    case Family::custom: {
      double s = 0.0;
      for (const BranchComponent& b : f.custom.branches) {
        s += b.rate * std::pow(custom_inner_sum(b.atom, a, lambda), 2);
      }
      return s;
    }
  }
  return 0.0;
}

double truncated_exponent(const CharacteristicCouple& couple, double a, double lambda) {
  if (!(a > truncation_floor(couple))) {
    throw TruncationTooSmall("truncation level carries no branch mass");
  }
  return trajectory_exponent(couple, lambda) - branch_moment(couple, a, lambda);
}

double truncated_exponent_direct(const CharacteristicCouple& couple, double a, double lambda) {
  const FamilyDescriptor& f = couple.family;
  switch (f.tag) {
    case Family::bp:
      return couple.drift * lambda + f.r * (1.0 - std::exp(-lambda)) - f.rho;
    case Family::custom: {
      double acc = couple.drift * lambda;
      for (const JumpComponent& j : f.custom.jumps) {
        acc += j.rate * (1.0 - std::exp(-lambda * j.size));
      }
      for (const BranchComponent& b : f.custom.branches) {
        double term = 1.0 - std::exp(-lambda * b.atom.continuing_jump());
        for (std::size_t i = 1; i < b.atom.entries.size(); ++i) {
          if (b.atom.entries[i] < a) term -= std::exp(-lambda * b.atom.entries[i]);
        }
        acc += b.rate * term;
      }
      return acc;
    }
    default:
      throw Unsupported("direct route is available for bp and custom measures");
  }
}

double branch_rate(const CharacteristicCouple& couple, double a) {
  if (!(a > 0)) throw InvalidParams("truncation must be positive");
  const FamilyDescriptor& f = couple.family;
  switch (f.tag) {
    case Family::bp:
      return f.rho;
    case Family::ri:
      return std::pow(std::log(2.0), f.beta) < a ? 1.0 : 0.0;
    case Family::mb:
    case Family::mt:
      return mb_mass(f.theta, a);
    case Family::custom: {
      double s = 0.0;
      for (const BranchComponent& b : f.custom.branches) {
        if (b.atom.child_count() > 0 && b.atom.entries[1] < a) s += b.rate;
      }
      return s;
    }
  }
  return 0.0;
}

double offspring_mass(const CharacteristicCouple& couple, double a) {
  if (!(a > 0)) throw InvalidParams("truncation must be positive");
  const FamilyDescriptor& f = couple.family;
  switch (f.tag) {
    case Family::bp:
      return f.rho;
    case Family::ri:
      return ri_count(f.beta, a);
    case Family::mb:
      return mb_mass(f.theta, a);
    case Family::mt:
      return 2.0 * mb_mass(f.theta, a);
    case Family::custom: {
      double s = 0.0;
      for (const BranchComponent& b : f.custom.branches) {
        double n = 0.0;
        for (std::size_t i = 1; i < b.atom.entries.size(); ++i) {
          if (b.atom.entries[i] < a) n += 1.0;
        }
        s += b.rate * n;
      }
      return s;
    }
  }
  return 0.0;
}

ExponentLimit exponent_limit(const CharacteristicCouple& couple) {
  validate(couple);
  const FamilyDescriptor& f = couple.family;
  ExponentLimit out;

  // Structural route: drift term, mass never touching zero, minus the
  // excess multiplicity of zero entries.
  switch (f.tag) {
    case Family::bp:
      out.structural = couple.drift > 0 ? kInf : f.r - f.rho;
      break;
    case Family::ri:
    case Family::mb:
    case Family::mt:
      // the stable component carries infinite mass of strictly positive jumps
      out.structural = kInf;
      break;
    case Family::custom: {
      if (couple.drift > 0) {
        out.structural = kInf;
        break;
      }
      double never_zero = 0.0, excess = 0.0;
      for (const JumpComponent& j : f.custom.jumps) never_zero += j.rate;
      for (const BranchComponent& b : f.custom.branches) {
        std::size_t zeros = 0;
        for (double e : b.atom.entries) {
          if (e == 0.0) ++zeros;
        }
        if (zeros == 0) {
          never_zero += b.rate;
        } else if (zeros >= 2) {
          excess += b.rate * static_cast<double>(zeros - 1);
        }
      }
      out.structural = never_zero - excess;
      break;
    }
  }

  // Swept route: geometric lambda grid; the truncated exponent is
  // nondecreasing and concave in lambda, so a missing plateau means
  // divergence.
  const double a_ref = truncation_floor(couple) + 1.0;
  double prev = 0.0;
  bool converged = false;
  double swept = kNaN;
  for (int j = 0; j <= 60; ++j) {
    const double lam = std::ldexp(1.0, j);
    const double k = truncated_exponent(couple, a_ref, lam);
    if (k > 1e12) break;
    if (j > 0 && std::fabs(k - prev) < std::max(1e-12, 1e-9 * std::fabs(k))) {
      converged = true;
      swept = k;
      break;
    }
    prev = k;
  }
  out.diverged = !converged;
  out.swept = converged ? swept : kInf;

  const bool structural_inf = std::isinf(out.structural);
  if (structural_inf != out.diverged) {
    throw Inconsistent("structural and swept exponent limits disagree on divergence");
  }
  if (!out.diverged &&
      std::fabs(out.structural - out.swept) > std::max(1e-6, 1e-6 * std::fabs(out.structural))) {
    std::ostringstream os;
    os << "exponent limit mismatch: structural=" << out.structural
       << " swept=" << out.swept;
    throw Inconsistent(os.str());
  }
  out.value = out.structural;
  return out;
}

LaplaceTable laplace_table(const CharacteristicCouple& couple, double a,
                           std::span<const double> lambdas) {
  LaplaceTable t;
  t.a = a;
  t.lambda.assign(lambdas.begin(), lambdas.end());
  t.phi.reserve(lambdas.size());
  t.moment.reserve(lambdas.size());
  t.kappa.reserve(lambdas.size());
  for (double lam : lambdas) {
    const double p = trajectory_exponent(couple, lam);
    const double m = branch_moment(couple, a, lam);
    t.phi.push_back(p);
    t.moment.push_back(m);
    t.kappa.push_back(p - m);
  }
  t.limit_value = exponent_limit(couple).value;
  return t;
}

namespace {

bool trend_bounded(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return v.back() <= std::max(2.0 * v.front(), v.front() + 1.0);
}

bool trend_positive(const std::vector<double>& v) {
  double mn = kInf;
  for (double x : v) mn = std::min(mn, x);
  return mn > 0.0 && v.back() >= 0.5 * v.front();
}

}  // namespace

AuditReport audit_regularity(const CharacteristicCouple& couple, double sigma,
                             double c1, double c2, std::span<const double> a_grid) {
  if (!(sigma > 0)) throw InvalidParams("sigma must be positive");
  if (!(c1 > c2 && c2 > 0)) throw InvalidParams("need c1 > c2 > 0");
  AuditReport rep;
  rep.sigma = sigma;
  rep.c1 = c1;
  rep.c2 = c2;
  std::vector<double> mass_r, m_high, m_low, var_r;
  double prev_a = 0.0;
  for (double a : a_grid) {
    if (!(a > prev_a)) throw InvalidParams("a_grid must be strictly increasing and positive");
    prev_a = a;
    AuditRow row;
    row.a = a;
    const double pw = std::pow(a, 1.0 + sigma);
    row.log_mass_ratio = std::log(offspring_mass(couple, a)) / pw;
    row.moment_high = branch_moment(couple, a, c1 * std::pow(a, sigma));
    const double m2lam = c2 * std::pow(a, sigma);
    const double m_low_val = branch_moment(couple, a, m2lam);
    row.log_moment_low = std::log(m_low_val) / pw;
    row.variance_ratio = branch_moment2(couple, a, m2lam) / (m_low_val * m_low_val);
    rep.rows.push_back(row);
    mass_r.push_back(row.log_mass_ratio);
    m_high.push_back(row.moment_high);
    m_low.push_back(row.log_moment_low);
    var_r.push_back(row.variance_ratio);
  }
  if (rep.rows.empty()) throw InvalidParams("a_grid must be nonempty");
  rep.mass_growth_bounded = trend_bounded(mass_r);
  rep.mass_growth_positive = trend_positive(mass_r);
  rep.moment_high_bounded = trend_bounded(m_high);
  rep.moment_low_positive = trend_positive(m_low);
  rep.variance_bounded = trend_bounded(var_r);
  return rep;
}

EnvelopeReport mb_envelope_check(double theta, double ell,
                                 std::span<const double> a_grid) {
  if (!(theta > 1)) throw InvalidParams("theta must exceed 1");
  if (!(ell > 0)) throw InvalidParams("ell must be positive");
  constexpr double kMinLevel = 1e-3;  // degenerate grid points are skipped
  EnvelopeReport rep;
  rep.theta = theta;
  rep.ell = ell;
  const bool has_lower = ell < 1.0 / 3.0;
  rep.delta = has_lower ? std::pow(ell + 2.0 / 3.0, 1.0 / (theta - 1.0)) : kNaN;
  rep.worst_upper_margin = kInf;
  rep.worst_lower_margin = kInf;
  for (double a : a_grid) {
    if (!(a > kMinLevel)) continue;
    EnvelopeRow row;
    row.a = a;
    const double lam = ell * std::pow(a, theta - 1.0);
    row.moment = mb_moment(theta, a, lam);
    const double apow = std::pow(a, theta);
    row.upper = std::pow(a, 1.0 - theta) * std::exp(apow);
    row.lower = has_lower
                    ? std::pow(a, 1.0 - theta) *
                          (std::exp(2.0 * apow / 3.0) - std::exp(2.0 * rep.delta * apow / 3.0))
                    : kNaN;
    rep.rows.push_back(row);
    rep.worst_upper_margin = std::min(rep.worst_upper_margin, row.upper - row.moment);
    if (has_lower) {
      rep.worst_lower_margin = std::min(rep.worst_lower_margin, row.moment - row.lower);
    }
    const double tol = 1e-6 * std::max(1.0, std::fabs(row.moment)) + 1e-9;
    if (row.moment > row.upper + tol) {
      throw BoundViolation("mb moment exceeds its upper envelope");
    }
    if (has_lower && row.moment < row.lower - tol) {
      throw BoundViolation("mb moment falls below its lower envelope");
    }
  }
  return rep;
}

}  // namespace bsl
