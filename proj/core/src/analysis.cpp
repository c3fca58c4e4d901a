#include "bsl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsl/errors.hpp"
#include "bsl/measures.hpp"
#include "bsl/quadrature.hpp"

namespace bsl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ClassificationVerdict classify(const CharacteristicCouple& couple, double tol) {
  ClassificationVerdict v;
  v.tol = tol;
  v.limit = exponent_limit(couple).value;
  if (v.limit > tol) {
    v.verdict = Verdict::infinite_limit;
  } else if (v.limit < -tol) {
    v.verdict = Verdict::finite_limit;
  } else {
    v.verdict = Verdict::indeterminate;
  }
  return v;
}

std::vector<double> bp_min_tail(double r, double rho, int k_max) {
  if (!(r > 0) || !(rho > 0) || !(r < rho)) {
    throw InvalidParams("the exact tail law needs 0 < r < rho");
  }
  if (k_max < 0) throw InvalidParams("k_max must be nonnegative");
  std::vector<double> tail(static_cast<std::size_t>(k_max) + 1);
  tail[0] = 1.0;
  for (int k = 0; k < k_max; ++k) {
    const double s = r + rho;
    tail[k + 1] = (s - std::sqrt(s * s - 4.0 * r * rho * tail[k])) / (2.0 * rho);
  }
  return tail;
}

std::vector<double> LevelOracleResult::tail(int k_max) const {
  std::vector<double> t(static_cast<std::size_t>(k_max) + 1, 0.0);
  if (replicas == 0) return t;
  for (int k = 0; k <= k_max; ++k) {
    std::uint64_t at_least = 0;
    for (std::size_t j = static_cast<std::size_t>(k); j < histogram.size(); ++j) {
      at_least += histogram[j];
    }
    t[static_cast<std::size_t>(k)] = static_cast<double>(at_least) / static_cast<double>(replicas);
  }
  return t;
}

LevelOracleResult bp_min_tail_mc(double r, double rho, std::uint64_t replicas,
                                 int survival_threshold, RandomStream stream,
                                 std::uint64_t event_guard) {
  if (!(r > 0) || !(rho > 0) || !(r < rho)) {
    throw InvalidParams("the level oracle needs 0 < r < rho");
  }
  if (survival_threshold < 10) throw InvalidParams("survival threshold must be at least 10");
  LevelOracleResult out;
  const double ratio = r / rho;
  constexpr std::uint64_t kLevelGuard = 100000;
  for (std::uint64_t rep = 0; rep < replicas; ++rep) {
    RandomStream rng = stream.child(rep);
    std::uint64_t pool = 1;
    std::uint64_t level = 0;
    std::uint64_t events = 0;
    bool recorded = false;
    bool aborted = false;
    while (!recorded && !aborted) {
      std::uint64_t n = pool;
      std::uint64_t emigrants = 0;
      bool conditioned = false;
      double birth = rho, death = r;
      while (n > 0) {
        if (!conditioned && n >= static_cast<std::uint64_t>(survival_threshold)) {
          const double p_survive = 1.0 - std::pow(ratio, static_cast<double>(n));
          if (rng.next_open() < p_survive) {
            recorded = true;
            break;
          }
          // survival failed: from here the site is conditioned to die out,
          // which swaps the birth and emigration rates
          conditioned = true;
          birth = r;
          death = rho;
        }
        if (rng.next_open() < birth / (birth + death)) {
          ++n;
        } else {
          --n;
          ++emigrants;
        }
        if (++events > event_guard) {
          aborted = true;
          break;
        }
      }
      if (recorded || aborted) break;
      pool = emigrants;  // a dying site emigrates at least its immigrants
      ++level;
      if (level > kLevelGuard) aborted = true;
    }
    if (aborted) {
      out.aborted++;
      continue;
    }
    if (out.histogram.size() <= level) out.histogram.resize(level + 1, 0);
    out.histogram[level]++;
    out.replicas++;
  }
  return out;
}

MedianTrace median_leftmost_trace(const CharacteristicCouple& couple, std::size_t replicas,
                                  const SimConfig& config_template) {
  if (replicas == 0) throw InvalidParams("need at least one replica");
  if (config_template.query_times.empty()) throw InvalidParams("query times must be nonempty");
  const std::size_t nt = config_template.query_times.size();
  std::vector<std::vector<double>> columns(nt);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < replicas; ++i) {
    SimConfig cfg = config_template;
    RandomStream reseed = RandomStream(config_template.master_seed).child(i);
    cfg.master_seed = reseed.next_u64();
    cfg.record_events = false;
    cfg.record_population = false;
    const LeftmostTrace trace = leftmost_trace(couple, cfg);
    for (std::size_t k = 0; k < trace.valid_prefix && k < nt; ++k) {
      columns[k].push_back(trace.values[k]);
    }
    if (trace.valid_prefix >= nt) ++covered;
  }
  MedianTrace out;
  out.times = config_template.query_times;
  out.replicas = replicas;
  out.invalid_fraction =
      1.0 - static_cast<double>(covered) / static_cast<double>(replicas);
  out.medians.resize(nt, std::numeric_limits<double>::quiet_NaN());
  out.support.resize(nt, 0);
  for (std::size_t k = 0; k < nt; ++k) {
    auto& col = columns[k];
    out.support[k] = col.size();
    if (col.empty()) continue;
    std::sort(col.begin(), col.end());
    const std::size_t n = col.size();
    out.medians[k] = (n % 2 == 1) ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }
  return out;
}

ExponentFit estimate_growth_exponent(const CharacteristicCouple& couple, std::size_t replicas,
                                     int k_lo, int k_hi, SimConfig config_template) {
  if (replicas < 8) throw InvalidParams("exponent estimation needs at least 8 replicas");
  if (k_hi <= k_lo) throw InvalidParams("dyadic window must be nonempty");
  config_template.query_times.clear();
  for (int k = k_lo; k <= k_hi; ++k) {
    config_template.query_times.push_back(std::ldexp(1.0, k));
  }
  config_template.horizon = std::ldexp(1.0, k_hi);

  const MedianTrace med = median_leftmost_trace(couple, replicas, config_template);
  if (med.invalid_fraction > 0.5) {
    throw InsufficientData("more than half of the replicas were invalid in the window");
  }
  ExponentFit fit;
  fit.replicas = replicas;
  fit.invalid_fraction = med.invalid_fraction;
  fit.t_lo = config_template.query_times.front();
  fit.t_hi = config_template.query_times.back();
  for (std::size_t k = 0; k < med.times.size(); ++k) {
    if (med.support[k] * 2 < replicas) continue;  // medians need majority support
    if (!(med.medians[k] > 0)) continue;          // log-log fit needs positive values
    fit.log_t.push_back(std::log(med.times[k]));
    fit.log_median.push_back(std::log(med.medians[k]));
  }
  if (fit.log_t.size() < 3) {
    throw InsufficientData("fewer than three usable points in the dyadic window");
  }
  const LineFit line = fit_line(fit.log_t.data(), fit.log_median.data(), fit.log_t.size());
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.slope_se = line.slope_se;
  return fit;
}

double predicted_growth_exponent(const FamilyDescriptor& family) {
  switch (family.tag) {
    case Family::ri:
      return family.beta / (family.alpha * family.beta + 1.0 - family.alpha);
    case Family::mb:
    case Family::mt:
      return 1.0 / (family.alpha + (1.0 - family.alpha) * family.theta);
    default:
      throw Unsupported("growth exponent is defined for the stable-motion families");
  }
}

namespace {

// Untruncated Laplace exponent for measures with exponential moments.
double full_exponent(const CharacteristicCouple& couple, double lambda) {
  const FamilyDescriptor& f = couple.family;
  switch (f.tag) {
    case Family::bp:
      return couple.drift * lambda + f.r * (1.0 - std::exp(-lambda)) - f.rho;
    case Family::custom: {
      double a_full = 1.0;
      for (const BranchComponent& b : f.custom.branches) {
        if (!b.atom.entries.empty()) a_full = std::max(a_full, b.atom.entries.back() + 1.0);
      }
      return truncated_exponent_direct(couple, a_full, lambda);
    }
    default:
      throw Unsupported("linear speed requires exponential moments (bp or custom)");
  }
}

}  // namespace

double linear_speed(const CharacteristicCouple& couple) {
  const auto g = [&](double lam) { return full_exponent(couple, lam) / lam; };
  const double arg = golden_section_max(g, 1e-3, 64.0, 1e-6);
  return std::max(0.0, g(arg));
}

double linear_speed_upper_bound(const CharacteristicCouple& couple,
                                std::span<const double> a_grid,
                                std::span<const double> lambda_grid) {
  if (a_grid.empty() || lambda_grid.empty()) throw InvalidParams("grids must be nonempty");
  double best_a = kInf;
  for (double a : a_grid) {
    if (!(a > truncation_floor(couple))) continue;
    double worst_l = -kInf;
    for (double lam : lambda_grid) {
      if (!(lam > 0)) throw InvalidParams("lambda grid must be positive");
      const double val = (trajectory_exponent(couple, lam) - couple.drift * lam -
                          branch_moment(couple, a, lam)) /
                         lam;
      worst_l = std::max(worst_l, val);
    }
    best_a = std::min(best_a, worst_l);
  }
  if (best_a == kInf) throw InvalidParams("no grid level above the truncation floor");
  return couple.drift + best_a;
}

double lower_deviation_exponent(const CharacteristicCouple& couple, double m, double t,
                                double sigma, double c1) {
  const FamilyDescriptor& f = couple.family;
  if (f.tag != Family::ri && f.tag != Family::mb && f.tag != Family::mt) {
    throw Unsupported("the deviation bound needs a stable-motion family");
  }
  if (!(m > 0) || !(t > 0) || !(sigma > 0) || !(c1 > 0)) {
    throw InvalidParams("m, t, sigma, c1 must be positive");
  }
  const double gamma = 1.0 / (f.alpha + (1.0 - f.alpha) * (1.0 + sigma));
  const double level = m * std::pow(t, gamma);
  if (!(level > truncation_floor(couple))) {
    throw InvalidParams("m t^gamma must exceed the truncation floor");
  }
  const double lam = c1 * std::pow(level, sigma);
  return lam * level - t * trajectory_exponent(couple, lam) +
         t * branch_moment(couple, level, lam);
}

}  // namespace bsl
