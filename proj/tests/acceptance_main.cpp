// Acceptance suite: one line per criterion, every tolerance pinned in code.
// Runs the exact-law reproduction, the expectation identity, the samplers,
// restriction coupling, classification, the exponent calculus identities,
// the analytic envelopes, the growth-exponent studies, and the linear-speed
// consistency checks, printing PASS or FAIL for each.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "bsl/analysis.hpp"
#include "bsl/engine.hpp"
#include "bsl/errors.hpp"
#include "bsl/measures.hpp"
#include "bsl/random.hpp"
#include "bsl/sampling.hpp"
#include "support.hpp"

using namespace bsl;

namespace {

int failures = 0;
std::chrono::steady_clock::time_point criterion_start;

void begin() { criterion_start = std::chrono::steady_clock::now(); }

void report(const char* name, bool ok, const std::string& detail) {
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - criterion_start).count();
  std::printf("[%s] %-28s (%.1fs) %s\n", ok ? "PASS" : "FAIL", name, secs, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

CharacteristicCouple couple_of(FamilyDescriptor f, double drift = 0) {
  return CharacteristicCouple{drift, std::move(f)};
}

// ---------------------------------------------------------------- criteria

void exact_law_reproduction() {
  begin();
  bool ok = true;
  std::string detail;
  const auto tail = bp_min_tail(1.0, 2.0, 5);
  ok &= tail[1] == 0.5;  // exact half
  const double golden = (3.0 - std::sqrt(5.0)) / 4.0;
  ok &= std::fabs(tail[2] - golden) <= 1e-15;
  const auto mc = bp_min_tail_mc(1.0, 2.0, 10000, 30, RandomStream(20260810));
  const auto emp = mc.tail(2);
  ok &= mc.aborted == 0;
  ok &= std::fabs(emp[1] - tail[1]) <= 0.02;
  ok &= std::fabs(emp[2] - tail[2]) <= 0.02;
  detail = fmt("P1=%.4f (mc %.4f), P2=%.6f (mc %.4f)", tail[1], emp[1], tail[2], emp[2]);
  report("exact bp law", ok, detail);
}

void many_to_one_identity() {
  begin();
  const auto bp = couple_of(FamilyDescriptor::bp(1, 1));
  const int replicas = 100000;
  std::map<double, std::vector<double>> sums;
  for (int i = 0; i < replicas; ++i) {
    SimConfig cfg;
    cfg.truncation = 1.0;
    cfg.horizon = 1.0;
    cfg.master_seed = RandomStream(11).child(i).next_u64();
    cfg.record_events = false;
    const SimResult res = simulate(bp, cfg);
    for (double lambda : {0.5, 1.0, 2.0}) {
      double s = 0;
      for (const ParticleSnapshot& p : res.population) s += std::exp(-lambda * p.position);
      sums[lambda].push_back(s);
    }
  }
  bool ok = true;
  std::string detail;
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double target = std::exp(-truncated_exponent(bp, 1.0, lambda));
    const auto ms = testsup::mean_se(sums[lambda]);
    if (lambda == 1.0) {
      ok &= std::fabs(ms.mean - target) <= 0.02 * target;  // within 2 percent
      detail += fmt("l=1: %.4f vs %.4f; ", ms.mean, target);
    } else {
      ok &= std::fabs(ms.mean - target) <= 3.0 * ms.se;
      detail += fmt("l=%g: %.4f vs %.4f; ", lambda, ms.mean, target);
    }
  }
  report("many-to-one identity", ok, detail);
}

void stable_sampler() {
  begin();
  bool ok = true;
  std::string detail;
  for (double alpha : {0.3, 0.5, 0.7}) {
    RandomStream rng = RandomStream(13).child(static_cast<std::uint64_t>(alpha * 100));
    std::vector<double> lt;
    lt.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
      lt.push_back(std::exp(-stable_increment(alpha, 1.0, rng)));
    }
    const auto ms = testsup::mean_se(lt);
    ok &= std::fabs(ms.mean - std::exp(-1.0)) <= 3.0 * ms.se;
    // scaling identity: one draw over t=2 against the rescaled unit draw
    std::vector<double> two, scaled;
    two.reserve(100000);
    scaled.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
      two.push_back(stable_increment(alpha, 2.0, rng));
      scaled.push_back(std::pow(2.0, 1.0 / alpha) * stable_increment(alpha, 1.0, rng));
    }
    const double d = testsup::ks_two_sample(two, scaled);
    const double crit = testsup::ks_two_sample_critical_01(two.size(), scaled.size());
    ok &= d < crit;
    detail += fmt("a=%.1f: LT %.5f, KS %.4f<%.4f; ", alpha, ms.mean, d, crit);
  }
  report("stable sampler", ok, detail);
}

void restriction_coupling() {
  begin();
  const auto ri = couple_of(FamilyDescriptor::ri(0.5, 0.5));
  int identical = 0;
  const int runs = 100;
  for (int i = 0; i < runs; ++i) {
    SimConfig cfg;
    cfg.truncation = 2.0;
    cfg.horizon = 2.0;
    cfg.cap = 1.2;  // barrier at the restriction level keeps both runs coupled
    cfg.master_seed = RandomStream(17).child(i).next_u64();
    cfg.query_times = {0.5, 1.0, 1.5, 2.0};
    const CoupledRestriction res = restrict_coupled(ri, cfg, 1.2);
    if (res.logs_identical &&
        snapshot_bytes(res.derived) == snapshot_bytes(res.direct)) {
      ++identical;
    }
  }
  report("restriction coupling", identical == runs,
         fmt("%d/%d coupled runs byte-identical", identical, runs));
}

void classification() {
  begin();
  bool ok = true;
  std::string detail;
  for (double r : {0.5, 1.0, 2.0}) {
    for (double rho : {0.5, 1.0, 2.0}) {
      const auto v = classify(couple_of(FamilyDescriptor::bp(r, rho)));
      const Verdict want = r > rho   ? Verdict::infinite_limit
                           : r < rho ? Verdict::finite_limit
                                     : Verdict::indeterminate;
      ok &= v.verdict == want;
    }
  }
  detail += "bp grid matches sign(r-rho); ";
  for (const auto& couple :
       {couple_of(FamilyDescriptor::ri(0.5, 0.5)), couple_of(FamilyDescriptor::mb(0.5, 2)),
        couple_of(FamilyDescriptor::mt(0.5, 2))}) {
    const auto lim = exponent_limit(couple);
    ok &= std::isinf(lim.structural) && lim.diverged;  // both routes diverge
    ok &= classify(couple).verdict == Verdict::infinite_limit;
  }
  detail += "ri/mb/mt infinite via both routes";
  report("classification", ok, detail);
}

void exponent_calculus() {
  begin();
  bool ok = true;
  double worst = 0;
  const std::vector<CharacteristicCouple> couples = {
      couple_of(FamilyDescriptor::bp(1.3, 0.8)), couple_of(FamilyDescriptor::ri(0.5, 0.5)),
      couple_of(FamilyDescriptor::mb(0.5, 2)), couple_of(FamilyDescriptor::mt(0.4, 1.6))};
  for (const auto& couple : couples) {
    const double a0 = truncation_floor(couple);
    for (int i = 0; i < 20; ++i) {
      const double a = a0 + 0.05 + (3.0 - a0 - 0.05) * i / 19.0;
      for (int j = 0; j < 20; ++j) {
        const double lambda = 12.0 * j / 19.0;
        const double kappa = truncated_exponent(couple, a, lambda);
        const double diff = trajectory_exponent(couple, lambda) -
                            branch_moment(couple, a, lambda);
        worst = std::max(worst, std::fabs(kappa - diff));
        ok &= std::fabs(kappa - diff) <= 1e-8;
      }
    }
  }
  // second-moment identities against independent evaluations
  const auto mb = couple_of(FamilyDescriptor::mb(0.5, 2));
  const auto mt = couple_of(FamilyDescriptor::mt(0.5, 2));
  const auto ri = couple_of(FamilyDescriptor::ri(0.5, 0.5));
  for (double a : {0.7, 1.4, 2.6}) {
    for (double lambda : {0.0, 0.8, 3.0}) {
      const double q2 = testsup::gauss_integrate(
          [&](double z) { return std::exp(z * z - 2.0 * lambda * z); }, 0.0, a, 512);
      ok &= std::fabs(branch_moment2(mb, a, lambda) - q2) <= 1e-8 * std::max(1.0, q2);
      ok &= std::fabs(branch_moment2(mt, a, lambda) - 4.0 * q2) <=
            1e-8 * std::max(1.0, 4.0 * q2);
      double s = 0;
      for (std::uint64_t k = 2;; ++k) {
        const double z = std::sqrt(std::log(static_cast<double>(k)));
        if (!(z < a)) break;
        s += std::exp(-lambda * z);
      }
      ok &= std::fabs(branch_moment2(ri, a, lambda) - s * s) <= 1e-8 * std::max(1.0, s * s);
    }
  }
  const auto bp = couple_of(FamilyDescriptor::bp(1, 2));
  ok &= branch_moment2(bp, 1.0, 3.0) == branch_moment(bp, 1.0, 6.0);
  // integer counting formula against brute enumeration
  for (double a = 0.9; a <= 3.0; a += 0.1) {
    double count = 0;
    for (std::uint64_t k = 2;; ++k) {
      if (!(std::sqrt(std::log(static_cast<double>(k))) < a)) break;
      count += 1;
    }
    ok &= offspring_mass(ri, a) == count;
  }
  report("exponent calculus", ok, fmt("worst |kappa-(phi-M)| = %.2e", worst));
}

void envelope_bounds() {
  begin();
  bool ok = true;
  double worst_u = 1e300, worst_l = 1e300;
  std::vector<double> grid;
  for (double a = 1.0; a <= 5.0; a += 0.25) grid.push_back(a);
  try {
    for (double ell : {0.1, 0.2, 0.3}) {
      const auto rep = mb_envelope_check(2.0, ell, grid);
      worst_u = std::min(worst_u, rep.worst_upper_margin);
      worst_l = std::min(worst_l, rep.worst_lower_margin);
      ok &= rep.worst_upper_margin > 0 && rep.worst_lower_margin > 0;
    }
  } catch (const BoundViolation&) {
    ok = false;
  }
  report("mb envelopes", ok, fmt("margins: upper %.3g, lower %.3g", worst_u, worst_l));
}

void sublinear_growth() {
  begin();
  bool ok = true;
  std::string detail;
  // mb(0.5, 2), predicted exponent 2/3, dyadic window [16, 1024], 32 replicas
  const auto mb = couple_of(FamilyDescriptor::mb(0.5, 2));
  SimConfig tmpl;
  tmpl.truncation = 2.0;
  tmpl.adaptive_barrier = true;
  tmpl.window = 2.0;
  tmpl.select_lowest = 4000;
  tmpl.max_particles = 1'000'000'000'000ull;
  tmpl.master_seed = 4242;
  tmpl.record_events = false;
  const ExponentFit fit = estimate_growth_exponent(mb, 32, 4, 10, tmpl);
  ok &= fit.slope >= 0.45 && fit.slope <= 0.85;
  ok &= fit.slope < 0.92;  // strict sub-linearity
  detail += fmt("mb slope %.3f (se %.3f, predicted %.3f); ", fit.slope, fit.slope_se,
                predicted_growth_exponent(mb.family));
  // pure-drift control: rare in-place branchings on top of unit drift
  CustomMeasure m;
  m.branches.push_back({0.01, DisplacementAtom({0.0, 0.0})});
  const auto drifty = couple_of(FamilyDescriptor::custom_measure(m), 1.0);
  SimConfig dtmpl;
  dtmpl.truncation = 1.0;
  dtmpl.master_seed = 99;
  dtmpl.max_particles = 500000;
  dtmpl.record_events = false;
  const ExponentFit dfit = estimate_growth_exponent(drifty, 32, 4, 10, dtmpl);
  ok &= dfit.slope >= 0.97 && dfit.slope <= 1.03;
  detail += fmt("drift control slope %.4f", dfit.slope);
  report("sub-linear growth", ok, detail);
}

void critical_bp() {
  begin();
  const auto bp = couple_of(FamilyDescriptor::bp(1, 1));
  SimConfig tmpl;
  tmpl.truncation = 6.0;
  tmpl.adaptive_barrier = true;
  tmpl.window = 6.0;
  tmpl.select_lowest = 1000;
  tmpl.max_particles = 1'000'000'000'000ull;
  tmpl.master_seed = 2718;
  tmpl.horizon = 4096.0;
  tmpl.record_events = false;
  for (int k = 4; k <= 12; ++k) tmpl.query_times.push_back(std::ldexp(1.0, k));
  const MedianTrace med = median_leftmost_trace(bp, 64, tmpl);
  bool ok = med.invalid_fraction <= 0.25;
  for (std::size_t i = 1; i < med.medians.size(); ++i) {
    ok &= med.medians[i] >= med.medians[i - 1];  // nondecreasing medians
    ok &= med.medians[i] / med.times[i] < med.medians[i - 1] / med.times[i - 1];
  }
  ok &= med.medians.back() > med.medians.front();  // strict growth across the window
  report("critical bp", ok,
         fmt("median %.1f -> %.1f, ratio %.4f -> %.5f, invalid %.2f", med.medians.front(),
             med.medians.back(), med.medians.front() / med.times.front(),
             med.medians.back() / med.times.back(), med.invalid_fraction));
}

void linear_speed_consistency() {
  begin();
  const auto bp21 = couple_of(FamilyDescriptor::bp(2, 1));
  const double speed = linear_speed(bp21);
  // fine-grid scan oracle
  double best = 0;
  for (double lam = 1e-3; lam <= 64.0; lam += 1e-4) {
    best = std::max(best, (2.0 * (1.0 - std::exp(-lam)) - 1.0) / lam);
  }
  bool ok = std::fabs(speed - best) <= 1e-3;
  std::vector<double> a_grid = {0.5, 1.0, 2.0};
  std::vector<double> l_grid;
  for (double l = 0.05; l <= 64.0; l *= 1.1) l_grid.push_back(l);
  const double bound = linear_speed_upper_bound(bp21, a_grid, l_grid);
  ok &= std::fabs(bound - speed) <= 0.02;
  report("linear speed", ok,
         fmt("golden-section %.5f, scan %.5f, grid bound %.5f", speed, best, bound));
}

}  // namespace

int main() {
  std::printf("acceptance suite: branching subordinator toolkit\n");
  exact_law_reproduction();
  many_to_one_identity();
  stable_sampler();
  restriction_coupling();
  classification();
  exponent_calculus();
  envelope_bounds();
  sublinear_growth();
  critical_bp();
  linear_speed_consistency();
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
