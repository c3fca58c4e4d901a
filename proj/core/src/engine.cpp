#include "bsl/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "bsl/errors.hpp"
#include "bsl/measures.hpp"
#include "bsl/random.hpp"
#include "bsl/sampling.hpp"

namespace bsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cumulative branch-rate table for mb/mt; avoids re-quadrature of the rate
// integral at every thinning step. The partial panel is refined with a local
// Simpson rule, keeping the error at the global quadrature scale.
class MbRateTable {
 public:
  MbRateTable() = default;
  MbRateTable(double theta, double w_max) : theta_(theta), w_max_(std::max(w_max, 1e-9)) {
    const std::size_t n = 4096;
    grid_.resize(n + 1);
    cum_.resize(n + 1);
    grid_[0] = 0.0;
    cum_[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      grid_[i] = w_max_ * static_cast<double>(i) / static_cast<double>(n);
      cum_[i] = cum_[i - 1] + panel(grid_[i - 1], grid_[i]);
    }
  }

  double rate(double w) const {
    if (!(w > 0)) return 0.0;
    if (w >= w_max_) return cum_.back();
    const double x = w / w_max_ * static_cast<double>(grid_.size() - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), grid_.size() - 2);
    return cum_[i] + panel(grid_[i], w);
  }

 private:
  double panel(double lo, double hi) const {
    if (!(hi > lo)) return 0.0;
    const double m = 0.5 * (lo + hi);
    return (hi - lo) / 12.0 *
           (f(lo) + 4.0 * f(0.5 * (lo + m)) + 2.0 * f(m) + 4.0 * f(0.5 * (m + hi)) + f(hi));
  }
  double f(double z) const { return std::exp(std::pow(z, theta_)); }

  double theta_ = 2;
  double w_max_ = 1;
  std::vector<double> grid_, cum_;
};

struct Particle {
  std::uint64_t id = 0;
  std::uint64_t parent = kNoParent;
  double birth_time = 0;
  double birth_position = 0;
  double last_update = 0;
  double position = 0;
  std::uint32_t branch_seq = 0;
  std::uint32_t sched_seq = 0;
  bool pruned = false;
  RandomStream motion, clock, accept, atom, spawn;
  double bound_rate = 0;
};

struct QueueEntry {
  double time;
  std::uint32_t slot;
  std::uint64_t id;
  std::uint32_t sched_seq;
  bool operator>(const QueueEntry& o) const {
    if (time != o.time) return time > o.time;
    return id > o.id;
  }
};

class Simulation {
 public:
  Simulation(const CharacteristicCouple& couple, const SimConfig& cfg)
      : couple_(couple), cfg_(cfg) {
    validate_config();
    const Family tag = couple_.family.tag;
    if (tag == Family::mb || tag == Family::mt) {
      double w_max = cfg_.truncation;
      if (cfg_.cap) w_max = std::min(w_max, *cfg_.cap);
      if (cfg_.adaptive_barrier) w_max = std::min(w_max, cfg_.window);
      rate_table_ = MbRateTable(couple_.family.theta, w_max);
    }
  }

  SimResult run() {
    cap_ = cfg_.adaptive_barrier ? cfg_.window : cfg_.cap.value_or(kInf);
    if (cfg_.adaptive_barrier) {
      sync_step_ = cfg_.sync_interval;
      if (sync_step_ == 0.0) {
        // population at most doubles between re-anchors
        const double births =
            offspring_mass(couple_, std::min(cfg_.truncation, cfg_.window));
        sync_step_ = 0.6931471805599453 / std::max(births, 2.0 / cfg_.horizon);
      }
      next_sync_ = sync_step_;
    }
    spawn_root();

    std::size_t qi = 0;
    while (!stopped_) {
      double t_boundary = cfg_.horizon;
      int boundary = 0;  // 0 horizon, 1 query, 2 sync
      if (qi < cfg_.query_times.size() && cfg_.query_times[qi] <= t_boundary) {
        t_boundary = cfg_.query_times[qi];
        boundary = 1;
      }
      if (next_sync_ < t_boundary) {
        t_boundary = next_sync_;
        boundary = 2;
      }
      while (!queue_.empty() && !stopped_) {
        QueueEntry e = queue_.top();
        if (e.time > t_boundary) break;
        queue_.pop();
        if (!entry_valid(e)) continue;
        process_candidate(e);
      }
      if (stopped_) break;
      if (boundary == 1) {
        process_query(cfg_.query_times[qi]);
        ++qi;
      } else if (boundary == 2) {
        process_sync(next_sync_);
        next_sync_ += sync_step_;
      } else {
        break;
      }
    }
    finish(stopped_ ? counters_.end_time : cfg_.horizon);
    return std::move(result_);
  }

 private:
  void validate_config() {
    if (!(cfg_.horizon > 0)) throw InvalidParams("horizon must be positive");
    if (!(cfg_.truncation > 0)) throw InvalidParams("truncation must be positive");
    if (cfg_.cap && !(*cfg_.cap > 0)) throw InvalidParams("cap must be positive");
    if (cfg_.cap && *cfg_.cap > cfg_.truncation + 1e-12) {
      throw InvalidParams("cap must not exceed the truncation level");
    }
    if (cfg_.adaptive_barrier) {
      if (!(cfg_.window > 0)) throw InvalidParams("window must be positive");
      if (cfg_.sync_interval < 0) throw InvalidParams("sync interval must be nonnegative");
    }
    double prev = 0.0;
    for (double q : cfg_.query_times) {
      if (!(q >= prev)) throw InvalidParams("query times must be nondecreasing and nonnegative");
      if (q > cfg_.horizon) throw InvalidParams("query times must not exceed the horizon");
      prev = q;
    }
  }

  void spawn_root() {
    Particle root;
    root.id = 0;
    RandomStream base(cfg_.master_seed);
    root.motion = base.child(0);
    root.clock = base.child(1);
    root.accept = base.child(2);
    root.atom = base.child(3);
    root.spawn = base.child(4);
    particles_.push_back(root);
    alive_.push_back(0);
    counters_.born = 1;
    counters_.peak_alive = 1;
    schedule(0, 0.0);
  }

  bool entry_valid(const QueueEntry& e) const {
    const Particle& u = particles_[e.slot];
    return u.id == e.id && u.sched_seq == e.sched_seq && !u.pruned;
  }

  // Rate of branch events that can still have an effect: a child born below
  // both the truncation level and the barrier headroom, or a continuing jump.
  double effective_rate(double pos) const {
    const double w = std::min(cfg_.truncation, cap_ - pos);
    if (!(w > 0)) return 0.0;
    const FamilyDescriptor& f = couple_.family;
    switch (f.tag) {
      case Family::bp:
        return f.rho;
      case Family::ri:
        return std::pow(std::log(2.0), f.beta) < w ? 1.0 : 0.0;
      case Family::mb:
      case Family::mt:
        return rate_table_.rate(w);
      case Family::custom: {
        double s = 0.0;
        for (const BranchComponent& b : f.custom.branches) {
          if (b.atom.child_count() == 0 || !(b.atom.entries[1] < cfg_.truncation)) continue;
          if (b.atom.continuing_jump() > 0 || b.atom.entries[1] < w) s += b.rate;
        }
        return s;
      }
    }
    return 0.0;
  }

  void schedule(std::uint32_t slot, double now) {
    Particle& u = particles_[slot];
    u.sched_seq++;
    u.bound_rate = effective_rate(u.position);
    if (u.bound_rate > 0) {
      const double t = now + u.clock.next_exponential(u.bound_rate);
      if (t <= cfg_.horizon) queue_.push({t, slot, u.id, u.sched_seq});
    }
  }

  void advance(Particle& u, double t) {
    if (t > u.last_update) {
      u.position += trajectory_increment(couple_, cfg_.truncation, t - u.last_update, u.motion);
      u.last_update = t;
    }
  }

  void log_record(double t, const Particle& u, EventKind kind) {
    if (cfg_.record_events) result_.log.push_back({t, u.id, u.parent, kind, u.position});
  }

  void prune(std::uint32_t slot, double t, bool culled = false) {
    Particle& u = particles_[slot];
    u.pruned = true;
    counters_.pruned++;
    if (culled) counters_.culled++;
    log_record(t, u, EventKind::prune);
    free_slots_.push_back(slot);
  }

  std::uint32_t allocate_slot() {
    if (!free_slots_.empty()) {
      const std::uint32_t s = free_slots_.back();
      free_slots_.pop_back();
      particles_[s] = Particle{};
      return s;
    }
    particles_.emplace_back();
    return static_cast<std::uint32_t>(particles_.size() - 1);
  }

  // Branching transition of an accepted event. For mb/mt the displacement law
  // is conditioned on effectiveness (below truncation and barrier headroom);
  // for the other families the event-rate indicator already carries it.
  DisplacementAtom draw_atom(Particle& u) {
    const FamilyDescriptor& f = couple_.family;
    switch (f.tag) {
      case Family::bp:
      case Family::ri:
        return detail::sample_atom(couple_, cfg_.truncation, u.atom);
      case Family::mb:
      case Family::mt: {
        const double w = std::min(cfg_.truncation, cap_ - u.position);
        return detail::sample_atom(couple_, w, u.atom);
      }
      case Family::custom: {
        const double w = std::min(cfg_.truncation, cap_ - u.position);
        double total = 0.0;
        for (const BranchComponent& b : f.custom.branches) {
          if (b.atom.child_count() == 0 || !(b.atom.entries[1] < cfg_.truncation)) continue;
          if (b.atom.continuing_jump() > 0 || b.atom.entries[1] < w) total += b.rate;
        }
        double pick = u.atom.next_open() * total;
        const BranchComponent* chosen = nullptr;
        for (const BranchComponent& b : f.custom.branches) {
          if (b.atom.child_count() == 0 || !(b.atom.entries[1] < cfg_.truncation)) continue;
          if (!(b.atom.continuing_jump() > 0 || b.atom.entries[1] < w)) continue;
          chosen = &b;
          pick -= b.rate;
          if (pick <= 0) break;
        }
        return *truncate_atom(chosen->atom, cfg_.truncation);
      }
    }
    return DisplacementAtom({0.0});
  }

  void process_candidate(const QueueEntry& e) {
    counters_.candidates++;
    {
      Particle& u = particles_[e.slot];
      advance(u, e.time);
      if (u.position >= cap_) {
        remove_alive(e.slot);
        prune(e.slot, e.time);
        return;
      }
      const double rate_now = effective_rate(u.position);
      if (cap_ < kInf) {
        const double x = u.accept.next_double() * u.bound_rate;
        if (!(x < rate_now)) {
          schedule(e.slot, e.time);
          return;
        }
      }
      u.branch_seq++;
    }

    counters_.branch_events++;
    // copy what the child loop needs; slot allocation may relocate particles_
    const std::uint64_t parent_id = particles_[e.slot].id;
    const std::uint64_t grandparent = particles_[e.slot].parent;
    const std::uint32_t branch_index = particles_[e.slot].branch_seq;
    const RandomStream spawn = particles_[e.slot].spawn;
    const DisplacementAtom atom = draw_atom(particles_[e.slot]);
    const double pre = particles_[e.slot].position;
    const double post = pre + atom.continuing_jump();

    BranchEvent ev;
    ev.time = e.time;
    ev.particle = parent_id;
    ev.parent = grandparent;
    ev.atom = atom;

    // the transition record precedes its consequences (births, prunes)
    if (cfg_.record_events) result_.log.push_back({e.time, parent_id, grandparent, EventKind::branch, post});

    for (std::size_t i = 1; i < atom.entries.size(); ++i) {
      if (counters_.born >= cfg_.max_particles) {
        counters_.saturated = true;
        stop(e.time);
        break;
      }
      const double birth_pos = pre + atom.entries[i];
      const std::uint32_t slot = allocate_slot();
      Particle& c = particles_[slot];
      c.id = next_id_++;
      c.parent = parent_id;
      c.birth_time = e.time;
      c.birth_position = birth_pos;
      c.last_update = e.time;
      c.position = birth_pos;
      const RandomStream base = spawn.child(branch_index).child(static_cast<std::uint64_t>(i));
      c.motion = base.child(0);
      c.clock = base.child(1);
      c.accept = base.child(2);
      c.atom = base.child(3);
      c.spawn = base.child(4);
      counters_.born++;
      ev.child_ids.push_back(c.id);
      if (birth_pos >= cap_) {
        prune(slot, e.time);
      } else {
        alive_.push_back(slot);
        counters_.peak_alive = std::max<std::uint64_t>(counters_.peak_alive, alive_.size());
        schedule(slot, e.time);
      }
    }

    Particle& u = particles_[e.slot];
    u.position = post;
    ev.position_after = post;
    if (cfg_.record_events) result_.branches.push_back(std::move(ev));
    if (u.position >= cap_) {
      remove_alive(e.slot);
      prune(e.slot, e.time);
    } else if (!stopped_) {
      schedule(e.slot, e.time);
    }
  }

  void remove_alive(std::uint32_t slot) {
    auto it = std::find(alive_.begin(), alive_.end(), slot);
    if (it != alive_.end()) {
      *it = alive_.back();
      alive_.pop_back();
    }
  }

  // Materialize every alive particle at t and apply the barrier. When events
  // are recorded the lists are ordered by id so the log is deterministic;
  // otherwise ordering is skipped (results never depend on it).
  void materialize_all(double t) {
    std::vector<std::uint32_t> pruned_now;
    std::vector<std::uint32_t> survivors;
    survivors.reserve(alive_.size());
    for (std::uint32_t slot : alive_) {
      Particle& u = particles_[slot];
      advance(u, t);
      (u.position >= cap_ ? pruned_now : survivors).push_back(slot);
    }
    auto by_id = [&](std::uint32_t a, std::uint32_t b) {
      return particles_[a].id < particles_[b].id;
    };
    if (cfg_.record_events) {
      std::sort(pruned_now.begin(), pruned_now.end(), by_id);
      std::sort(survivors.begin(), survivors.end(), by_id);
    }
    for (std::uint32_t slot : pruned_now) prune(slot, t);
    alive_ = std::move(survivors);
  }

  void process_query(double q) {
    materialize_all(q);
    double best = kInf;
    std::uint64_t best_id = kNoParent;
    for (std::uint32_t slot : alive_) {
      const Particle& u = particles_[slot];
      log_record(q, u, EventKind::query);
      if (u.position < best || (u.position == best && u.id < best_id)) {
        best = u.position;
        best_id = u.id;
      }
    }
    result_.trace.times.push_back(q);
    result_.trace.values.push_back(best);
    result_.trace.argmin.push_back(best_id);
    if (!alive_.empty() && !counters_.saturated &&
        result_.trace.valid_prefix + 1 == result_.trace.times.size()) {
      result_.trace.valid_prefix++;
    }
  }

  void process_sync(double s) {
    materialize_all(s);
    if (alive_.empty()) return;
    double front = kInf;
    for (std::uint32_t slot : alive_) front = std::min(front, particles_[slot].position);
    cap_ = front + cfg_.window;
    if (cfg_.select_lowest > 0 && alive_.size() > cfg_.select_lowest) {
      std::vector<std::uint32_t> order = alive_;
      const auto lower = [&](std::uint32_t a, std::uint32_t b) {
        const Particle& pa = particles_[a];
        const Particle& pb = particles_[b];
        if (pa.position != pb.position) return pa.position < pb.position;
        return pa.id < pb.id;  // total order keeps the kept set deterministic
      };
      std::nth_element(order.begin(), order.begin() + cfg_.select_lowest, order.end(), lower);
      for (std::size_t i = cfg_.select_lowest; i < order.size(); ++i) {
        prune(order[i], s, /*culled=*/true);
      }
      order.resize(cfg_.select_lowest);
      if (cfg_.record_events) {
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
          return particles_[a].id < particles_[b].id;
        });
      }
      alive_ = std::move(order);
    }
    // the barrier moved: refresh thinning bounds and clocks (memoryless)
    for (std::uint32_t slot : alive_) schedule(slot, s);
  }

  void stop(double t) {
    stopped_ = true;
    counters_.end_time = t;
  }

  void finish(double end_time) {
    counters_.end_time = end_time;
    if (cfg_.record_population) {
      materialize_all(end_time);
      for (std::uint32_t slot : alive_) {
        const Particle& u = particles_[slot];
        result_.population.push_back(
            {u.id, u.parent, u.birth_time, u.birth_position, u.position});
      }
    }
    counters_.final_alive = alive_.size();
    result_.counters = counters_;
  }

  const CharacteristicCouple& couple_;
  SimConfig cfg_;
  MbRateTable rate_table_;

  std::vector<Particle> particles_;
  std::vector<std::uint32_t> free_slots_;
  std::vector<std::uint32_t> alive_;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> queue_;
  std::uint64_t next_id_ = 1;
  double cap_ = kInf;
  double next_sync_ = kInf;
  double sync_step_ = 0;
  bool stopped_ = false;

  SimResult result_;
  SimCounters counters_;
};

}  // namespace

SimResult simulate(const CharacteristicCouple& couple, const SimConfig& config) {
  validate(couple);
  Simulation sim(couple, config);
  return sim.run();
}

LeftmostTrace leftmost_trace(const CharacteristicCouple& couple, const SimConfig& config) {
  if (config.query_times.empty()) throw InvalidParams("query times must be nonempty");
  return simulate(couple, config).trace;
}

namespace {

// Replay a fine-level result, keeping only lineages whose birth displacement
// stays below a; ids are reassigned in creation order, matching a direct run.
SimResult derive_restriction(const SimResult& fine, double a) {
  SimResult out;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> remap = {{0, 0}};  // sorted by old id
  auto lookup = [&remap](std::uint64_t old_id) -> const std::uint64_t* {
    auto it = std::lower_bound(remap.begin(), remap.end(), old_id,
                               [](const auto& p, std::uint64_t v) { return p.first < v; });
    if (it == remap.end() || it->first != old_id) return nullptr;
    return &it->second;
  };
  auto remap_parent = [&lookup](std::uint64_t p) {
    return p == kNoParent ? kNoParent : *lookup(p);
  };
  std::uint64_t next_id = 1;

  std::vector<char> keep(fine.branches.size(), 0);
  std::vector<std::uint64_t> kept_children(fine.branches.size(), 0);
  for (std::size_t bi = 0; bi < fine.branches.size(); ++bi) {
    const BranchEvent& ev = fine.branches[bi];
    const std::uint64_t* self = lookup(ev.particle);
    if (!self) continue;
    BranchEvent dev;
    dev.time = ev.time;
    dev.particle = *self;
    dev.parent = remap_parent(ev.parent);
    dev.position_after = ev.position_after;
    dev.atom.entries.push_back(ev.atom.continuing_jump());
    // a saturation-interrupted event lists more entries than born children
    const std::size_t realized = std::min(ev.atom.entries.size(), ev.child_ids.size() + 1);
    for (std::size_t i = 1; i < realized; ++i) {
      const double x = ev.atom.entries[i];
      if (!(x < a)) continue;
      dev.atom.entries.push_back(x);
      remap.emplace_back(ev.child_ids[i - 1], next_id);  // stays sorted: time order
      dev.child_ids.push_back(next_id);
      ++next_id;
    }
    if (dev.atom.is_noop()) continue;  // transition vanishes below a
    keep[bi] = 1;
    kept_children[bi] = dev.child_ids.size();
    out.branches.push_back(std::move(dev));
  }

  std::size_t bi = 0;
  std::uint64_t alive = 1;
  out.counters.born = 1;
  out.counters.peak_alive = 1;
  for (const LogRecord& rec : fine.log) {
    if (rec.kind == EventKind::branch) {
      // branch rows appear in the same order as the branch events
      const bool kept = keep[bi];
      if (kept) {
        out.counters.branch_events++;
        out.counters.born += kept_children[bi];
        alive += kept_children[bi];
        out.counters.peak_alive = std::max(out.counters.peak_alive, alive);
        out.log.push_back(
            {rec.time, *lookup(rec.id), remap_parent(rec.parent), rec.kind, rec.position});
      }
      ++bi;
      continue;
    }
    const std::uint64_t* self = lookup(rec.id);
    if (!self) continue;
    out.log.push_back({rec.time, *self, remap_parent(rec.parent), rec.kind, rec.position});
    if (rec.kind == EventKind::prune) {
      out.counters.pruned++;
      if (alive > 0) --alive;
    }
  }
  out.counters.final_alive = alive;
  out.counters.end_time = fine.counters.end_time;
  out.counters.saturated = fine.counters.saturated;

  for (const ParticleSnapshot& p : fine.population) {
    const std::uint64_t* self = lookup(p.id);
    if (!self) continue;
    out.population.push_back(
        {*self, remap_parent(p.parent), p.birth_time, p.birth_position, p.position});
  }
  std::sort(out.population.begin(), out.population.end(),
            [](const ParticleSnapshot& x, const ParticleSnapshot& y) { return x.id < y.id; });

  // trace recomputed from the surviving per-particle query rows
  std::size_t li = 0;
  for (std::size_t qi = 0; qi < fine.trace.times.size(); ++qi) {
    const double q = fine.trace.times[qi];
    double best = kInf;
    std::uint64_t best_id = kNoParent;
    while (li < out.log.size() && out.log[li].time <= q) {
      const LogRecord& rec = out.log[li];
      if (rec.kind == EventKind::query && rec.time == q && rec.position < best) {
        best = rec.position;
        best_id = rec.id;
      }
      ++li;
    }
    out.trace.times.push_back(q);
    out.trace.values.push_back(best);
    out.trace.argmin.push_back(best_id);
    if (best < kInf && !out.counters.saturated &&
        out.trace.valid_prefix + 1 == out.trace.times.size()) {
      out.trace.valid_prefix++;
    }
  }
  return out;
}

std::string first_mismatch(const SimResult& x, const SimResult& y) {
  std::ostringstream os;
  if (x.log.size() != y.log.size()) {
    os << "log size " << x.log.size() << " vs " << y.log.size();
    return os.str();
  }
  for (std::size_t i = 0; i < x.log.size(); ++i) {
    if (!(x.log[i] == y.log[i])) {
      os << "log record " << i << " differs (t=" << x.log[i].time << "/" << y.log[i].time
         << " id=" << x.log[i].id << "/" << y.log[i].id << ")";
      return os.str();
    }
  }
  if (x.branches.size() != y.branches.size()) {
    os << "branch count " << x.branches.size() << " vs " << y.branches.size();
    return os.str();
  }
  for (std::size_t i = 0; i < x.branches.size(); ++i) {
    if (!(x.branches[i] == y.branches[i])) {
      os << "branch event " << i << " differs";
      return os.str();
    }
  }
  if (x.population.size() != y.population.size()) {
    os << "population size " << x.population.size() << " vs " << y.population.size();
    return os.str();
  }
  for (std::size_t i = 0; i < x.population.size(); ++i) {
    const auto& p = x.population[i];
    const auto& q = y.population[i];
    if (p.id != q.id || p.parent != q.parent || p.birth_time != q.birth_time ||
        p.birth_position != q.birth_position || p.position != q.position) {
      os << "population entry " << i << " differs";
      return os.str();
    }
  }
  if (x.trace.times != y.trace.times || x.trace.values != y.trace.values ||
      x.trace.argmin != y.trace.argmin || x.trace.valid_prefix != y.trace.valid_prefix) {
    return "trace differs";
  }
  if (x.counters.branch_events != y.counters.branch_events ||
      x.counters.born != y.counters.born || x.counters.pruned != y.counters.pruned ||
      x.counters.final_alive != y.counters.final_alive ||
      x.counters.saturated != y.counters.saturated) {
    return "counters differ";
  }
  return {};
}

}  // namespace

CoupledRestriction restrict_coupled(const CharacteristicCouple& couple,
                                    const SimConfig& fine_config, double a, bool strict) {
  if (!(a > 0) || !(a <= fine_config.truncation)) {
    throw InvalidParams("restriction level must satisfy 0 < a <= fine truncation");
  }
  if (fine_config.adaptive_barrier) {
    throw InvalidParams("restriction coupling requires a fixed barrier");
  }
  if (fine_config.cap && *fine_config.cap > a + 1e-12) {
    throw InvalidParams("coupled runs need cap <= restriction level");
  }
  if (!fine_config.record_events || !fine_config.record_population) {
    throw InvalidParams("restriction coupling needs recorded events and population");
  }

  CoupledRestriction out;
  out.fine = simulate(couple, fine_config);
  out.derived = derive_restriction(out.fine, a);

  SimConfig direct_cfg = fine_config;
  direct_cfg.truncation = a;
  out.direct = simulate(couple, direct_cfg);

  out.mismatch = first_mismatch(out.derived, out.direct);
  out.logs_identical = out.mismatch.empty();
  if (strict && !out.logs_identical) {
    throw CouplingMismatch("restriction coupling mismatch: " + out.mismatch);
  }
  return out;
}

std::vector<unsigned char> snapshot_bytes(const SimResult& result) {
  std::vector<unsigned char> bytes;
  auto put = [&](const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    bytes.insert(bytes.end(), c, c + n);
  };
  auto put_u64 = [&](std::uint64_t v) { put(&v, 8); };
  auto put_f64 = [&](double v) { put(&v, 8); };

  const char magic[8] = {'B', 'S', 'L', 'S', 'N', 'A', 'P', '1'};
  put(magic, 8);
  put_u64(result.log.size());
  for (const LogRecord& r : result.log) {
    put_f64(r.time);
    put_u64(r.id);
    put_u64(r.parent);
    bytes.push_back(static_cast<unsigned char>(r.kind));
    put_f64(r.position);
  }
  put_u64(result.branches.size());
  for (const BranchEvent& b : result.branches) {
    put_f64(b.time);
    put_u64(b.particle);
    put_u64(b.parent);
    put_f64(b.position_after);
    put_u64(b.atom.entries.size());
    for (double e : b.atom.entries) put_f64(e);
    put_u64(b.child_ids.size());
    for (std::uint64_t c : b.child_ids) put_u64(c);
  }
  put_u64(result.population.size());
  for (const ParticleSnapshot& p : result.population) {
    put_u64(p.id);
    put_u64(p.parent);
    put_f64(p.birth_time);
    put_f64(p.birth_position);
    put_f64(p.position);
  }
  put_u64(result.trace.times.size());
  for (std::size_t i = 0; i < result.trace.times.size(); ++i) {
    put_f64(result.trace.times[i]);
    put_f64(result.trace.values[i]);
    put_u64(result.trace.argmin[i]);
  }
  put_u64(result.trace.valid_prefix);
  put_u64(result.counters.branch_events);
  put_u64(result.counters.born);
  put_u64(result.counters.pruned);
  put_u64(result.counters.saturated ? 1 : 0);
  return bytes;
}

}  // namespace bsl
