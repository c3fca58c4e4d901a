#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bsl/families.hpp"
#include "bsl/trace.hpp"

namespace bsl {

inline constexpr std::uint64_t kNoParent = std::numeric_limits<std::uint64_t>::max();

struct SimConfig {
  double truncation = 1.0;  ///< child displacements at or above this level are cut
  double horizon = 1.0;
  /// Absorbing barrier: particles materialized at or above it are pruned with
  /// their future lineage. Below the barrier the system is exact.
  std::optional<double> cap;
  /// Front-tracking mode: the barrier follows the running minimum at distance
  /// `window`, re-anchored every `sync_interval` time units (0 picks an
  /// interval from the birth intensity inside the window so the population
  /// at most doubles between anchors), optionally culling down to the
  /// `select_lowest` lowest particles. Traces from adaptive runs are
  /// approximations; exact-barrier semantics require a fixed cap.
  bool adaptive_barrier = false;
  double window = 2.0;
  double sync_interval = 0.0;
  std::size_t select_lowest = 0;  // 0 = no culling
  std::size_t max_particles = 5'000'000;
  std::uint64_t master_seed = 1;
  std::vector<double> query_times;
  bool record_events = true;      ///< keep the per-event log (memory heavy)
  bool record_population = true;  ///< keep the final population snapshot
};

enum class EventKind : std::uint8_t { branch = 0, query = 1, prune = 2 };

struct LogRecord {
  double time;
  std::uint64_t id;
  std::uint64_t parent;
  EventKind kind;
  double position;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

/// Full-fidelity branch event (displacements and the ids of the children
/// actually instantiated).
struct BranchEvent {
  double time;
  std::uint64_t particle;
  std::uint64_t parent;
  DisplacementAtom atom;
  double position_after;
  std::vector<std::uint64_t> child_ids;

  friend bool operator==(const BranchEvent&, const BranchEvent&) = default;
};

struct ParticleSnapshot {
  std::uint64_t id;
  std::uint64_t parent;
  double birth_time;
  double birth_position;
  double position;
};

struct SimCounters {
  std::uint64_t branch_events = 0;
  std::uint64_t candidates = 0;
  std::uint64_t born = 0;
  std::uint64_t pruned = 0;
  std::uint64_t culled = 0;
  std::uint64_t peak_alive = 0;
  std::uint64_t final_alive = 0;
  double end_time = 0;
  bool saturated = false;
};

struct SimResult {
  std::vector<LogRecord> log;
  std::vector<BranchEvent> branches;
  std::vector<ParticleSnapshot> population;
  LeftmostTrace trace;
  SimCounters counters;
};

/// Event-driven simulation of the truncated system. The root starts at the
/// origin at time zero; between events positions advance lazily by exact
/// subordinator increments; every particle owns hash-derived random streams
/// keyed by its lineage, so results are reproducible under any scheduling and
/// stable across truncation levels.
SimResult simulate(const CharacteristicCouple& couple, const SimConfig& config);

/// Minimum position over alive particles at the configured query times.
LeftmostTrace leftmost_trace(const CharacteristicCouple& couple, const SimConfig& config);

struct CoupledRestriction {
  SimResult fine;     ///< run at the coarse-to-fine level a'
  SimResult derived;  ///< restriction of `fine` to displacements below a
  SimResult direct;   ///< fresh run at level a with the same stream discipline
  bool logs_identical = false;
  std::string mismatch;  ///< first difference, empty when identical
};

/// Run the fine system once, derive its restriction to the smaller level a,
/// and run the a-system directly with coupled streams. Event logs are
/// byte-identical whenever the branch mass below a and below the fine level
/// coincide (bp and ri always; mb/mt only at equal levels). `strict` throws
/// CouplingMismatch on a difference instead of returning it.
CoupledRestriction restrict_coupled(const CharacteristicCouple& couple,
                                    const SimConfig& fine_config, double a,
                                    bool strict = false);

/// Deterministic binary image of a result (log, branch events, counters);
/// equal bytes mean equal runs.
std::vector<unsigned char> snapshot_bytes(const SimResult& result);

}  // namespace bsl
