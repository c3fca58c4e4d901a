#include "bsl/csv.hpp"

#include <cstdio>

namespace bsl {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const CsvTable& table, std::ostream& os, const std::string& preamble) {
  if (!preamble.empty()) os << "# " << preamble << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) os << ',';
    os << table.columns[c];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << format_double(row[c]);
    }
    os << '\n';
  }
}

namespace {

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::branch:
      return "branch";
    case EventKind::query:
      return "query";
    case EventKind::prune:
      return "prune";
  }
  return "?";
}

void event_row(std::ostream& os, double t, std::uint64_t id, std::uint64_t parent,
               const char* kind, double position) {
  os << format_double(t) << ',' << id << ',';
  if (parent == kNoParent) {
    os << -1;
  } else {
    os << static_cast<long long>(parent);
  }
  os << ',' << kind << ',' << format_double(position) << '\n';
}

}  // namespace

void write_events_csv(const SimResult& result, std::ostream& os, const std::string& preamble) {
  if (!preamble.empty()) os << "# " << preamble << "\n";
  os << "time,particle_id,parent_id,kind,position\n";
  // merge the flat log with per-child birth rows from the branch events
  std::size_t bi = 0;
  for (const LogRecord& rec : result.log) {
    event_row(os, rec.time, rec.id, rec.parent, kind_name(rec.kind), rec.position);
    if (rec.kind == EventKind::branch && bi < result.branches.size()) {
      const BranchEvent& ev = result.branches[bi++];
      const double pre = ev.position_after - ev.atom.continuing_jump();
      for (std::size_t i = 0; i < ev.child_ids.size(); ++i) {
        event_row(os, ev.time, ev.child_ids[i], ev.particle, "branch",
                  pre + ev.atom.entries[i + 1]);
      }
    }
  }
}

void write_trace_csv(const LeftmostTrace& trace, std::ostream& os, const std::string& preamble) {
  if (!preamble.empty()) os << "# " << preamble << "\n";
  os << "time,min_position,valid\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    os << format_double(trace.times[i]) << ',' << format_double(trace.values[i]) << ','
       << (i < trace.valid_prefix ? 1 : 0) << '\n';
  }
}

CsvTable laplace_csv(const LaplaceTable& table) {
  CsvTable t;
  t.columns = {"lambda", "phi", "branch_moment", "kappa"};
  for (std::size_t i = 0; i < table.lambda.size(); ++i) {
    t.rows.push_back({table.lambda[i], table.phi[i], table.moment[i], table.kappa[i]});
  }
  return t;
}

CsvTable audit_csv(const AuditReport& report) {
  CsvTable t;
  t.columns = {"a", "log_mass_ratio", "moment_high", "log_moment_low", "variance_ratio"};
  for (const AuditRow& r : report.rows) {
    t.rows.push_back({r.a, r.log_mass_ratio, r.moment_high, r.log_moment_low, r.variance_ratio});
  }
  return t;
}

CsvTable envelope_csv(const EnvelopeReport& report) {
  CsvTable t;
  t.columns = {"a", "moment", "upper", "lower"};
  for (const EnvelopeRow& r : report.rows) {
    t.rows.push_back({r.a, r.moment, r.upper, r.lower});
  }
  return t;
}

}  // namespace bsl
