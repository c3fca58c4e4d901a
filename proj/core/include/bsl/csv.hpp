#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "bsl/engine.hpp"
#include "bsl/measures.hpp"
#include "bsl/trace.hpp"

namespace bsl {

/// Round-trip-exact decimal rendering of a double ("%.17g"); identical input
/// bytes on every rerun.
std::string format_double(double v);

/// Generic numeric table with a header row. The optional preamble is written
/// as a single "# ..." comment line before the header (used for the run
/// manifest reference).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const CsvTable& table, std::ostream& os, const std::string& preamble = {});

/// Event log export. Columns: time,particle_id,parent_id,kind,position with
/// kind in {branch,query,prune}; a branch event additionally emits one row
/// per child born (kind=branch, the child's id and birth position).
void write_events_csv(const SimResult& result, std::ostream& os,
                      const std::string& preamble = {});

void write_trace_csv(const LeftmostTrace& trace, std::ostream& os,
                     const std::string& preamble = {});

CsvTable laplace_csv(const LaplaceTable& table);
CsvTable audit_csv(const AuditReport& report);
CsvTable envelope_csv(const EnvelopeReport& report);

}  // namespace bsl
