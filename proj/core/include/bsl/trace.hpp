#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace bsl {

/// Sampled path of the minimum position over one run.
/// Entries beyond valid_prefix are present but not trustworthy (barrier hit
/// or saturated run); they must never be consumed silently.
struct LeftmostTrace {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::uint64_t> argmin;  // lowest id among minimizers
  std::size_t valid_prefix = 0;

  bool fully_valid() const { return valid_prefix == times.size(); }
};

}  // namespace bsl
