#pragma once

#include <cstdint>

namespace serialbench {

// Work/depth counters for a single solver run.
//
// work counts unit operations (gate evaluations, cell updates, compositions,
// oracle probes); depth counts sequential rounds, i.e. the length of the
// longest chain of dependent operations the solver executed. Meters are
// plain values owned by the caller and never shared between runs.
struct CostMeter {
  std::uint64_t work = 0;
  std::uint64_t depth = 0;

  void charge(std::uint64_t w, std::uint64_t d) noexcept {
    work += w;
    depth += d;
  }

  friend bool operator==(const CostMeter&, const CostMeter&) = default;
};

}  // namespace serialbench
