#ifndef DRAMDSE_EDP_H_
#define DRAMDSE_EDP_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "dram.h"

namespace dramdse {

// Per-architecture access costs: DRAM cycles and nanojoules for each
// access condition. Loaded from profile files; values come from offline
// cycle-accurate simulation.
struct CostProfile {
  ArchKind arch = ArchKind::kDdr3;
  std::array<uint64_t, kNumAccessClasses> cycles{};   // C_x
  std::array<double, kNumAccessClasses> energy_nj{};  // E_x

  uint64_t cycles_of(AccessClass c) const { return cycles[int(c)]; }
  double energy_of(AccessClass c) const { return energy_nj[int(c)]; }

  // All values positive; unless allow_unordered, enforces
  // column <= bank <= subarray <= row_near <= row_far for both cycles
  // and energy. Throws ConfigError.
  void Validate(bool allow_unordered = false) const;
};

uint64_t CyclesForCounts(const AccessCounts& counts,
                         const CostProfile& profile);
double EnergyForCounts(const AccessCounts& counts, const CostProfile& profile);

struct EdpResult {
  uint64_t latency_cycles = 0;
  double energy_nj = 0.0;
  double edp = 0.0;  // latency_cycles * energy_nj, cycle*nJ
};

EdpResult LayerEdp(std::span<const AccessCounts> per_tile_counts,
                   const CostProfile& profile);
EdpResult EdpForTotalCounts(const AccessCounts& total,
                            const CostProfile& profile);

struct NetworkTotals {
  uint64_t latency_cycles = 0;
  double energy_nj = 0.0;
  double edp = 0.0;  // sum of per-layer EDPs
};

NetworkTotals NetworkEdp(std::span<const EdpResult> per_layer);

}  // namespace dramdse

#endif  // DRAMDSE_EDP_H_
