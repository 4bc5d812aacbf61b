#include "edp.h"

namespace dramdse {

void CostProfile::Validate(bool allow_unordered) const {
  for (int i = 0; i < kNumAccessClasses; ++i) {
    if (cycles[i] == 0) {
      throw ConfigError(std::string("profile ") + ToString(arch) +
                        ": cycles_" + ToString(AccessClass(i)) +
                        " must be > 0");
    }
    if (energy_nj[i] <= 0.0) {
      throw ConfigError(std::string("profile ") + ToString(arch) +
                        ": energy_" + ToString(AccessClass(i)) +
                        " must be > 0");
    }
  }
  if (allow_unordered) return;
  // Qualitative cost shape shared by all supported architectures.
  constexpr AccessClass chain[] = {AccessClass::kColumn, AccessClass::kBank,
                                   AccessClass::kSubarray,
                                   AccessClass::kRowNear, AccessClass::kRowFar};
  for (int i = 0; i + 1 < 5; ++i) {
    if (cycles_of(chain[i]) > cycles_of(chain[i + 1]) ||
        energy_of(chain[i]) > energy_of(chain[i + 1])) {
      throw ConfigError(
          std::string("profile ") + ToString(arch) + ": expected " +
          ToString(chain[i]) + " <= " + ToString(chain[i + 1]) +
          " for cycles and energy (pass --allow-unordered-profile to skip)");
    }
  }
}

uint64_t CyclesForCounts(const AccessCounts& counts,
                         const CostProfile& profile) {
  uint64_t total = 0;
  for (int i = 0; i < kNumAccessClasses; ++i) {
    total += counts.of(AccessClass(i)) * profile.cycles[i];
  }
  return total;
}

double EnergyForCounts(const AccessCounts& counts, const CostProfile& profile) {
  double total = 0.0;
  for (int i = 0; i < kNumAccessClasses; ++i) {
    total += double(counts.of(AccessClass(i))) * profile.energy_nj[i];
  }
  return total;
}

EdpResult EdpForTotalCounts(const AccessCounts& total,
                            const CostProfile& profile) {
  EdpResult r;
  r.latency_cycles = CyclesForCounts(total, profile);
  r.energy_nj = EnergyForCounts(total, profile);
  r.edp = double(r.latency_cycles) * r.energy_nj;
  return r;
}

EdpResult LayerEdp(std::span<const AccessCounts> per_tile_counts,
                   const CostProfile& profile) {
  AccessCounts total;
  for (const AccessCounts& c : per_tile_counts) total += c;
  return EdpForTotalCounts(total, profile);
}

NetworkTotals NetworkEdp(std::span<const EdpResult> per_layer) {
  NetworkTotals totals;
  for (const EdpResult& r : per_layer) {
    totals.latency_cycles += r.latency_cycles;
    totals.energy_nj += r.energy_nj;
    totals.edp += r.edp;
  }
  return totals;
}

}  // namespace dramdse
