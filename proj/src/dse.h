#ifndef DRAMDSE_DSE_H_
#define DRAMDSE_DSE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "dram.h"
#include "edp.h"
#include "workload.h"

namespace dramdse {

// One architecture slice of the sweep: variant + geometry + cost profile.
struct ArchConfig {
  ArchVariant variant;
  DramGeometry geometry;
  CostProfile profile;
};

struct DesignPoint {
  int layer = 0;
  TilingConfig tiling;
  ScheduleScheme schedule = ScheduleScheme::kIfmsReuse;  // concrete
  MappingPolicy mapping;
  ArchKind arch = ArchKind::kDdr3;
};

struct PointEval {
  EdpResult edp;
  AccessCounts counts;                 // layer totals
  std::vector<AccessCounts> per_tile;  // one entry per tile event
  TrafficTotals traffic;
};

// Reference pipeline: materialized trace -> per-tile unit ranges ->
// explicit coordinates -> stateful row-buffer walk with state carried
// across tiles. evaluate uses it directly; the sweep engine is checked
// against it.
PointEval EvaluatePoint(const LayerShape& layer, const TilingConfig& tiling,
                        ScheduleScheme schedule, const MappingPolicy& mapping,
                        const ArchConfig& arch, bool keep_per_tile = false);

// point.layer indexes into network; point.arch must match arch.
PointEval EvaluatePoint(std::span<const LayerShape> network,
                        const DesignPoint& point, const ArchConfig& arch,
                        bool keep_per_tile = false);

// Sweep engine: layer totals for one (tiling, schedule) under several
// (geometry, policy) lanes in a single pass over the tile trace.
struct LaneSpec {
  const DramGeometry* geometry = nullptr;
  MappingPolicy policy;
};

std::vector<AccessCounts> EvaluateTilingLanes(const LayerShape& layer,
                                              const TilingConfig& tiling,
                                              ScheduleScheme schedule,
                                              std::span<const LaneSpec> lanes);

struct ExploreOptions {
  BufferConfig buffers;
  PartitionGranularity granularity = PartitionGranularity::kDivisors;
  std::vector<ScheduleScheme> schedules;  // may include kAdaptiveReuse
  std::vector<MappingPolicy> policies;    // default: all six presets
  bool keep_full_sweep = false;
  bool skip_infeasible_layers = false;
  int workers = 1;  // <=0: hardware concurrency
};

struct LayerWinner {
  int layer = 0;
  bool found = false;  // false when the layer was skipped as infeasible
  TilingConfig tiling;
  ScheduleScheme requested = ScheduleScheme::kIfmsReuse;
  ScheduleScheme resolved = ScheduleScheme::kIfmsReuse;
  MappingPolicy mapping;
  EdpResult edp;
  AccessCounts counts;
};

struct SweepRow {
  int arch_index = 0;
  int layer = 0;
  TilingConfig tiling;
  ScheduleScheme requested = ScheduleScheme::kIfmsReuse;
  ScheduleScheme resolved = ScheduleScheme::kIfmsReuse;
  int policy_id = 0;
  EdpResult edp;
};

struct ArchResult {
  int arch_index = 0;
  std::vector<LayerWinner> winners;  // one per layer
  NetworkTotals totals;              // over found layers
};

struct DseResult {
  std::vector<ArchResult> per_arch;
  std::vector<int> skipped_layers;
  std::vector<SweepRow> sweep;  // populated under keep_full_sweep
};

// Exhaustive exploration per layer in (partition, schedule, mapping) order
// with Alg-style <= tie handling (the last enumerated tie wins). Each arch
// is an independent outer sweep slice.
DseResult Explore(std::span<const LayerShape> network,
                  std::span<const ArchConfig> archs,
                  const ExploreOptions& options);

struct CompareCell {
  int arch_index = 0;
  int layer = 0;
  int policy_id = 0;
  bool found = false;
  ScheduleScheme requested = ScheduleScheme::kIfmsReuse;
  ScheduleScheme resolved = ScheduleScheme::kIfmsReuse;
  TilingConfig best_tiling;
  EdpResult edp;
};

// layer x policy EDP matrix (per arch), each cell minimized over the
// feasible partitions under the given schedule.
std::vector<CompareCell> ComparePolicies(std::span<const LayerShape> network,
                                         std::span<const ArchConfig> archs,
                                         ScheduleScheme schedule,
                                         const ExploreOptions& options);

}  // namespace dramdse

#endif  // DRAMDSE_DSE_H_
