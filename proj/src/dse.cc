#include "dse.h"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <thread>

namespace dramdse {

namespace {

constexpr int kNumTypes = 3;
constexpr ScheduleScheme kFixedSchedules[3] = {ScheduleScheme::kIfmsReuse,
                                               ScheduleScheme::kWghsReuse,
                                               ScheduleScheme::kOfmsReuse};

// DRAM footprint of one layer: per-type tile slots laid out contiguously
// in first-fetch order (ifms region, then wghs, then ofms).
struct RegionPlan {
  uint64_t unit_bytes = 1;
  std::array<uint64_t, kNumTypes> slot_units{};
  std::array<uint64_t, kNumTypes> tile_count{};
  std::array<uint64_t, kNumTypes> base_units{};
  uint64_t total_units = 0;
};

RegionPlan MakeRegionPlan(const LayerShape& layer, const TilingConfig& tiling,
                          const TileGrid& grid, const DramGeometry& geometry) {
  const TileSizes sizes = TileByteSizes(layer, tiling);
  RegionPlan plan;
  plan.unit_bytes = geometry.effective_access_unit_bytes();
  auto units_of = [&](uint64_t raw) {
    const uint64_t scaled = detail::ScaleBytes(raw, layer.traffic_scale);
    return (scaled + plan.unit_bytes - 1) / plan.unit_bytes;
  };
  plan.slot_units = {units_of(sizes.ifm_bytes), units_of(sizes.wgh_bytes),
                     units_of(sizes.ofm_bytes)};
  plan.tile_count = {TileCount(DataType::kIfms, grid),
                     TileCount(DataType::kWghs, grid),
                     TileCount(DataType::kOfms, grid)};
  uint64_t base = 0;
  for (int t = 0; t < kNumTypes; ++t) {
    plan.base_units[t] = base;
    base += plan.slot_units[t] * plan.tile_count[t];
  }
  plan.total_units = base;
  if (plan.total_units > geometry.chip_capacity_units()) {
    throw CapacityExceeded(
        "layer '" + layer.name + "' needs " +
        std::to_string(plan.total_units) + " access units but the chip has " +
        std::to_string(geometry.chip_capacity_units()) +
        "; raise the geometry or shrink the workload");
  }
  return plan;
}

bool IsRagged(const LayerShape& layer, const TilingConfig& tiling) {
  return layer.m_out % tiling.t_m != 0 || layer.c_in % tiling.t_c != 0 ||
         layer.h_out % tiling.t_h != 0 || layer.w_out % tiling.t_w != 0;
}

// Reference walk: explicit per-unit coordinates through the stateful
// row-buffer classifier.
AccessCounts WalkPointCounts(const LayerShape& layer,
                             const TilingConfig& tiling,
                             ScheduleScheme schedule,
                             const MappingPolicy& mapping,
                             const DramGeometry& geometry,
                             const ArchVariant& variant,
                             std::vector<AccessCounts>* per_tile,
                             TrafficTotals* traffic) {
  const TileGrid grid = GridFor(layer, tiling);
  const RegionPlan region = MakeRegionPlan(layer, tiling, grid, geometry);
  const RadixPlan plan = RadixPlan::For(mapping, geometry);
  const std::array<OrdinalStrides, kNumTypes> strides = {
      StridesFor(DataType::kIfms, schedule, grid),
      StridesFor(DataType::kWghs, schedule, grid),
      StridesFor(DataType::kOfms, schedule, grid)};
  const PolicyDigits one = PrepareStride(plan, 1);

  RowBufferClassifier classifier(variant);
  AccessCounts total;
  ForEachTileEvent(layer, tiling, schedule, [&](const TileEvent& ev) {
    if (traffic != nullptr) traffic->Add(ev, region.unit_bytes);
    const int t = int(ev.data_type);
    const uint64_t ordinal = strides[t].OrdinalOf(ev.tile);
    const uint64_t units =
        (ev.n_bytes + region.unit_bytes - 1) / region.unit_bytes;
    const uint64_t first =
        region.base_units[t] + ordinal * region.slot_units[t];
    PolicyDigits digits = PolicyDigits::Of(plan, first);
    AccessCounts ev_counts;
    for (uint64_t i = 0; i < units; ++i) {
      ev_counts.of(classifier.Classify(digits.ToCoord(plan))) += 1;
      digits.AddStride(plan, one);
    }
    total += ev_counts;
    if (per_tile != nullptr) per_tile->push_back(ev_counts);
  });
  return total;
}

// ------------------------------------------------------------------
// Sweep engine: incremental digit tracking per (geometry, policy) lane.
// ------------------------------------------------------------------

struct TypeCursor {
  PolicyDigits first;
};

// The ordinal progression is identical across lanes, so the caller
// resolves each event to one of these once.
enum class EventKind { kSameTile, kNextTile, kJump };

struct Lane {
  RadixPlan plan;
  int group = 0;
  int pos_bank = 0;
  int pos_sub = 0;
  bool column_innermost = false;
  std::array<int, 4> level_idx{};  // plan.level_class as raw indices
  int row_near_idx = int(AccessClass::kRowNear);
  int row_far_idx = int(AccessClass::kRowFar);
  std::array<PolicyDigits, kNumTypes> slot_stride;
  std::array<PolicyDigits, kNumTypes> tail_stride;  // (slot_units - 1)
  // 32-bit tail math is exact when every operand stays below 2^32.
  std::array<bool, kNumTypes> narrow_tail{};
  std::array<TypeCursor, kNumTypes> cursor;
  bool has_prev = false;
  int prev_bank = 0, prev_sub = 0, prev_row = 0;
  std::array<uint64_t, kNumAccessClasses> acc{};

  AccessCounts Counts() const {
    AccessCounts c;
    c.column = acc[int(AccessClass::kColumn)];
    c.row_near = acc[int(AccessClass::kRowNear)];
    c.row_far = acc[int(AccessClass::kRowFar)];
    c.subarray = acc[int(AccessClass::kSubarray)];
    c.bank = acc[int(AccessClass::kBank)];
    return c;
  }
};

Lane MakeLane(const LaneSpec& spec, int group, const RegionPlan& region) {
  Lane lane;
  lane.plan = RadixPlan::For(spec.policy, *spec.geometry);
  lane.group = group;
  for (int i = 0; i < 3; ++i) {
    if (lane.plan.order[i] == MapDim::kBank) lane.pos_bank = i;
    if (lane.plan.order[i] == MapDim::kSubarray) lane.pos_sub = i;
  }
  lane.column_innermost = lane.plan.order[0] == MapDim::kColumn;
  for (int i = 0; i < 4; ++i) lane.level_idx[i] = int(lane.plan.level_class[i]);
  for (int t = 0; t < kNumTypes; ++t) {
    const uint64_t slot = region.slot_units[t];
    lane.slot_stride[t] = PrepareStride(lane.plan, slot);
    lane.tail_stride[t] = PrepareStride(lane.plan, slot - 1);
    lane.narrow_tail[t] =
        lane.plan.p3 + slot < uint64_t(1) << 31 &&
        region.tile_count[t] * uint64_t(lane.plan.rows_total) <
            uint64_t(1) << 31;
  }
  return lane;
}

inline void LaneEvent(Lane& lane, const RegionPlan& region, int t,
                      uint64_t ordinal, EventKind kind) {
  const RadixPlan& plan = lane.plan;
  TypeCursor& cur = lane.cursor[t];
  switch (kind) {
    case EventKind::kSameTile:
      break;
    case EventKind::kNextTile:
      cur.first.AddStride(plan, lane.slot_stride[t]);
      break;
    case EventKind::kJump:
      cur.first = PolicyDigits::Of(
          plan, region.base_units[t] + ordinal * region.slot_units[t]);
      break;
  }

  const int b = cur.first.d[lane.pos_bank];
  const int s = cur.first.d[lane.pos_sub];
  const int r = cur.first.row;

  int cls;
  if (b != lane.prev_bank) {
    cls = int(AccessClass::kBank);
  } else if (s != lane.prev_sub) {
    cls = int(AccessClass::kSubarray);
  } else if (r != lane.prev_row) {
    cls = r < plan.rows_near ? lane.row_near_idx : lane.row_far_idx;
  } else {
    cls = int(AccessClass::kColumn);
  }
  if (!lane.has_prev) {
    cls = r < plan.rows_near ? lane.row_near_idx : lane.row_far_idx;
    lane.has_prev = true;
  }
  lane.acc[cls] += 1;

  const uint64_t units = region.slot_units[t];
  if (units > 1) {
    if (lane.narrow_tail[t]) {
      // Carry counts from the digit offsets within each prefix level;
      // runs that stay inside one row/bank/column block skip the
      // divisions entirely.
      const uint32_t span = uint32_t(units) - 1;
      const uint32_t m1 = uint32_t(cur.first.d[0]);
      if (m1 + span < uint32_t(plan.p1)) {
        lane.acc[lane.level_idx[0]] += span;
      } else {
        const uint32_t m2 = m1 + uint32_t(cur.first.d[1]) * uint32_t(plan.p1);
        const uint32_t n1 = (m1 + span) / uint32_t(plan.p1);
        if (m2 + span < uint32_t(plan.p2)) {
          lane.acc[lane.level_idx[0]] += span - n1;
          lane.acc[lane.level_idx[1]] += n1;
        } else {
          const uint32_t m3 =
              m2 + uint32_t(cur.first.d[2]) * uint32_t(plan.p2);
          const uint32_t n2 = (m2 + span) / uint32_t(plan.p2);
          const uint32_t n3 = m3 + span < uint32_t(plan.p3)
                                  ? 0
                                  : (m3 + span) / uint32_t(plan.p3);
          lane.acc[lane.level_idx[0]] += span - n1;
          lane.acc[lane.level_idx[1]] += n1 - n2;
          lane.acc[lane.level_idx[2]] += n2 - n3;
          if (n3 != 0) {
            if (!plan.level3_is_row) {
              lane.acc[lane.level_idx[3]] += n3;
            } else {
              const int64_t near_cnt = std::clamp<int64_t>(
                  int64_t(plan.rows_near) - (int64_t(r) + 1), 0, int64_t(n3));
              lane.acc[lane.row_near_idx] += uint64_t(near_cnt);
              lane.acc[lane.row_far_idx] += n3 - uint64_t(near_cnt);
            }
          }
        }
      }
    } else {
      const uint64_t first_unit =
          region.base_units[t] + ordinal * region.slot_units[t];
      AccessCounts tail;
      ClassifyRunTail(plan, first_unit, cur.first, units, tail);
      lane.acc[int(AccessClass::kColumn)] += tail.column;
      lane.acc[int(AccessClass::kRowNear)] += tail.row_near;
      lane.acc[int(AccessClass::kRowFar)] += tail.row_far;
      lane.acc[int(AccessClass::kSubarray)] += tail.subarray;
      lane.acc[int(AccessClass::kBank)] += tail.bank;
    }
    // Identity of the run's last unit for the next boundary step.
    if (lane.column_innermost &&
        int64_t(cur.first.d[0]) + int64_t(units) - 1 < plan.radix[0]) {
      lane.prev_bank = b;
      lane.prev_sub = s;
      lane.prev_row = r;
    } else {
      PolicyDigits last = cur.first;
      last.AddStride(plan, lane.tail_stride[t]);
      lane.prev_bank = last.d[lane.pos_bank];
      lane.prev_sub = last.d[lane.pos_sub];
      lane.prev_row = last.row;
    }
  } else {
    lane.prev_bank = b;
    lane.prev_sub = s;
    lane.prev_row = r;
  }
}

// Counts per lane plus total DRAM accesses per geometry group, from one
// walk of the (tiling, schedule) trace.
struct LanePass {
  std::vector<AccessCounts> lane_counts;
  std::vector<uint64_t> group_accesses;
};

LanePass RunLanePass(const LayerShape& layer, const TilingConfig& tiling,
                     ScheduleScheme schedule, std::span<const LaneSpec> lanes,
                     std::span<const DramGeometry* const> group_geometries,
                     std::span<const int> lane_group) {
  LanePass pass;
  pass.group_accesses.assign(group_geometries.size(), 0);

  if (IsRagged(layer, tiling)) {
    // Ragged tiles transfer clamped byte counts; take the reference walk.
    pass.lane_counts.reserve(lanes.size());
    for (const LaneSpec& spec : lanes) {
      pass.lane_counts.push_back(WalkPointCounts(
          layer, tiling, schedule, spec.policy, *spec.geometry,
          ArchVariant::For(ArchKind::kDdr3), nullptr, nullptr));
    }
    for (size_t g = 0; g < group_geometries.size(); ++g) {
      pass.group_accesses[g] =
          TrafficFor(layer, tiling, schedule,
                     group_geometries[g]->effective_access_unit_bytes())
              .total_accesses();
    }
    return pass;
  }

  const TileGrid grid = GridFor(layer, tiling);
  const std::array<OrdinalStrides, kNumTypes> strides = {
      StridesFor(DataType::kIfms, schedule, grid),
      StridesFor(DataType::kWghs, schedule, grid),
      StridesFor(DataType::kOfms, schedule, grid)};

  std::vector<RegionPlan> regions;
  regions.reserve(group_geometries.size());
  for (const DramGeometry* geom : group_geometries) {
    regions.push_back(MakeRegionPlan(layer, tiling, grid, *geom));
  }
  std::vector<Lane> states;
  states.reserve(lanes.size());
  for (size_t i = 0; i < lanes.size(); ++i) {
    states.push_back(MakeLane(lanes[i], lane_group[i], regions[lane_group[i]]));
  }

  int64_t prev_ordinal[kNumTypes] = {-2, -2, -2};
  uint64_t events_by_type[kNumTypes] = {0, 0, 0};
  ForEachTileEvent(layer, tiling, schedule, [&](const TileEvent& ev) {
    const int t = int(ev.data_type);
    const uint64_t ordinal = strides[t].OrdinalOf(ev.tile);
    EventKind kind;
    if (int64_t(ordinal) == prev_ordinal[t]) {
      kind = EventKind::kSameTile;
    } else if (int64_t(ordinal) == prev_ordinal[t] + 1) {
      kind = EventKind::kNextTile;
    } else {
      kind = EventKind::kJump;
    }
    prev_ordinal[t] = int64_t(ordinal);
    ++events_by_type[t];
    for (Lane& lane : states) {
      LaneEvent(lane, regions[lane.group], t, ordinal, kind);
    }
  });
  for (size_t g = 0; g < regions.size(); ++g) {
    for (int t = 0; t < kNumTypes; ++t) {
      pass.group_accesses[g] += events_by_type[t] * regions[g].slot_units[t];
    }
  }

  pass.lane_counts.reserve(states.size());
  for (const Lane& lane : states) pass.lane_counts.push_back(lane.Counts());
  return pass;
}

void RunWorkers(int workers, size_t n,
                const std::function<void(size_t)>& body) {
  if (workers <= 0) workers = int(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (workers == 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  auto run = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const size_t n_threads = std::min(size_t(workers), n);
  pool.reserve(n_threads);
  for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(run);
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct PassResult {
  std::array<bool, 3> have{};
  std::array<LanePass, 3> by_schedule;
};

int ScheduleIndex(ScheduleScheme s) {
  switch (s) {
    case ScheduleScheme::kIfmsReuse: return 0;
    case ScheduleScheme::kWghsReuse: return 1;
    case ScheduleScheme::kOfmsReuse: return 2;
    default: return -1;
  }
}

// Fixed scheme with the fewest accesses on this geometry group; ties
// resolve ifms < wghs < ofms (matches SelectAdaptiveSchedule).
int ResolveAdaptive(const PassResult& pass, size_t group) {
  int best = 0;
  uint64_t best_accesses = 0;
  bool first = true;
  for (int si = 0; si < 3; ++si) {
    const uint64_t accesses = pass.by_schedule[si].group_accesses[group];
    if (first || accesses < best_accesses) {
      best = si;
      best_accesses = accesses;
      first = false;
    }
  }
  return best;
}

struct SweepContext {
  std::vector<const DramGeometry*> group_geometries;
  std::vector<int> arch_group;
  std::vector<LaneSpec> lanes;  // group-major, then policy
  std::vector<int> lane_group;
  size_t n_policies = 0;

  size_t LaneIndex(int group, size_t policy) const {
    return size_t(group) * n_policies + policy;
  }
};

SweepContext MakeSweepContext(std::span<const ArchConfig> archs,
                              std::span<const MappingPolicy> policies) {
  SweepContext ctx;
  ctx.n_policies = policies.size();
  for (size_t a = 0; a < archs.size(); ++a) {
    int g = -1;
    for (size_t i = 0; i < ctx.group_geometries.size(); ++i) {
      if (*ctx.group_geometries[i] == archs[a].geometry) {
        g = int(i);
        break;
      }
    }
    if (g < 0) {
      g = int(ctx.group_geometries.size());
      ctx.group_geometries.push_back(&archs[a].geometry);
    }
    ctx.arch_group.push_back(g);
  }
  for (size_t g = 0; g < ctx.group_geometries.size(); ++g) {
    for (const MappingPolicy& p : policies) {
      ctx.lanes.push_back(LaneSpec{ctx.group_geometries[g], p});
      ctx.lane_group.push_back(int(g));
    }
  }
  return ctx;
}

PassResult RunPass(const LayerShape& layer, const TilingConfig& tiling,
                   const std::array<bool, 3>& needed,
                   const SweepContext& ctx) {
  PassResult result;
  for (int si = 0; si < 3; ++si) {
    if (!needed[si]) continue;
    result.by_schedule[si] =
        RunLanePass(layer, tiling, kFixedSchedules[si], ctx.lanes,
                    ctx.group_geometries, ctx.lane_group);
    result.have[si] = true;
  }
  return result;
}

// Resolves the adaptive schedule per geometry group from cheap event
// walks (no lane work); ties break ifms < wghs < ofms.
void ResolveAdaptivePerGroup(const LayerShape& layer,
                             const TilingConfig& tiling,
                             const SweepContext& ctx,
                             std::vector<int>& resolved) {
  if (!IsRagged(layer, tiling)) {
    const TileGrid grid = GridFor(layer, tiling);
    uint64_t events[3][kNumTypes] = {};
    for (int si = 0; si < 3; ++si) {
      ForEachTileEvent(layer, tiling, kFixedSchedules[si],
                       [&](const TileEvent& ev) {
                         ++events[si][int(ev.data_type)];
                       });
    }
    for (size_t g = 0; g < ctx.group_geometries.size(); ++g) {
      const RegionPlan region =
          MakeRegionPlan(layer, tiling, grid, *ctx.group_geometries[g]);
      int best = 0;
      uint64_t best_acc = 0;
      bool first = true;
      for (int si = 0; si < 3; ++si) {
        uint64_t acc = 0;
        for (int t = 0; t < kNumTypes; ++t) {
          acc += events[si][t] * region.slot_units[t];
        }
        if (first || acc < best_acc) {
          best = si;
          best_acc = acc;
          first = false;
        }
      }
      resolved[g] = best;
    }
    return;
  }
  for (size_t g = 0; g < ctx.group_geometries.size(); ++g) {
    const uint64_t unit =
        ctx.group_geometries[g]->effective_access_unit_bytes();
    int best = 0;
    uint64_t best_acc = 0;
    bool first = true;
    for (int si = 0; si < 3; ++si) {
      const uint64_t acc =
          TrafficFor(layer, tiling, kFixedSchedules[si], unit)
              .total_accesses();
      if (first || acc < best_acc) {
        best = si;
        best_acc = acc;
        first = false;
      }
    }
    resolved[g] = best;
  }
}

}  // namespace

PointEval EvaluatePoint(const LayerShape& layer, const TilingConfig& tiling,
                        ScheduleScheme schedule, const MappingPolicy& mapping,
                        const ArchConfig& arch, bool keep_per_tile) {
  if (schedule == ScheduleScheme::kAdaptiveReuse) {
    schedule = SelectAdaptiveSchedule(
        layer, tiling, arch.geometry.effective_access_unit_bytes());
  }
  PointEval eval;
  eval.counts = WalkPointCounts(layer, tiling, schedule, mapping,
                                arch.geometry, arch.variant,
                                keep_per_tile ? &eval.per_tile : nullptr,
                                &eval.traffic);
  eval.edp = EdpForTotalCounts(eval.counts, arch.profile);
  return eval;
}

PointEval EvaluatePoint(std::span<const LayerShape> network,
                        const DesignPoint& point, const ArchConfig& arch,
                        bool keep_per_tile) {
  return EvaluatePoint(network[point.layer], point.tiling, point.schedule,
                       point.mapping, arch, keep_per_tile);
}

std::vector<AccessCounts> EvaluateTilingLanes(const LayerShape& layer,
                                              const TilingConfig& tiling,
                                              ScheduleScheme schedule,
                                              std::span<const LaneSpec> lanes) {
  std::vector<const DramGeometry*> group_geometries;
  std::vector<int> lane_group;
  for (const LaneSpec& spec : lanes) {
    int g = -1;
    for (size_t i = 0; i < group_geometries.size(); ++i) {
      if (*group_geometries[i] == *spec.geometry) {
        g = int(i);
        break;
      }
    }
    if (g < 0) {
      g = int(group_geometries.size());
      group_geometries.push_back(spec.geometry);
    }
    lane_group.push_back(g);
  }
  return RunLanePass(layer, tiling, schedule, lanes, group_geometries,
                     lane_group)
      .lane_counts;
}

DseResult Explore(std::span<const LayerShape> network,
                  std::span<const ArchConfig> archs,
                  const ExploreOptions& options) {
  if (network.empty()) throw ConfigError("explore: empty network");
  if (archs.empty()) throw ConfigError("explore: no architectures");
  ExploreOptions opts = options;
  if (opts.policies.empty()) {
    const auto& all = MappingPolicy::AllPresets();
    opts.policies.assign(all.begin(), all.end());
  }
  if (opts.schedules.empty()) {
    throw ConfigError("explore: no schedules selected");
  }

  const SweepContext ctx = MakeSweepContext(archs, opts.policies);

  std::array<bool, 3> needed{};
  bool want_adaptive = false;
  for (ScheduleScheme s : opts.schedules) {
    if (s == ScheduleScheme::kAdaptiveReuse) {
      want_adaptive = true;
    } else {
      needed[ScheduleIndex(s)] = true;
    }
  }
  if (want_adaptive) needed = {true, true, true};

  DseResult result;
  result.per_arch.resize(archs.size());
  for (size_t a = 0; a < archs.size(); ++a) {
    result.per_arch[a].arch_index = int(a);
    result.per_arch[a].winners.resize(network.size());
  }

  for (size_t l = 0; l < network.size(); ++l) {
    const LayerShape& layer = network[l];
    std::vector<TilingConfig> partitions;
    try {
      partitions = EnumeratePartitions(layer, opts.buffers, opts.granularity);
    } catch (const EmptyPartitionSpace&) {
      if (!opts.skip_infeasible_layers) throw;
      result.skipped_layers.push_back(int(l));
      for (size_t a = 0; a < archs.size(); ++a) {
        result.per_arch[a].winners[l].layer = int(l);
      }
      continue;
    }

    std::vector<PassResult> passes(partitions.size());
    RunWorkers(opts.workers, partitions.size(), [&](size_t pi) {
      passes[pi] = RunPass(layer, partitions[pi], needed, ctx);
    });

    // Sequential winner selection in enumeration order per architecture;
    // ties resolve to the last enumerated point.
    for (size_t a = 0; a < archs.size(); ++a) {
      const int g = ctx.arch_group[a];
      LayerWinner& winner = result.per_arch[a].winners[l];
      winner.layer = int(l);
      bool first = true;
      for (size_t pi = 0; pi < partitions.size(); ++pi) {
        const PassResult& pass = passes[pi];
        for (ScheduleScheme requested : opts.schedules) {
          int si = ScheduleIndex(requested);
          if (si < 0) si = ResolveAdaptive(pass, size_t(g));
          for (size_t pj = 0; pj < opts.policies.size(); ++pj) {
            const AccessCounts& counts =
                pass.by_schedule[si].lane_counts[ctx.LaneIndex(g, pj)];
            const EdpResult edp = EdpForTotalCounts(counts, archs[a].profile);
            if (opts.keep_full_sweep) {
              result.sweep.push_back(SweepRow{int(a), int(l), partitions[pi],
                                              requested, kFixedSchedules[si],
                                              opts.policies[pj].id, edp});
            }
            if (first || edp.edp <= winner.edp.edp) {
              winner.found = true;
              winner.tiling = partitions[pi];
              winner.requested = requested;
              winner.resolved = kFixedSchedules[si];
              winner.mapping = opts.policies[pj];
              winner.edp = edp;
              winner.counts = counts;
              first = false;
            }
          }
        }
      }
    }
  }

  for (size_t a = 0; a < archs.size(); ++a) {
    std::vector<EdpResult> layer_edps;
    for (const LayerWinner& w : result.per_arch[a].winners) {
      if (w.found) layer_edps.push_back(w.edp);
    }
    result.per_arch[a].totals = NetworkEdp(layer_edps);
  }
  return result;
}

std::vector<CompareCell> ComparePolicies(std::span<const LayerShape> network,
                                         std::span<const ArchConfig> archs,
                                         ScheduleScheme schedule,
                                         const ExploreOptions& options) {
  if (network.empty()) throw ConfigError("compare: empty network");
  if (archs.empty()) throw ConfigError("compare: no architectures");
  ExploreOptions opts = options;
  if (opts.policies.empty()) {
    const auto& all = MappingPolicy::AllPresets();
    opts.policies.assign(all.begin(), all.end());
  }

  const SweepContext ctx = MakeSweepContext(archs, opts.policies);
  const bool adaptive = schedule == ScheduleScheme::kAdaptiveReuse;

  std::vector<CompareCell> cells;
  for (size_t l = 0; l < network.size(); ++l) {
    const LayerShape& layer = network[l];
    std::vector<TilingConfig> partitions;
    try {
      partitions = EnumeratePartitions(layer, opts.buffers, opts.granularity);
    } catch (const EmptyPartitionSpace&) {
      if (!opts.skip_infeasible_layers) throw;
      for (size_t a = 0; a < archs.size(); ++a) {
        for (const MappingPolicy& p : opts.policies) {
          CompareCell cell;
          cell.arch_index = int(a);
          cell.layer = int(l);
          cell.policy_id = p.id;
          cell.requested = schedule;
          cells.push_back(cell);
        }
      }
      continue;
    }

    // Per partition and group: the resolved schedule index and the
    // per-policy layer counts under it.
    struct Slice {
      std::vector<int> resolved;
      std::vector<std::vector<AccessCounts>> counts;  // [group][policy]
    };
    std::vector<Slice> slices(partitions.size());

    RunWorkers(opts.workers, partitions.size(), [&](size_t pi) {
      Slice& slice = slices[pi];
      const size_t n_groups = ctx.group_geometries.size();
      slice.resolved.assign(n_groups, adaptive ? -1 : ScheduleIndex(schedule));
      slice.counts.assign(n_groups, {});
      if (adaptive) {
        ResolveAdaptivePerGroup(layer, partitions[pi], ctx, slice.resolved);
      }
      // One lane pass per distinct resolved schedule, restricted to the
      // groups that use it.
      for (int si = 0; si < 3; ++si) {
        std::vector<LaneSpec> lanes;
        std::vector<int> lane_group;
        std::vector<const DramGeometry*> geoms;
        std::vector<size_t> group_ids;
        for (size_t g = 0; g < n_groups; ++g) {
          if (slice.resolved[g] != si) continue;
          const int local = int(geoms.size());
          geoms.push_back(ctx.group_geometries[g]);
          group_ids.push_back(g);
          for (size_t pj = 0; pj < opts.policies.size(); ++pj) {
            lanes.push_back(ctx.lanes[ctx.LaneIndex(int(g), pj)]);
            lane_group.push_back(local);
          }
        }
        if (lanes.empty()) continue;
        const LanePass pass = RunLanePass(layer, partitions[pi],
                                          kFixedSchedules[si], lanes, geoms,
                                          lane_group);
        for (size_t li = 0; li < group_ids.size(); ++li) {
          slice.counts[group_ids[li]].assign(
              pass.lane_counts.begin() + li * opts.policies.size(),
              pass.lane_counts.begin() + (li + 1) * opts.policies.size());
        }
      }
    });

    for (size_t a = 0; a < archs.size(); ++a) {
      const int g = ctx.arch_group[a];
      for (size_t pj = 0; pj < opts.policies.size(); ++pj) {
        CompareCell cell;
        cell.arch_index = int(a);
        cell.layer = int(l);
        cell.policy_id = opts.policies[pj].id;
        cell.requested = schedule;
        bool first = true;
        for (size_t pi = 0; pi < partitions.size(); ++pi) {
          const Slice& slice = slices[pi];
          const int si = slice.resolved[g];
          const EdpResult edp = EdpForTotalCounts(slice.counts[g][pj],
                                                  archs[a].profile);
          if (first || edp.edp <= cell.edp.edp) {
            cell.found = true;
            cell.best_tiling = partitions[pi];
            cell.resolved = kFixedSchedules[si];
            cell.edp = edp;
            first = false;
          }
        }
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

}  // namespace dramdse
