#include "workload.h"

#include <algorithm>

namespace dramdse {

const char* ToString(ScheduleScheme s) {
  switch (s) {
    case ScheduleScheme::kIfmsReuse: return "ifms-reuse";
    case ScheduleScheme::kWghsReuse: return "wghs-reuse";
    case ScheduleScheme::kOfmsReuse: return "ofms-reuse";
    case ScheduleScheme::kAdaptiveReuse: return "adaptive-reuse";
  }
  return "?";
}

const char* ToString(DataType t) {
  switch (t) {
    case DataType::kIfms: return "ifms";
    case DataType::kWghs: return "wghs";
    case DataType::kOfms: return "ofms";
  }
  return "?";
}

LayerShape DeriveOutputDims(const LayerShape& layer) {
  if (layer.c_in < 1 || layer.h_in < 1 || layer.w_in < 1 || layer.m_out < 1 ||
      layer.p < 1 || layer.q < 1 || layer.stride < 1 ||
      layer.element_bytes < 1 || layer.traffic_scale <= 0.0) {
    throw ConfigError("layer '" + layer.name + "': all dims must be >= 1");
  }
  if (layer.p > layer.h_in || layer.q > layer.w_in) {
    throw ConfigError("layer '" + layer.name +
                      "': filter larger than input (p>h_in or q>w_in)");
  }
  LayerShape out = layer;
  out.h_out = (layer.h_in - layer.p) / layer.stride + 1;
  out.w_out = (layer.w_in - layer.q) / layer.stride + 1;
  return out;
}

TileSizes TileByteSizes(const LayerShape& layer, const TilingConfig& tiling) {
  const uint64_t elem = uint64_t(layer.element_bytes);
  TileSizes sizes;
  sizes.wgh_bytes = uint64_t(tiling.t_m) * tiling.t_c * layer.p *
                    uint64_t(layer.q) * elem;
  sizes.ofm_bytes = uint64_t(tiling.t_m) * tiling.t_h * uint64_t(tiling.t_w) *
                    elem;
  const uint64_t in_rows = uint64_t(tiling.t_h - 1) * layer.stride + layer.p;
  const uint64_t in_cols = uint64_t(tiling.t_w - 1) * layer.stride + layer.q;
  sizes.ifm_bytes = uint64_t(tiling.t_c) * in_rows * in_cols * elem;
  return sizes;
}

TileGrid GridFor(const LayerShape& layer, const TilingConfig& tiling) {
  auto ceil_div = [](int a, int b) { return (a + b - 1) / b; };
  TileGrid grid;
  grid.n_m = ceil_div(layer.m_out, tiling.t_m);
  grid.n_c = ceil_div(layer.c_in, tiling.t_c);
  grid.n_h = ceil_div(layer.h_out, tiling.t_h);
  grid.n_w = ceil_div(layer.w_out, tiling.t_w);
  return grid;
}

bool TilingFits(const LayerShape& layer, const TilingConfig& tiling,
                const BufferConfig& buffers) {
  const TileSizes sizes = TileByteSizes(layer, tiling);
  return sizes.ifm_bytes <= buffers.ib_bytes &&
         sizes.wgh_bytes <= buffers.wb_bytes &&
         sizes.ofm_bytes <= buffers.ob_bytes;
}

namespace {

std::vector<int> Divisors(int n, PartitionGranularity granularity) {
  std::vector<int> out;
  for (int d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    if (granularity == PartitionGranularity::kPow2Divisors &&
        (d & (d - 1)) != 0) {
      continue;
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace

std::vector<TilingConfig> EnumeratePartitions(
    const LayerShape& layer, const BufferConfig& buffers,
    PartitionGranularity granularity) {
  const std::vector<int> tm = Divisors(layer.m_out, granularity);
  const std::vector<int> tc = Divisors(layer.c_in, granularity);
  const std::vector<int> th = Divisors(layer.h_out, granularity);
  const std::vector<int> tw = Divisors(layer.w_out, granularity);

  std::vector<TilingConfig> out;
  for (int m : tm)
    for (int c : tc)
      for (int h : th)
        for (int w : tw) {
          TilingConfig t{m, c, h, w};
          if (TilingFits(layer, t, buffers)) out.push_back(t);
        }
  if (out.empty()) {
    const TileSizes min_sizes = TileByteSizes(layer, TilingConfig{1, 1, 1, 1});
    throw EmptyPartitionSpace(
        "layer '" + layer.name + "': minimal tiling needs ifm=" +
        std::to_string(min_sizes.ifm_bytes) + "B wgh=" +
        std::to_string(min_sizes.wgh_bytes) + "B ofm=" +
        std::to_string(min_sizes.ofm_bytes) + "B; buffers are ib=" +
        std::to_string(buffers.ib_bytes) + "B wb=" +
        std::to_string(buffers.wb_bytes) + "B ob=" +
        std::to_string(buffers.ob_bytes) + "B");
  }
  return out;
}

std::array<LoopDim, 4> NestOrder(ScheduleScheme schedule) {
  switch (schedule) {
    case ScheduleScheme::kIfmsReuse:
      return {LoopDim::kC, LoopDim::kH, LoopDim::kW, LoopDim::kM};
    case ScheduleScheme::kWghsReuse:
      return {LoopDim::kM, LoopDim::kC, LoopDim::kH, LoopDim::kW};
    case ScheduleScheme::kOfmsReuse:
      return {LoopDim::kM, LoopDim::kH, LoopDim::kW, LoopDim::kC};
    default:
      assert(false && "adaptive schedule must be resolved first");
      return {LoopDim::kM, LoopDim::kC, LoopDim::kH, LoopDim::kW};
  }
}

OrdinalStrides StridesFor(DataType type, ScheduleScheme schedule,
                          const TileGrid& grid) {
  const std::array<LoopDim, 4> order = NestOrder(schedule);
  auto uses = [&](LoopDim d) {
    switch (type) {
      case DataType::kIfms: return d != LoopDim::kM;
      case DataType::kWghs: return d == LoopDim::kM || d == LoopDim::kC;
      case DataType::kOfms: return d != LoopDim::kC;
    }
    return false;
  };
  OrdinalStrides strides;
  uint64_t stride = 1;
  for (int pos = 3; pos >= 0; --pos) {
    const LoopDim d = order[pos];
    if (!uses(d)) continue;
    switch (d) {
      case LoopDim::kM: strides.m = stride; stride *= grid.n_m; break;
      case LoopDim::kC: strides.c = stride; stride *= grid.n_c; break;
      case LoopDim::kH: strides.h = stride; stride *= grid.n_h; break;
      case LoopDim::kW: strides.w = stride; stride *= grid.n_w; break;
    }
  }
  return strides;
}

uint64_t TileCount(DataType type, const TileGrid& grid) {
  switch (type) {
    case DataType::kIfms:
      return uint64_t(grid.n_c) * grid.n_h * uint64_t(grid.n_w);
    case DataType::kWghs:
      return uint64_t(grid.n_m) * grid.n_c;
    case DataType::kOfms:
      return uint64_t(grid.n_m) * grid.n_h * uint64_t(grid.n_w);
  }
  return 0;
}

std::vector<TileEvent> GenerateTileTrace(const LayerShape& layer,
                                         const TilingConfig& tiling,
                                         ScheduleScheme schedule) {
  std::vector<TileEvent> trace;
  ForEachTileEvent(layer, tiling, schedule,
                   [&](const TileEvent& ev) { trace.push_back(ev); });
  return trace;
}

void TrafficTotals::Add(const TileEvent& ev, uint64_t access_unit_bytes) {
  DataTypeTraffic& t = of(ev.data_type);
  const uint64_t units =
      (ev.n_bytes + access_unit_bytes - 1) / access_unit_bytes;
  if (ev.direction == Direction::kRead) {
    t.read_bytes += ev.n_bytes;
    t.read_accesses += units;
    t.read_events += 1;
  } else {
    t.write_bytes += ev.n_bytes;
    t.write_accesses += units;
    t.write_events += 1;
  }
}

TrafficTotals CountDramTraffic(std::span<const TileEvent> trace,
                               uint64_t access_unit_bytes) {
  assert(access_unit_bytes > 0);
  TrafficTotals totals;
  for (const TileEvent& ev : trace) totals.Add(ev, access_unit_bytes);
  return totals;
}

TrafficTotals TrafficFor(const LayerShape& layer, const TilingConfig& tiling,
                         ScheduleScheme schedule,
                         uint64_t access_unit_bytes) {
  TrafficTotals totals;
  ForEachTileEvent(layer, tiling, schedule, [&](const TileEvent& ev) {
    totals.Add(ev, access_unit_bytes);
  });
  return totals;
}

ScheduleScheme SelectAdaptiveSchedule(const LayerShape& layer,
                                      const TilingConfig& tiling,
                                      uint64_t access_unit_bytes) {
  constexpr ScheduleScheme kFixed[3] = {ScheduleScheme::kIfmsReuse,
                                        ScheduleScheme::kWghsReuse,
                                        ScheduleScheme::kOfmsReuse};
  ScheduleScheme best = kFixed[0];
  uint64_t best_accesses = 0;
  bool first = true;
  for (ScheduleScheme s : kFixed) {
    const uint64_t accesses =
        TrafficFor(layer, tiling, s, access_unit_bytes).total_accesses();
    if (first || accesses < best_accesses) {
      best = s;
      best_accesses = accesses;
      first = false;
    }
  }
  return best;
}

}  // namespace dramdse
