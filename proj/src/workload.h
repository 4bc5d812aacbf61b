#ifndef DRAMDSE_WORKLOAD_H_
#define DRAMDSE_WORKLOAD_H_

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.h"

namespace dramdse {

// One convolution layer. Fully-connected layers are expressed as
// convolutions with h_out = w_out = 1 (p = h_in, q = w_in).
struct LayerShape {
  std::string name;
  int c_in = 1;   // input channels
  int h_in = 1;   // input height (pre-padded)
  int w_in = 1;   // input width (pre-padded)
  int m_out = 1;  // output channels / filters
  int p = 1;      // filter height
  int q = 1;      // filter width
  int stride = 1;
  int h_out = 0;  // derived by DeriveOutputDims
  int w_out = 0;
  int element_bytes = 1;
  // Effective-size factor for sparsity-annotated models. Scales the DRAM
  // bytes of every tile transfer; on-chip buffer feasibility stays dense.
  double traffic_scale = 1.0;
};

// Fills h_out/w_out with the valid-convolution output dims.
// Throws ConfigError if the filter does not fit the input.
LayerShape DeriveOutputDims(const LayerShape& layer);

// Outer-loop step sizes of the tiled loop nest. The weight tile always
// spans the full p x q filter window.
struct TilingConfig {
  int t_m = 1;
  int t_c = 1;
  int t_h = 1;
  int t_w = 1;

  bool operator==(const TilingConfig&) const = default;
};

struct BufferConfig {
  uint64_t ib_bytes = 0;  // ifms buffer
  uint64_t wb_bytes = 0;  // wghs buffer
  uint64_t ob_bytes = 0;  // ofms buffer
};

enum class ScheduleScheme { kIfmsReuse, kWghsReuse, kOfmsReuse, kAdaptiveReuse };

const char* ToString(ScheduleScheme s);

enum class DataType { kIfms = 0, kWghs = 1, kOfms = 2 };

const char* ToString(DataType t);

enum class Direction { kRead, kWrite };

// Tile coordinates over the tiled loop dims. Dims a data type does not
// depend on stay 0 (ifms ignores m; wghs ignores h/w; ofms ignores c).
struct TileIndex {
  int m = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  bool operator==(const TileIndex&) const = default;
};

struct TileEvent {
  DataType data_type = DataType::kIfms;
  TileIndex tile;
  Direction direction = Direction::kRead;
  uint64_t n_bytes = 0;

  bool operator==(const TileEvent&) const = default;
};

struct TileSizes {
  uint64_t ifm_bytes = 0;
  uint64_t wgh_bytes = 0;
  uint64_t ofm_bytes = 0;
};

// DRAM footprint of one (full-size) tile per data type. The ifms tile
// includes the stride/filter halo.
TileSizes TileByteSizes(const LayerShape& layer, const TilingConfig& tiling);

// Number of tiles along each tiled dim (ceil division).
struct TileGrid {
  int n_m = 1;
  int n_c = 1;
  int n_h = 1;
  int n_w = 1;
  uint64_t visits() const {
    return uint64_t(n_m) * n_c * uint64_t(n_h) * n_w;
  }
};

TileGrid GridFor(const LayerShape& layer, const TilingConfig& tiling);

bool TilingFits(const LayerShape& layer, const TilingConfig& tiling,
                const BufferConfig& buffers);

enum class PartitionGranularity { kDivisors, kPow2Divisors };

// Every tiling on the divisor lattice whose three tiles fit their buffers,
// in ascending (t_m, t_c, t_h, t_w) order.
// Throws EmptyPartitionSpace when not even the 1x1x1x1 tiling fits.
std::vector<TilingConfig> EnumeratePartitions(const LayerShape& layer,
                                              const BufferConfig& buffers,
                                              PartitionGranularity granularity);

// ----------------------------------------------------------------------
// Tile trace generation.
//
// The four tile loops are ordered so the reused data type's loops come
// first (outermost); within each group the relative order is m, c, h, w.
// ifms/wghs tiles are fetched when the needed tile differs from the one
// resident in the single-tile buffer. The ofms tile is resident for one
// iteration of the innermost ofms-indexing loop: on scope exit it is
// written back, and a revisited tile is re-read (partial-sum round trip).
// ----------------------------------------------------------------------

enum class LoopDim { kM = 0, kC = 1, kH = 2, kW = 3 };

// Loop nest outer -> inner for a concrete schedule.
std::array<LoopDim, 4> NestOrder(ScheduleScheme schedule);

// Ordinal strides so that a tile's position in its type's first-fetch
// order is m*sm + c*sc + h*sh + w*sw (unused dims have stride 0).
struct OrdinalStrides {
  uint64_t m = 0, c = 0, h = 0, w = 0;
  uint64_t OrdinalOf(const TileIndex& t) const {
    return uint64_t(t.m) * m + uint64_t(t.c) * c + uint64_t(t.h) * h +
           uint64_t(t.w) * w;
  }
};

OrdinalStrides StridesFor(DataType type, ScheduleScheme schedule,
                          const TileGrid& grid);

// Distinct tiles of a data type.
uint64_t TileCount(DataType type, const TileGrid& grid);

namespace detail {

inline uint64_t ScaleBytes(uint64_t raw, double scale) {
  if (scale == 1.0) return raw;
  double scaled = std::ceil(double(raw) * scale);
  if (scaled < 1.0) return 1;
  return uint64_t(scaled);
}

// Per-visit tile extents clamped at tensor boundaries; equal to the full
// tile everywhere on a divisor lattice.
struct VisitExtents {
  int tm, tc, th, tw;
};

}  // namespace detail

// Streams the trace to emit(const TileEvent&) without materializing it.
template <typename EmitFn>
void ForEachTileEvent(const LayerShape& layer, const TilingConfig& tiling,
                      ScheduleScheme schedule, EmitFn&& emit) {
  assert(schedule != ScheduleScheme::kAdaptiveReuse);
  const TileGrid grid = GridFor(layer, tiling);
  const std::array<LoopDim, 4> order = NestOrder(schedule);

  int trip[4] = {1, 1, 1, 1};  // trip count per nest position
  for (int pos = 0; pos < 4; ++pos) {
    switch (order[pos]) {
      case LoopDim::kM: trip[pos] = grid.n_m; break;
      case LoopDim::kC: trip[pos] = grid.n_c; break;
      case LoopDim::kH: trip[pos] = grid.n_h; break;
      case LoopDim::kW: trip[pos] = grid.n_w; break;
    }
  }

  // Deepest nest position indexing the ofms tile (an m/h/w loop).
  int ofms_scope_pos = 0;
  for (int pos = 0; pos < 4; ++pos) {
    if (order[pos] != LoopDim::kC) ofms_scope_pos = pos;
  }

  const OrdinalStrides ofms_strides =
      StridesFor(DataType::kOfms, schedule, grid);
  std::vector<bool> ofms_written(TileCount(DataType::kOfms, grid), false);

  const double scale = layer.traffic_scale;
  const uint64_t elem = uint64_t(layer.element_bytes);
  const int s = layer.stride;

  std::optional<TileIndex> res_ifms;
  std::optional<TileIndex> res_wghs;
  std::optional<TileIndex> res_ofms;

  auto ifm_bytes = [&](const detail::VisitExtents& e) {
    uint64_t rows = uint64_t(e.th - 1) * s + layer.p;
    uint64_t cols = uint64_t(e.tw - 1) * s + layer.q;
    return detail::ScaleBytes(uint64_t(e.tc) * rows * cols * elem, scale);
  };
  auto wgh_bytes = [&](const detail::VisitExtents& e) {
    return detail::ScaleBytes(
        uint64_t(e.tm) * e.tc * layer.p * uint64_t(layer.q) * elem, scale);
  };
  auto ofm_bytes = [&](const detail::VisitExtents& e) {
    return detail::ScaleBytes(uint64_t(e.tm) * e.th * uint64_t(e.tw) * elem,
                              scale);
  };

  // Emission order within one visit: reused type first, then the rest in
  // ifms, wghs, ofms order.
  std::array<DataType, 3> check_order;
  switch (schedule) {
    case ScheduleScheme::kIfmsReuse:
      check_order = {DataType::kIfms, DataType::kWghs, DataType::kOfms};
      break;
    case ScheduleScheme::kWghsReuse:
      check_order = {DataType::kWghs, DataType::kIfms, DataType::kOfms};
      break;
    default:
      check_order = {DataType::kOfms, DataType::kIfms, DataType::kWghs};
      break;
  }

  detail::VisitExtents last_ofms_extents{0, 0, 0, 0};

  int idx[4] = {0, 0, 0, 0};
  const uint64_t total_visits = grid.visits();
  for (uint64_t visit = 0; visit < total_visits; ++visit) {
    int im = 0, ic = 0, ih = 0, iw = 0;
    for (int pos = 0; pos < 4; ++pos) {
      switch (order[pos]) {
        case LoopDim::kM: im = idx[pos]; break;
        case LoopDim::kC: ic = idx[pos]; break;
        case LoopDim::kH: ih = idx[pos]; break;
        case LoopDim::kW: iw = idx[pos]; break;
      }
    }
    detail::VisitExtents ext{
        std::min(tiling.t_m, layer.m_out - im * tiling.t_m),
        std::min(tiling.t_c, layer.c_in - ic * tiling.t_c),
        std::min(tiling.t_h, layer.h_out - ih * tiling.t_h),
        std::min(tiling.t_w, layer.w_out - iw * tiling.t_w)};

    for (DataType type : check_order) {
      switch (type) {
        case DataType::kIfms: {
          TileIndex need{0, ic, ih, iw};
          if (!res_ifms || !(*res_ifms == need)) {
            emit(TileEvent{DataType::kIfms, need, Direction::kRead,
                           ifm_bytes(ext)});
            res_ifms = need;
          }
          break;
        }
        case DataType::kWghs: {
          TileIndex need{im, ic, 0, 0};
          if (!res_wghs || !(*res_wghs == need)) {
            emit(TileEvent{DataType::kWghs, need, Direction::kRead,
                           wgh_bytes(ext)});
            res_wghs = need;
          }
          break;
        }
        case DataType::kOfms: {
          TileIndex need{im, 0, ih, iw};
          if (!res_ofms) {
            if (ofms_written[ofms_strides.OrdinalOf(need)]) {
              emit(TileEvent{DataType::kOfms, need, Direction::kRead,
                             ofm_bytes(ext)});
            }
            res_ofms = need;
          }
          // Scope handling guarantees the resident tile matches.
          assert(*res_ofms == need);
          last_ofms_extents = ext;
          break;
        }
      }
    }

    // Advance the odometer; flush the ofms tile when its scope exits.
    int carry_pos = 3;
    while (carry_pos >= 0) {
      if (++idx[carry_pos] < trip[carry_pos]) break;
      idx[carry_pos] = 0;
      --carry_pos;
    }
    const bool last_visit = (visit + 1 == total_visits);
    if (last_visit || carry_pos <= ofms_scope_pos) {
      emit(TileEvent{DataType::kOfms, *res_ofms, Direction::kWrite,
                     ofm_bytes(last_ofms_extents)});
      ofms_written[ofms_strides.OrdinalOf(*res_ofms)] = true;
      res_ofms.reset();
    }
  }
}

std::vector<TileEvent> GenerateTileTrace(const LayerShape& layer,
                                         const TilingConfig& tiling,
                                         ScheduleScheme schedule);

// ----------------------------------------------------------------------
// Traffic accounting.
// ----------------------------------------------------------------------

struct DataTypeTraffic {
  uint64_t read_bytes = 0;
  uint64_t write_bytes = 0;
  uint64_t read_accesses = 0;
  uint64_t write_accesses = 0;
  uint64_t read_events = 0;
  uint64_t write_events = 0;

  uint64_t bytes() const { return read_bytes + write_bytes; }
  uint64_t accesses() const { return read_accesses + write_accesses; }
};

struct TrafficTotals {
  DataTypeTraffic ifms;
  DataTypeTraffic wghs;
  DataTypeTraffic ofms;

  const DataTypeTraffic& of(DataType t) const {
    return t == DataType::kIfms ? ifms
         : t == DataType::kWghs ? wghs
                                : ofms;
  }
  DataTypeTraffic& of(DataType t) {
    return t == DataType::kIfms ? ifms
         : t == DataType::kWghs ? wghs
                                : ofms;
  }
  uint64_t total_bytes() const {
    return ifms.bytes() + wghs.bytes() + ofms.bytes();
  }
  uint64_t total_accesses() const {
    return ifms.accesses() + wghs.accesses() + ofms.accesses();
  }

  void Add(const TileEvent& ev, uint64_t access_unit_bytes);
};

TrafficTotals CountDramTraffic(std::span<const TileEvent> trace,
                               uint64_t access_unit_bytes);

TrafficTotals TrafficFor(const LayerShape& layer, const TilingConfig& tiling,
                         ScheduleScheme schedule, uint64_t access_unit_bytes);

// Fixed scheme with the fewest total DRAM accesses; ties resolve
// ifms < wghs < ofms.
ScheduleScheme SelectAdaptiveSchedule(const LayerShape& layer,
                                      const TilingConfig& tiling,
                                      uint64_t access_unit_bytes = 1);

}  // namespace dramdse

#endif  // DRAMDSE_WORKLOAD_H_
