#ifndef DRAMDSE_DRAM_H_
#define DRAMDSE_DRAM_H_

#include <array>
#include <cassert>
#include <cstdint>
#include <list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.h"

namespace dramdse {

enum class ArchKind { kDdr3, kSalp1, kSalp2, kSalpMasa, kTlDram };

const char* ToString(ArchKind k);
std::optional<ArchKind> ParseArchKind(const std::string& name);

enum class RowBufferScope { kPerBank, kPerSubarray };

struct ArchVariant {
  ArchKind kind = ArchKind::kDdr3;
  RowBufferScope scope = RowBufferScope::kPerBank;
  // Open subarrays a bank may hold at once; 0 means all.
  int max_open_subarrays_per_bank = 1;

  static ArchVariant For(ArchKind kind);
};

struct DramGeometry {
  int channels = 1;
  int ranks_per_channel = 1;
  int chips_per_rank = 1;
  int banks_per_chip = 1;
  int subarrays_per_bank = 1;
  int rows_near = 1;       // rows per subarray in the near segment
  int rows_far = 0;        // 0 models non-tiered DRAM
  int columns_per_row = 1; // access units per row
  int access_unit_bytes = 1;

  int rows_per_subarray() const { return rows_near + rows_far; }
  uint64_t chip_capacity_units() const {
    return uint64_t(banks_per_chip) * subarrays_per_bank *
           uint64_t(rows_per_subarray()) * columns_per_row;
  }
  uint64_t total_capacity_bytes() const {
    return uint64_t(channels) * ranks_per_channel * chips_per_rank *
           chip_capacity_units() * access_unit_bytes;
  }
  // Chips in a rank contribute to one DRAM word, widening the unit.
  uint64_t effective_access_unit_bytes() const {
    return uint64_t(access_unit_bytes) * chips_per_rank;
  }

  void Validate() const;  // throws ConfigError
  bool operator==(const DramGeometry&) const = default;
};

enum class MapDim { kColumn = 0, kBank = 1, kSubarray = 2 };

// Order of the mapping loops, innermost (fastest varying) first. Row is
// implicitly outermost and fills near-segment rows before far-segment rows.
struct MappingPolicy {
  int id = 3;  // preset number, 1..6
  std::array<MapDim, 3> order{MapDim::kColumn, MapDim::kBank,
                              MapDim::kSubarray};

  std::string name() const { return "Mapping-" + std::to_string(id); }
  static MappingPolicy Preset(int id);
  static const std::array<MappingPolicy, 6>& AllPresets();
  bool operator==(const MappingPolicy&) const = default;
};

enum class RowSegment { kNear, kFar };

struct PhysicalCoord {
  int channel = 0;
  int rank = 0;
  int chip = 0;
  int bank = 0;
  int subarray = 0;
  int row = 0;  // absolute row within the subarray; near rows come first
  RowSegment segment = RowSegment::kNear;
  int column = 0;

  bool operator==(const PhysicalCoord&) const = default;
};

enum class AccessClass {
  kColumn = 0,
  kRowNear = 1,
  kRowFar = 2,
  kSubarray = 3,
  kBank = 4
};
inline constexpr int kNumAccessClasses = 5;

const char* ToString(AccessClass c);

struct AccessCounts {
  uint64_t column = 0;
  uint64_t row_near = 0;
  uint64_t row_far = 0;
  uint64_t subarray = 0;
  uint64_t bank = 0;

  uint64_t total() const {
    return column + row_near + row_far + subarray + bank;
  }
  uint64_t& of(AccessClass c) {
    switch (c) {
      case AccessClass::kColumn: return column;
      case AccessClass::kRowNear: return row_near;
      case AccessClass::kRowFar: return row_far;
      case AccessClass::kSubarray: return subarray;
      default: return bank;
    }
  }
  uint64_t of(AccessClass c) const {
    return const_cast<AccessCounts*>(this)->of(c);
  }
  AccessCounts& operator+=(const AccessCounts& o) {
    column += o.column;
    row_near += o.row_near;
    row_far += o.row_far;
    subarray += o.subarray;
    bank += o.bank;
    return *this;
  }
  bool operator==(const AccessCounts&) const = default;
};

// Mixed-radix decomposition of a linear access-unit index into physical
// coordinates, radices ordered per the mapping policy, row outermost.
// Throws CapacityExceeded when unit_index is outside the chip.
PhysicalCoord Decompose(const MappingPolicy& policy,
                        const DramGeometry& geometry, uint64_t unit_index);

struct MappingCursor {
  uint64_t next_unit = 0;
};

// Maps the next n_units access units, advancing the cursor.
std::vector<PhysicalCoord> MapRegion(const MappingPolicy& policy,
                                     const DramGeometry& geometry,
                                     MappingCursor& cursor, uint64_t n_units);

// Three disjoint regions (ifms at 0, wghs after ifms, ofms after wghs).
struct RegionLayout {
  std::vector<PhysicalCoord> ifms;
  std::vector<PhysicalCoord> wghs;
  std::vector<PhysicalCoord> ofms;
  uint64_t ifms_base = 0;
  uint64_t wghs_base = 0;
  uint64_t ofms_base = 0;
};

RegionLayout BuildLayout(const MappingPolicy& policy,
                         const DramGeometry& geometry, uint64_t ifm_units,
                         uint64_t wgh_units, uint64_t ofm_units);

// ----------------------------------------------------------------------
// Row-buffer state machine.
//
// Each access is classified against the immediately previous access with
// bank > subarray > row > column precedence; row activations split into
// near/far by the segment of the newly opened row. The open-row state is
// tracked per scope key (bank, or bank+subarray), keeping at most
// max_open_subarrays_per_bank subarrays open per bank with LRU eviction.
// ----------------------------------------------------------------------

class RowBufferClassifier {
 public:
  explicit RowBufferClassifier(const ArchVariant& arch) : arch_(arch) {}

  AccessClass Classify(const PhysicalCoord& coord);
  void Reset();

 private:
  struct OpenEntry {
    int subarray;  // ignored under per-bank scope
    int row;
  };
  struct BankState {
    std::list<OpenEntry> open;  // MRU first
  };

  ArchVariant arch_;
  std::optional<PhysicalCoord> prev_;
  std::unordered_map<int, BankState> banks_;
};

AccessCounts ClassifyTrace(std::span<const PhysicalCoord> accesses,
                           const ArchVariant& arch);

// ----------------------------------------------------------------------
// Fast linear-range classification for the DSE engine.
//
// PolicyDigits tracks a coordinate as mapping-order digits and supports
// O(1) stepping and constant-stride adds, so classifying a contiguous
// run of access units needs no divisions. Equivalent to decomposing each
// unit and running the state machine (pinned by tests).
// ----------------------------------------------------------------------

struct RadixPlan {
  std::array<MapDim, 3> order;
  std::array<int, 3> radix;   // per order position
  uint64_t p1 = 1, p2 = 1, p3 = 1;  // prefix unit counts
  int rows_near = 1;
  int rows_total = 1;
  uint64_t capacity = 1;
  // Class of an increment whose carry stops at each level; level 3 is
  // kRowNear when no bank/subarray digit wraps (caller picks near/far).
  std::array<AccessClass, 4> level_class;
  bool level3_is_row = false;

  static RadixPlan For(const MappingPolicy& policy,
                       const DramGeometry& geometry);
};

struct PolicyDigits {
  std::array<int, 3> d{0, 0, 0};  // digits in plan order
  int row = 0;

  int digit(const RadixPlan& plan, MapDim dim) const {
    for (int i = 0; i < 3; ++i)
      if (plan.order[i] == dim) return d[i];
    return 0;
  }
  int bank(const RadixPlan& plan) const { return digit(plan, MapDim::kBank); }
  int subarray(const RadixPlan& plan) const {
    return digit(plan, MapDim::kSubarray);
  }

  static PolicyDigits Of(const RadixPlan& plan, uint64_t unit);
  uint64_t ToUnit(const RadixPlan& plan) const;
  PhysicalCoord ToCoord(const RadixPlan& plan) const;

  // this += delta, where delta was prepared by PrepareStride.
  void AddStride(const RadixPlan& plan, const PolicyDigits& delta);
  bool operator==(const PolicyDigits&) const = default;

};

// Digit form of a constant stride for AddStride.
PolicyDigits PrepareStride(const RadixPlan& plan, uint64_t stride);

// Classifies the transition to `cur` from `prev` (bank > subarray > row >
// column precedence; near/far by cur's segment).
AccessClass StepClass(const RadixPlan& plan, const PolicyDigits& prev,
                      const PolicyDigits& cur);

// Classifies accesses first+1 .. first+n-1 of a contiguous ascending run
// (the boundary access `first` itself is classified by the caller).
// `first_digits` must equal PolicyDigits::Of(plan, first_unit).
void ClassifyRunTail(const RadixPlan& plan, uint64_t first_unit,
                     const PolicyDigits& first_digits, uint64_t n,
                     AccessCounts& counts);

}  // namespace dramdse

#endif  // DRAMDSE_DRAM_H_
