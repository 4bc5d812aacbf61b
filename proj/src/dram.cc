#include "dram.h"

#include <algorithm>

namespace dramdse {

const char* ToString(ArchKind k) {
  switch (k) {
    case ArchKind::kDdr3: return "DDR3";
    case ArchKind::kSalp1: return "SALP-1";
    case ArchKind::kSalp2: return "SALP-2";
    case ArchKind::kSalpMasa: return "SALP-MASA";
    case ArchKind::kTlDram: return "TL-DRAM";
  }
  return "?";
}

std::optional<ArchKind> ParseArchKind(const std::string& name) {
  std::string n;
  for (char c : name) n.push_back(c == '_' ? '-' : std::toupper(c));
  if (n == "DDR3") return ArchKind::kDdr3;
  if (n == "SALP-1" || n == "SALP1") return ArchKind::kSalp1;
  if (n == "SALP-2" || n == "SALP2") return ArchKind::kSalp2;
  if (n == "SALP-MASA" || n == "SALPMASA" || n == "MASA")
    return ArchKind::kSalpMasa;
  if (n == "TL-DRAM" || n == "TLDRAM") return ArchKind::kTlDram;
  return std::nullopt;
}

ArchVariant ArchVariant::For(ArchKind kind) {
  switch (kind) {
    case ArchKind::kDdr3:
      return {kind, RowBufferScope::kPerBank, 1};
    case ArchKind::kSalp1:
    case ArchKind::kSalp2:
    case ArchKind::kTlDram:
      return {kind, RowBufferScope::kPerSubarray, 1};
    case ArchKind::kSalpMasa:
      return {kind, RowBufferScope::kPerSubarray, 0};
  }
  return {kind, RowBufferScope::kPerBank, 1};
}

void DramGeometry::Validate() const {
  auto check = [](int v, const char* what) {
    if (v < 1)
      throw ConfigError(std::string("geometry: ") + what + " must be >= 1");
  };
  check(channels, "channels");
  check(ranks_per_channel, "ranks_per_channel");
  check(chips_per_rank, "chips_per_rank");
  check(banks_per_chip, "banks_per_chip");
  check(subarrays_per_bank, "subarrays_per_bank");
  check(rows_near, "rows_near");
  if (rows_far < 0) throw ConfigError("geometry: rows_far must be >= 0");
  check(columns_per_row, "columns_per_row");
  check(access_unit_bytes, "access_unit_bytes");
}

MappingPolicy MappingPolicy::Preset(int id) {
  using enum MapDim;
  switch (id) {
    case 1: return {1, {kColumn, kSubarray, kBank}};
    case 2: return {2, {kSubarray, kColumn, kBank}};
    case 3: return {3, {kColumn, kBank, kSubarray}};
    case 4: return {4, {kBank, kColumn, kSubarray}};
    case 5: return {5, {kSubarray, kBank, kColumn}};
    case 6: return {6, {kBank, kSubarray, kColumn}};
    default:
      throw ConfigError("mapping policy id must be 1..6, got " +
                        std::to_string(id));
  }
}

const std::array<MappingPolicy, 6>& MappingPolicy::AllPresets() {
  static const std::array<MappingPolicy, 6> all = {
      Preset(1), Preset(2), Preset(3), Preset(4), Preset(5), Preset(6)};
  return all;
}

const char* ToString(AccessClass c) {
  switch (c) {
    case AccessClass::kColumn: return "column";
    case AccessClass::kRowNear: return "row_near";
    case AccessClass::kRowFar: return "row_far";
    case AccessClass::kSubarray: return "subarray";
    case AccessClass::kBank: return "bank";
  }
  return "?";
}

PhysicalCoord Decompose(const MappingPolicy& policy,
                        const DramGeometry& geometry, uint64_t unit_index) {
  const RadixPlan plan = RadixPlan::For(policy, geometry);
  if (unit_index >= plan.capacity) {
    throw CapacityExceeded("unit index " + std::to_string(unit_index) +
                           " outside chip capacity of " +
                           std::to_string(plan.capacity) + " access units");
  }
  return PolicyDigits::Of(plan, unit_index).ToCoord(plan);
}

std::vector<PhysicalCoord> MapRegion(const MappingPolicy& policy,
                                     const DramGeometry& geometry,
                                     MappingCursor& cursor, uint64_t n_units) {
  const RadixPlan plan = RadixPlan::For(policy, geometry);
  if (cursor.next_unit + n_units > plan.capacity) {
    throw CapacityExceeded(
        "region of " + std::to_string(n_units) + " units at cursor " +
        std::to_string(cursor.next_unit) + " exceeds chip capacity of " +
        std::to_string(plan.capacity) + " access units");
  }
  std::vector<PhysicalCoord> coords;
  coords.reserve(n_units);
  if (n_units > 0) {
    PolicyDigits digits = PolicyDigits::Of(plan, cursor.next_unit);
    const PolicyDigits one = PrepareStride(plan, 1);
    for (uint64_t i = 0; i < n_units; ++i) {
      coords.push_back(digits.ToCoord(plan));
      digits.AddStride(plan, one);
    }
  }
  cursor.next_unit += n_units;
  return coords;
}

RegionLayout BuildLayout(const MappingPolicy& policy,
                         const DramGeometry& geometry, uint64_t ifm_units,
                         uint64_t wgh_units, uint64_t ofm_units) {
  RegionLayout layout;
  MappingCursor cursor;
  layout.ifms_base = cursor.next_unit;
  layout.ifms = MapRegion(policy, geometry, cursor, ifm_units);
  layout.wghs_base = cursor.next_unit;
  layout.wghs = MapRegion(policy, geometry, cursor, wgh_units);
  layout.ofms_base = cursor.next_unit;
  layout.ofms = MapRegion(policy, geometry, cursor, ofm_units);
  return layout;
}

AccessClass RowBufferClassifier::Classify(const PhysicalCoord& coord) {
  AccessClass cls;
  const AccessClass row_cls = coord.segment == RowSegment::kNear
                                  ? AccessClass::kRowNear
                                  : AccessClass::kRowFar;
  if (!prev_) {
    cls = row_cls;
  } else if (coord.bank != prev_->bank) {
    cls = AccessClass::kBank;
  } else if (coord.subarray != prev_->subarray) {
    cls = AccessClass::kSubarray;
  } else {
    const int scope_sub =
        arch_.scope == RowBufferScope::kPerSubarray ? coord.subarray : -1;
    const BankState& bs = banks_[coord.bank];
    const OpenEntry* open = nullptr;
    for (const OpenEntry& e : bs.open) {
      if (e.subarray == scope_sub) {
        open = &e;
        break;
      }
    }
    cls = (open != nullptr && open->row == coord.row) ? AccessClass::kColumn
                                                      : row_cls;
  }

  // The accessed row becomes the open row of its scope key.
  const int scope_sub =
      arch_.scope == RowBufferScope::kPerSubarray ? coord.subarray : -1;
  BankState& bs = banks_[coord.bank];
  auto it = std::find_if(bs.open.begin(), bs.open.end(),
                         [&](const OpenEntry& e) {
                           return e.subarray == scope_sub;
                         });
  if (it != bs.open.end()) bs.open.erase(it);
  bs.open.push_front(OpenEntry{scope_sub, coord.row});
  const size_t max_open = arch_.scope == RowBufferScope::kPerBank
                              ? 1
                              : size_t(arch_.max_open_subarrays_per_bank);
  if (max_open > 0 && bs.open.size() > max_open) bs.open.pop_back();

  prev_ = coord;
  return cls;
}

void RowBufferClassifier::Reset() {
  prev_.reset();
  banks_.clear();
}

AccessCounts ClassifyTrace(std::span<const PhysicalCoord> accesses,
                           const ArchVariant& arch) {
  RowBufferClassifier classifier(arch);
  AccessCounts counts;
  for (const PhysicalCoord& coord : accesses) {
    counts.of(classifier.Classify(coord)) += 1;
  }
  return counts;
}

RadixPlan RadixPlan::For(const MappingPolicy& policy,
                         const DramGeometry& geometry) {
  RadixPlan plan;
  plan.order = policy.order;
  for (int i = 0; i < 3; ++i) {
    switch (policy.order[i]) {
      case MapDim::kColumn: plan.radix[i] = geometry.columns_per_row; break;
      case MapDim::kBank: plan.radix[i] = geometry.banks_per_chip; break;
      case MapDim::kSubarray: plan.radix[i] = geometry.subarrays_per_bank; break;
    }
  }
  plan.p1 = uint64_t(plan.radix[0]);
  plan.p2 = plan.p1 * plan.radix[1];
  plan.p3 = plan.p2 * plan.radix[2];
  plan.rows_near = geometry.rows_near;
  plan.rows_total = geometry.rows_per_subarray();
  plan.capacity = plan.p3 * uint64_t(plan.rows_total);

  // Class of a carry stopping at each level, bank > subarray > column.
  auto class_of = [&](int stop_level) {
    bool bank = false, sub = false;
    for (int i = 0; i < stop_level && i < 3; ++i) {
      if (plan.radix[i] < 2) continue;  // radix-1 digits never change
      if (plan.order[i] == MapDim::kBank) bank = true;
      if (plan.order[i] == MapDim::kSubarray) sub = true;
    }
    if (stop_level < 3) {
      if (plan.order[stop_level] == MapDim::kBank) bank = true;
      if (plan.order[stop_level] == MapDim::kSubarray) sub = true;
    }
    if (bank) return AccessClass::kBank;
    if (sub) return AccessClass::kSubarray;
    return AccessClass::kColumn;
  };
  for (int level = 0; level < 3; ++level)
    plan.level_class[level] = class_of(level);
  plan.level_class[3] = class_of(3);
  plan.level3_is_row = plan.level_class[3] == AccessClass::kColumn;
  if (plan.level3_is_row) plan.level_class[3] = AccessClass::kRowNear;
  return plan;
}

PolicyDigits PolicyDigits::Of(const RadixPlan& plan, uint64_t unit) {
  PolicyDigits out;
  uint64_t rest = unit;
  for (int i = 0; i < 3; ++i) {
    out.d[i] = int(rest % uint64_t(plan.radix[i]));
    rest /= uint64_t(plan.radix[i]);
  }
  out.row = int(rest);
  return out;
}

void PolicyDigits::AddStride(const RadixPlan& plan, const PolicyDigits& delta) {
  int carry = 0;
  for (int i = 0; i < 3; ++i) {
    d[i] += delta.d[i] + carry;
    carry = 0;
    if (d[i] >= plan.radix[i]) {
      d[i] -= plan.radix[i];
      carry = 1;
    }
  }
  row += delta.row + carry;
}

uint64_t PolicyDigits::ToUnit(const RadixPlan& plan) const {
  return uint64_t(d[0]) + uint64_t(d[1]) * plan.p1 + uint64_t(d[2]) * plan.p2 +
         uint64_t(row) * plan.p3;
}

PhysicalCoord PolicyDigits::ToCoord(const RadixPlan& plan) const {
  PhysicalCoord coord;
  for (int i = 0; i < 3; ++i) {
    switch (plan.order[i]) {
      case MapDim::kColumn: coord.column = d[i]; break;
      case MapDim::kBank: coord.bank = d[i]; break;
      case MapDim::kSubarray: coord.subarray = d[i]; break;
    }
  }
  coord.row = row;
  coord.segment =
      row < plan.rows_near ? RowSegment::kNear : RowSegment::kFar;
  return coord;
}

PolicyDigits PrepareStride(const RadixPlan& plan, uint64_t stride) {
  return PolicyDigits::Of(plan, stride);
}

AccessClass StepClass(const RadixPlan& plan, const PolicyDigits& prev,
                      const PolicyDigits& cur) {
  if (prev.bank(plan) != cur.bank(plan)) return AccessClass::kBank;
  if (prev.subarray(plan) != cur.subarray(plan)) return AccessClass::kSubarray;
  if (prev.row != cur.row) {
    return cur.row < plan.rows_near ? AccessClass::kRowNear
                                    : AccessClass::kRowFar;
  }
  return AccessClass::kColumn;
}

void ClassifyRunTail(const RadixPlan& plan, uint64_t first_unit,
                     const PolicyDigits& first_digits, uint64_t n,
                     AccessCounts& counts) {
  if (n <= 1) return;
  const uint64_t carries = n - 1;
  const uint64_t hi = first_unit + n - 1;
  const uint64_t n1 = hi / plan.p1 - first_unit / plan.p1;
  const uint64_t n2 = hi / plan.p2 - first_unit / plan.p2;
  const uint64_t n3 = hi / plan.p3 - first_unit / plan.p3;
  counts.of(plan.level_class[0]) += carries - n1;
  counts.of(plan.level_class[1]) += n1 - n2;
  counts.of(plan.level_class[2]) += n2 - n3;
  if (n3 == 0) return;
  if (!plan.level3_is_row) {
    counts.of(plan.level_class[3]) += n3;
    return;
  }
  // Consecutive row crossings starting at first_digits.row + 1.
  const int64_t first_new_row = int64_t(first_digits.row) + 1;
  const int64_t near_cnt = std::clamp<int64_t>(
      int64_t(plan.rows_near) - first_new_row, 0, int64_t(n3));
  counts.row_near += uint64_t(near_cnt);
  counts.row_far += n3 - uint64_t(near_cnt);
}

}  // namespace dramdse
