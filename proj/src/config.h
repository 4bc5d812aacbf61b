#ifndef DRAMDSE_CONFIG_H_
#define DRAMDSE_CONFIG_H_

#include <string>
#include <vector>

#include "dse.h"

namespace dramdse {

// Network description: one whitespace-separated record per layer,
//   name c_in h_in w_in m_out p q stride element_bytes [scale=X]
// '#' starts a comment. Output dims are derived on load.
std::vector<LayerShape> LoadNetwork(const std::string& path);

// Geometry/architecture file: key = value lines (kind, banks_per_chip,
// subarrays_per_bank, rows_near, rows_far, columns_per_row,
// access_unit_bytes, plus optional channels/ranks_per_channel/
// chips_per_rank).
struct GeometryConfig {
  ArchVariant variant;
  DramGeometry geometry;
};

GeometryConfig LoadGeometry(const std::string& path);

// Cost-profile file: key = value lines (arch, cycles_<class>,
// energy_<class>). Validates the ordering invariant unless
// allow_unordered.
CostProfile LoadProfile(const std::string& path, bool allow_unordered);

// Pairs geometries with the profile of matching arch kind.
std::vector<ArchConfig> BuildArchConfigs(
    const std::vector<GeometryConfig>& geometries,
    const std::vector<CostProfile>& profiles);

}  // namespace dramdse

#endif  // DRAMDSE_CONFIG_H_
