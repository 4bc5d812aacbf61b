#include "config.h"

#include <cstdio>
#include <fstream>

#include "doctest.h"

using namespace dramdse;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/dramdse_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("network file round trip") {
  const TempFile f("net",
                   "# sample network\n"
                   "conv1 3 227 227 96 11 11 4 1\n"
                   "fc    256 6 6 4096 6 6 1 1 scale=0.5\n");
  const auto layers = LoadNetwork(f.path);
  REQUIRE(layers.size() == 2);
  CHECK(layers[0].name == "conv1");
  CHECK(layers[0].h_out == 55);
  CHECK(layers[0].traffic_scale == 1.0);
  CHECK(layers[1].h_out == 1);
  CHECK(layers[1].traffic_scale == 0.5);
}

TEST_CASE("network file errors") {
  CHECK_THROWS_AS(LoadNetwork("/nonexistent/net"), ConfigError);
  const TempFile missing("net_short", "conv1 3 227 227 96 11 11 4\n");
  CHECK_THROWS_AS(LoadNetwork(missing.path), ConfigError);
  const TempFile bad("net_bad", "conv1 3 x 227 96 11 11 4 1\n");
  CHECK_THROWS_AS(LoadNetwork(bad.path), ConfigError);
  const TempFile opt("net_opt", "conv1 3 227 227 96 11 11 4 1 foo=1\n");
  CHECK_THROWS_AS(LoadNetwork(opt.path), ConfigError);
  const TempFile empty("net_empty", "# nothing\n");
  CHECK_THROWS_AS(LoadNetwork(empty.path), ConfigError);
}

TEST_CASE("geometry file") {
  const TempFile f("geom",
                   "kind = SALP-MASA\n"
                   "banks_per_chip = 8\n"
                   "subarrays_per_bank = 8\n"
                   "rows_near = 4096\n"
                   "rows_far = 0\n"
                   "columns_per_row = 128\n"
                   "access_unit_bytes = 8\n");
  const GeometryConfig g = LoadGeometry(f.path);
  CHECK(g.variant.kind == ArchKind::kSalpMasa);
  CHECK(g.variant.scope == RowBufferScope::kPerSubarray);
  CHECK(g.variant.max_open_subarrays_per_bank == 0);
  CHECK(g.geometry.banks_per_chip == 8);
  CHECK(g.geometry.chip_capacity_units() == 8ull * 8 * 4096 * 128);

  const TempFile partial("geom_partial", "kind = DDR3\nbanks_per_chip = 8\n");
  CHECK_THROWS_AS(LoadGeometry(partial.path), ConfigError);
  const TempFile unknown("geom_unknown",
                         "kind = DDR3\nbanks_per_chip = 8\nrows = 4\n");
  CHECK_THROWS_AS(LoadGeometry(unknown.path), ConfigError);
}

TEST_CASE("profile file and ordering check") {
  const std::string ordered =
      "arch = TL-DRAM\n"
      "cycles_column = 4\ncycles_bank = 6\ncycles_subarray = 24\n"
      "cycles_row_near = 30\ncycles_row_far = 44\n"
      "energy_column = 1.25\nenergy_bank = 1.5\nenergy_subarray = 2.5\n"
      "energy_row_near = 2.75\nenergy_row_far = 3.75\n";
  const TempFile f("profile", ordered);
  const CostProfile p = LoadProfile(f.path, false);
  CHECK(p.arch == ArchKind::kTlDram);
  CHECK(p.cycles_of(AccessClass::kRowFar) == 44);
  CHECK(p.energy_of(AccessClass::kColumn) == 1.25);

  const TempFile unordered(
      "profile_unordered",
      "arch = DDR3\n"
      "cycles_column = 4\ncycles_bank = 2\ncycles_subarray = 24\n"
      "cycles_row_near = 30\ncycles_row_far = 44\n"
      "energy_column = 1\nenergy_bank = 2\nenergy_subarray = 3\n"
      "energy_row_near = 4\nenergy_row_far = 5\n");
  CHECK_THROWS_AS(LoadProfile(unordered.path, false), ConfigError);
  CHECK(LoadProfile(unordered.path, true).cycles_of(AccessClass::kBank) == 2);

  const TempFile incomplete("profile_incomplete",
                            "arch = DDR3\ncycles_column = 4\n");
  CHECK_THROWS_AS(LoadProfile(incomplete.path, false), ConfigError);
}

TEST_CASE("arch configs pair geometries with matching profiles") {
  const TempFile geom("pair_geom",
                      "kind = DDR3\nbanks_per_chip = 2\n"
                      "subarrays_per_bank = 2\nrows_near = 2\nrows_far = 0\n"
                      "columns_per_row = 4\naccess_unit_bytes = 1\n");
  const TempFile prof("pair_prof",
                      "arch = DDR3\n"
                      "cycles_column = 1\ncycles_bank = 2\ncycles_subarray = 3\n"
                      "cycles_row_near = 4\ncycles_row_far = 5\n"
                      "energy_column = 1\nenergy_bank = 2\nenergy_subarray = 3\n"
                      "energy_row_near = 4\nenergy_row_far = 5\n");
  const auto archs = BuildArchConfigs({LoadGeometry(geom.path)},
                                      {LoadProfile(prof.path, false)});
  REQUIRE(archs.size() == 1);
  CHECK(archs[0].variant.kind == ArchKind::kDdr3);

  const TempFile other("pair_other",
                       "kind = SALP-1\nbanks_per_chip = 2\n"
                       "subarrays_per_bank = 2\nrows_near = 2\nrows_far = 0\n"
                       "columns_per_row = 4\naccess_unit_bytes = 1\n");
  CHECK_THROWS_AS(BuildArchConfigs({LoadGeometry(other.path)},
                                   {LoadProfile(prof.path, false)}),
                  ConfigError);
}
