#include "edp.h"

#include <random>

#include "doctest.h"
#include "oracles.h"

using namespace dramdse;

namespace {

CostProfile SetProfile(uint64_t c_col, uint64_t c_bank, uint64_t c_sub,
                       uint64_t c_rn, uint64_t c_rf, double e_col,
                       double e_bank, double e_sub, double e_rn, double e_rf) {
  CostProfile p;
  p.cycles[int(AccessClass::kColumn)] = c_col;
  p.cycles[int(AccessClass::kBank)] = c_bank;
  p.cycles[int(AccessClass::kSubarray)] = c_sub;
  p.cycles[int(AccessClass::kRowNear)] = c_rn;
  p.cycles[int(AccessClass::kRowFar)] = c_rf;
  p.energy_nj[int(AccessClass::kColumn)] = e_col;
  p.energy_nj[int(AccessClass::kBank)] = e_bank;
  p.energy_nj[int(AccessClass::kSubarray)] = e_sub;
  p.energy_nj[int(AccessClass::kRowNear)] = e_rn;
  p.energy_nj[int(AccessClass::kRowFar)] = e_rf;
  return p;
}

// Random profile on the ordering chain, quarter-nJ energies.
CostProfile RandomProfile(std::mt19937& rng) {
  uint64_t c = 1 + rng() % 4;
  double e = 0.25 * double(1 + rng() % 4);
  CostProfile p;
  const AccessClass chain[] = {AccessClass::kColumn, AccessClass::kBank,
                               AccessClass::kSubarray, AccessClass::kRowNear,
                               AccessClass::kRowFar};
  for (AccessClass cls : chain) {
    p.cycles[int(cls)] = c;
    p.energy_nj[int(cls)] = e;
    c += rng() % 5;
    e += 0.25 * double(rng() % 5);
  }
  return p;
}

AccessCounts RandomCounts(std::mt19937& rng) {
  AccessCounts c;
  c.column = rng() % 1000;
  c.row_near = rng() % 100;
  c.row_far = rng() % 100;
  c.subarray = rng() % 100;
  c.bank = rng() % 100;
  return c;
}

}  // namespace

TEST_CASE("cycles and energy dot products") {
  const CostProfile profile =
      SetProfile(4, 6, 10, 10, 24, 1.0, 1.0, 1.0, 5.0, 6.0);
  profile.Validate();

  CHECK(CyclesForCounts(AccessCounts{}, profile) == 0);
  CHECK(EnergyForCounts(AccessCounts{}, profile) == 0.0);

  AccessCounts counts;
  counts.column = 12;
  counts.bank = 2;
  counts.subarray = 1;
  counts.row_near = 1;
  CHECK(CyclesForCounts(counts, profile) == 80);  // 12*4+2*6+1*10+1*10

  AccessCounts hits;
  hits.column = 7;
  hits.row_near = 1;
  CHECK(EnergyForCounts(hits, profile) == 12.0);
}

TEST_CASE("dot products match the naive oracle exactly") {
  std::mt19937 rng(37);
  for (int i = 0; i < 2000; ++i) {
    const CostProfile profile = RandomProfile(rng);
    const AccessCounts counts = RandomCounts(rng);
    CHECK(CyclesForCounts(counts, profile) ==
          oracles::NaiveCycles(counts, profile));
    CHECK(EnergyForCounts(counts, profile) ==
          oracles::NaiveEnergy(counts, profile));
  }
}

TEST_CASE("layer EDP is the product of summed latency and energy") {
  std::mt19937 rng(41);
  const CostProfile profile = RandomProfile(rng);

  const AccessCounts tile = RandomCounts(rng);
  const EdpResult single = LayerEdp(std::vector{tile}, profile);
  CHECK(single.edp == double(single.latency_cycles) * single.energy_nj);
  CHECK(single.latency_cycles == CyclesForCounts(tile, profile));

  const EdpResult doubled = LayerEdp(std::vector{tile, tile}, profile);
  CHECK(doubled.latency_cycles == 2 * single.latency_cycles);
  CHECK(doubled.energy_nj == 2 * single.energy_nj);
  CHECK(doubled.edp == 4 * single.edp);

  for (int i = 0; i < 200; ++i) {
    std::vector<AccessCounts> tiles(1 + rng() % 8);
    for (auto& t : tiles) t = RandomCounts(rng);
    const EdpResult got = LayerEdp(tiles, profile);
    uint64_t cycles = 0;
    double energy = 0.0;
    for (const auto& t : tiles) {
      cycles += oracles::NaiveCycles(t, profile);
      energy += oracles::NaiveEnergy(t, profile);
    }
    CHECK(got.latency_cycles == cycles);
    CHECK(got.energy_nj == energy);
    CHECK(got.edp == double(cycles) * energy);
  }
}

TEST_CASE("network totals") {
  const EdpResult a{10, 2.0, 20.0};
  const EdpResult b{5, 1.0, 5.0};
  const EdpResult c{1, 4.0, 4.0};

  const NetworkTotals one = NetworkEdp(std::vector{a});
  CHECK(one.edp == 20.0);
  CHECK(one.latency_cycles == 10);

  const NetworkTotals two = NetworkEdp(std::vector{EdpResult{1, 3.0, 3.0},
                                                   EdpResult{1, 4.0, 4.0}});
  CHECK(two.edp == 7.0);

  const NetworkTotals abc = NetworkEdp(std::vector{a, b, c});
  const NetworkTotals cba = NetworkEdp(std::vector{c, b, a});
  CHECK(abc.edp == cba.edp);
  CHECK(abc.latency_cycles == cba.latency_cycles);
  CHECK(abc.energy_nj == cba.energy_nj);
}

TEST_CASE("linearity, monotonicity and scale covariance") {
  std::mt19937 rng(43);
  const CostProfile profile = RandomProfile(rng);
  for (int i = 0; i < 100; ++i) {
    AccessCounts a = RandomCounts(rng);
    const AccessCounts b = RandomCounts(rng);
    AccessCounts sum = a;
    sum += b;
    CHECK(CyclesForCounts(sum, profile) ==
          CyclesForCounts(a, profile) + CyclesForCounts(b, profile));
    CHECK(EnergyForCounts(sum, profile) ==
          EnergyForCounts(a, profile) + EnergyForCounts(b, profile));

    // Bumping any single bucket strictly increases both.
    for (int cls = 0; cls < kNumAccessClasses; ++cls) {
      AccessCounts bumped = a;
      bumped.of(AccessClass(cls)) += 1;
      CHECK(CyclesForCounts(bumped, profile) > CyclesForCounts(a, profile));
      CHECK(EnergyForCounts(bumped, profile) > EnergyForCounts(a, profile));
    }
  }

  // Scaling all cycle costs by k scales EDP by k and preserves argmin.
  CostProfile scaled = profile;
  for (auto& c : scaled.cycles) c *= 3;
  const AccessCounts x = RandomCounts(rng);
  const EdpResult base = LayerEdp(std::vector{x}, profile);
  const EdpResult tripled = LayerEdp(std::vector{x}, scaled);
  CHECK(tripled.edp == 3.0 * base.edp);
}

TEST_CASE("profile validation enforces the cost ordering") {
  // Subarray cheaper than bank violates the chain.
  const CostProfile bad =
      SetProfile(4, 10, 6, 12, 24, 1.0, 2.0, 3.0, 4.0, 5.0);
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
  bad.Validate(/*allow_unordered=*/true);

  const CostProfile zero = SetProfile(0, 1, 2, 3, 4, 1, 1, 1, 1, 1);
  CHECK_THROWS_AS(zero.Validate(true), ConfigError);

  const CostProfile neg = SetProfile(1, 1, 2, 3, 4, -1, 1, 1, 1, 1);
  CHECK_THROWS_AS(neg.Validate(true), ConfigError);
}
