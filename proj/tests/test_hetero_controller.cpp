#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "himc/hetero_controller.hpp"

using namespace himc;

namespace {

RetentionCache make_het_l2() {
  auto cat = DeviceCatalog::builtin();
  HierarchyConfig cfg;
  std::vector<RegionParams> regions{
      {cat.lookup_params(Level::L2, Technology::SttRam, RetentionClass::relaxed(10000000)),
       CounterConfig{}},
      {cat.lookup_params(Level::L2, Technology::SttRam, RetentionClass::relaxed(75000)),
       CounterConfig{}},
  };
  return RetentionCache("l2", cfg.l2, regions);
}

}  // namespace

TEST_CASE("a fresh cache steers every block to the high-retention bank") {
  auto cache = make_het_l2();
  HeteroBankController ctl(cache, kRegionLow);
  CHECK(ctl.resolve_bank(123, 0) == kRegionHigh);
  CHECK(ctl.resolve_bank(77, 1) == kRegionHigh);
}

TEST_CASE("writes steer the latch by the retention bit at the banked costs") {
  auto cache = make_het_l2();
  HeteroBankController ctl(cache, kRegionLow);

  auto low = ctl.write_with_retention(5, true, 10);  // StorePIM-style write
  CHECK(low.cycles == 3);
  CHECK(low.energy_fj[kRegionLow] == 512ll * 9647);
  CHECK(ctl.resolve_bank(5, 11) == kRegionLow);

  auto high = ctl.write_with_retention(6, false, 20);  // CPU store
  CHECK(high.cycles == 4);
  CHECK(high.energy_fj[kRegionHigh] == 512ll * 15604);
  CHECK(ctl.resolve_bank(6, 21) == kRegionHigh);
}

TEST_CASE("reads never move the latch") {
  auto cache = make_het_l2();
  HeteroBankController ctl(cache, kRegionLow);
  ctl.write_with_retention(5, true, 0);
  cache.read(5, 1);
  cache.read(5, 2);
  CHECK(ctl.resolve_bank(5, 3) == kRegionLow);
  CHECK(cache.stats().latch_flips == 0);
}

TEST_CASE("a rewrite with the other retention bit flips the bank and keeps one residency") {
  auto cache = make_het_l2();
  HeteroBankController ctl(cache, kRegionLow);
  ctl.write_with_retention(5, true, 0);
  auto out = ctl.write_with_retention(5, false, 10);
  CHECK(out.latch_flipped);
  CHECK(ctl.resolve_bank(5, 11) == kRegionHigh);
  CHECK(cache.stats().latch_flips == 1);
}

TEST_CASE("transfer costs one high-bank read plus one low-bank write") {
  auto cache = make_het_l2();
  HeteroBankController ctl(cache, kRegionLow);
  ctl.write_with_retention(9, false, 0);  // resident high
  auto out = ctl.transfer_to_low_bank(9, 50);
  CHECK(out.hit);
  CHECK(out.cycles == 2 + 3);
  CHECK(out.energy_fj[kRegionHigh] == 512ll * 750);
  CHECK(out.energy_fj[kRegionLow] == 512ll * 9647);
  CHECK(ctl.resolve_bank(9, 51) == kRegionLow);
  CHECK(cache.counter_state(9, 50) == 0);  // reset under the low-retention counter
}

TEST_CASE("transfer is idempotent once the block lives in the low bank") {
  auto cache = make_het_l2();
  HeteroBankController ctl(cache, kRegionLow);
  ctl.write_with_retention(9, true, 0);
  auto out = ctl.transfer_to_low_bank(9, 5);
  CHECK(out.hit);
  CHECK(out.cycles == 0);
  CHECK(out.energy_fj[kRegionLow] == 0);
}

TEST_CASE("transferring an absent block reports a miss for the refetch path") {
  auto cache = make_het_l2();
  HeteroBankController ctl(cache, kRegionLow);
  auto out = ctl.transfer_to_low_bank(42, 5);
  CHECK_FALSE(out.hit);
  CHECK(ctl.operand_action(42, 6) == OperandAction::NeedsFetch);
}

TEST_CASE("operand classification follows Algorithm-1 structure") {
  auto cache = make_het_l2();
  HeteroBankController ctl(cache, kRegionLow);
  ctl.write_with_retention(1, true, 0);   // ready in the compute bank
  ctl.write_with_retention(2, false, 1);  // needs a transfer first
  CHECK(ctl.operand_action(1, 10) == OperandAction::Ready);
  CHECK(ctl.operand_action(2, 10) == OperandAction::NeedsTransfer);
  CHECK(ctl.operand_action(3, 10) == OperandAction::NeedsFetch);
}

TEST_CASE("an expired low-bank operand signals a refetch") {
  auto cache = make_het_l2();
  HeteroBankController ctl(cache, kRegionLow);
  ctl.write_with_retention(1, true, 0);
  // 75us bank flag fires at 3 x 18.75us.
  CHECK(ctl.operand_action(1, 3 * 37500 + 1) == OperandAction::NeedsFetch);
}

TEST_CASE("bit-line alignment needs the same bank and subarray") {
  auto cache = make_het_l2();
  // Default L2 geometry: 4 banks x 8 subarrays -> alignment stride 32.
  CHECK(cache.bitline_aligned(0, 32));
  CHECK(cache.bitline_aligned(5, 5 + 64));
  CHECK_FALSE(cache.bitline_aligned(0, 1));   // different bank
  CHECK_FALSE(cache.bitline_aligned(0, 4));   // different subarray
}
