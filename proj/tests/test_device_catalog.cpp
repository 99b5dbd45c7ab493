#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "himc/device_catalog.hpp"

using namespace himc;

TEST_CASE("table lookup returns the calibrated L1 STT-RAM column") {
  auto cat = DeviceCatalog::builtin();
  const auto& p = cat.lookup_params(Level::L1, Technology::SttRam, RetentionClass::relaxed(75000));
  CHECK(p.read_latency == 1);
  CHECK(p.write_latency == 2);
  CHECK(p.logic_op_latency == 3);
  CHECK(p.add_op_latency == 15);
  CHECK(p.write_energy_fj == 4690);
  CHECK(p.leakage_uw == 17630);
}

TEST_CASE("table lookup returns the calibrated L2 10ms and memory columns") {
  auto cat = DeviceCatalog::builtin();
  const auto& l2 = cat.lookup_params(Level::L2, Technology::SttRam,
                                     RetentionClass::relaxed(10000000));
  CHECK(l2.write_latency == 4);
  CHECK(l2.logic_op_latency == 6);
  CHECK(l2.add_op_latency == 16);
  CHECK(l2.write_energy_fj == 15604);
  CHECK(l2.leakage_uw == 182200);

  const auto& mem = cat.lookup_params(Level::Mem, Technology::SttRam,
                                      RetentionClass::nonvolatile());
  CHECK(mem.read_latency == 32);
  CHECK(mem.write_latency == 56);
  CHECK(mem.logic_op_latency == 88);
  CHECK(mem.add_op_latency == 97);
  CHECK(mem.write_energy_fj == 640890);
}

TEST_CASE("unknown device triples are rejected") {
  auto cat = DeviceCatalog::builtin();
  CHECK_THROWS_AS(cat.lookup_params(Level::L1, Technology::SttRam,
                                    RetentionClass::relaxed(10000000)),
                  ConfigError);
  CHECK(cat.try_lookup(Level::Mem, Technology::Sram, RetentionClass::none()) == nullptr);
}

TEST_CASE("lookup is pure: repeated calls return identical records") {
  auto cat = DeviceCatalog::builtin();
  const auto& a = cat.lookup_params(Level::L2, Technology::SttRam, RetentionClass::relaxed(75000));
  const auto& b = cat.lookup_params(Level::L2, Technology::SttRam, RetentionClass::relaxed(75000));
  CHECK(a == b);
}

TEST_CASE("shipped data file matches the built-in table field for field") {
  auto shipped = DeviceCatalog::from_json_file("data/device_table.json");
  auto builtin = DeviceCatalog::builtin();
  REQUIRE(shipped.rows().size() == builtin.rows().size());
  for (const auto& row : builtin.rows()) {
    const auto* other = shipped.try_lookup(row.level, row.technology, row.retention);
    REQUIRE(other != nullptr);
    CHECK(*other == row);
  }
}

TEST_CASE("overrides replace or extend rows after validation") {
  auto cat = DeviceCatalog::builtin();
  DeviceParams row = cat.lookup_params(Level::L1, Technology::SttRam,
                                       RetentionClass::relaxed(75000));
  row.retention = RetentionClass::relaxed(30000);
  row.write_latency = 2;
  cat.add_override(row);
  CHECK(cat.lookup_params(Level::L1, Technology::SttRam, RetentionClass::relaxed(30000))
            .write_latency == 2);

  DeviceParams bad = row;
  bad.write_energy_fj = bad.read_energy_fj;  // violates the STT-RAM energy invariant
  CHECK_THROWS_AS(cat.add_override(bad), ConfigError);
}

TEST_CASE("required retention reproduces the 28.16us worked example") {
  // T_p (with overheads lumped) = 3ns, T_rp = 2ns, T_mem = 50ns, k = 512.
  RetentionRequirement req{.t_process_ns = 3, .t_rw_ns = 2, .t_mem_ns = 50, .t_overhead_ns = 0,
                           .k = 512};
  CHECK(required_retention_ns(req) == 28160);
}

TEST_CASE("required retention trivial cases") {
  CHECK(required_retention_ns({0, 0, 0, 0, 512}) == 0);
  CHECK(required_retention_ns({1, 1, 8, 0, 10}) == 100);
  CHECK_THROWS(required_retention_ns({1, 1, 1, 1, 0}));
}

TEST_CASE("required retention is linear in k and monotone in every field") {
  SplitMix rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    RetentionRequirement req{rng.next() % 100, rng.next() % 100, rng.next() % 100,
                             rng.next() % 100, 1 + rng.next() % 64};
    auto base = required_retention_ns(req);
    auto doubled = req;
    doubled.k *= 2;
    CHECK(required_retention_ns(doubled) == 2 * base);
    auto bumped = req;
    bumped.t_mem_ns += 1 + rng.next() % 10;
    CHECK(required_retention_ns(bumped) >= base);
  }
}

TEST_CASE("default hierarchy config validates cleanly") {
  HierarchyConfig cfg;
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("lane counts that are not a block multiple are reported") {
  HierarchyConfig cfg;
  cfg.l1.compute_lanes = 24;  // 24 x 32 = 768 bits, not a multiple of 512
  auto errors = validate_config(cfg);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("compute_lanes") != std::string::npos);
}

TEST_CASE("counter period must tile the L1 retention time") {
  HierarchyConfig cfg;
  cfg.counter.clock_period_ns = 20000;  // 4 x 20us != 75us
  auto errors = validate_config(cfg);
  REQUIRE(!errors.empty());
  CHECK(errors[0].find("clock_period") != std::string::npos);

  cfg.counter.clock_period_ns = 18750;
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("dual-retention L1 needs the explicit override flag") {
  HierarchyConfig cfg;
  cfg.l1_hetero = true;
  auto errors = validate_config(cfg);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("l1_hetero") != std::string::npos);
  cfg.allow_hetero_l1 = true;
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("validation reports every violation, not just the first") {
  HierarchyConfig cfg;
  cfg.l1.compute_lanes = 24;
  cfg.l2.associativity = 3;
  cfg.mem_compute_lanes = 128;
  CHECK(validate_config(cfg).size() >= 3);
}
