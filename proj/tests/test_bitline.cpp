#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>

#include "himc/bitline.hpp"

using namespace himc;

namespace {

// Word-level host-arithmetic reference, independent of the sensing path.
std::uint32_t oracle(PicOp op, std::uint32_t a, std::uint32_t b) {
  switch (op) {
    case PicOp::And: return a & b;
    case PicOp::Nand: return ~(a & b);
    case PicOp::Or: return a | b;
    case PicOp::Nor: return ~(a | b);
    case PicOp::Not: return ~a;
    case PicOp::Xor: return a ^ b;
    case PicOp::Add: return a + b;
  }
  return 0;
}

constexpr std::array<PicOp, 7> kAllOps = {PicOp::And, PicOp::Nand, PicOp::Or, PicOp::Nor,
                                          PicOp::Not, PicOp::Xor,  PicOp::Add};

}  // namespace

TEST_CASE("sense_pair maps bit pairs onto the three current levels") {
  CHECK(sense_pair(0, 0) == SenseLevel::BothZero);
  CHECK(sense_pair(1, 0) == SenseLevel::Mixed);
  CHECK(sense_pair(0, 1) == SenseLevel::Mixed);
  CHECK(sense_pair(1, 1) == SenseLevel::BothOne);
}

TEST_CASE("level order matches the sensed-current order") {
  CHECK(static_cast<int>(SenseLevel::BothOne) < static_cast<int>(SenseLevel::Mixed));
  CHECK(static_cast<int>(SenseLevel::Mixed) < static_cast<int>(SenseLevel::BothZero));
}

TEST_CASE("decode truth table") {
  CHECK(decode(PicOp::And, SenseLevel::Mixed) == 0);
  CHECK(decode(PicOp::Or, SenseLevel::Mixed) == 1);
  CHECK(decode(PicOp::Xor, SenseLevel::BothOne) == 0);
  CHECK(decode(PicOp::Xor, SenseLevel::Mixed) == 1);
  CHECK(decode(PicOp::And, SenseLevel::BothOne) == 1);
  CHECK(decode(PicOp::Nor, SenseLevel::BothZero) == 1);
}

TEST_CASE("decode rejects Add and Not") {
  CHECK_THROWS_AS(decode(PicOp::Add, SenseLevel::Mixed), std::invalid_argument);
  CHECK_THROWS_AS(decode(PicOp::Not, SenseLevel::Mixed), std::invalid_argument);
}

TEST_CASE("De Morgan duality holds for every sense level") {
  for (SenseLevel s : {SenseLevel::BothOne, SenseLevel::Mixed, SenseLevel::BothZero}) {
    CHECK(decode(PicOp::Nand, s) == 1 - decode(PicOp::And, s));
    CHECK(decode(PicOp::Nor, s) == 1 - decode(PicOp::Or, s));
  }
}

TEST_CASE("compute_word worked examples") {
  CHECK(compute_lane(PicOp::And, 0xF0F0, 0x0FF0) == 0x00F0);
  CHECK(compute_lane(PicOp::Add, 7, 9) == 16);
  std::array<std::uint32_t, 2> a{0xFFFFFFFFu, 1u}, b{1u, 0xFFFFFFFFu};
  auto sum = compute_word(PicOp::Add, a, b);
  CHECK(sum[0] == 0u);  // carries stay inside the lane
  CHECK(sum[1] == 0u);
}

TEST_CASE("width mismatch is rejected") {
  std::array<std::uint32_t, 2> a{1, 2};
  std::array<std::uint32_t, 1> b{3};
  CHECK_THROWS_AS(compute_word(PicOp::And, a, b), std::invalid_argument);
}

TEST_CASE("exhaustive 8-bit operand pairs agree with the oracle for all ops") {
  for (PicOp op : kAllOps) {
    for (std::uint32_t a = 0; a < 256; ++a) {
      for (std::uint32_t b = 0; b < 256; ++b) {
        if (compute_lane(op, a, b) != oracle(op, a, b)) {
          REQUIRE_MESSAGE(false, "mismatch op=" << pic_op_name(op) << " a=" << a << " b=" << b);
        }
      }
    }
  }
}

TEST_CASE("random 32-bit operands agree with the oracle") {
  SplitMix rng(2024);
  for (PicOp op : kAllOps) {
    for (int i = 0; i < 20000; ++i) {
      std::uint32_t a = rng.next_u32(), b = rng.next_u32();
      if (compute_lane(op, a, b) != oracle(op, a, b)) {
        REQUIRE_MESSAGE(false, "mismatch op=" << pic_op_name(op) << " a=" << a << " b=" << b);
      }
    }
  }
}

TEST_CASE("add is associative per lane mod 2^32") {
  SplitMix rng(7);
  for (int i = 0; i < 5000; ++i) {
    std::uint32_t a = rng.next_u32(), b = rng.next_u32(), c = rng.next_u32();
    auto left = compute_lane(PicOp::Add, a, compute_lane(PicOp::Add, b, c));
    auto right = compute_lane(PicOp::Add, compute_lane(PicOp::Add, a, b), c);
    CHECK(left == right);
  }
}

TEST_CASE("op_cost reproduces the calibrated cycle and energy figures") {
  auto cat = DeviceCatalog::builtin();
  const auto& l2lo = cat.lookup_params(Level::L2, Technology::SttRam,
                                       RetentionClass::relaxed(75000));
  auto add = op_cost(PicOp::Add, l2lo, 16);
  CHECK(add.cycles == 15);
  CHECK(add.energy_fj == 16ll * 32 * 11437);

  const auto& l1 = cat.lookup_params(Level::L1, Technology::SttRam,
                                     RetentionClass::relaxed(75000));
  auto orc = op_cost(PicOp::Or, l1, 16);
  CHECK(orc.cycles == 3);
  CHECK(orc.energy_fj == 16ll * 32 * 5376);

  const auto& mem = cat.lookup_params(Level::Mem, Technology::SttRam,
                                      RetentionClass::nonvolatile());
  auto andc = op_cost(PicOp::And, mem, 256);
  CHECK(andc.cycles == 88);
  CHECK(andc.energy_fj == 256ll * 32 * 666045);
}

TEST_CASE("op_cost energy scales linearly in lanes while cycles stay fixed") {
  auto cat = DeviceCatalog::builtin();
  const auto& p = cat.lookup_params(Level::L2, Technology::SttRam,
                                    RetentionClass::relaxed(10000000));
  for (PicOp op : kAllOps) {
    auto one = op_cost(op, p, 16);
    auto four = op_cost(op, p, 64);
    CHECK(four.cycles == one.cycles);
    CHECK(four.energy_fj == 4 * one.energy_fj);
  }
}
