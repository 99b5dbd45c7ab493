#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "himc/common.hpp"
#include "himc/device_catalog.hpp"

namespace himc {

/// Combined bit-line current when two word-lines are sensed. Bit '1' is the
/// anti-parallel (high resistance) state, so BothOne carries the least
/// current and BothZero the most.
enum class SenseLevel : std::uint8_t { BothOne = 0, Mixed = 1, BothZero = 2 };

enum class PicOp : std::uint8_t { And, Nand, Or, Nor, Not, Xor, Add };

inline const char* pic_op_name(PicOp op) {
  switch (op) {
    case PicOp::And: return "and";
    case PicOp::Nand: return "nand";
    case PicOp::Or: return "or";
    case PicOp::Nor: return "nor";
    case PicOp::Not: return "not";
    case PicOp::Xor: return "xor";
    case PicOp::Add: return "add";
  }
  return "?";
}

inline bool is_add_op(PicOp op) { return op == PicOp::Add; }

struct OpCost {
  std::uint32_t cycles = 1;
  fj_t energy_fj = 0;
};

inline SenseLevel sense_pair(unsigned bit_a, unsigned bit_b) {
  unsigned ones = (bit_a & 1u) + (bit_b & 1u);
  return ones == 0 ? SenseLevel::BothZero : ones == 1 ? SenseLevel::Mixed : SenseLevel::BothOne;
}

/// Reference-compare decode of a sensed level. Add uses the carry chain and
/// Not uses single-word-line sensing, so both are rejected here.
inline unsigned decode(PicOp op, SenseLevel level) {
  switch (op) {
    case PicOp::And:
      return level == SenseLevel::BothOne ? 1u : 0u;
    case PicOp::Nand:
      return level == SenseLevel::BothOne ? 0u : 1u;
    case PicOp::Or:
      return level != SenseLevel::BothZero ? 1u : 0u;
    case PicOp::Nor:
      return level == SenseLevel::BothZero ? 1u : 0u;
    case PicOp::Xor:
      return level == SenseLevel::Mixed ? 1u : 0u;
    case PicOp::Not:
    case PicOp::Add:
      break;
  }
  throw std::invalid_argument(std::string("decode: no reference decode for ") + pic_op_name(op));
}

namespace detail {

inline unsigned bit_xor(unsigned a, unsigned b) { return decode(PicOp::Xor, sense_pair(a, b)); }
inline unsigned bit_and(unsigned a, unsigned b) { return decode(PicOp::And, sense_pair(a, b)); }
inline unsigned bit_or(unsigned a, unsigned b) { return decode(PicOp::Or, sense_pair(a, b)); }

}  // namespace detail

/// One 32-bit lane evaluated through the sensing path: bitwise ops via the
/// level decode, Not via single-word-line sensing against a fixed '1'
/// companion with the NAND decode, Add as a ripple carry built from the
/// decoded XOR/AND/OR outputs.
inline std::uint32_t compute_lane(PicOp op, std::uint32_t a, std::uint32_t b) {
  std::uint32_t out = 0;
  switch (op) {
    case PicOp::And:
    case PicOp::Nand:
    case PicOp::Or:
    case PicOp::Nor:
    case PicOp::Xor:
      for (unsigned i = 0; i < 32; ++i)
        out |= decode(op, sense_pair((a >> i) & 1u, (b >> i) & 1u)) << i;
      return out;
    case PicOp::Not:
      for (unsigned i = 0; i < 32; ++i)
        out |= decode(PicOp::Nand, sense_pair((a >> i) & 1u, 1u)) << i;
      return out;
    case PicOp::Add: {
      unsigned carry = 0;
      for (unsigned i = 0; i < 32; ++i) {
        unsigned ai = (a >> i) & 1u, bi = (b >> i) & 1u;
        unsigned axb = detail::bit_xor(ai, bi);
        out |= static_cast<std::uint32_t>(detail::bit_xor(axb, carry)) << i;
        carry = detail::bit_or(detail::bit_and(ai, bi), detail::bit_and(axb, carry));
      }
      return out;
    }
  }
  throw std::invalid_argument("compute_lane: unknown op");
}

/// Lane-wise word computation; carries never cross a 32-bit lane boundary.
/// For Not the second operand is ignored.
inline std::vector<std::uint32_t> compute_word(PicOp op, std::span<const std::uint32_t> a,
                                               std::span<const std::uint32_t> b) {
  if (op != PicOp::Not && a.size() != b.size())
    throw std::invalid_argument("compute_word: operand width mismatch");
  std::vector<std::uint32_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = compute_lane(op, a[i], op == PicOp::Not ? 0u : b[i]);
  return out;
}

/// Cycle/energy cost of one in-array operation over `lanes` 32-bit lanes.
/// Cycles come straight from the device column (width-independent); energy is
/// per-bit and already inclusive of array access plus result store.
inline OpCost op_cost(PicOp op, const DeviceParams& params, std::uint32_t lanes) {
  OpCost cost;
  cost.cycles = is_add_op(op) ? params.add_op_latency : params.logic_op_latency;
  cost.energy_fj =
      static_cast<fj_t>(lanes) * 32 * (is_add_op(op) ? params.add_energy_fj : params.logic_energy_fj);
  return cost;
}

}  // namespace himc
