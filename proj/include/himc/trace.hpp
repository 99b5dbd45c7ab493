#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "himc/bitline.hpp"
#include "himc/common.hpp"

namespace himc {

/// Functional CPU-side transforms applied to the shared data image. Costs are
/// carried separately as op counts; these only define what the values become.
enum class CpuFn : std::uint8_t {
  None,     ///< pure cost, no data effect
  Square,   ///< dest[w] = a[w] * a[w]
  MulImm,   ///< dest[w] = a[w] * imm
  HistBin,  ///< for each word x of a: block dest + ((x>>2)&63)/16, word (x>>2)&15 incremented
  Isqrt,    ///< dest[0] = floor(sqrt(sum over a words)), 64-bit sum
  MinScan,  ///< dest[0] = min(dest[0], min word of a); dest[1] = winning block id
  SumBlock, ///< dest[0] += wrapping sum of a words
};

enum class EventKind : std::uint8_t {
  CpuOp,     ///< CPU compute; charges alu/mul/div cycles, applies fn
  CpuLoad,   ///< CPU reads one block through the cache hierarchy
  CpuStore,  ///< CPU writes one block through the cache hierarchy
  StorePim,  ///< CPU writes one block directly at the compute level (low retention)
  PicOp,     ///< block-pair in-array instruction, buffered in the table
  Sync,      ///< Compute/DONE phase boundary for the non-chained schedule
};

struct CpuCost {
  std::uint32_t alu = 0;
  std::uint32_t mul = 0;
  std::uint32_t div = 0;
};

struct TraceEvent {
  EventKind kind = EventKind::CpuOp;
  PicOp op = PicOp::Add;       ///< PicOp only
  CpuFn fn = CpuFn::None;      ///< CpuOp only
  CpuCost cpu;                 ///< CpuOp only
  block_id_t a = 0;            ///< source block / load/store target
  block_id_t b = 0;            ///< second source block
  block_id_t dest = 0;         ///< destination block
  std::uint32_t imm = 0;       ///< immediate for MulImm/ShlImm
  std::vector<std::uint32_t> deps;  ///< indices of earlier events
};

/// Workload classification used for trend reporting.
enum class KernelCategory : std::uint8_t { CpuDependent, IndepHighReuse, IndepLowReuse };

struct TraceMetadata {
  std::string kernel;
  KernelCategory category = KernelCategory::CpuDependent;
  std::uint64_t size = 0;
  std::uint64_t seed = 0;
  double pic_eligible_fraction = 0.0;  ///< PiC word-ops / total word-ops
  double write_intensity = 0.0;
  double reuse_factor = 0.0;           ///< PiC ops per distinct operand block
  std::uint32_t output_base = 0;       ///< first block of the checksummed output region
  std::uint32_t output_blocks = 0;
};

/// A generated workload program: seeded initial data image, the event DAG,
/// and the block region holding the final answer.
struct Trace {
  TraceMetadata meta;
  std::vector<std::uint32_t> initial_image;  ///< whole data footprint, block-aligned
  std::vector<TraceEvent> events;

  std::uint32_t footprint_blocks() const {
    return static_cast<std::uint32_t>(initial_image.size() / 16);
  }
};

/// Rejects cyclic or out-of-range dependency edges.
void validate_trace(const Trace& trace);

std::string trace_to_jsonl(const Trace& trace);
Trace trace_from_jsonl(const std::string& text);

}  // namespace himc
