#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "himc/common.hpp"
#include "himc/trace.hpp"

namespace himc {

enum class ChainMode : std::uint8_t { Chained, Conventional };

inline const char* chain_mode_name(ChainMode m) {
  return m == ChainMode::Chained ? "chained" : "conventional";
}

/// Pending-instruction buffer bookkeeping. Entries are counted in 32-bit word
/// pairs: a 64-byte block-pair instruction occupies 16 word entries.
struct InstructionTable {
  std::uint32_t capacity_word_entries = 32;
  std::uint32_t address_bits = 32;

  /// Reported storage for buffering one full wave of lane pairs: two operand
  /// addresses per lane. 16 lanes at 32-bit addresses come to 128 bytes.
  static std::uint64_t wave_overhead_bytes(std::uint32_t lanes, std::uint32_t address_bits) {
    return static_cast<std::uint64_t>(lanes) * 2 * address_bits / 8;
  }

  /// Runtime buffering default: sixteen waves. A two-wave table flow-controls
  /// instruction issue to the drain rate and idles most compute slots; deeper
  /// buffering keeps the units busy while mis-steered operands move.
  static std::uint32_t default_capacity(std::uint32_t lanes) { return 16 * lanes; }
};

/// Single memory read port: back-to-back block fetches stream at the issue
/// interval plus the receiving bank's fill time.
struct FetchPipe {
  cycles_t next_free = 0;

  cycles_t acquire(cycles_t now, cycles_t occupancy) {
    cycles_t grant = now > next_free ? now : next_free;
    next_free = grant + occupancy;
    return grant;
  }
};

struct FetchCost {
  cycles_t pipe_occupancy = 0;  ///< issue interval + fill write
  cycles_t latency = 0;         ///< grant to data-ready
};

/// Machine-side costs and state mutations, supplied by the simulator (or a
/// stub in unit tests). All times are absolute cycles; energy accounting is
/// internal to the implementation.
class MachineHooks {
 public:
  virtual ~MachineHooks() = default;

  /// Runs one CPU-side event (CpuOp/CpuLoad/CpuStore/StorePim) starting at
  /// `now`; returns its duration.
  virtual cycles_t cpu_event(std::uint32_t event_idx, cycles_t now) = 0;

  /// Moves mis-steered operands into the compute region (dual-retention
  /// caches); returns the cycles spent, 0 when nothing moves.
  virtual cycles_t transfer_operands(std::uint32_t event_idx, cycles_t now) = 0;

  /// Operand blocks of `event_idx` not resident at the compute level.
  virtual std::vector<block_id_t> missing_operands(std::uint32_t event_idx, cycles_t now) = 0;

  /// Starts fetching one block (acquires the memory port, charges read
  /// energy); returns the absolute time the block is installed.
  virtual cycles_t begin_fetch(block_id_t block, cycles_t now) = 0;

  /// Installs a fetched block at the compute level.
  virtual void fetch_complete(block_id_t block, cycles_t now) = 0;

  /// Executes the instruction (applies data, registers the destination,
  /// charges op energy); returns the op cycle count.
  virtual cycles_t execute_instruction(std::uint32_t event_idx, cycles_t now) = 0;
};

struct SchedulerParams {
  std::uint32_t compute_slots = 1;
  std::uint32_t table_capacity_words = 32;
  std::uint32_t words_per_instruction = 16;
  bool lower_pic_to_cpu = false;  ///< CPU-only placement: PicOp/StorePim run as CPU work
};

struct TimelineSegment {
  std::string unit;   ///< "cpu" or "pic"
  std::string kind;
  cycles_t start = 0;
  cycles_t end = 0;
};

struct ScheduleResult {
  cycles_t total_cycles = 0;
  cycles_t cpu_busy_cycles = 0;
  /// Window the execution unit stays powered: per-event busy time in the
  /// conventional schedule, the whole first-to-last-CPU-activity span when
  /// operation chaining keeps the core awake.
  cycles_t cpu_active_cycles = 0;
  cycles_t table_stall_cycles = 0;
  std::uint64_t instructions_executed = 0;
  std::uint64_t emergency_flushes = 0;
  std::vector<TimelineSegment> timeline;
};

/// Deterministic list scheduler: the CPU walks the trace in order, in-array
/// instructions buffer in the table and run on the compute slots. Chained
/// mode starts instructions as soon as dependencies allow; conventional mode
/// holds them for the next Sync and powers the core down while they drain.
ScheduleResult schedule_trace(const Trace& trace, ChainMode mode, const SchedulerParams& params,
                              MachineHooks& hooks, bool capture_timeline = false);

std::string timeline_to_jsonl(const ScheduleResult& result);

}  // namespace himc
