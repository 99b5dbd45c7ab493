#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "himc/common.hpp"

namespace himc {

enum class Level : std::uint8_t { L1, L2, Mem };
enum class Technology : std::uint8_t { Sram, SttRam };

/// Retention class of one device column: SRAM has none, relaxed STT-RAM
/// carries its retention duration, non-volatile STT-RAM never expires.
struct RetentionClass {
  enum class Kind : std::uint8_t { None, Relaxed, Nonvolatile } kind = Kind::None;
  std::uint64_t duration_ns = 0;  ///< meaningful only for Kind::Relaxed

  static RetentionClass none() { return {Kind::None, 0}; }
  static RetentionClass relaxed(std::uint64_t ns) { return {Kind::Relaxed, ns}; }
  static RetentionClass nonvolatile() { return {Kind::Nonvolatile, 0}; }

  bool operator==(const RetentionClass&) const = default;
  bool expires() const { return kind == Kind::Relaxed; }
  std::string label() const;
};

/// One calibrated device column: latencies in core cycles, energies in fJ/bit,
/// leakage in uW (thousandths of mW) so every shipped value is exact.
struct DeviceParams {
  Level level = Level::L1;
  Technology technology = Technology::SttRam;
  RetentionClass retention;
  std::uint32_t read_latency = 1;
  std::uint32_t write_latency = 1;
  std::uint32_t logic_op_latency = 1;
  std::uint32_t add_op_latency = 1;
  fj_t read_energy_fj = 0;   ///< per bit
  fj_t write_energy_fj = 0;  ///< per bit
  fj_t logic_energy_fj = 0;  ///< per bit, inclusive of access + result store
  fj_t add_energy_fj = 0;    ///< per bit, inclusive of access + result store
  std::int64_t leakage_uw = 0;

  fj_t leakage_fj_per_cycle() const { return leakage_uw / 2; }  // uW * 500ps
  bool operator==(const DeviceParams&) const = default;
};

/// Inputs of the retention-time requirement: the worst-case interval one
/// operand block must survive while its partner is brought in, times the
/// number of loads that can intervene.
struct RetentionRequirement {
  std::uint64_t t_process_ns = 0;
  std::uint64_t t_rw_ns = 0;
  std::uint64_t t_mem_ns = 0;
  std::uint64_t t_overhead_ns = 0;
  std::uint64_t k = 1;
};

std::uint64_t required_retention_ns(const RetentionRequirement& req);

struct CounterConfig {
  std::uint32_t n_states = 4;
  std::uint64_t clock_period_ns = 18750;
  std::uint32_t flag_state() const { return n_states - 1; }
  cycles_t period_cycles() const { return ns_to_cycles(clock_period_ns); }
};

struct CpuCostModel {
  /// Artifact defaults, not calibrated values: an A72-class core cluster at
  /// 2 GHz in the power-model scale the rest of the ledger uses.
  std::int64_t active_mw = 3200;
  std::int64_t idle_mw = 50;
  std::uint32_t alu_cycles = 1;
  std::uint32_t mul_cycles = 3;
  std::uint32_t div_cycles = 20;
};

struct LevelGeometry {
  std::uint64_t size_bytes = 0;
  std::uint32_t block_bytes = 64;
  std::uint32_t associativity = 1;
  std::uint32_t banks = 1;
  std::uint32_t subarrays = 1;
  std::uint32_t compute_lanes = 0;  ///< 32-bit lanes; 0 = no compute units

  std::uint32_t block_bits() const { return block_bytes * 8; }
  std::uint64_t blocks() const { return size_bytes / block_bytes; }
  std::uint64_t sets() const { return blocks() / associativity; }
  /// Block-pair instructions that can run concurrently.
  std::uint32_t compute_slots() const {
    return compute_lanes == 0 ? 0 : compute_lanes * 32 / block_bits();
  }
};

struct HierarchyConfig {
  double cpu_clock_ghz = 2.0;
  CpuCostModel cpu;
  LevelGeometry l1{.size_bytes = 32 * 1024,
                   .block_bytes = 64,
                   .associativity = 4,
                   .banks = 1,
                   .subarrays = 4,
                   .compute_lanes = 16};
  LevelGeometry l2{.size_bytes = 1024 * 1024,
                   .block_bytes = 64,
                   .associativity = 8,
                   .banks = 4,
                   .subarrays = 8,
                   .compute_lanes = 64};
  std::uint64_t mem_size_bytes = 512ull * 1024 * 1024;
  std::uint32_t mem_banks = 8;
  std::uint32_t mem_subarrays = 8;
  std::uint32_t mem_compute_lanes = 512;        ///< 256 or 512
  std::uint32_t mem_read_issue_interval = 6;    ///< memory port issue gap, cycles
  CounterConfig counter;
  std::uint32_t table_capacity_word_entries = 0;  ///< 0 = default 2x lanes
  std::uint32_t table_address_bits = 32;
  bool l1_hetero = false;       ///< sub-us L1 retention inflates miss rates; off by default
  bool allow_hetero_l1 = false;
  bool pic_enabled = true;
  std::string l1_retention = "75us";
  std::string l2_retention_high = "10ms";
  std::string l2_retention_low = "75us";
};

RetentionClass parse_retention(const std::string& label);
std::string level_name(Level level);
std::string technology_name(Technology tech);

/// Frozen Table-2-style device table plus user override rows. Immutable after
/// load; safe to share across concurrent runs.
class DeviceCatalog {
 public:
  static DeviceCatalog from_json_file(const std::string& path);
  static DeviceCatalog from_json_text(const std::string& text);
  /// The six shipped columns, compiled in; used as the reference in tests.
  static DeviceCatalog builtin();

  const DeviceParams& lookup_params(Level level, Technology tech,
                                    const RetentionClass& retention) const;
  const DeviceParams* try_lookup(Level level, Technology tech,
                                 const RetentionClass& retention) const;
  const std::vector<DeviceParams>& rows() const { return rows_; }
  void add_override(const DeviceParams& row);

 private:
  void validate_row(const DeviceParams& row) const;
  std::vector<DeviceParams> rows_;
};

/// Checks every HierarchyConfig invariant; returns the full violation list
/// (empty means valid).
std::vector<std::string> validate_config(const HierarchyConfig& cfg);

}  // namespace himc
