#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "himc/chaining.hpp"
#include "himc/device_catalog.hpp"
#include "himc/kernels.hpp"
#include "himc/retention_cache.hpp"
#include "himc/trace.hpp"

namespace himc {

enum class Placement : std::uint8_t { CpuOnly, PicL1, PicL2Hom, PicL2Het, Pim256, Pim512 };

const std::vector<Placement>& all_placements();
std::string placement_name(Placement p);
Placement parse_placement(const std::string& name);

/// Energy ledger components. CPU "dynamic" is active-power energy; CPU
/// "leakage" is idle-power energy.
enum class Component : std::uint8_t { Cpu = 0, L1 = 1, L2 = 2, L2LowBank = 3, Mem = 4 };
constexpr std::size_t kComponentCount = 5;
const char* component_name(Component c);

struct SimCounters {
  std::uint64_t l1_reads = 0, l1_read_hits = 0, l1_writes = 0;
  std::uint64_t l2_reads = 0, l2_read_hits = 0, l2_writes = 0;
  std::uint64_t mem_reads = 0, mem_writes = 0;
  std::uint64_t controller_fetches = 0;
  std::uint64_t pic_ops = 0;
  std::uint64_t store_pims = 0;
  std::uint64_t transfers = 0;
  std::uint64_t latch_flips = 0;
  std::uint64_t expire_writebacks = 0;
  std::uint64_t expire_invalidations = 0;
  std::uint64_t evictions = 0;
  std::uint64_t instructions = 0;
  std::uint64_t emergency_flushes = 0;
  std::uint64_t table_stall_cycles = 0;
  std::uint64_t cpu_busy_cycles = 0;
};

struct SimReport {
  std::string workload;
  std::uint64_t size = 0;
  std::uint64_t seed = 0;
  Placement placement = Placement::CpuOnly;
  ChainMode chaining = ChainMode::Conventional;
  cycles_t cycles = 0;
  std::uint64_t time_ps = 0;
  std::array<fj_t, kComponentCount> dynamic_fj{};
  std::array<fj_t, kComponentCount> leakage_fj{};
  SimCounters counters;
  std::uint64_t checksum = 0;

  fj_t total_fj() const {
    fj_t t = 0;
    for (auto v : dynamic_fj) t += v;
    for (auto v : leakage_fj) t += v;
    return t;
  }
};

struct RunOptions {
  bool capture_timeline = false;
  bool capture_event_log = false;
};

/// One charged cost, for the replay/additivity check.
struct LedgerEntry {
  Component component;
  fj_t energy_fj;
};

struct RunArtifacts {
  SimReport report;
  std::vector<TimelineSegment> timeline;
  std::vector<LedgerEntry> event_log;
};

/// Runs one trace under one placement and chaining mode. Deterministic:
/// identical inputs give byte-identical reports.
SimReport run(const Trace& trace, const HierarchyConfig& cfg, const DeviceCatalog& catalog,
              Placement placement, ChainMode mode);
RunArtifacts run_with_artifacts(const Trace& trace, const HierarchyConfig& cfg,
                                const DeviceCatalog& catalog, Placement placement, ChainMode mode,
                                const RunOptions& options);

struct ComparisonRow {
  std::string workload;
  std::uint64_t size = 0;
  Placement placement = Placement::CpuOnly;
  ChainMode chaining = ChainMode::Conventional;
  double speedup = 1.0;
  double energy_ratio = 1.0;
};

/// Baseline-normalized ratios. Refuses checksum-divergent reports: a
/// comparison of functionally different runs is a bug, not a result.
std::vector<ComparisonRow> compare(const SimReport& baseline,
                                   const std::vector<SimReport>& candidates);

struct SweepSpec {
  std::vector<std::string> kernels;
  std::vector<Placement> placements;
  std::vector<ChainMode> modes;
  std::uint64_t size = 1024;
  std::uint64_t seed = 1;
};

struct SweepResult {
  std::vector<SimReport> reports;           // canonical order
  std::vector<ComparisonRow> comparisons;   // vs the CpuOnly run of each kernel
  std::vector<std::string> errors;
};

/// Runs the full cross product; independent runs execute concurrently and the
/// bundle is assembled in canonical (kernel, placement, mode) order so output
/// is byte-stable. Per-run failures become error records, not aborts.
SweepResult sweep(const SweepSpec& spec, const HierarchyConfig& cfg,
                  const DeviceCatalog& catalog);

std::string report_to_json(const SimReport& report);
std::string sweep_to_json(const SweepResult& result);
std::string sweep_to_csv(const SweepResult& result);

}  // namespace himc
