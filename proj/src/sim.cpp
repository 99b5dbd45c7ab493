#include "himc/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <stdexcept>

#include <json.hpp>

#include "himc/hetero_controller.hpp"

namespace himc {

const std::vector<Placement>& all_placements() {
  static const std::vector<Placement> all = {Placement::CpuOnly,  Placement::PicL1,
                                             Placement::PicL2Hom, Placement::PicL2Het,
                                             Placement::Pim256,   Placement::Pim512};
  return all;
}

std::string placement_name(Placement p) {
  switch (p) {
    case Placement::CpuOnly: return "cpu-only";
    case Placement::PicL1: return "pic-l1";
    case Placement::PicL2Hom: return "pic-l2-hom";
    case Placement::PicL2Het: return "pic-l2-het";
    case Placement::Pim256: return "pim-256";
    case Placement::Pim512: return "pim-512";
  }
  return "?";
}

Placement parse_placement(const std::string& name) {
  for (Placement p : all_placements())
    if (placement_name(p) == name) return p;
  throw ConfigError("unknown placement: " + name);
}

const char* component_name(Component c) {
  switch (c) {
    case Component::Cpu: return "cpu";
    case Component::L1: return "l1";
    case Component::L2: return "l2";
    case Component::L2LowBank: return "l2_low_bank";
    case Component::Mem: return "mem";
  }
  return "?";
}

namespace {

constexpr std::uint32_t kWordsPerBlock = 16;

struct Ledger {
  std::array<fj_t, kComponentCount> dynamic{};
  bool capture = false;
  std::vector<LedgerEntry> log;

  void charge(Component c, fj_t fj) {
    dynamic[static_cast<std::size_t>(c)] += fj;
    if (capture && fj != 0) log.push_back({c, fj});
  }
};

/// Cost-model machine: implements the scheduler hooks over the configured
/// hierarchy for one placement. Owns the data image, so functional results
/// and timing both come out of the same walk over the trace.
class Machine : public MachineHooks {
 public:
  Machine(const Trace& trace, const HierarchyConfig& cfg, const DeviceCatalog& catalog,
          Placement placement, bool capture_log)
      : trace_(trace), cfg_(cfg), placement_(placement), image_(trace.initial_image) {
    ledger_.capture = capture_log;

    const auto l1_dev = catalog.lookup_params(Level::L1, Technology::SttRam,
                                              parse_retention(cfg.l1_retention));
    const auto l2_hi = catalog.lookup_params(Level::L2, Technology::SttRam,
                                             parse_retention(cfg.l2_retention_high));
    mem_dev_ = catalog.lookup_params(Level::Mem, Technology::SttRam,
                                     RetentionClass::nonvolatile());

    std::vector<RegionParams> l1_regions{{l1_dev, cfg.counter}};
    l1_.emplace("l1", cfg.l1, l1_regions);

    std::vector<RegionParams> l2_regions{{l2_hi, cfg.counter}};
    if (placement == Placement::PicL2Het) {
      const auto l2_lo = catalog.lookup_params(Level::L2, Technology::SttRam,
                                               parse_retention(cfg.l2_retention_low));
      l2_regions.push_back({l2_lo, cfg.counter});
    }
    l2_.emplace("l2", cfg.l2, l2_regions);

    l1_->set_expiry_callback([this](const ExpiredBlock& ev) {
      if (ev.dirty) writeback_to_l2(ev.block);
    });
    l2_->set_expiry_callback([this](const ExpiredBlock& ev) {
      if (ev.dirty) writeback_to_mem();
    });

    switch (placement) {
      case Placement::CpuOnly:
        break;
      case Placement::PicL1:
        compute_cache_ = &*l1_;
        compute_region_ = kRegionHigh;
        break;
      case Placement::PicL2Hom:
        compute_cache_ = &*l2_;
        compute_region_ = kRegionHigh;
        break;
      case Placement::PicL2Het:
        compute_cache_ = &*l2_;
        compute_region_ = kRegionLow;
        break;
      case Placement::Pim256:
      case Placement::Pim512:
        compute_in_memory_ = true;
        break;
    }
    if (compute_cache_) compute_dev_ = compute_cache_->region(compute_region_).device;
    if (compute_in_memory_) compute_dev_ = mem_dev_;
  }

  std::uint32_t compute_slots() const {
    switch (placement_) {
      case Placement::CpuOnly: return 1;
      case Placement::PicL1: return cfg_.l1.compute_slots();
      case Placement::PicL2Hom:
      case Placement::PicL2Het: return cfg_.l2.compute_slots();
      case Placement::Pim256: return 256 * 32 / (cfg_.l2.block_bits());
      case Placement::Pim512: return 512 * 32 / (cfg_.l2.block_bits());
    }
    return 1;
  }

  std::uint32_t compute_lanes() const {
    switch (placement_) {
      case Placement::CpuOnly: return 0;
      case Placement::PicL1: return cfg_.l1.compute_lanes;
      case Placement::PicL2Hom:
      case Placement::PicL2Het: return cfg_.l2.compute_lanes;
      case Placement::Pim256: return 256;
      case Placement::Pim512: return 512;
    }
    return 0;
  }

  // --- MachineHooks -------------------------------------------------------

  cycles_t cpu_event(std::uint32_t idx, cycles_t now) override {
    const TraceEvent& ev = trace_.events[idx];
    switch (ev.kind) {
      case EventKind::CpuOp:
        apply_fn(ev);
        return cpu_cost(ev.cpu);
      case EventKind::CpuLoad:
        return load_block(ev.a, now);
      case EventKind::CpuStore:
        return store_block(ev.a, now);
      case EventKind::StorePim:
        return store_pim(ev.a, now);
      case EventKind::PicOp:
        return lowered_pic(ev, now);  // CPU-only placement
      case EventKind::Sync:
        return 0;
    }
    return 0;
  }

  cycles_t transfer_operands(std::uint32_t idx, cycles_t now) override {
    if (!compute_cache_ || compute_cache_->region_count() < 2) return 0;
    const TraceEvent& ev = trace_.events[idx];
    cycles_t cycles = 0;
    for (block_id_t block : operand_blocks(ev)) {
      BlockView view = compute_cache_->probe(block, now);
      if (view.resident && view.region != compute_region_) {
        AccessOutcome out = compute_cache_->transfer_to_low(block, now);
        cycles += out.cycles;
        charge_cache(*compute_cache_, out);
      }
    }
    return cycles;
  }

  std::vector<block_id_t> missing_operands(std::uint32_t idx, cycles_t now) override {
    std::vector<block_id_t> missing;
    if (compute_in_memory_ || !compute_cache_) return missing;
    const TraceEvent& ev = trace_.events[idx];
    for (block_id_t block : operand_blocks(ev)) {
      if (!compute_cache_->probe(block, now).resident) missing.push_back(block);
    }
    return missing;
  }

  cycles_t begin_fetch(block_id_t block, cycles_t now) override {
    (void)block;
    cycles_t fill = compute_dev_.write_latency;
    cycles_t grant = pipe_.acquire(now, cfg_.mem_read_issue_interval + fill);
    charge(Component::Mem, block_bits() * mem_dev_.read_energy_fj);
    ++counters_.mem_reads;
    ++counters_.controller_fetches;
    return grant + mem_dev_.read_latency + fill;
  }

  void fetch_complete(block_id_t block, cycles_t now) override {
    AccessOutcome out = compute_cache_->install(block, compute_region_, now, false);
    charge_cache(*compute_cache_, out);
    handle_victims(*compute_cache_, out, now);
  }

  cycles_t execute_instruction(std::uint32_t idx, cycles_t now) override {
    const TraceEvent& ev = trace_.events[idx];
    OpCost cost = op_cost(ev.op, compute_dev_, block_bits() / 32);
    charge(compute_component(), cost.energy_fj);
    ++counters_.pic_ops;
    apply_pic(ev);
    if (compute_cache_) {
      AccessOutcome out = compute_cache_->note_compute_dest(ev.dest, compute_region_, now);
      handle_victims(*compute_cache_, out, now);
    }
    return cost.cycles;
  }

  // --- report assembly ----------------------------------------------------

  void finalize(cycles_t end_time) {
    l1_->expire_until(end_time);
    l2_->expire_until(end_time);
  }

  std::uint64_t checksum() const {
    const std::uint32_t* base =
        image_.data() + std::size_t(trace_.meta.output_base) * kWordsPerBlock;
    return fnv1a64_words(base, std::size_t(trace_.meta.output_blocks) * kWordsPerBlock);
  }

  void fill_report(SimReport& rep, const ScheduleResult& sched) const {
    rep.cycles = sched.total_cycles;
    rep.time_ps = cycles_to_ps(sched.total_cycles);
    rep.dynamic_fj = ledger_.dynamic;
    rep.leakage_fj = {};
    // The execution unit draws active power over its powered window and idle
    // power for the rest of the run.
    cycles_t active = std::min(sched.cpu_active_cycles, sched.total_cycles);
    rep.dynamic_fj[std::size_t(Component::Cpu)] +=
        fj_t(active) * mw_to_fj_per_cycle(cfg_.cpu.active_mw);
    rep.leakage_fj[std::size_t(Component::Cpu)] =
        fj_t(sched.total_cycles - active) * mw_to_fj_per_cycle(cfg_.cpu.idle_mw);
    rep.leakage_fj[std::size_t(Component::L1)] =
        fj_t(sched.total_cycles) * l1_->region(0).device.leakage_fj_per_cycle();
    rep.leakage_fj[std::size_t(Component::L2)] =
        fj_t(sched.total_cycles) * l2_->region(0).device.leakage_fj_per_cycle();
    if (l2_->region_count() > 1)
      rep.leakage_fj[std::size_t(Component::L2LowBank)] =
          fj_t(sched.total_cycles) * l2_->region(1).device.leakage_fj_per_cycle();
    rep.leakage_fj[std::size_t(Component::Mem)] =
        fj_t(sched.total_cycles) * mem_dev_.leakage_fj_per_cycle();

    rep.counters.l1_reads = l1_->stats().reads;
    rep.counters.l1_read_hits = l1_->stats().read_hits;
    rep.counters.l1_writes = l1_->stats().writes;
    rep.counters.l2_reads = l2_->stats().reads;
    rep.counters.l2_read_hits = l2_->stats().read_hits;
    rep.counters.l2_writes = l2_->stats().writes;
    rep.counters.mem_reads = counters_.mem_reads;
    rep.counters.mem_writes = counters_.mem_writes;
    rep.counters.controller_fetches = counters_.controller_fetches;
    rep.counters.pic_ops = counters_.pic_ops;
    rep.counters.store_pims = counters_.store_pims;
    rep.counters.transfers = l1_->stats().transfers + l2_->stats().transfers;
    rep.counters.latch_flips = l1_->stats().latch_flips + l2_->stats().latch_flips;
    rep.counters.expire_writebacks =
        l1_->stats().expire_writebacks + l2_->stats().expire_writebacks;
    rep.counters.expire_invalidations =
        l1_->stats().expire_invalidations + l2_->stats().expire_invalidations;
    rep.counters.evictions = l1_->stats().evictions_clean + l1_->stats().evictions_dirty +
                             l2_->stats().evictions_clean + l2_->stats().evictions_dirty;
    rep.counters.instructions = sched.instructions_executed;
    rep.counters.emergency_flushes = sched.emergency_flushes;
    rep.counters.table_stall_cycles = sched.table_stall_cycles;
    rep.counters.cpu_busy_cycles = sched.cpu_busy_cycles;
    rep.checksum = checksum();
  }

  const std::vector<LedgerEntry>& event_log() const { return ledger_.log; }

 private:
  fj_t block_bits() const { return cfg_.l1.block_bits(); }

  Component compute_component() const {
    if (compute_in_memory_) return Component::Mem;
    if (compute_cache_ == &*l1_) return Component::L1;
    return compute_region_ == kRegionLow ? Component::L2LowBank : Component::L2;
  }

  void charge(Component c, fj_t fj) { ledger_.charge(c, fj); }

  void charge_cache(const RetentionCache& cache, const AccessOutcome& out) {
    if (&cache == &*l1_) {
      charge(Component::L1, out.energy_fj[0]);
    } else {
      charge(Component::L2, out.energy_fj[0]);
      charge(Component::L2LowBank, out.energy_fj[1]);
    }
  }

  /// Dirty victims drain through a write buffer: energy and state at the next
  /// level, no added latency on the critical path.
  void handle_victims(RetentionCache& cache, const AccessOutcome& out, cycles_t now) {
    for (const VictimBlock& v : out.victims) {
      if (!v.dirty) continue;
      if (&cache == &*l1_) {
        writeback_block_to_l2(v.block, now);
      } else {
        writeback_to_mem();
      }
    }
  }

  void writeback_block_to_l2(block_id_t block, cycles_t now) {
    AccessOutcome out = l2_->install(block, kRegionHigh, now, true);
    charge_cache(*l2_, out);
    handle_victims(*l2_, out, now);
  }

  /// Expiry-time writeback: charged at the next level without re-installing
  /// (the flag fires between accesses; data is safe in the image).
  void writeback_to_l2(block_id_t block) {
    (void)block;
    charge(Component::L2, block_bits() * l2_->region(0).device.write_energy_fj);
  }

  void writeback_to_mem() {
    charge(Component::Mem, block_bits() * mem_dev_.write_energy_fj);
    ++counters_.mem_writes;
  }

  cycles_t cpu_cost(const CpuCost& c) const {
    return cycles_t(c.alu) * cfg_.cpu.alu_cycles + cycles_t(c.mul) * cfg_.cpu.mul_cycles +
           cycles_t(c.div) * cfg_.cpu.div_cycles;
  }

  std::vector<block_id_t> operand_blocks(const TraceEvent& ev) const {
    std::vector<block_id_t> blocks{ev.a};
    if (ev.op != PicOp::Not && ev.b != ev.a) blocks.push_back(ev.b);
    return blocks;
  }

  cycles_t load_block(block_id_t block, cycles_t now) {
    AccessOutcome out = l1_->read(block, now);
    charge_cache(*l1_, out);
    if (out.hit) return out.cycles;
    cycles_t cycles = out.cycles;
    AccessOutcome l2out = l2_->read(block, now);
    charge_cache(*l2_, l2out);
    if (!l2out.hit) {
      // Miss to memory: stream through the read port, fill the L2 high bank.
      cycles_t fill = l2_->region(kRegionHigh).device.write_latency;
      cycles_t grant = pipe_.acquire(now, cfg_.mem_read_issue_interval + fill);
      charge(Component::Mem, block_bits() * mem_dev_.read_energy_fj);
      ++counters_.mem_reads;
      cycles += (grant - now) + mem_dev_.read_latency;
      AccessOutcome fill_out = l2_->install(block, kRegionHigh, now, false);
      charge_cache(*l2_, fill_out);
      handle_victims(*l2_, fill_out, now);
      cycles += fill_out.cycles;
    } else {
      cycles += l2out.cycles;
    }
    AccessOutcome l1fill = l1_->install(block, kRegionHigh, now, false);
    charge_cache(*l1_, l1fill);
    handle_victims(*l1_, l1fill, now);
    return cycles + l1fill.cycles;
  }

  cycles_t store_block(block_id_t block, cycles_t now) {
    AccessOutcome out = l1_->write(block, kRegionHigh, now);
    charge_cache(*l1_, out);
    handle_victims(*l1_, out, now);
    return out.cycles;
  }

  cycles_t store_pim(block_id_t block, cycles_t now) {
    ++counters_.store_pims;
    if (compute_in_memory_) {
      charge(Component::Mem, block_bits() * mem_dev_.write_energy_fj);
      ++counters_.mem_writes;
      return mem_dev_.write_latency;
    }
    if (!compute_cache_) return store_block(block, now);  // CPU-only lowering
    AccessOutcome out = compute_cache_->write(block, compute_region_, now);
    charge_cache(*compute_cache_, out);
    handle_victims(*compute_cache_, out, now);
    return out.cycles;
  }

  cycles_t lowered_pic(const TraceEvent& ev, cycles_t now) {
    cycles_t cycles = load_block(ev.a, now);
    if (ev.op != PicOp::Not && ev.b != ev.a) cycles += load_block(ev.b, now);
    cycles += cycles_t(kWordsPerBlock) * cfg_.cpu.alu_cycles;
    apply_pic(ev);
    cycles += store_block(ev.dest, now);
    return cycles;
  }

  std::uint32_t* words(block_id_t block) {
    return image_.data() + std::size_t(block) * kWordsPerBlock;
  }

  void apply_pic(const TraceEvent& ev) {
    const std::uint32_t* a = words(ev.a);
    const std::uint32_t* b = words(ev.b);
    std::uint32_t* d = words(ev.dest);
    for (std::uint32_t w = 0; w < kWordsPerBlock; ++w)
      d[w] = compute_lane(ev.op, a[w], ev.op == PicOp::Not ? 0u : b[w]);
  }

  void apply_fn(const TraceEvent& ev) {
    const std::uint32_t* a = words(ev.a);
    std::uint32_t* d = words(ev.dest);
    switch (ev.fn) {
      case CpuFn::None:
        return;
      case CpuFn::Square:
        for (std::uint32_t w = 0; w < kWordsPerBlock; ++w) d[w] = a[w] * a[w];
        return;
      case CpuFn::MulImm:
        for (std::uint32_t w = 0; w < kWordsPerBlock; ++w) d[w] = a[w] * ev.imm;
        return;
      case CpuFn::HistBin:
        for (std::uint32_t w = 0; w < kWordsPerBlock; ++w) {
          std::uint32_t bin = (a[w] >> 2) & 63u;
          words(ev.dest + bin / kWordsPerBlock)[bin % kWordsPerBlock] += 1;
        }
        return;
      case CpuFn::Isqrt: {
        std::uint64_t total = 0;
        for (std::uint32_t w = 0; w < kWordsPerBlock; ++w) total += a[w];
        std::uint64_t root = 0;
        while ((root + 1) * (root + 1) <= total) ++root;
        d[0] = static_cast<std::uint32_t>(root);
        return;
      }
      case CpuFn::MinScan: {
        std::uint32_t best = a[0];
        for (std::uint32_t w = 1; w < kWordsPerBlock; ++w)
          if (a[w] < best) best = a[w];
        if (best < d[0]) {
          d[0] = best;
          d[1] = ev.a;
        }
        return;
      }
      case CpuFn::SumBlock: {
        std::uint32_t sum = 0;
        for (std::uint32_t w = 0; w < kWordsPerBlock; ++w) sum += a[w];
        d[0] += sum;
        return;
      }
    }
  }

  const Trace& trace_;
  const HierarchyConfig& cfg_;
  Placement placement_;
  std::vector<std::uint32_t> image_;
  std::optional<RetentionCache> l1_;
  std::optional<RetentionCache> l2_;
  DeviceParams mem_dev_;
  DeviceParams compute_dev_;
  RetentionCache* compute_cache_ = nullptr;
  std::uint8_t compute_region_ = kRegionHigh;
  bool compute_in_memory_ = false;
  FetchPipe pipe_;
  Ledger ledger_;
  SimCounters counters_;
};

}  // namespace

RunArtifacts run_with_artifacts(const Trace& trace, const HierarchyConfig& cfg,
                                const DeviceCatalog& catalog, Placement placement, ChainMode mode,
                                const RunOptions& options) {
  auto errors = validate_config(cfg);
  if (!errors.empty()) {
    std::string what = "invalid configuration:";
    for (const auto& e : errors) what += "\n  " + e;
    throw ConfigError(what);
  }
  validate_trace(trace);
  if (std::uint64_t(trace.footprint_blocks()) * cfg.l1.block_bytes > cfg.mem_size_bytes)
    throw ConfigError("trace footprint exceeds the reserved memory region");
  if (!cfg.pic_enabled && placement != Placement::CpuOnly)
    throw ConfigError("in-array compute is disabled in this configuration");

  if (placement == Placement::CpuOnly) mode = ChainMode::Conventional;

  Machine machine(trace, cfg, catalog, placement, options.capture_event_log);
  SchedulerParams params;
  params.compute_slots = std::max(1u, machine.compute_slots());
  std::uint32_t capacity = cfg.table_capacity_word_entries != 0
                               ? cfg.table_capacity_word_entries
                               : InstructionTable::default_capacity(
                                     std::max(16u, machine.compute_lanes()));
  params.table_capacity_words = capacity;
  params.words_per_instruction = kWordsPerBlock;
  params.lower_pic_to_cpu = placement == Placement::CpuOnly;

  ScheduleResult sched =
      schedule_trace(trace, mode, params, machine, options.capture_timeline);
  machine.finalize(sched.total_cycles);

  RunArtifacts artifacts;
  artifacts.report.workload = trace.meta.kernel;
  artifacts.report.size = trace.meta.size;
  artifacts.report.seed = trace.meta.seed;
  artifacts.report.placement = placement;
  artifacts.report.chaining = mode;
  machine.fill_report(artifacts.report, sched);
  artifacts.timeline = std::move(sched.timeline);
  artifacts.event_log = machine.event_log();
  return artifacts;
}

SimReport run(const Trace& trace, const HierarchyConfig& cfg, const DeviceCatalog& catalog,
              Placement placement, ChainMode mode) {
  return run_with_artifacts(trace, cfg, catalog, placement, mode, {}).report;
}

std::vector<ComparisonRow> compare(const SimReport& baseline,
                                   const std::vector<SimReport>& candidates) {
  std::vector<ComparisonRow> rows;
  for (const SimReport& cand : candidates) {
    if (cand.workload != baseline.workload || cand.size != baseline.size)
      throw std::invalid_argument("comparison across different workloads");
    if (cand.checksum != baseline.checksum)
      throw std::runtime_error("comparison rejected: checksum mismatch for " + cand.workload +
                               " under " + placement_name(cand.placement));
    ComparisonRow row;
    row.workload = cand.workload;
    row.size = cand.size;
    row.placement = cand.placement;
    row.chaining = cand.chaining;
    row.speedup = cand.cycles == 0
                      ? 1.0
                      : static_cast<double>(baseline.cycles) / static_cast<double>(cand.cycles);
    row.energy_ratio = cand.total_fj() == 0 ? 1.0
                                            : static_cast<double>(baseline.total_fj()) /
                                                  static_cast<double>(cand.total_fj());
    rows.push_back(row);
  }
  return rows;
}

SweepResult sweep(const SweepSpec& spec, const HierarchyConfig& cfg,
                  const DeviceCatalog& catalog) {
  SweepResult result;
  std::vector<std::string> kernels = spec.kernels;
  std::sort(kernels.begin(), kernels.end());

  struct Cell {
    Placement placement;
    ChainMode mode;
  };

  for (const std::string& kernel : kernels) {
    Trace trace;
    try {
      trace = generate({kernel, spec.size, spec.seed});
    } catch (const std::exception& e) {
      result.errors.push_back(kernel + ": " + e.what());
      continue;
    }

    std::vector<Cell> cells;
    for (Placement p : spec.placements) {
      if (p == Placement::CpuOnly) {
        cells.push_back({p, ChainMode::Conventional});  // chaining mode is moot
      } else {
        for (ChainMode m : spec.modes) cells.push_back({p, m});
      }
    }

    // The CPU-only baseline is always computed for normalization, requested
    // or not; independent cells run concurrently.
    auto baseline_future = std::async(std::launch::async, [&] {
      return run(trace, cfg, catalog, Placement::CpuOnly, ChainMode::Conventional);
    });
    std::vector<std::future<SimReport>> futures;
    for (const Cell& cell : cells) {
      futures.push_back(std::async(std::launch::async, [&, cell] {
        if (cell.placement == Placement::CpuOnly)
          return run(trace, cfg, catalog, Placement::CpuOnly, ChainMode::Conventional);
        return run(trace, cfg, catalog, cell.placement, cell.mode);
      }));
    }

    SimReport baseline;
    try {
      baseline = baseline_future.get();
    } catch (const std::exception& e) {
      result.errors.push_back(kernel + "/baseline: " + e.what());
      for (auto& f : futures) {
        try {
          f.get();
        } catch (...) {
        }
      }
      continue;
    }

    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        SimReport rep = futures[i].get();
        auto rows = compare(baseline, {rep});
        result.reports.push_back(std::move(rep));
        result.comparisons.push_back(rows.front());
      } catch (const std::exception& e) {
        result.errors.push_back(kernel + "/" + placement_name(cells[i].placement) + "/" +
                                chain_mode_name(cells[i].mode) + ": " + e.what());
      }
    }
  }
  return result;
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string checksum_hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

nlohmann::ordered_json report_json(const SimReport& r) {
  nlohmann::ordered_json j;
  j["workload"] = r.workload;
  j["size"] = r.size;
  j["seed"] = r.seed;
  j["placement"] = placement_name(r.placement);
  j["chaining"] = chain_mode_name(r.chaining);
  j["cycles"] = r.cycles;
  j["time_ps"] = r.time_ps;
  for (std::size_t c = 0; c < kComponentCount; ++c)
    j["dynamic_fj"][component_name(static_cast<Component>(c))] = r.dynamic_fj[c];
  for (std::size_t c = 0; c < kComponentCount; ++c)
    j["leakage_fj"][component_name(static_cast<Component>(c))] = r.leakage_fj[c];
  j["total_fj"] = r.total_fj();
  const SimCounters& c = r.counters;
  j["counters"] = {{"l1_reads", c.l1_reads},
                   {"l1_read_hits", c.l1_read_hits},
                   {"l1_writes", c.l1_writes},
                   {"l2_reads", c.l2_reads},
                   {"l2_read_hits", c.l2_read_hits},
                   {"l2_writes", c.l2_writes},
                   {"mem_reads", c.mem_reads},
                   {"mem_writes", c.mem_writes},
                   {"controller_fetches", c.controller_fetches},
                   {"pic_ops", c.pic_ops},
                   {"store_pims", c.store_pims},
                   {"transfers", c.transfers},
                   {"latch_flips", c.latch_flips},
                   {"expire_writebacks", c.expire_writebacks},
                   {"expire_invalidations", c.expire_invalidations},
                   {"evictions", c.evictions},
                   {"instructions", c.instructions},
                   {"emergency_flushes", c.emergency_flushes},
                   {"table_stall_cycles", c.table_stall_cycles},
                   {"cpu_busy_cycles", c.cpu_busy_cycles}};
  j["checksum"] = checksum_hex(r.checksum);
  return j;
}

}  // namespace

std::string report_to_json(const SimReport& report) {
  return report_json(report).dump(2) + "\n";
}

std::string sweep_to_json(const SweepResult& result) {
  nlohmann::ordered_json j;
  j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : result.reports) j["runs"].push_back(report_json(r));
  j["comparisons"] = nlohmann::ordered_json::array();
  for (const auto& row : result.comparisons) {
    j["comparisons"].push_back({{"workload", row.workload},
                                {"size", row.size},
                                {"placement", placement_name(row.placement)},
                                {"chaining", chain_mode_name(row.chaining)},
                                {"speedup", fixed6(row.speedup)},
                                {"energy_ratio", fixed6(row.energy_ratio)}});
  }
  j["errors"] = result.errors;
  return j.dump(2) + "\n";
}

std::string sweep_to_csv(const SweepResult& result) {
  std::string out =
      "workload,size,seed,placement,chaining,cycles,time_ns,cpu_dyn_fj,l1_dyn_fj,l2_dyn_fj,"
      "l2_low_dyn_fj,mem_dyn_fj,cpu_leak_fj,l1_leak_fj,l2_leak_fj,l2_low_leak_fj,mem_leak_fj,"
      "total_fj,checksum,speedup,energy_ratio\n";
  for (const auto& r : result.reports) {
    double speedup = 1.0, ratio = 1.0;
    for (const auto& row : result.comparisons) {
      if (row.workload == r.workload && row.placement == r.placement &&
          row.chaining == r.chaining) {
        speedup = row.speedup;
        ratio = row.energy_ratio;
        break;
      }
    }
    char line[640];
    std::snprintf(line, sizeof(line),
                  "%s,%llu,%llu,%s,%s,%llu,%llu.%03llu,%lld,%lld,%lld,%lld,%lld,%lld,%lld,%lld,"
                  "%lld,%lld,%lld,%s,%s,%s\n",
                  r.workload.c_str(), (unsigned long long)r.size, (unsigned long long)r.seed,
                  placement_name(r.placement).c_str(), chain_mode_name(r.chaining),
                  (unsigned long long)r.cycles, (unsigned long long)(r.time_ps / 1000),
                  (unsigned long long)(r.time_ps % 1000),
                  (long long)r.dynamic_fj[0], (long long)r.dynamic_fj[1],
                  (long long)r.dynamic_fj[2], (long long)r.dynamic_fj[3],
                  (long long)r.dynamic_fj[4], (long long)r.leakage_fj[0],
                  (long long)r.leakage_fj[1], (long long)r.leakage_fj[2],
                  (long long)r.leakage_fj[3], (long long)r.leakage_fj[4],
                  (long long)r.total_fj(), checksum_hex(r.checksum).c_str(),
                  fixed6(speedup).c_str(), fixed6(ratio).c_str());
    out += line;
  }
  return out;
}

}  // namespace himc
