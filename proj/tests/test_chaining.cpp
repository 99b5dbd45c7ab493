#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "himc/chaining.hpp"

using namespace himc;

namespace {

// Fixed-cost machine: CPU events run for their alu count, instructions take
// 15 cycles, operands are always resident. Isolates the scheduling semantics.
struct StubHooks : MachineHooks {
  cycles_t instr_cycles = 15;
  cycles_t cpu_event(std::uint32_t idx, cycles_t) override {
    return trace->events[idx].cpu.alu;
  }
  cycles_t transfer_operands(std::uint32_t, cycles_t) override { return 0; }
  std::vector<block_id_t> missing_operands(std::uint32_t, cycles_t) override { return {}; }
  cycles_t begin_fetch(block_id_t, cycles_t now) override { return now; }
  void fetch_complete(block_id_t, cycles_t) override {}
  cycles_t execute_instruction(std::uint32_t, cycles_t) override { return instr_cycles; }
  const Trace* trace = nullptr;
};

TraceEvent cpu_op(std::uint32_t cycles, std::vector<std::uint32_t> deps = {}) {
  TraceEvent ev;
  ev.kind = EventKind::CpuOp;
  ev.cpu.alu = cycles;
  ev.deps = std::move(deps);
  return ev;
}

TraceEvent pic_op(std::vector<std::uint32_t> deps = {}) {
  TraceEvent ev;
  ev.kind = EventKind::PicOp;
  ev.op = PicOp::Add;
  ev.deps = std::move(deps);
  return ev;
}

TraceEvent sync_ev() {
  TraceEvent ev;
  ev.kind = EventKind::Sync;
  return ev;
}

Trace make_trace(std::vector<TraceEvent> events) {
  Trace t;
  t.meta.kernel = "stub";
  t.initial_image.assign(16 * 64, 0);
  t.events = std::move(events);
  return t;
}

ScheduleResult run_stub(const Trace& trace, ChainMode mode, std::uint32_t slots = 4,
                        std::uint32_t capacity_words = 128) {
  StubHooks hooks;
  hooks.trace = &trace;
  SchedulerParams params{.compute_slots = slots,
                         .table_capacity_words = capacity_words,
                         .words_per_instruction = 16};
  return schedule_trace(trace, mode, params, hooks);
}

}  // namespace

TEST_CASE("table overhead for one full wave: 16 lanes at 32-bit addresses is 128B") {
  CHECK(InstructionTable::wave_overhead_bytes(16, 32) == 128);
  CHECK(InstructionTable::wave_overhead_bytes(64, 32) == 512);
  CHECK(InstructionTable::default_capacity(16) == 256);
}

TEST_CASE("a single buffered block instruction completes one op latency after Compute") {
  // 16 lane pairs = one 64B block-pair instruction.
  auto trace = make_trace({pic_op(), sync_ev()});
  auto res = run_stub(trace, ChainMode::Conventional);
  CHECK(res.total_cycles == 15);
  CHECK(res.instructions_executed == 1);
}

TEST_CASE("Compute over an empty table yields DONE immediately") {
  auto trace = make_trace({sync_ev()});
  auto res = run_stub(trace, ChainMode::Conventional);
  CHECK(res.total_cycles == 0);
}

TEST_CASE("conventional mode drains the CPU phase before instructions start") {
  // CPU work, one instruction, then the phase boundary.
  auto trace = make_trace({cpu_op(100), pic_op(), sync_ev(), cpu_op(50)});
  auto conv = run_stub(trace, ChainMode::Conventional);
  CHECK(conv.total_cycles == 100 + 15 + 50);
}

TEST_CASE("chaining overlaps independent CPU and compute streams: max instead of sum") {
  auto trace = make_trace({pic_op(), cpu_op(100), sync_ev()});
  auto chained = run_stub(trace, ChainMode::Chained);
  auto conv = run_stub(trace, ChainMode::Conventional);
  CHECK(chained.total_cycles == 100);       // instruction hides under the CPU segment
  CHECK(conv.total_cycles == 100 + 15);     // phase-serial
}

TEST_CASE("a pure-CPU trace is identical under both modes") {
  auto trace = make_trace({cpu_op(10), cpu_op(20), cpu_op(30)});
  auto chained = run_stub(trace, ChainMode::Chained);
  auto conv = run_stub(trace, ChainMode::Conventional);
  CHECK(chained.total_cycles == 60);
  CHECK(conv.total_cycles == 60);
  CHECK(chained.cpu_active_cycles == conv.cpu_active_cycles);
}

TEST_CASE("no CPU consumer starts before its instruction completes") {
  // cpu(10) -> pic dep on it -> cpu dep on the pic result.
  auto trace = make_trace({cpu_op(10), pic_op({0}), cpu_op(10, {1})});
  auto chained = run_stub(trace, ChainMode::Chained);
  CHECK(chained.total_cycles == 10 + 15 + 10);
}

TEST_CASE("slots bound instruction parallelism") {
  // Eight independent instructions on two slots: four waves.
  std::vector<TraceEvent> evs;
  for (int i = 0; i < 8; ++i) evs.push_back(pic_op());
  evs.push_back(sync_ev());
  auto res = run_stub(make_trace(evs), ChainMode::Conventional, /*slots=*/2,
                      /*capacity_words=*/256);
  CHECK(res.total_cycles == 4 * 15);
}

TEST_CASE("back-pressure stalls inserts without dropping instructions") {
  // Capacity of one instruction forces a full-table stall on the second.
  std::vector<TraceEvent> evs{pic_op(), pic_op(), sync_ev()};
  auto res = run_stub(make_trace(evs), ChainMode::Conventional, /*slots=*/4,
                      /*capacity_words=*/16);
  CHECK(res.instructions_executed == 2);
  CHECK(res.emergency_flushes >= 1);
  CHECK(res.total_cycles == 30);  // forced flush serializes the pair
  CHECK(res.table_stall_cycles > 0);
}

TEST_CASE("a blocked head does not stall later ready instructions") {
  // pic1 waits on pic0's result; pic2 is independent and may bypass it.
  auto trace = make_trace({pic_op(), pic_op({0}), pic_op(), sync_ev()});
  auto res = run_stub(trace, ChainMode::Chained, /*slots=*/2);
  // pic0 and pic2 run together on the two slots; pic1 follows pic0.
  CHECK(res.total_cycles == 30);
  // Head-of-line blocking would serialize all three: 45 cycles.
}

TEST_CASE("conventional consumers force the Compute signal when no Sync intervenes") {
  auto trace = make_trace({pic_op(), cpu_op(10, {0})});
  auto res = run_stub(trace, ChainMode::Conventional);
  CHECK(res.total_cycles == 25);
}

TEST_CASE("chaining keeps the execution unit powered across its waits") {
  // CPU -> pic -> dependent CPU: the wait between the CPU segments counts as
  // powered time when chained, but not in the conventional schedule.
  auto trace = make_trace({cpu_op(10), pic_op({0}), sync_ev(), cpu_op(10, {1})});
  auto chained = run_stub(trace, ChainMode::Chained);
  auto conv = run_stub(trace, ChainMode::Conventional);
  CHECK(chained.cpu_active_cycles == 35);  // whole first-to-last window
  CHECK(conv.cpu_active_cycles == 20);     // execution only; core off while draining
  CHECK(chained.cpu_busy_cycles == 20);
}

TEST_CASE("property: chained latency never exceeds conventional when dispatch order is FIFO") {
  // Instructions depending only on CPU events are always ready at insert, so
  // both modes dispatch in the same order and removing the phase barriers can
  // only shorten the schedule. (With instruction-to-instruction bypass the
  // greedy scheduler admits the classic list-scheduling anomaly; dominance on
  // those is checked over the real workload corpus in the simulator tests.)
  SplitMix rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<TraceEvent> evs;
    std::vector<std::uint32_t> cpu_ids;
    int n = 4 + int(rng.next() % 24);
    for (int i = 0; i < n; ++i) {
      switch (rng.next() % 4) {
        case 0:
        case 1: {
          std::vector<std::uint32_t> deps;
          cpu_ids.push_back(std::uint32_t(evs.size()));
          evs.push_back(cpu_op(1 + rng.next() % 40, deps));
          break;
        }
        case 2: {
          std::vector<std::uint32_t> deps;
          if (!cpu_ids.empty() && rng.next() % 2 == 0)
            deps.push_back(cpu_ids[rng.next() % cpu_ids.size()]);
          evs.push_back(pic_op(deps));
          break;
        }
        case 3:
          evs.push_back(sync_ev());
          break;
      }
    }
    evs.push_back(sync_ev());
    auto trace = make_trace(evs);
    auto chained = run_stub(trace, ChainMode::Chained, 2, 64);
    auto conv = run_stub(trace, ChainMode::Conventional, 2, 64);
    REQUIRE(chained.total_cycles <= conv.total_cycles);
    REQUIRE(chained.instructions_executed == conv.instructions_executed);
  }
}

TEST_CASE("timeline dump is one JSON object per segment") {
  auto trace = make_trace({cpu_op(10), pic_op({0}), sync_ev()});
  StubHooks hooks;
  hooks.trace = &trace;
  SchedulerParams params{.compute_slots = 2, .table_capacity_words = 64,
                         .words_per_instruction = 16};
  auto res = schedule_trace(trace, ChainMode::Chained, params, hooks, true);
  auto dump = timeline_to_jsonl(res);
  CHECK(dump.find("\"unit\":\"cpu\"") != std::string::npos);
  CHECK(dump.find("\"unit\":\"pic\"") != std::string::npos);
}
