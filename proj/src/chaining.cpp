#include "himc/chaining.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include <json.hpp>

namespace himc {

namespace {

enum class EvKind : std::uint8_t { CpuAdvance, FetchDone, TryExec, InstrDone };

struct Ev {
  cycles_t time;
  std::uint64_t seq;
  EvKind kind;
  std::uint32_t id;  // pending-instruction index, or unused
  block_id_t block;  // FetchDone only

  bool operator>(const Ev& o) const {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

struct PendingInstr {
  std::uint32_t event_idx = 0;
  bool gated = false;
  bool fetching = false;    ///< operand fetches in flight; holds no slot
  bool dispatched = false;  ///< owns a compute slot
  bool done = false;
  std::uint32_t outstanding_fetches = 0;
};

constexpr cycles_t kUnfinished = ~cycles_t{0};

class Engine {
 public:
  Engine(const Trace& trace, ChainMode mode, const SchedulerParams& params, MachineHooks& hooks,
         bool capture)
      : trace_(trace), mode_(mode), params_(params), hooks_(hooks), capture_(capture) {
    finish_.assign(trace_.events.size(), kUnfinished);
    free_slots_ = params_.compute_slots;
  }

  ScheduleResult run() {
    push_cpu_advance(0);
    while (!heap_.empty()) {
      Ev ev = heap_.top();
      heap_.pop();
      now_ = ev.time;
      switch (ev.kind) {
        case EvKind::CpuAdvance:
          if (ev.id == cpu_gen_) cpu_advance();  // stale wake-ups are ignored
          break;
        case EvKind::FetchDone:
          fetch_done(ev.id, ev.block);
          break;
        case EvKind::TryExec:
          try_exec(ev.id);
          break;
        case EvKind::InstrDone:
          instr_done(ev.id);
          break;
      }
    }
    if (cpu_idx_ != trace_.events.size() || outstanding_ != 0)
      throw std::logic_error("scheduler deadlock: trace did not drain");
    result_.total_cycles = end_time_;
    result_.cpu_busy_cycles = cpu_busy_;
    result_.cpu_active_cycles =
        mode_ == ChainMode::Chained && cpu_last_finish_ > 0 ? cpu_last_finish_ : cpu_busy_;
    return std::move(result_);
  }

 private:
  void push(cycles_t t, EvKind k, std::uint32_t id, block_id_t block) {
    heap_.push({t, seq_++, k, id, block});
  }

  // The CPU is one in-order unit: only the most recently scheduled advance
  // may act, otherwise completion wake-ups would overlap its events.
  void push_cpu_advance(cycles_t t) { push(t, EvKind::CpuAdvance, ++cpu_gen_, 0); }

  void segment(const char* unit, const char* kind, cycles_t start, cycles_t end) {
    if (capture_ && end > start) result_.timeline.push_back({unit, kind, start, end});
  }

  bool deps_met(const TraceEvent& ev, cycles_t t, cycles_t& wake) {
    wake = kUnfinished;
    for (std::uint32_t dep : ev.deps) {
      cycles_t f = finish_[dep];
      if (f == kUnfinished) return false;  // completion event will wake us
      if (f > t) {
        wake = std::min(wake == kUnfinished ? f : wake, f);
        return false;
      }
    }
    wake = 0;
    return true;
  }

  void cpu_advance() {
    cpu_waiting_ = false;
    // Process consecutive zero-cost steps in place to keep the heap small.
    while (cpu_idx_ < trace_.events.size()) {
      const TraceEvent& ev = trace_.events[cpu_idx_];
      bool lower = params_.lower_pic_to_cpu;
      EventKind kind = ev.kind;
      if (lower && kind == EventKind::StorePim) kind = EventKind::CpuStore;
      if (lower && kind == EventKind::PicOp) kind = EventKind::CpuOp;
      if (lower && kind == EventKind::Sync) {
        finish_[cpu_idx_++] = now_;
        continue;
      }
      // Buffering an instruction does not wait on its operands; the
      // controller re-checks readiness at dispatch. Only work the CPU itself
      // executes stalls the core.
      cycles_t wake;
      if (kind != EventKind::PicOp && !deps_met(ev, now_, wake)) {
        if (wake != kUnfinished && wake > 0) {
          push_cpu_advance(wake);
        } else if (mode_ == ChainMode::Conventional && gated_count_ > 0) {
          open_gate();  // consuming a still-buffered result forces the Compute signal
          continue;
        } else {
          cpu_waiting_ = true;  // an InstrDone will reschedule us
        }
        return;
      }
      switch (kind) {
        case EventKind::CpuOp:
        case EventKind::CpuLoad:
        case EventKind::CpuStore: {
          cycles_t dur = hooks_.cpu_event(cpu_idx_, now_);
          note_cpu_execution(now_, dur);
          finish_[cpu_idx_] = now_ + dur;
          segment("cpu", "exec", now_, now_ + dur);
          ++cpu_idx_;
          if (dur > 0) {
            push_cpu_advance(finish_[cpu_idx_ - 1]);
            return;
          }
          break;
        }
        case EventKind::StorePim: {
          if (table_words_ >= params_.table_capacity_words) {
            stall_or_flush();
            return;
          }
          cycles_t dur = hooks_.cpu_event(cpu_idx_, now_);
          note_cpu_execution(now_, dur);
          finish_[cpu_idx_] = now_ + dur;
          segment("cpu", "store_pim", now_, now_ + dur);
          ++cpu_idx_;
          if (dur > 0) {
            push_cpu_advance(finish_[cpu_idx_ - 1]);
            return;
          }
          break;
        }
        case EventKind::PicOp: {
          if (table_words_ + params_.words_per_instruction > params_.table_capacity_words) {
            stall_or_flush();
            return;
          }
          table_words_ += params_.words_per_instruction;
          bool gated = mode_ == ChainMode::Conventional;
          pending_.push_back({cpu_idx_, gated, false, false, 0});
          if (gated) ++gated_count_;
          ++outstanding_;
          ++cpu_idx_;
          if (!gated) dispatch_scan();
          break;
        }
        case EventKind::Sync: {
          if (mode_ == ChainMode::Conventional) {
            open_gate();
            if (outstanding_ > 0) {
              sync_wait_idx_ = cpu_idx_;
              return;  // resumed when the last instruction completes
            }
          }
          finish_[cpu_idx_++] = now_;
          break;
        }
      }
    }
    if (cpu_idx_ == trace_.events.size() && !trace_done_) {
      trace_done_ = true;
      open_gate();  // implicit final Compute signal
    }
  }

  void note_cpu_execution(cycles_t start, cycles_t dur) {
    cpu_busy_ += dur;
    cpu_last_finish_ = std::max(cpu_last_finish_, start + dur);
    end_time_ = std::max(end_time_, start + dur);
  }

  void stall_or_flush() {
    if (mode_ == ChainMode::Conventional && gated_count_ > 0) {
      ++result_.emergency_flushes;
      open_gate();
    }
    cpu_waiting_ = true;
    if (stall_begin_ == kUnfinished) stall_begin_ = now_;
  }

  void open_gate() {
    if (gated_count_ == 0) return;
    for (auto& p : pending_) p.gated = false;
    gated_count_ = 0;
    dispatch_scan();
  }

  void dispatch_scan() {
    for (std::size_t i = scan_floor_; i < pending_.size(); ++i) {
      PendingInstr& p = pending_[i];
      if (p.dispatched || p.fetching || p.gated) continue;
      cycles_t wake;
      if (!deps_met(trace_.events[p.event_idx], now_, wake)) {
        if (wake != kUnfinished && wake > 0) push(wake, EvKind::TryExec, kNoInstr, 0);
        continue;  // head does not block later ready entries
      }
      // Missing operands are fetched without holding a compute slot; the
      // controller keeps scanning for executable instructions meanwhile.
      auto missing = hooks_.missing_operands(p.event_idx, now_);
      if (!missing.empty()) {
        p.fetching = true;
        p.outstanding_fetches = static_cast<std::uint32_t>(missing.size());
        for (block_id_t block : missing) {
          cycles_t ready = hooks_.begin_fetch(block, now_);
          segment("pic", "fetch", now_, ready);
          push(ready, EvKind::FetchDone, static_cast<std::uint32_t>(i), block);
        }
        continue;
      }
      if (free_slots_ == 0) break;
      p.dispatched = true;
      --free_slots_;
      cycles_t moved = hooks_.transfer_operands(p.event_idx, now_);
      segment("pic", "transfer", now_, now_ + moved);
      if (moved > 0)
        push(now_ + moved, EvKind::TryExec, static_cast<std::uint32_t>(i), 0);
      else
        execute_now(static_cast<std::uint32_t>(i));
    }
    while (scan_floor_ < pending_.size() && pending_[scan_floor_].done) ++scan_floor_;
  }

  void try_exec(std::uint32_t id) {
    if (id == kNoInstr) {
      dispatch_scan();
      return;
    }
    execute_now(id);
  }

  void execute_now(std::uint32_t id) {
    PendingInstr& p = pending_[id];
    auto missing = hooks_.missing_operands(p.event_idx, now_);
    if (!missing.empty()) {
      // An operand expired between fetch and execution: release the slot and
      // go back through the fetch path.
      p.dispatched = false;
      ++free_slots_;
      p.fetching = true;
      p.outstanding_fetches = static_cast<std::uint32_t>(missing.size());
      for (block_id_t block : missing) {
        cycles_t ready = hooks_.begin_fetch(block, now_);
        segment("pic", "fetch", now_, ready);
        push(ready, EvKind::FetchDone, id, block);
      }
      return;
    }
    cycles_t dur = hooks_.execute_instruction(p.event_idx, now_);
    segment("pic", "exec", now_, now_ + dur);
    push(now_ + dur, EvKind::InstrDone, id, 0);
  }

  void fetch_done(std::uint32_t id, block_id_t block) {
    hooks_.fetch_complete(block, now_);
    PendingInstr& p = pending_[id];
    if (--p.outstanding_fetches == 0) {
      p.fetching = false;
      dispatch_scan();
    }
  }

  void instr_done(std::uint32_t id) {
    PendingInstr& p = pending_[id];
    p.done = true;
    finish_[p.event_idx] = now_;
    end_time_ = std::max(end_time_, now_);
    table_words_ -= params_.words_per_instruction;
    --outstanding_;
    ++free_slots_;
    ++result_.instructions_executed;
    if (stall_begin_ != kUnfinished) {
      result_.table_stall_cycles += now_ - stall_begin_;
      stall_begin_ = kUnfinished;
    }
    if (sync_wait_idx_ != kNoInstr && outstanding_ == 0) {
      std::uint32_t idx = sync_wait_idx_;
      sync_wait_idx_ = kNoInstr;
      finish_[idx] = now_;
      ++cpu_idx_;
      push_cpu_advance(now_);
    } else if (cpu_waiting_) {
      cpu_waiting_ = false;
      push_cpu_advance(now_);
    }
    dispatch_scan();
  }

  static constexpr std::uint32_t kNoInstr = ~std::uint32_t{0};

  const Trace& trace_;
  ChainMode mode_;
  SchedulerParams params_;
  MachineHooks& hooks_;
  bool capture_;

  std::priority_queue<Ev, std::vector<Ev>, std::greater<Ev>> heap_;
  std::uint64_t seq_ = 0;
  std::uint32_t cpu_gen_ = 0;
  cycles_t now_ = 0;

  std::vector<cycles_t> finish_;
  std::vector<PendingInstr> pending_;
  std::size_t scan_floor_ = 0;
  std::uint32_t cpu_idx_ = 0;
  bool cpu_waiting_ = false;
  bool trace_done_ = false;
  std::uint32_t sync_wait_idx_ = kNoInstr;
  std::uint32_t free_slots_ = 0;
  std::uint32_t table_words_ = 0;
  std::uint32_t outstanding_ = 0;
  std::uint32_t gated_count_ = 0;
  cycles_t stall_begin_ = kUnfinished;
  cycles_t cpu_busy_ = 0;
  cycles_t cpu_last_finish_ = 0;
  cycles_t end_time_ = 0;

  ScheduleResult result_;
};

}  // namespace

ScheduleResult schedule_trace(const Trace& trace, ChainMode mode, const SchedulerParams& params,
                              MachineHooks& hooks, bool capture_timeline) {
  Engine engine(trace, mode, params, hooks, capture_timeline);
  return engine.run();
}

std::string timeline_to_jsonl(const ScheduleResult& result) {
  std::string out;
  for (const auto& seg : result.timeline) {
    nlohmann::ordered_json j{{"unit", seg.unit},
                             {"kind", seg.kind},
                             {"start_cycle", seg.start},
                             {"end_cycle", seg.end}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace himc
