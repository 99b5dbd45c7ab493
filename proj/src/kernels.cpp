#include "himc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace himc {

namespace {

constexpr std::uint32_t kWordsPerBlock = 16;
/// Arrays are placed on 64-block boundaries so elementwise partners always
/// share a bank and subarray at every level (lcm of the level geometries).
constexpr std::uint32_t kAlignBlocks = 64;
/// Issue granularity of the CPU-dependent kernels: a batch of the deepest
/// in-array phase fits the level-1 instruction-table window.
constexpr std::uint32_t kBatchBlocks = 4;

std::uint64_t kernel_data_seed(const KernelSpec& spec) {
  std::uint64_t s = spec.seed;
  for (char c : spec.kernel) s = s * 131 + static_cast<unsigned char>(c);
  return s ^ (spec.size << 20);
}

std::uint32_t blocks_for(std::uint64_t elements) {
  return static_cast<std::uint32_t>((elements + kWordsPerBlock - 1) / kWordsPerBlock);
}

}  // namespace

// ---------------------------------------------------------------------------
// Trace validation and serialization
// ---------------------------------------------------------------------------

void validate_trace(const Trace& trace) {
  std::uint32_t footprint = trace.footprint_blocks();
  if (trace.initial_image.size() % kWordsPerBlock != 0)
    throw TraceError("initial image is not block-aligned");
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const TraceEvent& ev = trace.events[i];
    for (std::uint32_t d : ev.deps) {
      if (d >= i) throw TraceError("dependency edge is not topologically ordered");
    }
    auto check_block = [&](block_id_t b, const char* what) {
      if (b >= footprint)
        throw TraceError(std::string(what) + " block outside the trace footprint");
    };
    switch (ev.kind) {
      case EventKind::CpuLoad:
      case EventKind::CpuStore:
      case EventKind::StorePim:
        check_block(ev.a, "memory-event");
        break;
      case EventKind::PicOp:
        check_block(ev.a, "operand");
        if (ev.op != PicOp::Not) check_block(ev.b, "operand");
        check_block(ev.dest, "destination");
        break;
      case EventKind::CpuOp:
        if (ev.fn != CpuFn::None) {
          check_block(ev.a, "operand");
          check_block(ev.dest, "destination");
        }
        break;
      case EventKind::Sync:
        break;
    }
  }
  if (trace.meta.output_base + trace.meta.output_blocks > footprint)
    throw TraceError("output region outside the trace footprint");
}

namespace {

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::CpuOp: return "cpu_op";
    case EventKind::CpuLoad: return "cpu_load";
    case EventKind::CpuStore: return "cpu_store";
    case EventKind::StorePim: return "store_pim";
    case EventKind::PicOp: return "pic_op";
    case EventKind::Sync: return "sync";
  }
  return "?";
}

EventKind parse_kind(const std::string& s) {
  if (s == "cpu_op") return EventKind::CpuOp;
  if (s == "cpu_load") return EventKind::CpuLoad;
  if (s == "cpu_store") return EventKind::CpuStore;
  if (s == "store_pim") return EventKind::StorePim;
  if (s == "pic_op") return EventKind::PicOp;
  if (s == "sync") return EventKind::Sync;
  throw TraceError("unknown event kind: " + s);
}

PicOp parse_pic_op(const std::string& s) {
  for (PicOp op : {PicOp::And, PicOp::Nand, PicOp::Or, PicOp::Nor, PicOp::Not, PicOp::Xor,
                   PicOp::Add})
    if (s == pic_op_name(op)) return op;
  throw TraceError("unknown pic op: " + s);
}

const char* fn_name(CpuFn fn) {
  switch (fn) {
    case CpuFn::None: return "none";
    case CpuFn::Square: return "square";
    case CpuFn::MulImm: return "mul_imm";
    case CpuFn::HistBin: return "hist_bin";
    case CpuFn::Isqrt: return "isqrt";
    case CpuFn::MinScan: return "min_scan";
    case CpuFn::SumBlock: return "sum_block";
  }
  return "?";
}

CpuFn parse_fn(const std::string& s) {
  for (CpuFn fn : {CpuFn::None, CpuFn::Square, CpuFn::MulImm, CpuFn::HistBin, CpuFn::Isqrt,
                   CpuFn::MinScan, CpuFn::SumBlock})
    if (s == fn_name(fn)) return fn;
  throw TraceError("unknown cpu fn: " + s);
}

const char* category_name(KernelCategory c) {
  switch (c) {
    case KernelCategory::CpuDependent: return "cpu_dependent";
    case KernelCategory::IndepHighReuse: return "indep_high_reuse";
    case KernelCategory::IndepLowReuse: return "indep_low_reuse";
  }
  return "?";
}

KernelCategory parse_category(const std::string& s) {
  if (s == "cpu_dependent") return KernelCategory::CpuDependent;
  if (s == "indep_high_reuse") return KernelCategory::IndepHighReuse;
  if (s == "indep_low_reuse") return KernelCategory::IndepLowReuse;
  throw TraceError("unknown category: " + s);
}

std::string image_to_hex(const std::vector<std::uint32_t>& image) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(image.size() * 8);
  for (std::uint32_t w : image)
    for (int shift = 28; shift >= 0; shift -= 4) out.push_back(digits[(w >> shift) & 0xF]);
  return out;
}

std::vector<std::uint32_t> image_from_hex(const std::string& hex) {
  if (hex.size() % 8 != 0) throw TraceError("image hex length not word-aligned");
  std::vector<std::uint32_t> image(hex.size() / 8);
  for (std::size_t i = 0; i < image.size(); ++i) {
    std::uint32_t w = 0;
    for (int k = 0; k < 8; ++k) {
      char c = hex[i * 8 + k];
      std::uint32_t nib = c >= 'a' ? 10 + (c - 'a') : c - '0';
      w = (w << 4) | nib;
    }
    image[i] = w;
  }
  return image;
}

}  // namespace

std::string trace_to_jsonl(const Trace& trace) {
  nlohmann::ordered_json meta;
  meta["meta"] = {{"kernel", trace.meta.kernel},
                  {"category", category_name(trace.meta.category)},
                  {"size", trace.meta.size},
                  {"seed", trace.meta.seed},
                  {"pic_eligible_fraction", trace.meta.pic_eligible_fraction},
                  {"write_intensity", trace.meta.write_intensity},
                  {"reuse_factor", trace.meta.reuse_factor},
                  {"output_base", trace.meta.output_base},
                  {"output_blocks", trace.meta.output_blocks},
                  {"image_hex", image_to_hex(trace.initial_image)}};
  std::string out = meta.dump() + "\n";
  for (const auto& ev : trace.events) {
    nlohmann::ordered_json j;
    j["kind"] = kind_name(ev.kind);
    if (ev.kind == EventKind::PicOp) j["op"] = pic_op_name(ev.op);
    if (ev.kind == EventKind::CpuOp) {
      j["fn"] = fn_name(ev.fn);
      j["cpu"] = {ev.cpu.alu, ev.cpu.mul, ev.cpu.div};
      if (ev.fn == CpuFn::MulImm) j["imm"] = ev.imm;
    }
    if (ev.kind != EventKind::Sync) {
      j["a"] = ev.a;
      if (ev.kind == EventKind::PicOp) {
        j["b"] = ev.b;
        j["dest"] = ev.dest;
      }
      if (ev.kind == EventKind::CpuOp) j["dest"] = ev.dest;
    }
    j["deps"] = ev.deps;
    out += j.dump() + "\n";
  }
  return out;
}

Trace trace_from_jsonl(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (!have_meta) {
      const auto& m = j.at("meta");
      trace.meta.kernel = m.at("kernel").get<std::string>();
      trace.meta.category = parse_category(m.at("category").get<std::string>());
      trace.meta.size = m.at("size").get<std::uint64_t>();
      trace.meta.seed = m.at("seed").get<std::uint64_t>();
      trace.meta.pic_eligible_fraction = m.at("pic_eligible_fraction").get<double>();
      trace.meta.write_intensity = m.at("write_intensity").get<double>();
      trace.meta.reuse_factor = m.at("reuse_factor").get<double>();
      trace.meta.output_base = m.at("output_base").get<std::uint32_t>();
      trace.meta.output_blocks = m.at("output_blocks").get<std::uint32_t>();
      trace.initial_image = image_from_hex(m.at("image_hex").get<std::string>());
      have_meta = true;
      continue;
    }
    TraceEvent ev;
    ev.kind = parse_kind(j.at("kind").get<std::string>());
    if (ev.kind == EventKind::PicOp) ev.op = parse_pic_op(j.at("op").get<std::string>());
    if (ev.kind == EventKind::CpuOp) {
      ev.fn = parse_fn(j.at("fn").get<std::string>());
      ev.cpu.alu = j.at("cpu")[0].get<std::uint32_t>();
      ev.cpu.mul = j.at("cpu")[1].get<std::uint32_t>();
      ev.cpu.div = j.at("cpu")[2].get<std::uint32_t>();
      if (j.contains("imm")) ev.imm = j.at("imm").get<std::uint32_t>();
    }
    if (j.contains("a")) ev.a = j.at("a").get<block_id_t>();
    if (j.contains("b")) ev.b = j.at("b").get<block_id_t>();
    if (j.contains("dest")) ev.dest = j.at("dest").get<block_id_t>();
    for (const auto& d : j.at("deps")) ev.deps.push_back(d.get<std::uint32_t>());
    trace.events.push_back(std::move(ev));
  }
  if (!have_meta) throw TraceError("trace stream has no meta line");
  validate_trace(trace);
  return trace;
}

// ---------------------------------------------------------------------------
// Trace builder: aligned allocation plus automatic dependency edges
// ---------------------------------------------------------------------------

namespace {

class TraceBuilder {
 public:
  explicit TraceBuilder(TraceMetadata meta) { trace_.meta = std::move(meta); }

  /// Allocates an array of `blocks` cache blocks on a 64-block boundary.
  block_id_t alloc(std::uint32_t blocks) {
    block_id_t base = (top_ + kAlignBlocks - 1) / kAlignBlocks * kAlignBlocks;
    top_ = base + blocks;
    trace_.initial_image.resize(static_cast<std::size_t>(top_) * kWordsPerBlock, 0);
    return base;
  }

  std::uint32_t* block_data(block_id_t block) {
    return trace_.initial_image.data() + static_cast<std::size_t>(block) * kWordsPerBlock;
  }

  std::uint32_t cpu_op(CpuFn fn, block_id_t a, block_id_t dest, CpuCost cost,
                       std::uint32_t imm = 0, std::uint32_t dest_span = 1) {
    TraceEvent ev;
    ev.kind = EventKind::CpuOp;
    ev.fn = fn;
    ev.cpu = cost;
    ev.a = a;
    ev.dest = dest;
    ev.imm = imm;
    if (fn != CpuFn::None) {
      add_read_dep(ev, a);
      for (std::uint32_t k = 0; k < dest_span; ++k) add_write_dep(ev, dest + k);
    }
    cpu_words_ += cost.alu + cost.mul + cost.div;
    return push(std::move(ev));
  }

  std::uint32_t load(block_id_t block) {
    TraceEvent ev;
    ev.kind = EventKind::CpuLoad;
    ev.a = block;
    add_read_dep(ev, block);
    ++loads_;
    return push(std::move(ev));
  }

  std::uint32_t store(block_id_t block) {
    TraceEvent ev;
    ev.kind = EventKind::CpuStore;
    ev.a = block;
    add_write_dep(ev, block);
    ++stores_;
    return push(std::move(ev));
  }

  std::uint32_t store_pim(block_id_t block) {
    TraceEvent ev;
    ev.kind = EventKind::StorePim;
    ev.a = block;
    add_write_dep(ev, block);
    ++stores_;
    return push(std::move(ev));
  }

  std::uint32_t pic(PicOp op, block_id_t a, block_id_t b, block_id_t dest) {
    TraceEvent ev;
    ev.kind = EventKind::PicOp;
    ev.op = op;
    ev.a = a;
    ev.b = b;
    ev.dest = dest;
    add_read_dep(ev, a);
    if (op != PicOp::Not) add_read_dep(ev, b);
    add_write_dep(ev, dest);
    pic_words_ += kWordsPerBlock;
    ++pic_ops_;
    pic_blocks_.insert(a);
    if (op != PicOp::Not) pic_blocks_.insert(b);
    return push(std::move(ev));
  }

  std::uint32_t sync() {
    TraceEvent ev;
    ev.kind = EventKind::Sync;
    return push(std::move(ev));
  }

  Trace finish(block_id_t output_base, std::uint32_t output_blocks) {
    trace_.meta.output_base = output_base;
    trace_.meta.output_blocks = output_blocks;
    double total_words = static_cast<double>(pic_words_ + cpu_words_);
    trace_.meta.pic_eligible_fraction =
        total_words > 0 ? static_cast<double>(pic_words_) / total_words : 0.0;
    double touches = static_cast<double>(loads_ + stores_ + pic_ops_);
    trace_.meta.write_intensity =
        touches > 0 ? static_cast<double>(stores_ + pic_ops_) / touches : 0.0;
    trace_.meta.reuse_factor =
        pic_blocks_.empty() ? 0.0
                            : static_cast<double>(pic_ops_) / static_cast<double>(pic_blocks_.size());
    validate_trace(trace_);
    return std::move(trace_);
  }

 private:
  std::uint32_t push(TraceEvent ev) {
    // Deduplicate dependency edges.
    std::sort(ev.deps.begin(), ev.deps.end());
    ev.deps.erase(std::unique(ev.deps.begin(), ev.deps.end()), ev.deps.end());
    trace_.events.push_back(std::move(ev));
    return static_cast<std::uint32_t>(trace_.events.size() - 1);
  }

  void add_read_dep(TraceEvent& ev, block_id_t block) {
    auto it = last_writer_.find(block);
    if (it != last_writer_.end()) ev.deps.push_back(it->second);
    readers_[block].push_back(static_cast<std::uint32_t>(trace_.events.size()));
  }

  void add_write_dep(TraceEvent& ev, block_id_t block) {
    std::uint32_t self = static_cast<std::uint32_t>(trace_.events.size());
    auto it = last_writer_.find(block);
    if (it != last_writer_.end()) ev.deps.push_back(it->second);
    auto rd = readers_.find(block);
    if (rd != readers_.end()) {
      for (std::uint32_t r : rd->second)
        if (r != self) ev.deps.push_back(r);  // reading our own operand is not a hazard
      rd->second.clear();
    }
    last_writer_[block] = self;
  }

  Trace trace_;
  block_id_t top_ = 0;
  std::unordered_map<block_id_t, std::uint32_t> last_writer_;
  std::unordered_map<block_id_t, std::vector<std::uint32_t>> readers_;
  std::set<block_id_t> pic_blocks_;
  std::uint64_t pic_words_ = 0;
  std::uint64_t cpu_words_ = 0;
  std::uint64_t pic_ops_ = 0;
  std::uint64_t loads_ = 0;
  std::uint64_t stores_ = 0;
};

void fill_random(std::uint32_t* words, std::size_t count, SplitMix& rng) {
  for (std::size_t i = 0; i < count; ++i) words[i] = rng.next_u32();
}

// ---------------------------------------------------------------------------
// Kernel generators and their scalar golden oracles
// ---------------------------------------------------------------------------
//
// Both sides derive the initial arrays from the same seeded stream, then
// compute independently: the generator emits the event DAG executed through
// the in-array op semantics, the oracle runs plain scalar loops.

struct BuiltTrace {
  Trace trace;
  std::vector<std::uint32_t> golden;  // contents of the output region
};

using Words = std::vector<std::uint32_t>;

Words random_words(SplitMix& rng, std::size_t count) {
  Words w(count);
  fill_random(w.data(), count, rng);
  return w;
}

void copy_in(TraceBuilder& tb, block_id_t base, const Words& words) {
  std::copy(words.begin(), words.end(), tb.block_data(base));
}

// mat_add: S accumulates the same addend array over eight rounds; the addend
// is fetched once and reused every round.
BuiltTrace build_mat_add(const KernelSpec& spec) {
  constexpr unsigned kRounds = 8;
  std::uint32_t nb = blocks_for(spec.size);
  SplitMix rng(kernel_data_seed(spec));
  Words a = random_words(rng, std::size_t(nb) * kWordsPerBlock);
  Words s0 = random_words(rng, std::size_t(nb) * kWordsPerBlock);

  TraceBuilder tb({.kernel = "mat_add", .category = KernelCategory::IndepHighReuse,
                   .size = spec.size, .seed = spec.seed});
  block_id_t A = tb.alloc(nb), S = tb.alloc(nb);
  copy_in(tb, A, a);
  copy_in(tb, S, s0);
  for (unsigned r = 0; r < kRounds; ++r) {
    for (std::uint32_t i = 0; i < nb; ++i) tb.pic(PicOp::Add, S + i, A + i, S + i);
    tb.sync();
  }

  Words golden(s0);
  for (std::size_t w = 0; w < golden.size(); ++w)
    for (unsigned r = 0; r < kRounds; ++r) golden[w] += a[w];
  return {tb.finish(S, nb), std::move(golden)};
}

// cmul: carryless multiply by an 8-bit multiplier. The shifted bit planes and
// the per-element mask planes are staged as initial data and streamed once.
BuiltTrace build_cmul(const KernelSpec& spec) {
  constexpr unsigned kRounds = 8;
  std::uint32_t nb = blocks_for(spec.size);
  SplitMix rng(kernel_data_seed(spec));
  Words a = random_words(rng, std::size_t(nb) * kWordsPerBlock);
  Words b = random_words(rng, std::size_t(nb) * kWordsPerBlock);

  TraceBuilder tb({.kernel = "cmul", .category = KernelCategory::IndepLowReuse,
                   .size = spec.size, .seed = spec.seed});
  std::vector<block_id_t> P(kRounds), M(kRounds);
  for (unsigned j = 0; j < kRounds; ++j) {
    P[j] = tb.alloc(nb);
    M[j] = tb.alloc(nb);
    std::uint32_t* plane = tb.block_data(P[j]);
    std::uint32_t* mask = tb.block_data(M[j]);
    for (std::size_t w = 0; w < a.size(); ++w) {
      plane[w] = a[w] << j;
      mask[w] = (b[w] >> j) & 1u ? 0xFFFFFFFFu : 0u;
    }
  }
  block_id_t ACC = tb.alloc(nb), T = tb.alloc(nb);
  for (unsigned j = 0; j < kRounds; ++j) {
    tb.cpu_op(CpuFn::None, 0, 0, {.alu = 1});  // round shift bookkeeping
    for (std::uint32_t i = 0; i < nb; ++i) {
      tb.pic(PicOp::And, P[j] + i, M[j] + i, T + i);
      tb.pic(PicOp::Xor, ACC + i, T + i, ACC + i);
    }
    tb.sync();
  }

  Words golden(std::size_t(nb) * kWordsPerBlock, 0);
  for (std::size_t w = 0; w < golden.size(); ++w) {
    std::uint32_t acc = 0;
    for (unsigned j = 0; j < kRounds; ++j)
      if ((b[w] >> j) & 1u) acc ^= a[w] << j;
    golden[w] = acc;
  }
  return {tb.finish(ACC, nb), std::move(golden)};
}

// string: streams new data against a cached 16-block reference pattern and
// folds the mismatch masks through a cascade of running sums.
BuiltTrace build_string(const KernelSpec& spec) {
  std::uint32_t nb = blocks_for(spec.size);
  SplitMix rng(kernel_data_seed(spec));
  Words x = random_words(rng, std::size_t(nb) * kWordsPerBlock);
  Words ref_logical = random_words(rng, 16u * kWordsPerBlock);

  TraceBuilder tb({.kernel = "string", .category = KernelCategory::IndepHighReuse,
                   .size = spec.size, .seed = spec.seed});
  block_id_t X = tb.alloc(nb), REF = tb.alloc(kAlignBlocks), D = tb.alloc(kAlignBlocks);
  block_id_t ACC = tb.alloc(4 * kAlignBlocks);
  copy_in(tb, X, x);
  for (std::uint32_t r = 0; r < kAlignBlocks; ++r)
    std::copy_n(ref_logical.begin() + (r % 16) * kWordsPerBlock, kWordsPerBlock,
                tb.block_data(REF + r));
  for (std::uint32_t i = 0; i < nb; ++i) {
    std::uint32_t r = i % kAlignBlocks;
    tb.pic(PicOp::Xor, X + i, REF + r, D + r);
    block_id_t prev = D + r;
    for (std::uint32_t k = 0; k < 4; ++k) {
      tb.pic(PicOp::Add, ACC + k * kAlignBlocks + r, prev, ACC + k * kAlignBlocks + r);
      prev = ACC + k * kAlignBlocks + r;
    }
    if (i % kAlignBlocks == kAlignBlocks - 1) tb.sync();
  }

  Words acc(std::size_t(4) * kAlignBlocks * kWordsPerBlock, 0);
  for (std::uint32_t i = 0; i < nb; ++i) {
    std::uint32_t r = i % kAlignBlocks;
    for (std::uint32_t w = 0; w < kWordsPerBlock; ++w) {
      std::uint32_t d = x[std::size_t(i) * kWordsPerBlock + w] ^
                        ref_logical[(r % 16) * kWordsPerBlock + w];
      std::uint32_t prev = d;
      for (std::uint32_t k = 0; k < 4; ++k) {
        auto idx = (std::size_t(k) * kAlignBlocks + r) * kWordsPerBlock + w;
        acc[idx] += prev;
        prev = acc[idx];
      }
    }
  }
  return {tb.finish(ACC, 4 * kAlignBlocks), std::move(acc)};
}

// bnn: two passes of XNOR against a cached weight set (weights stored
// pre-inverted) feeding the same running-sum cascade.
BuiltTrace build_bnn(const KernelSpec& spec) {
  std::uint32_t nb = blocks_for(spec.size);
  SplitMix rng(kernel_data_seed(spec));
  Words x = random_words(rng, std::size_t(nb) * kWordsPerBlock);
  Words w_logical = random_words(rng, 8u * kWordsPerBlock);

  TraceBuilder tb({.kernel = "bnn", .category = KernelCategory::IndepHighReuse,
                   .size = spec.size, .seed = spec.seed});
  block_id_t X = tb.alloc(nb), W = tb.alloc(kAlignBlocks), D = tb.alloc(kAlignBlocks);
  block_id_t ACC = tb.alloc(4 * kAlignBlocks);
  copy_in(tb, X, x);
  for (std::uint32_t r = 0; r < kAlignBlocks; ++r) {
    std::uint32_t* dst = tb.block_data(W + r);
    const std::uint32_t* src = w_logical.data() + (r % 8) * kWordsPerBlock;
    for (std::uint32_t w = 0; w < kWordsPerBlock; ++w) dst[w] = ~src[w];
  }
  for (unsigned pass = 0; pass < 2; ++pass) {
    for (std::uint32_t i = 0; i < nb; ++i) {
      std::uint32_t r = i % kAlignBlocks;
      tb.pic(PicOp::Xor, X + i, W + r, D + r);
      block_id_t prev = D + r;
      for (std::uint32_t k = 0; k < 4; ++k) {
        tb.pic(PicOp::Add, ACC + k * kAlignBlocks + r, prev, ACC + k * kAlignBlocks + r);
        prev = ACC + k * kAlignBlocks + r;
      }
      if (i % kAlignBlocks == kAlignBlocks - 1) tb.sync();
    }
    tb.sync();
  }

  Words acc(std::size_t(4) * kAlignBlocks * kWordsPerBlock, 0);
  for (unsigned pass = 0; pass < 2; ++pass) {
    for (std::uint32_t i = 0; i < nb; ++i) {
      std::uint32_t r = i % kAlignBlocks;
      for (std::uint32_t w = 0; w < kWordsPerBlock; ++w) {
        std::uint32_t d = x[std::size_t(i) * kWordsPerBlock + w] ^
                          ~w_logical[(r % 8) * kWordsPerBlock + w];
        std::uint32_t prev = d;
        for (std::uint32_t k = 0; k < 4; ++k) {
          auto idx = (std::size_t(k) * kAlignBlocks + r) * kWordsPerBlock + w;
          acc[idx] += prev;
          prev = acc[idx];
        }
      }
    }
  }
  return {tb.finish(ACC, 4 * kAlignBlocks), std::move(acc)};
}

// hist: CPU-resident binning over streamed input; the only in-array content
// is the final tree merge of the sixteen partial bin arrays.
BuiltTrace build_hist(const KernelSpec& spec) {
  constexpr std::uint32_t kPartials = 4, kBinBlocks = 4;
  std::uint32_t nb = blocks_for(spec.size);
  SplitMix rng(kernel_data_seed(spec));
  Words x = random_words(rng, std::size_t(nb) * kWordsPerBlock);

  TraceBuilder tb({.kernel = "hist", .category = KernelCategory::CpuDependent,
                   .size = spec.size, .seed = spec.seed});
  block_id_t X = tb.alloc(nb);
  std::vector<block_id_t> BP(kPartials);
  for (auto& base : BP) base = tb.alloc(kBinBlocks);
  copy_in(tb, X, x);

  for (std::uint32_t i = 0; i < nb; ++i) {
    std::uint32_t p = i % kPartials;
    tb.load(X + i);
    tb.cpu_op(CpuFn::HistBin, X + i, BP[p], {.alu = 2 * kWordsPerBlock}, 0, kBinBlocks);
    tb.store(BP[p] + (i / kPartials) % kBinBlocks);
  }
  tb.sync();
  for (std::uint32_t p = 0; p < kPartials; ++p)
    for (std::uint32_t q = 0; q < kBinBlocks; ++q) tb.store_pim(BP[p] + q);
  tb.sync();
  for (std::uint32_t stride = 1; stride < kPartials; stride *= 2) {
    for (std::uint32_t p = 0; p + stride < kPartials; p += 2 * stride)
      for (std::uint32_t q = 0; q < kBinBlocks; ++q)
        tb.pic(PicOp::Add, BP[p] + q, BP[p + stride] + q, BP[p] + q);
    tb.sync();
  }
  for (std::uint32_t q = 0; q < kBinBlocks; ++q) tb.load(BP[0] + q);

  Words golden(std::size_t(kBinBlocks) * kWordsPerBlock, 0);
  for (std::uint32_t val : x) golden[(val >> 2) & 63u] += 1;
  return {tb.finish(BP[0], kBinBlocks), std::move(golden)};
}

// Shared shape of the difference kernels: a two's-complement subtract chain
// (Add against a negated operand, then the +1 correction) in the array,
// feeding CPU-side post-processing.
struct DiffArrays {
  block_id_t A = 0, B = 0, ONES = 0, NEG = 0, T = 0, DIFF = 0;
};

void emit_diff_batch(TraceBuilder& tb, const DiffArrays& ar, std::uint32_t begin,
                     std::uint32_t end) {
  for (std::uint32_t i = begin; i < end; ++i) {
    std::uint32_t r = i % kAlignBlocks;
    tb.pic(PicOp::Add, ar.A + i, ar.NEG + r, ar.T + r);
    tb.pic(PicOp::Add, ar.T + r, ar.ONES + r, ar.DIFF + i);
  }
}

namespace {

std::uint32_t exact_isqrt(std::uint64_t v) {
  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(v)));
  while (root > 0 && root * root > v) --root;
  while ((root + 1) * (root + 1) <= v) ++root;
  return static_cast<std::uint32_t>(root);
}

}  // namespace

// rmse: windowed root-mean-square error. The array subtracts (against a
// staged negated operand), the CPU squares each window, takes its root, and
// hands the squares back through StorePIM for the global accumulation.
BuiltTrace build_rmse(const KernelSpec& spec) {
  std::uint32_t nb = blocks_for(spec.size);
  SplitMix rng(kernel_data_seed(spec));
  Words a = random_words(rng, std::size_t(nb) * kWordsPerBlock);
  Words b = random_words(rng, std::size_t(nb) * kWordsPerBlock);

  TraceBuilder tb({.kernel = "rmse", .category = KernelCategory::CpuDependent,
                   .size = spec.size, .seed = spec.seed});
  block_id_t A = tb.alloc(nb), NEGB = tb.alloc(nb), ONES = tb.alloc(kAlignBlocks);
  block_id_t T = tb.alloc(kAlignBlocks), DIFF = tb.alloc(nb), SQ = tb.alloc(nb);
  block_id_t ACC = tb.alloc(kAlignBlocks), R = tb.alloc(kAlignBlocks), RMS = tb.alloc(nb);
  copy_in(tb, A, a);
  std::uint32_t* negb = tb.block_data(NEGB);
  for (std::size_t w = 0; w < b.size(); ++w) negb[w] = ~b[w];
  for (std::uint32_t w = 0; w < kAlignBlocks * kWordsPerBlock; ++w)
    tb.block_data(ONES)[w] = 1;

  for (std::uint32_t begin = 0; begin < nb; begin += kBatchBlocks) {
    std::uint32_t end = std::min(nb, begin + kBatchBlocks);
    for (std::uint32_t i = begin; i < end; ++i) {
      std::uint32_t r = i % kAlignBlocks;
      tb.pic(PicOp::Add, A + i, NEGB + i, T + r);
      tb.pic(PicOp::Add, T + r, ONES + r, DIFF + i);
    }
    tb.sync();
    for (std::uint32_t i = begin; i < end; ++i) {
      tb.load(DIFF + i);
      tb.cpu_op(CpuFn::Square, DIFF + i, SQ + i, {.mul = kWordsPerBlock});
      tb.cpu_op(CpuFn::Isqrt, SQ + i, RMS + i, {.alu = kWordsPerBlock, .div = 1});
      tb.store_pim(SQ + i);
    }
    tb.sync();
    for (std::uint32_t i = begin; i < end; ++i)
      tb.pic(PicOp::Add, ACC + i % kAlignBlocks, SQ + i, ACC + i % kAlignBlocks);
    tb.sync();
  }
  for (std::uint32_t r = 0; r < kAlignBlocks; ++r) {
    tb.load(ACC + r);
    tb.cpu_op(CpuFn::SumBlock, ACC + r, R, {.alu = kWordsPerBlock});
  }
  tb.cpu_op(CpuFn::Isqrt, R, R, {.div = 1});

  std::uint32_t out_blocks = static_cast<std::uint32_t>(RMS - ACC) + nb;
  Words out(std::size_t(out_blocks) * kWordsPerBlock, 0);
  std::uint32_t total = 0;
  for (std::uint32_t i = 0; i < nb; ++i) {
    std::uint64_t window = 0;
    for (std::uint32_t w = 0; w < kWordsPerBlock; ++w) {
      std::size_t e = std::size_t(i) * kWordsPerBlock + w;
      std::uint32_t diff = a[e] - b[e];
      std::uint32_t sq = diff * diff;
      out[(std::size_t(i % kAlignBlocks)) * kWordsPerBlock + w] += sq;
      window += sq;
    }
    out[(std::size_t(RMS - ACC) + i) * kWordsPerBlock] = exact_isqrt(window);
  }
  for (std::uint32_t w = 0; w < kAlignBlocks * kWordsPerBlock; ++w) total += out[w];
  out[std::size_t(R - ACC) * kWordsPerBlock] = exact_isqrt(total);
  return {tb.finish(ACC, out_blocks), std::move(out)};
}

// knn: 1-D squared distances to a broadcast query plus a CPU min-scan. The
// warm-up loads pull the first point blocks through the CPU path so a
// dual-retention L2 must transfer them before computing.
BuiltTrace build_knn(const KernelSpec& spec) {
  std::uint32_t nb = blocks_for(spec.size);
  SplitMix rng(kernel_data_seed(spec));
  Words p = random_words(rng, std::size_t(nb) * kWordsPerBlock);
  Words q_logical = random_words(rng, kWordsPerBlock);

  TraceBuilder tb({.kernel = "knn", .category = KernelCategory::CpuDependent,
                   .size = spec.size, .seed = spec.seed});
  DiffArrays ar;
  ar.A = tb.alloc(nb);  // points
  ar.B = tb.alloc(kAlignBlocks);  // broadcast query
  ar.ONES = tb.alloc(kAlignBlocks);
  ar.NEG = tb.alloc(kAlignBlocks);
  ar.T = tb.alloc(kAlignBlocks);
  ar.DIFF = tb.alloc(nb);
  block_id_t SQ = tb.alloc(nb);
  block_id_t R = tb.alloc(kAlignBlocks);
  copy_in(tb, ar.A, p);
  for (std::uint32_t r = 0; r < kAlignBlocks; ++r)
    std::copy_n(q_logical.begin(), kWordsPerBlock, tb.block_data(ar.B + r));
  for (std::uint32_t w = 0; w < kAlignBlocks * kWordsPerBlock; ++w)
    tb.block_data(ar.ONES)[w] = 1;
  tb.block_data(R)[0] = 0xFFFFFFFFu;

  for (std::uint32_t i = 0; i < std::min(nb, kAlignBlocks); ++i) tb.load(ar.A + i);
  tb.sync();
  for (std::uint32_t r = 0; r < kAlignBlocks; ++r)
    tb.pic(PicOp::Not, ar.B + r, ar.B + r, ar.NEG + r);
  tb.sync();
  for (std::uint32_t begin = 0; begin < nb; begin += kBatchBlocks) {
    std::uint32_t end = std::min(nb, begin + kBatchBlocks);
    emit_diff_batch(tb, ar, begin, end);
    tb.sync();
    for (std::uint32_t i = begin; i < end; ++i) {
      tb.load(ar.DIFF + i);
      tb.cpu_op(CpuFn::Square, ar.DIFF + i, SQ + i, {.mul = kWordsPerBlock});
      tb.cpu_op(CpuFn::MinScan, SQ + i, R, {.alu = 2 * kWordsPerBlock});
      tb.store(SQ + i);
    }
    tb.sync();
  }

  Words out((std::size_t(R - SQ) + 1) * kWordsPerBlock, 0);
  std::uint32_t best = 0xFFFFFFFFu, best_block = 0;
  for (std::uint32_t i = 0; i < nb; ++i) {
    for (std::uint32_t w = 0; w < kWordsPerBlock; ++w) {
      std::size_t e = std::size_t(i) * kWordsPerBlock + w;
      std::uint32_t diff = p[e] - q_logical[w];
      std::uint32_t sq = diff * diff;
      out[e] = sq;
      if (sq < best) {
        best = sq;
        best_block = SQ + i;
      }
    }
  }
  out[std::size_t(R - SQ) * kWordsPerBlock] = best;
  out[std::size_t(R - SQ) * kWordsPerBlock + 1] = best_block;
  return {tb.finish(SQ, static_cast<std::uint32_t>(R - SQ) + 1), std::move(out)};
}

// conv: three-tap smoothing with pre-staged shifted copies; taps sum in the
// array, the weight multiplies run on the CPU.
BuiltTrace build_conv(const KernelSpec& spec) {
  std::uint32_t nb = blocks_for(spec.size);
  SplitMix rng(kernel_data_seed(spec));
  Words x = random_words(rng, std::size_t(nb) * kWordsPerBlock);
  const std::uint32_t weight = (rng.next_u32() | 1u) & 0xFFFFu;
  std::size_t n_words = x.size();
  Words xl(n_words, 0), xr(n_words, 0);
  for (std::size_t e = 0; e < n_words; ++e) {
    if (e > 0) xl[e] = x[e - 1];
    if (e + 1 < n_words) xr[e] = x[e + 1];
  }

  TraceBuilder tb({.kernel = "conv", .category = KernelCategory::CpuDependent,
                   .size = spec.size, .seed = spec.seed});
  block_id_t X = tb.alloc(nb), XL = tb.alloc(nb), XR = tb.alloc(nb);
  block_id_t T = tb.alloc(kAlignBlocks), SUM = tb.alloc(nb), OUT = tb.alloc(nb);
  copy_in(tb, X, x);
  copy_in(tb, XL, xl);
  copy_in(tb, XR, xr);

  for (std::uint32_t begin = 0; begin < nb; begin += kBatchBlocks) {
    std::uint32_t end = std::min(nb, begin + kBatchBlocks);
    for (std::uint32_t i = begin; i < end; ++i) {
      std::uint32_t r = i % kAlignBlocks;
      tb.pic(PicOp::Add, XL + i, X + i, T + r);
      tb.pic(PicOp::Add, T + r, XR + i, SUM + i);
    }
    tb.sync();
    for (std::uint32_t i = begin; i < end; ++i) {
      tb.load(SUM + i);
      tb.cpu_op(CpuFn::MulImm, SUM + i, OUT + i, {.mul = 2 * kWordsPerBlock}, weight);
      tb.store(OUT + i);
    }
    tb.sync();
  }

  Words golden(n_words, 0);
  for (std::size_t e = 0; e < n_words; ++e) {
    std::uint32_t sum = (e > 0 ? x[e - 1] : 0) + x[e] + (e + 1 < n_words ? x[e + 1] : 0);
    golden[e] = sum * weight;
  }
  return {tb.finish(OUT, nb), std::move(golden)};
}

BuiltTrace build_kernel(const KernelSpec& spec) {
  if (spec.size < 1) throw TraceError("kernel size must be >= 1");
  if (spec.kernel == "mat_add") return build_mat_add(spec);
  if (spec.kernel == "cmul") return build_cmul(spec);
  if (spec.kernel == "string") return build_string(spec);
  if (spec.kernel == "bnn") return build_bnn(spec);
  if (spec.kernel == "hist") return build_hist(spec);
  if (spec.kernel == "rmse") return build_rmse(spec);
  if (spec.kernel == "knn") return build_knn(spec);
  if (spec.kernel == "conv") return build_conv(spec);
  throw TraceError("unknown kernel: " + spec.kernel);
}

}  // namespace

const std::vector<std::string>& kernel_names() {
  static const std::vector<std::string> names = {"knn", "conv", "hist", "rmse",
                                                 "bnn", "mat_add", "string", "cmul"};
  return names;
}

KernelCategory kernel_category(const std::string& kernel) {
  if (kernel == "knn" || kernel == "conv" || kernel == "hist" || kernel == "rmse")
    return KernelCategory::CpuDependent;
  if (kernel == "cmul") return KernelCategory::IndepLowReuse;
  if (kernel == "bnn" || kernel == "mat_add" || kernel == "string")
    return KernelCategory::IndepHighReuse;
  throw TraceError("unknown kernel: " + kernel);
}

Trace generate(const KernelSpec& spec) { return build_kernel(spec).trace; }

std::vector<std::uint32_t> reference_output(const KernelSpec& spec) {
  return build_kernel(spec).golden;
}

std::uint64_t reference_checksum(const KernelSpec& spec) {
  auto golden = reference_output(spec);
  return fnv1a64_words(golden.data(), golden.size());
}

}  // namespace himc
