#include "himc/device_catalog.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace himc {

using nlohmann::json;

std::uint64_t required_retention_ns(const RetentionRequirement& req) {
  if (req.k < 1) throw ConfigError("retention requirement: k must be >= 1");
  return (req.t_process_ns + req.t_rw_ns + req.t_mem_ns + req.t_overhead_ns) * req.k;
}

std::string RetentionClass::label() const {
  switch (kind) {
    case Kind::None:
      return "none";
    case Kind::Nonvolatile:
      return "nonvolatile";
    case Kind::Relaxed:
      break;
  }
  if (duration_ns % 1000000 == 0) return std::to_string(duration_ns / 1000000) + "ms";
  if (duration_ns % 1000 == 0) return std::to_string(duration_ns / 1000) + "us";
  return std::to_string(duration_ns) + "ns";
}

RetentionClass parse_retention(const std::string& label) {
  if (label == "none" || label == "-" || label.empty()) return RetentionClass::none();
  if (label == "nonvolatile" || label == "5years") return RetentionClass::nonvolatile();
  std::uint64_t mul = 0;
  std::string digits = label;
  if (label.size() > 2 && label.compare(label.size() - 2, 2, "us") == 0) {
    mul = 1000;
    digits = label.substr(0, label.size() - 2);
  } else if (label.size() > 2 && label.compare(label.size() - 2, 2, "ms") == 0) {
    mul = 1000000;
    digits = label.substr(0, label.size() - 2);
  } else if (label.size() > 2 && label.compare(label.size() - 2, 2, "ns") == 0) {
    mul = 1;
    digits = label.substr(0, label.size() - 2);
  } else {
    throw ConfigError("unrecognized retention label: " + label);
  }
  std::uint64_t value = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') throw ConfigError("unrecognized retention label: " + label);
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return RetentionClass::relaxed(value * mul);
}

std::string level_name(Level level) {
  switch (level) {
    case Level::L1:
      return "L1";
    case Level::L2:
      return "L2";
    case Level::Mem:
      return "Mem";
  }
  return "?";
}

std::string technology_name(Technology tech) {
  return tech == Technology::Sram ? "SRAM" : "STT-RAM";
}

namespace {

Level parse_level(const std::string& s) {
  if (s == "L1") return Level::L1;
  if (s == "L2") return Level::L2;
  if (s == "Mem") return Level::Mem;
  throw ConfigError("unknown level: " + s);
}

Technology parse_technology(const std::string& s) {
  if (s == "SRAM") return Technology::Sram;
  if (s == "STT-RAM") return Technology::SttRam;
  throw ConfigError("unknown technology: " + s);
}

DeviceParams row_from_json(const json& j) {
  DeviceParams p;
  p.level = parse_level(j.at("level").get<std::string>());
  p.technology = parse_technology(j.at("technology").get<std::string>());
  p.retention = parse_retention(j.at("retention").get<std::string>());
  p.read_latency = j.at("read_latency_cycles").get<std::uint32_t>();
  p.write_latency = j.at("write_latency_cycles").get<std::uint32_t>();
  p.logic_op_latency = j.at("logic_op_latency_cycles").get<std::uint32_t>();
  p.add_op_latency = j.at("add_op_latency_cycles").get<std::uint32_t>();
  p.read_energy_fj = parse_milli(j.at("read_energy_pj_per_bit").get<std::string>());
  p.write_energy_fj = parse_milli(j.at("write_energy_pj_per_bit").get<std::string>());
  p.logic_energy_fj = parse_milli(j.at("logic_energy_pj_per_bit").get<std::string>());
  p.add_energy_fj = parse_milli(j.at("add_energy_pj_per_bit").get<std::string>());
  p.leakage_uw = parse_milli(j.at("leakage_power_mw").get<std::string>());
  return p;
}

}  // namespace

DeviceCatalog DeviceCatalog::from_json_text(const std::string& text) {
  json doc = json::parse(text);
  DeviceCatalog cat;
  for (const auto& j : doc.at("devices")) {
    DeviceParams row = row_from_json(j);
    cat.validate_row(row);
    cat.rows_.push_back(row);
  }
  if (cat.rows_.empty()) throw ConfigError("device table holds no rows");
  return cat;
}

DeviceCatalog DeviceCatalog::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open device table: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

DeviceCatalog DeviceCatalog::builtin() {
  // The six calibrated columns (L1/L2 x SRAM/STT-RAM, memory), kept in sync
  // with data/device_table.json.
  auto mk = [](Level lv, Technology tech, RetentionClass rc, std::uint32_t r, std::uint32_t w,
               std::uint32_t lg, std::uint32_t ad, const char* re, const char* we, const char* le,
               const char* ae, const char* leak) {
    DeviceParams p;
    p.level = lv;
    p.technology = tech;
    p.retention = rc;
    p.read_latency = r;
    p.write_latency = w;
    p.logic_op_latency = lg;
    p.add_op_latency = ad;
    p.read_energy_fj = parse_milli(re);
    p.write_energy_fj = parse_milli(we);
    p.logic_energy_fj = parse_milli(le);
    p.add_energy_fj = parse_milli(ae);
    p.leakage_uw = parse_milli(leak);
    return p;
  };
  DeviceCatalog cat;
  cat.rows_ = {
      mk(Level::L1, Technology::Sram, RetentionClass::none(), 1, 1, 3, 18, "0.125", "0.19",
         "0.915", "1.355", "43.95"),
      mk(Level::L1, Technology::SttRam, RetentionClass::relaxed(75000), 1, 2, 3, 15, "0.086",
         "4.69", "5.376", "5.816", "17.63"),
      mk(Level::L2, Technology::Sram, RetentionClass::none(), 2, 2, 4, 19, "1.77", "0.62", "2.997",
         "3.437", "1168.95"),
      mk(Level::L2, Technology::SttRam, RetentionClass::relaxed(75000), 2, 3, 5, 15, "0.75",
         "9.647", "10.997", "11.437", "182.8"),
      mk(Level::L2, Technology::SttRam, RetentionClass::relaxed(10000000), 2, 4, 6, 16, "0.75",
         "15.604", "16.954", "17.394", "182.2"),
      mk(Level::Mem, Technology::SttRam, RetentionClass::nonvolatile(), 32, 56, 88, 97, "24.55",
         "640.89", "666.045", "666.49", "222.36"),
  };
  for (const auto& row : cat.rows_) cat.validate_row(row);
  return cat;
}

void DeviceCatalog::validate_row(const DeviceParams& p) const {
  std::string tag = level_name(p.level) + "/" + technology_name(p.technology) + "/" +
                    p.retention.label();
  auto fail = [&](const std::string& msg) { throw ConfigError("device row " + tag + ": " + msg); };
  if (p.read_latency < 1 || p.write_latency < 1 || p.logic_op_latency < 1 ||
      p.add_op_latency < 1)
    fail("all latencies must be at least one cycle");
  if (p.read_energy_fj < 0 || p.write_energy_fj < 0 || p.logic_energy_fj < 0 ||
      p.add_energy_fj < 0 || p.leakage_uw < 0)
    fail("energies and powers must be non-negative");
  if (p.technology == Technology::SttRam) {
    if (p.write_latency < p.read_latency) fail("STT-RAM write latency below read latency");
    if (p.write_energy_fj <= p.read_energy_fj) fail("STT-RAM write energy not above read energy");
  }
  if (p.logic_energy_fj < p.write_energy_fj)
    fail("logic energy below write energy (compute energy includes access + store)");
  if (p.add_energy_fj < p.logic_energy_fj) fail("add energy below logic energy");
}

const DeviceParams* DeviceCatalog::try_lookup(Level level, Technology tech,
                                              const RetentionClass& retention) const {
  for (const auto& row : rows_) {
    if (row.level == level && row.technology == tech && row.retention == retention) return &row;
  }
  return nullptr;
}

const DeviceParams& DeviceCatalog::lookup_params(Level level, Technology tech,
                                                 const RetentionClass& retention) const {
  const DeviceParams* row = try_lookup(level, tech, retention);
  if (!row)
    throw ConfigError("unsupported device configuration: " + level_name(level) + "/" +
                      technology_name(tech) + "/" + retention.label());
  return *row;
}

void DeviceCatalog::add_override(const DeviceParams& row) {
  validate_row(row);
  for (auto& existing : rows_) {
    if (existing.level == row.level && existing.technology == row.technology &&
        existing.retention == row.retention) {
      existing = row;
      return;
    }
  }
  rows_.push_back(row);
}

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

void check_geometry(const LevelGeometry& g, const std::string& name,
                    std::vector<std::string>& errors) {
  auto err = [&](const std::string& field, const std::string& msg) {
    errors.push_back(name + "." + field + ": " + msg);
  };
  if (!is_pow2(g.size_bytes)) err("size_bytes", "must be a power of two");
  if (!is_pow2(g.block_bytes)) err("block_bytes", "must be a power of two");
  if (!is_pow2(g.associativity)) err("associativity", "must be a power of two");
  if (!is_pow2(g.banks)) err("banks", "must be a power of two");
  if (!is_pow2(g.subarrays)) err("subarrays", "must be a power of two");
  if (g.block_bytes == 0 || g.size_bytes % g.block_bytes != 0)
    err("block_bytes", "must divide size_bytes");
  if (g.compute_lanes != 0 && (g.compute_lanes * 32) % g.block_bits() != 0)
    err("compute_lanes", "lanes x 32 bits must be a multiple of the cache block size");
}

}  // namespace

std::vector<std::string> validate_config(const HierarchyConfig& cfg) {
  std::vector<std::string> errors;
  check_geometry(cfg.l1, "l1", errors);
  check_geometry(cfg.l2, "l2", errors);
  if (!is_pow2(cfg.mem_size_bytes)) errors.push_back("mem_size_bytes: must be a power of two");
  if (cfg.mem_compute_lanes != 256 && cfg.mem_compute_lanes != 512)
    errors.push_back("mem_compute_lanes: must be 256 or 512");
  if (cfg.counter.n_states < 2 || !is_pow2(cfg.counter.n_states))
    errors.push_back("counter.n_states: must be a power of two >= 2");
  RetentionClass l1r = parse_retention(cfg.l1_retention);
  if (l1r.kind == RetentionClass::Kind::Relaxed &&
      static_cast<std::uint64_t>(cfg.counter.n_states) * cfg.counter.clock_period_ns !=
          l1r.duration_ns)
    errors.push_back("counter.clock_period_ns: n_states x clock period must equal the L1 "
                     "retention time");
  RetentionClass l2lo = parse_retention(cfg.l2_retention_low);
  RetentionClass l2hi = parse_retention(cfg.l2_retention_high);
  if (l2lo.kind == RetentionClass::Kind::Relaxed && l2hi.kind == RetentionClass::Kind::Relaxed &&
      l2lo.duration_ns > l2hi.duration_ns)
    errors.push_back("l2_retention_low: must not exceed l2_retention_high");
  if (cfg.l1_hetero && !cfg.allow_hetero_l1)
    errors.push_back("l1_hetero: dual-retention L1 requires allow_hetero_l1");
  if (cfg.mem_read_issue_interval < 1)
    errors.push_back("mem_read_issue_interval: must be at least one cycle");
  if (cfg.cpu.alu_cycles < 1 || cfg.cpu.mul_cycles < 1 || cfg.cpu.div_cycles < 1)
    errors.push_back("cpu: per-op cycle costs must be at least one");
  if (cfg.cpu.active_mw < 0 || cfg.cpu.idle_mw < 0)
    errors.push_back("cpu: power values must be non-negative");
  return errors;
}

}  // namespace himc
