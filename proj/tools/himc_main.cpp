// Command-line front end: single runs, sweeps, sense-margin studies, and
// trace dumps over the hierarchical in-memory compute model.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "himc/kernels.hpp"
#include "himc/margins.hpp"
#include "himc/sim.hpp"

namespace fs = std::filesystem;
using namespace himc;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitTraceError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << text;
}

struct LoadedConfig {
  HierarchyConfig hierarchy;
  DeviceCatalog catalog = DeviceCatalog::builtin();
};

void parse_geometry(const nlohmann::json& j, LevelGeometry& g) {
  if (j.contains("size_bytes")) g.size_bytes = j.at("size_bytes").get<std::uint64_t>();
  if (j.contains("block_bytes")) g.block_bytes = j.at("block_bytes").get<std::uint32_t>();
  if (j.contains("associativity")) g.associativity = j.at("associativity").get<std::uint32_t>();
  if (j.contains("banks")) g.banks = j.at("banks").get<std::uint32_t>();
  if (j.contains("subarrays")) g.subarrays = j.at("subarrays").get<std::uint32_t>();
  if (j.contains("compute_lanes")) g.compute_lanes = j.at("compute_lanes").get<std::uint32_t>();
}

LoadedConfig load_config(const std::string& path) {
  LoadedConfig loaded;
  if (path.empty()) return loaded;

  nlohmann::json j = nlohmann::json::parse(read_file(path));
  HierarchyConfig& cfg = loaded.hierarchy;
  if (j.contains("cpu_clock_ghz")) cfg.cpu_clock_ghz = j.at("cpu_clock_ghz").get<double>();
  if (j.contains("cpu")) {
    const auto& c = j.at("cpu");
    if (c.contains("active_mw")) cfg.cpu.active_mw = c.at("active_mw").get<std::int64_t>();
    if (c.contains("idle_mw")) cfg.cpu.idle_mw = c.at("idle_mw").get<std::int64_t>();
    if (c.contains("alu_cycles")) cfg.cpu.alu_cycles = c.at("alu_cycles").get<std::uint32_t>();
    if (c.contains("mul_cycles")) cfg.cpu.mul_cycles = c.at("mul_cycles").get<std::uint32_t>();
    if (c.contains("div_cycles")) cfg.cpu.div_cycles = c.at("div_cycles").get<std::uint32_t>();
  }
  if (j.contains("l1")) {
    parse_geometry(j.at("l1"), cfg.l1);
    if (j.at("l1").contains("retention"))
      cfg.l1_retention = j.at("l1").at("retention").get<std::string>();
  }
  if (j.contains("l2")) {
    parse_geometry(j.at("l2"), cfg.l2);
    if (j.at("l2").contains("retention_high"))
      cfg.l2_retention_high = j.at("l2").at("retention_high").get<std::string>();
    if (j.at("l2").contains("retention_low"))
      cfg.l2_retention_low = j.at("l2").at("retention_low").get<std::string>();
  }
  if (j.contains("mem")) {
    const auto& m = j.at("mem");
    if (m.contains("size_bytes")) cfg.mem_size_bytes = m.at("size_bytes").get<std::uint64_t>();
    if (m.contains("banks")) cfg.mem_banks = m.at("banks").get<std::uint32_t>();
    if (m.contains("subarrays")) cfg.mem_subarrays = m.at("subarrays").get<std::uint32_t>();
    if (m.contains("compute_lanes"))
      cfg.mem_compute_lanes = m.at("compute_lanes").get<std::uint32_t>();
    if (m.contains("read_issue_interval_cycles"))
      cfg.mem_read_issue_interval = m.at("read_issue_interval_cycles").get<std::uint32_t>();
  }
  if (j.contains("counter")) {
    const auto& c = j.at("counter");
    if (c.contains("n_states")) cfg.counter.n_states = c.at("n_states").get<std::uint32_t>();
    if (c.contains("clock_period_ns"))
      cfg.counter.clock_period_ns = c.at("clock_period_ns").get<std::uint64_t>();
  }
  if (j.contains("instruction_table")) {
    const auto& t = j.at("instruction_table");
    if (t.contains("capacity_word_entries"))
      cfg.table_capacity_word_entries = t.at("capacity_word_entries").get<std::uint32_t>();
    if (t.contains("address_bits"))
      cfg.table_address_bits = t.at("address_bits").get<std::uint32_t>();
  }
  if (j.contains("l1_hetero")) cfg.l1_hetero = j.at("l1_hetero").get<bool>();
  if (j.contains("allow_hetero_l1")) cfg.allow_hetero_l1 = j.at("allow_hetero_l1").get<bool>();
  if (j.contains("pic_enabled")) cfg.pic_enabled = j.at("pic_enabled").get<bool>();

  if (j.contains("device_table")) {
    fs::path table = j.at("device_table").get<std::string>();
    if (table.is_relative()) table = fs::path(path).parent_path() / table;
    loaded.catalog = DeviceCatalog::from_json_file(table.string());
  }
  if (j.contains("overrides")) {
    for (const auto& o : j.at("overrides")) {
      DeviceParams row;
      std::string level = o.at("level").get<std::string>();
      row.level = level == "L1" ? Level::L1 : level == "L2" ? Level::L2 : Level::Mem;
      row.technology =
          o.at("technology").get<std::string>() == "SRAM" ? Technology::Sram : Technology::SttRam;
      row.retention = parse_retention(o.at("retention").get<std::string>());
      row.read_latency = o.at("read_latency_cycles").get<std::uint32_t>();
      row.write_latency = o.at("write_latency_cycles").get<std::uint32_t>();
      row.logic_op_latency = o.at("logic_op_latency_cycles").get<std::uint32_t>();
      row.add_op_latency = o.at("add_op_latency_cycles").get<std::uint32_t>();
      row.read_energy_fj = parse_milli(o.at("read_energy_pj_per_bit").get<std::string>());
      row.write_energy_fj = parse_milli(o.at("write_energy_pj_per_bit").get<std::string>());
      row.logic_energy_fj = parse_milli(o.at("logic_energy_pj_per_bit").get<std::string>());
      row.add_energy_fj = parse_milli(o.at("add_energy_pj_per_bit").get<std::string>());
      row.leakage_uw = parse_milli(o.at("leakage_power_mw").get<std::string>());
      loaded.catalog.add_override(row);
    }
  }
  return loaded;
}

int cmd_run(const std::string& config_path, const std::string& kernel, std::uint64_t size,
            std::uint64_t seed, const std::string& placement_str, const std::string& chaining,
            const std::string& out_path, const std::string& format,
            const std::string& timeline_path) {
  LoadedConfig loaded = load_config(config_path);
  Placement placement = parse_placement(placement_str);
  ChainMode mode = chaining == "off" ? ChainMode::Conventional : ChainMode::Chained;

  Trace trace = generate({kernel, size, seed});
  RunOptions options;
  options.capture_timeline = !timeline_path.empty();
  RunArtifacts artifacts =
      run_with_artifacts(trace, loaded.hierarchy, loaded.catalog, placement, mode, options);

  if (!timeline_path.empty()) {
    ScheduleResult tl;
    tl.timeline = artifacts.timeline;
    write_file(timeline_path, timeline_to_jsonl(tl));
  }
  if (format == "csv") {
    SweepResult single;
    single.reports = {artifacts.report};
    write_file(out_path, sweep_to_csv(single));
  } else {
    write_file(out_path, report_to_json(artifacts.report));
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& matrix_path,
              const std::string& out_dir) {
  LoadedConfig loaded = load_config(config_path);
  SweepSpec spec;
  spec.kernels = kernel_names();
  spec.placements = all_placements();
  spec.modes = {ChainMode::Chained, ChainMode::Conventional};
  if (!matrix_path.empty()) {
    nlohmann::json j = nlohmann::json::parse(read_file(matrix_path));
    if (j.contains("kernels")) {
      spec.kernels.clear();
      for (const auto& k : j.at("kernels")) spec.kernels.push_back(k.get<std::string>());
    }
    if (j.contains("placements")) {
      spec.placements.clear();
      for (const auto& p : j.at("placements"))
        spec.placements.push_back(parse_placement(p.get<std::string>()));
    }
    if (j.contains("chaining")) {
      spec.modes.clear();
      for (const auto& m : j.at("chaining"))
        spec.modes.push_back(m.get<std::string>() == "conventional" ? ChainMode::Conventional
                                                                    : ChainMode::Chained);
    }
    if (j.contains("size")) spec.size = j.at("size").get<std::uint64_t>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  }
  SweepResult result = sweep(spec, loaded.hierarchy, loaded.catalog);
  write_file((fs::path(out_dir) / "sweep.json").string(), sweep_to_json(result));
  write_file((fs::path(out_dir) / "sweep.csv").string(), sweep_to_csv(result));
  if (!result.errors.empty()) {
    for (const auto& e : result.errors) std::cerr << "error: " << e << "\n";
  }
  return 0;
}

int cmd_margins(double tmr, double sigma, std::uint32_t samples, std::uint64_t seed,
                const std::string& json_path, const std::string& csv_path) {
  MarginReport report = margin_report({tmr, sigma, samples, seed});
  write_file(json_path, margin_report_json(report));
  if (!csv_path.empty()) write_file(csv_path, margin_histogram_csv(report));
  return 0;
}

int cmd_trace_dump(const std::string& kernel, std::uint64_t size, std::uint64_t seed,
                   const std::string& out_path) {
  Trace trace = generate({kernel, size, seed});
  write_file(out_path, trace_to_jsonl(trace));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven simulator of hierarchical in-memory computing on relaxed-retention "
               "STT-RAM caches and non-volatile STT-RAM memory"};
  app.require_subcommand(1);

  std::string config_path, kernel = "mat_add", placement = "pic-l2-het", chaining = "on";
  std::string out_path = "-", format = "json", timeline_path, matrix_path, out_dir = "out";
  std::uint64_t size = 1024, seed = 1;

  auto* run_cmd = app.add_subcommand("run", "Run one kernel under one placement");
  run_cmd->add_option("--config", config_path, "Hierarchy config JSON");
  run_cmd->add_option("--kernel", kernel, "Workload kernel name")->required();
  run_cmd->add_option("--size", size, "Element count");
  run_cmd->add_option("--seed", seed, "Generator seed");
  run_cmd->add_option("--placement", placement,
                      "cpu-only | pic-l1 | pic-l2-hom | pic-l2-het | pim-256 | pim-512");
  run_cmd->add_option("--chaining", chaining, "on | off")
      ->check(CLI::IsMember({"on", "off"}));
  run_cmd->add_option("--out", out_path, "Report path ('-' = stdout)");
  run_cmd->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  run_cmd->add_option("--timeline", timeline_path, "Optional timeline JSONL path");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a kernel x placement matrix");
  sweep_cmd->add_option("--config", config_path, "Hierarchy config JSON");
  sweep_cmd->add_option("--matrix", matrix_path, "Sweep matrix JSON");
  sweep_cmd->add_option("--out", out_dir, "Output directory");

  double tmr = 1.5, sigma = 0.05;
  std::uint32_t samples = 10000;
  std::uint64_t margin_seed = 42;
  std::string margins_json = "-", margins_csv;
  auto* margins_cmd = app.add_subcommand("margins", "Monte Carlo sense-margin study");
  margins_cmd->add_option("--tmr", tmr, "TMR ratio (R_AP = (1+tmr) x R_P)");
  margins_cmd->add_option("--sigma", sigma, "Relative resistance std-dev");
  margins_cmd->add_option("--samples", samples, "Samples per class");
  margins_cmd->add_option("--seed", margin_seed, "RNG seed");
  margins_cmd->add_option("--json", margins_json, "Report path");
  margins_cmd->add_option("--csv", margins_csv, "Histogram CSV path");

  auto* dump_cmd = app.add_subcommand("trace-dump", "Serialize a generated trace");
  dump_cmd->add_option("--kernel", kernel, "Workload kernel name")->required();
  dump_cmd->add_option("--size", size, "Element count");
  dump_cmd->add_option("--seed", seed, "Generator seed");
  dump_cmd->add_option("--out", out_path, "Trace JSONL path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed())
      return cmd_run(config_path, kernel, size, seed, placement, chaining, out_path, format,
                     timeline_path);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, matrix_path, out_dir);
    if (margins_cmd->parsed())
      return cmd_margins(tmr, sigma, samples, margin_seed, margins_json, margins_csv);
    if (dump_cmd->parsed()) return cmd_trace_dump(kernel, size, seed, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const TraceError& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return kExitTraceError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
