// Command-line front end for the core model: load a program, simulate it on
// the pipeline, emit a retirement trace and a statistics report, optionally
// checking every retirement against the reference interpreter. The bench
// subcommand runs the bundled microbenchmark suite.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nox/bench.hpp"
#include "nox/runner.hpp"

namespace {

struct CliOptions {
  std::string bin_path, elf_path, asm_path;
  unsigned fifo_depth = 2;
  unsigned imem_latency = 0;
  unsigned dmem_latency = 0;
  std::string misaligned_trap = "off";
  std::string reset_pc = "0x80000000";
  uint64_t max_cycles = 100'000'000;
  std::string trace_path, stats_path;
  bool verify = false;
  std::optional<uint64_t> seed;
};

int do_run(const CliOptions& opt) {
  nox::RunConfig cfg;
  int sources = 0;
  if (!opt.bin_path.empty()) { cfg.image_path = opt.bin_path; cfg.image_kind = nox::ImageKind::FlatBinary; ++sources; }
  if (!opt.elf_path.empty()) { cfg.image_path = opt.elf_path; cfg.image_kind = nox::ImageKind::Elf; ++sources; }
  if (!opt.asm_path.empty()) { cfg.image_path = opt.asm_path; cfg.image_kind = nox::ImageKind::Assembly; ++sources; }
  if (sources != 1) {
    std::cerr << "noxsim: exactly one of --bin/--elf/--asm is required\n";
    return nox::kExitLoadError;
  }

  cfg.core.fifo_depth = opt.fifo_depth;
  cfg.core.imem_latency = opt.imem_latency;
  cfg.core.dmem_latency = opt.dmem_latency;
  cfg.core.misaligned_trap = opt.misaligned_trap == "on";
  cfg.core.reset_pc = static_cast<uint32_t>(std::stoul(opt.reset_pc, nullptr, 0));
  cfg.max_cycles = opt.max_cycles;
  cfg.verify = opt.verify;
  if (opt.seed) cfg.core.random_latency = nox::RandomLatency{0, 4, *opt.seed};
  try {
    nox::apply_env_memory_map(cfg.core);
  } catch (const std::exception& e) {
    std::cerr << "noxsim: NOXSIM_MAP: " << e.what() << '\n';
    return nox::kExitLoadError;
  }

  std::ofstream trace_file;
  if (!opt.trace_path.empty()) {
    trace_file.open(opt.trace_path);
    if (!trace_file) {
      std::cerr << "noxsim: cannot open trace file " << opt.trace_path << '\n';
      return nox::kExitLoadError;
    }
    cfg.trace = &trace_file;
  }

  nox::LoadedImage image;
  try {
    image = nox::load_image(cfg);
  } catch (const std::exception& e) {
    std::cerr << "noxsim: " << e.what() << '\n';
    return nox::kExitLoadError;
  }

  const nox::RunOutput out = nox::run_simulation(cfg, image);

  switch (out.stop) {
    case nox::StopReason::ExitWrite: break;
    case nox::StopReason::Ebreak: break;
    case nox::StopReason::MaxCycles:
      std::cerr << "noxsim: max cycles exhausted after " << out.stats.cycles
                << " cycles\n";
      break;
    case nox::StopReason::FetchFault:
      std::cerr << "noxsim: instruction fetch fault\n";
      break;
    case nox::StopReason::WfiSleep:
      std::cerr << "noxsim: wfi sleep with all interrupt sources masked\n";
      break;
    case nox::StopReason::Divergence:
      std::cerr << "noxsim: lockstep divergence\n";
      if (out.divergence) std::cerr << "  " << out.divergence->message << '\n';
      break;
  }
  if (cfg.verify && out.stop != nox::StopReason::Divergence)
    std::cerr << "noxsim: lockstep ok\n";

  if (!opt.stats_path.empty()) {
    std::ofstream sf(opt.stats_path);
    sf << nox::stats_json(out.stats, out.iterations) << '\n';
  }
  std::cerr << nox::stats_human(out.stats, out.iterations);
  return out.exit_code;
}

int do_bench(unsigned imem_sweep_max) {
  const auto results = nox::run_bench_suite(imem_sweep_max);
  bool all_ok = true;
  for (const auto& r : results) {
    char cpi[32];
    std::snprintf(cpi, sizeof cpi, "%.4f", r.cpi);
    std::cout << r.name << ": cpi " << cpi << " (cycles " << r.cycles
              << ", instret " << r.instret << ")";
    if (!r.note.empty()) std::cout << " " << r.note;
    std::cout << (r.ok ? "" : "  [FAIL]") << '\n';
    all_ok &= r.ok;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cycle-level model of a 4-stage RV32I-Zicsr core"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* run = app.add_subcommand("run", "simulate a program");
  run->add_option("--bin", opt.bin_path, "flat binary image");
  run->add_option("--elf", opt.elf_path, "ELF32 executable");
  run->add_option("--asm", opt.asm_path, "assembly source file");
  run->add_option("--fifo-depth", opt.fifo_depth, "fetch FIFO depth")->check(CLI::Range(1u, 64u));
  run->add_option("--imem-latency", opt.imem_latency, "instruction port latency");
  run->add_option("--dmem-latency", opt.dmem_latency, "data port latency");
  run->add_option("--misaligned-trap", opt.misaligned_trap, "trap on misaligned access")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_option("--reset-pc", opt.reset_pc, "reset program counter");
  run->add_option("--max-cycles", opt.max_cycles, "cycle budget");
  run->add_option("--trace", opt.trace_path, "retirement trace output file");
  run->add_option("--stats", opt.stats_path, "statistics JSON output file");
  run->add_flag("--verify", opt.verify, "lockstep-check against the reference interpreter");
  uint64_t seed_value = 0;
  CLI::Option* seed_opt =
      run->add_option("--seed", seed_value, "randomized bus latency mode (0..4), seeded");

  unsigned sweep_max = 3;
  CLI::App* bench = app.add_subcommand("bench", "run the microbenchmark suite");
  bench->add_option("--imem-sweep-max", sweep_max, "largest instruction latency swept");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (*seed_opt) opt.seed = seed_value;
    return do_run(opt);
  }
  return do_bench(sweep_max);
}
