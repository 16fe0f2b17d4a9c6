#include "nox/bench.hpp"

#include <sstream>

#include "nox/runner.hpp"

namespace nox {

namespace {

constexpr int kAluOps = 1000;
constexpr int kBranchBlocks = 200;
constexpr int kLoadPairs = 300;

std::string prologue() {
  std::ostringstream s;
  s << "li x28, " << kDefaultRamBase << "\n";
  s << "li x29, " << kDefaultExitAddr << "\n";
  return s.str();
}

std::string epilogue() { return "sw x0, 0(x29)\n"; }

std::string dep_chain_source() {
  std::ostringstream s;
  s << prologue();
  for (int i = 0; i < kAluOps; ++i) s << "addi x1, x1, 1\n";
  s << epilogue();
  return s.str();
}

std::string independent_source() {
  std::ostringstream s;
  s << prologue();
  for (int i = 0; i < kAluOps; ++i)
    s << "addi x" << (1 + i % 8) << ", x0, 1\n";
  s << epilogue();
  return s.str();
}

std::string taken_branch_source() {
  std::ostringstream s;
  s << prologue();
  for (int i = 0; i < kBranchBlocks; ++i) {
    s << "beq x0, x0, t" << i << "\n";
    s << "addi x1, x1, 1\n";  // skipped
    s << "t" << i << ": addi x2, x2, 1\n";
  }
  s << epilogue();
  return s.str();
}

std::string load_use_source() {
  std::ostringstream s;
  s << prologue();
  s << "li x5, 1234\n";
  s << "sw x5, 0(x28)\n";
  for (int i = 0; i < kLoadPairs; ++i) {
    s << "lw x6, 0(x28)\n";
    s << "add x7, x6, x6\n";
  }
  s << epilogue();
  return s.str();
}

RunOutput run_source(const std::string& source, const CoreConfig& core) {
  RunConfig cfg;
  cfg.core = core;
  AsmProgram prog = assemble(source, core.reset_pc);
  const auto bytes = prog.to_bytes();
  const LoadedImage img = load_flat({bytes.data(), bytes.size()}, prog.origin, core.map);
  return run_simulation(cfg, img);
}

BenchResult make_result(const std::string& name, const RunOutput& out) {
  BenchResult r;
  r.name = name;
  r.stats = out.stats;
  r.cycles = out.stats.cycles;
  r.instret = out.stats.instret;
  r.cpi = out.stats.cpi().value_or(0.0);
  r.ok = out.stop == StopReason::ExitWrite && out.exit_code == 0;
  if (!r.ok) r.note = "kernel did not finish cleanly";
  return r;
}

}  // namespace

std::vector<BenchResult> run_bench_suite(unsigned imem_sweep_max) {
  std::vector<BenchResult> results;
  CoreConfig base;  // paper-style defaults: 2-entry FIFO, zero-latency ports

  // Full bypassing: the dependent chain must cost exactly what the
  // independent stream costs.
  const RunOutput dep = run_source(dep_chain_source(), base);
  const RunOutput ind = run_source(independent_source(), base);
  BenchResult r_dep = make_result("alu-dependent-chain", dep);
  BenchResult r_ind = make_result("alu-independent", ind);
  if (dep.stats.cycles != ind.stats.cycles) {
    r_dep.ok = false;
    r_dep.note = "dependent chain slower than independent stream";
  } else {
    r_dep.note = "== independent stream (full bypass)";
  }
  results.push_back(r_dep);
  results.push_back(r_ind);

  // Taken-branch penalty: exactly two bubbles per redirect.
  const RunOutput br = run_source(taken_branch_source(), base);
  BenchResult r_br = make_result("taken-branches", br);
  {
    const uint64_t flushes = br.stats.flush_count;
    const uint64_t bubbles = br.stats.flush_bubble_cycles;
    if (flushes != kBranchBlocks || bubbles != 2 * flushes) {
      r_br.ok = false;
      r_br.note = "taken-branch penalty is not 2 cycles";
    } else {
      r_br.note = "penalty 2 cycles/branch";
    }
  }
  results.push_back(r_br);

  // Load-use at zero data latency: no stall at all.
  const RunOutput lu = run_source(load_use_source(), base);
  BenchResult r_lu = make_result("load-use", lu);
  if (lu.stats.stall_cycles_lsu != 0 ||
      lu.stats.cycles != lu.stats.instret + lu.stats.fill_cycles) {
    r_lu.ok = false;
    r_lu.note = "unexpected load-use stalls";
  } else {
    r_lu.note = "zero load-use penalty";
  }
  results.push_back(r_lu);

  // CPI must be monotone, non-decreasing in instruction-port latency.
  double prev_cpi = 0.0;
  bool monotone = true;
  for (unsigned lat = 0; lat <= imem_sweep_max; ++lat) {
    CoreConfig cfg = base;
    cfg.imem_latency = lat;
    const RunOutput sw = run_source(independent_source(), cfg);
    BenchResult r = make_result("imem-sweep-latency-" + std::to_string(lat), sw);
    if (r.cpi + 1e-12 < prev_cpi) {
      monotone = false;
      r.ok = false;
      r.note = "cpi decreased when latency grew";
    }
    prev_cpi = r.cpi;
    results.push_back(r);
  }
  if (!monotone) results.back().ok = false;

  return results;
}

}  // namespace nox
