#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nox/pipeline.hpp"

namespace nox {

struct BenchResult {
  std::string name;
  uint64_t cycles = 0;
  uint64_t instret = 0;
  double cpi = 0.0;
  bool ok = true;
  std::string note;
  StatsReport stats;
};

// Synthetic microbenchmarks exercising the pipeline's figure-of-merit claims:
// a fully dependent ALU chain vs an independent stream (full bypassing), a
// taken-branch kernel (2-cycle redirect penalty), a load-use kernel (no
// load-use penalty at zero data latency) and an instruction-latency sweep
// (CPI monotone in fetch latency). Each result carries an exact pass/fail.
std::vector<BenchResult> run_bench_suite(unsigned imem_sweep_max = 3);

}  // namespace nox
