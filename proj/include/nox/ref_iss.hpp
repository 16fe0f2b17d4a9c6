#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nox/arch_state.hpp"
#include "nox/bus.hpp"
#include "nox/config.hpp"

namespace nox {

// Two's-complement ALU semantics for the computational mnemonics. Shifts use
// the low five bits of b; SLT/SLTU produce 0 or 1.
uint32_t alu_eval(Mnemonic m, uint32_t a, uint32_t b);

struct MemEffect {
  uint32_t address = 0;
  uint8_t size = 0;
  bool is_write = false;
  uint32_t value = 0;
};

struct StepResult {
  // False for idle WFI-wait polls, which retire nothing.
  bool retired = false;
  uint32_t pc = 0;
  uint32_t raw = 0;
  std::optional<DecodedInstruction> instr;  // absent for illegal encodings
  uint32_t next_pc = 0;
  std::optional<std::pair<uint8_t, uint32_t>> writeback;  // rd != x0
  std::optional<TrapCause> trap;
  std::optional<MemEffect> mem_effect;
  // Instruction fetch got an ERROR response; the simulation cannot continue.
  bool fetch_fault = false;
};

enum class StopKind : uint8_t { MaxSteps, Ecall, Ebreak, PcEquals };

struct StopCondition {
  StopKind kind = StopKind::MaxSteps;
  uint64_t max_steps = 1'000'000;
  uint32_t pc_value = 0;
};

enum class RunOutcome : uint8_t {
  Stopped,         // stop condition met
  ExitWrite,       // exit MMIO written
  MaxStepsReached,
  InfiniteWfi,     // asleep with every interrupt source masked
  FetchFault,
};

struct RunResult {
  RunOutcome outcome = RunOutcome::Stopped;
  std::vector<StepResult> trace;
};

// Functional, timing-free interpreter. The bus is used through its immediate
// interface; latencies do not apply. One step retires at most one instruction.
class RefIss {
 public:
  RefIss(const CoreConfig& cfg, Bus& bus);

  void reset();
  StepResult step();
  RunResult run_until(const StopCondition& stop);

  ArchState& state() { return state_; }
  const ArchState& state() const { return state_; }
  Bus& bus() { return bus_; }

  // When set, mtime is driven externally (lockstep) instead of advancing one
  // tick per step.
  void set_external_time(bool v) { external_time_ = v; }

 private:
  void refresh_mip();

  CoreConfig cfg_;
  Bus& bus_;
  ArchState state_;
  bool external_time_ = false;
  bool just_woke_ = false;
};

}  // namespace nox
