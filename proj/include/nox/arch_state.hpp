#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "nox/isa.hpp"

namespace nox {

// CSR addresses implemented by the core. Anything else traps.
namespace csr {
inline constexpr uint16_t kMstatus = 0x300;
inline constexpr uint16_t kMisa = 0x301;
inline constexpr uint16_t kMie = 0x304;
inline constexpr uint16_t kMtvec = 0x305;
inline constexpr uint16_t kMscratch = 0x340;
inline constexpr uint16_t kMepc = 0x341;
inline constexpr uint16_t kMcause = 0x342;
inline constexpr uint16_t kMtval = 0x343;
inline constexpr uint16_t kMip = 0x344;
inline constexpr uint16_t kMcycle = 0xB00;
inline constexpr uint16_t kMinstret = 0xB02;
inline constexpr uint16_t kMcycleh = 0xB80;
inline constexpr uint16_t kMinstreth = 0xB82;
inline constexpr uint16_t kMhartid = 0xF14;
}  // namespace csr

// mstatus bits
inline constexpr uint32_t kMstatusMie = 1u << 3;
inline constexpr uint32_t kMstatusMpie = 1u << 7;
inline constexpr uint32_t kMstatusMpp = 3u << 11;  // hardwired to M

// mip/mie bits
inline constexpr uint32_t kIntSoftware = 1u << 3;
inline constexpr uint32_t kIntTimer = 1u << 7;
inline constexpr uint32_t kIntExternal = 1u << 11;

enum class ExcCause : uint32_t {
  InstrAddrMisaligned = 0,
  IllegalInstruction = 2,
  Breakpoint = 3,
  LoadAddrMisaligned = 4,
  LoadAccessFault = 5,
  StoreAddrMisaligned = 6,
  StoreAccessFault = 7,
  EcallFromM = 11,
};

enum class IntCause : uint32_t {
  MachineSoftware = 3,
  MachineTimer = 7,
  MachineExternal = 11,
};

struct TrapCause {
  bool is_interrupt = false;
  uint32_t code = 0;
  uint32_t tval = 0;

  static TrapCause exception(ExcCause c, uint32_t tval = 0) {
    return {false, static_cast<uint32_t>(c), tval};
  }
  static TrapCause interrupt(IntCause c) {
    return {true, static_cast<uint32_t>(c), 0};
  }
  uint32_t mcause_value() const { return (is_interrupt ? 0x80000000u : 0u) | code; }
  bool operator==(const TrapCause&) const = default;
};

// x0 reads as zero; writes to it are dropped.
class RegisterFile {
 public:
  uint32_t read(uint8_t i) const { return x_[i]; }
  void write(uint8_t i, uint32_t v) {
    if (i != 0) x_[i] = v;
  }
  bool operator==(const RegisterFile&) const = default;

 private:
  std::array<uint32_t, 32> x_{};
};

struct CsrFile {
  uint32_t mstatus = kMstatusMpp;  // MIE=0 at reset, MPP hardwired
  uint32_t mie = 0;
  uint32_t mip = 0;  // mirrored from interrupt sources every cycle/step
  uint32_t mtvec = 0;
  uint32_t mscratch = 0;
  uint32_t mepc = 0;
  uint32_t mcause = 0;
  uint32_t mtval = 0;
  uint64_t mcycle = 0;
  uint64_t minstret = 0;

  static constexpr uint32_t kMisaValue = 0x40000100;  // RV32 + I
  static constexpr uint32_t kMhartidValue = 0;

  bool implemented(uint16_t addr) const;
  bool operator==(const CsrFile&) const = default;
};

struct ArchState {
  uint32_t pc = 0;
  RegisterFile regs;
  CsrFile csrs;
  bool waiting_for_interrupt = false;
};

struct CsrAccessResult {
  bool ok = false;
  uint32_t read_value = 0;
  TrapCause trap{};          // valid iff !ok
  bool wrote_minstret = false;  // write precedence over retirement increment
  bool wrote_mcycle = false;    // write precedence over cycle increment
};

// Read-modify-write per the Zicsr rules. `op` must be one of the six CSR
// mnemonics; `operand` is the rs1 value (register forms, rs1_index carries the
// register number) or the zimm (immediate forms, rs1_index is the zimm again).
// Unknown CSRs as well as write attempts to read-only CSRs trap with
// illegal-instruction and tval = raw.
CsrAccessResult csr_access(ArchState& state, Mnemonic op, uint16_t csr_addr,
                           uint32_t operand, uint8_t rs1_index, uint8_t rd,
                           uint32_t raw);

// Machine trap entry: mepc <- faulting_pc, mcause/mtval from the cause,
// MPIE <- MIE, MIE <- 0, pc <- mtvec base. Clears any WFI wait.
void trap_enter(ArchState& state, const TrapCause& cause, uint32_t faulting_pc);

// MRET: pc <- mepc, MIE <- MPIE, MPIE <- 1.
void trap_return(ArchState& state);

// Highest-priority enabled pending interrupt (external > software > timer),
// gated by mstatus.MIE.
std::optional<TrapCause> pending_interrupt(const ArchState& state);

}  // namespace nox
