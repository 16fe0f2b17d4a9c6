#include "nox/arch_state.hpp"

namespace nox {

namespace {

// Writable-bit masks. Absent entries are handled explicitly.
constexpr uint32_t kMstatusWmask = kMstatusMie | kMstatusMpie;
constexpr uint32_t kMieWmask = kIntSoftware | kIntTimer | kIntExternal;

bool csr_read(const CsrFile& c, uint16_t addr, uint32_t& out) {
  switch (addr) {
    case csr::kMstatus: out = c.mstatus; return true;
    case csr::kMisa: out = CsrFile::kMisaValue; return true;
    case csr::kMie: out = c.mie; return true;
    case csr::kMtvec: out = c.mtvec; return true;
    case csr::kMscratch: out = c.mscratch; return true;
    case csr::kMepc: out = c.mepc; return true;
    case csr::kMcause: out = c.mcause; return true;
    case csr::kMtval: out = c.mtval; return true;
    case csr::kMip: out = c.mip; return true;
    case csr::kMcycle: out = static_cast<uint32_t>(c.mcycle); return true;
    case csr::kMcycleh: out = static_cast<uint32_t>(c.mcycle >> 32); return true;
    case csr::kMinstret: out = static_cast<uint32_t>(c.minstret); return true;
    case csr::kMinstreth: out = static_cast<uint32_t>(c.minstret >> 32); return true;
    case csr::kMhartid: out = CsrFile::kMhartidValue; return true;
    default: return false;
  }
}

// Read-only whether by address convention (top two bits 11) or by decision
// (misa is hardwired).
bool csr_read_only(uint16_t addr) {
  return (addr >> 10) == 3 || addr == csr::kMisa;
}

void csr_write(CsrFile& c, uint16_t addr, uint32_t v, CsrAccessResult& r) {
  switch (addr) {
    case csr::kMstatus:
      c.mstatus = (v & kMstatusWmask) | kMstatusMpp;
      break;
    case csr::kMie: c.mie = v & kMieWmask; break;
    case csr::kMip: break;  // pending bits follow the sources, not CSR writes
    case csr::kMtvec: c.mtvec = v & ~3u; break;  // direct mode only
    case csr::kMscratch: c.mscratch = v; break;
    case csr::kMepc: c.mepc = v & ~3u; break;
    case csr::kMcause: c.mcause = v; break;
    case csr::kMtval: c.mtval = v; break;
    case csr::kMcycle:
      c.mcycle = (c.mcycle & 0xFFFFFFFF00000000ull) | v;
      r.wrote_mcycle = true;
      break;
    case csr::kMcycleh:
      c.mcycle = (c.mcycle & 0xFFFFFFFFull) | (static_cast<uint64_t>(v) << 32);
      r.wrote_mcycle = true;
      break;
    case csr::kMinstret:
      c.minstret = (c.minstret & 0xFFFFFFFF00000000ull) | v;
      r.wrote_minstret = true;
      break;
    case csr::kMinstreth:
      c.minstret = (c.minstret & 0xFFFFFFFFull) | (static_cast<uint64_t>(v) << 32);
      r.wrote_minstret = true;
      break;
    default: break;
  }
}

}  // namespace

bool CsrFile::implemented(uint16_t addr) const {
  uint32_t dummy;
  return csr_read(*this, addr, dummy);
}

CsrAccessResult csr_access(ArchState& state, Mnemonic op, uint16_t csr_addr,
                           uint32_t operand, uint8_t rs1_index, uint8_t rd,
                           uint32_t raw) {
  CsrAccessResult r;
  uint32_t old = 0;
  if (!csr_read(state.csrs, csr_addr, old)) {
    r.trap = TrapCause::exception(ExcCause::IllegalInstruction, raw);
    return r;
  }

  bool do_write = true;
  uint32_t new_value = 0;
  switch (op) {
    case Mnemonic::Csrrw:
    case Mnemonic::Csrrwi:
      new_value = operand;
      // rd=x0 suppresses the read side effect; the value is discarded anyway.
      if (rd == 0) old = 0;
      break;
    case Mnemonic::Csrrs:
    case Mnemonic::Csrrsi:
      new_value = old | operand;
      do_write = rs1_index != 0;
      break;
    case Mnemonic::Csrrc:
    case Mnemonic::Csrrci:
      new_value = old & ~operand;
      do_write = rs1_index != 0;
      break;
    default:
      r.trap = TrapCause::exception(ExcCause::IllegalInstruction, raw);
      return r;
  }

  if (do_write) {
    if (csr_read_only(csr_addr)) {
      r.trap = TrapCause::exception(ExcCause::IllegalInstruction, raw);
      return r;
    }
    csr_write(state.csrs, csr_addr, new_value, r);
  }
  r.ok = true;
  r.read_value = old;
  return r;
}

void trap_enter(ArchState& state, const TrapCause& cause, uint32_t faulting_pc) {
  CsrFile& c = state.csrs;
  c.mepc = faulting_pc & ~3u;
  c.mcause = cause.mcause_value();
  c.mtval = cause.tval;
  const bool mie = (c.mstatus & kMstatusMie) != 0;
  c.mstatus &= ~(kMstatusMie | kMstatusMpie);
  if (mie) c.mstatus |= kMstatusMpie;
  state.pc = c.mtvec & ~3u;
  state.waiting_for_interrupt = false;
}

void trap_return(ArchState& state) {
  CsrFile& c = state.csrs;
  const bool mpie = (c.mstatus & kMstatusMpie) != 0;
  c.mstatus &= ~kMstatusMie;
  if (mpie) c.mstatus |= kMstatusMie;
  c.mstatus |= kMstatusMpie;
  state.pc = c.mepc;
}

std::optional<TrapCause> pending_interrupt(const ArchState& state) {
  const CsrFile& c = state.csrs;
  if ((c.mstatus & kMstatusMie) == 0) return std::nullopt;
  const uint32_t pend = c.mip & c.mie;
  if (pend & kIntExternal) return TrapCause::interrupt(IntCause::MachineExternal);
  if (pend & kIntSoftware) return TrapCause::interrupt(IntCause::MachineSoftware);
  if (pend & kIntTimer) return TrapCause::interrupt(IntCause::MachineTimer);
  return std::nullopt;
}

}  // namespace nox
