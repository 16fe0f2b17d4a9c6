#include "nox/ref_iss.hpp"

#include "nox/lsu.hpp"

namespace nox {

uint32_t alu_eval(Mnemonic m, uint32_t a, uint32_t b) {
  switch (m) {
    case Mnemonic::Add:
    case Mnemonic::Addi: return a + b;
    case Mnemonic::Sub: return a - b;
    case Mnemonic::Sll:
    case Mnemonic::Slli: return a << (b & 31);
    case Mnemonic::Slt:
    case Mnemonic::Slti:
      return static_cast<int32_t>(a) < static_cast<int32_t>(b) ? 1 : 0;
    case Mnemonic::Sltu:
    case Mnemonic::Sltiu: return a < b ? 1 : 0;
    case Mnemonic::Xor:
    case Mnemonic::Xori: return a ^ b;
    case Mnemonic::Srl:
    case Mnemonic::Srli: return a >> (b & 31);
    case Mnemonic::Sra:
    case Mnemonic::Srai:
      return static_cast<uint32_t>(static_cast<int32_t>(a) >> (b & 31));
    case Mnemonic::Or:
    case Mnemonic::Ori: return a | b;
    case Mnemonic::And:
    case Mnemonic::Andi: return a & b;
    default: return 0;
  }
}

namespace {

bool branch_taken(Mnemonic m, uint32_t a, uint32_t b) {
  switch (m) {
    case Mnemonic::Beq: return a == b;
    case Mnemonic::Bne: return a != b;
    case Mnemonic::Blt: return static_cast<int32_t>(a) < static_cast<int32_t>(b);
    case Mnemonic::Bge: return static_cast<int32_t>(a) >= static_cast<int32_t>(b);
    case Mnemonic::Bltu: return a < b;
    case Mnemonic::Bgeu: return a >= b;
    default: return false;
  }
}

}  // namespace

RefIss::RefIss(const CoreConfig& cfg, Bus& bus) : cfg_(cfg), bus_(bus) {
  reset();
}

void RefIss::reset() {
  state_ = ArchState{};
  state_.pc = cfg_.reset_pc;
  just_woke_ = false;
}

void RefIss::refresh_mip() {
  uint32_t mip = state_.csrs.mip & ~(kIntTimer | kIntSoftware);
  if (bus_.timer_pending()) mip |= kIntTimer;
  if (bus_.software_pending()) mip |= kIntSoftware;
  state_.csrs.mip = mip;
}

StepResult RefIss::step() {
  StepResult res;
  if (!external_time_) bus_.advance_cycle();
  refresh_mip();

  if (state_.waiting_for_interrupt) {
    // WFI wakes on any enabled pending interrupt, independent of mstatus.MIE.
    if ((state_.csrs.mip & state_.csrs.mie) == 0) {
      res.pc = state_.pc;
      res.next_pc = state_.pc;
      return res;  // idle poll
    }
    state_.waiting_for_interrupt = false;
    just_woke_ = true;  // complete the WFI before any interrupt is taken
  }

  if (!just_woke_) {
    if (auto irq = pending_interrupt(state_)) {
      trap_enter(state_, *irq, state_.pc);
    }
  }
  just_woke_ = false;

  const uint32_t pc = state_.pc;
  res.pc = pc;

  BusTransaction fetch;
  fetch.address = pc;
  fetch.size = 4;
  fetch.port = BusPortId::Instruction;
  const BusResponse fr = bus_.access(fetch);
  if (fr.status != BusStatus::Okay) {
    res.fetch_fault = true;
    res.next_pc = pc;
    return res;
  }
  const uint32_t raw = fr.rdata;
  res.raw = raw;
  res.retired = true;

  const DecodeResult dec = decode(raw);
  if (!dec.legal) {
    res.trap = TrapCause::exception(ExcCause::IllegalInstruction, raw);
    trap_enter(state_, *res.trap, pc);
    res.next_pc = state_.pc;
    return res;
  }
  const DecodedInstruction& in = dec.instr;
  res.instr = in;

  uint32_t next_pc = pc + 4;
  std::optional<std::pair<uint8_t, uint32_t>> wb;
  bool suppress_instret_inc = false;

  auto take_trap = [&](const TrapCause& t) {
    res.trap = t;
    trap_enter(state_, t, pc);
    next_pc = state_.pc;
  };

  const uint32_t rs1v = state_.regs.read(in.rs1);
  const uint32_t rs2v = state_.regs.read(in.rs2);

  switch (in.mnemonic) {
    case Mnemonic::Lui: wb = {in.rd, static_cast<uint32_t>(in.imm)}; break;
    case Mnemonic::Auipc: wb = {in.rd, pc + static_cast<uint32_t>(in.imm)}; break;
    case Mnemonic::Jal: {
      const uint32_t target = pc + static_cast<uint32_t>(in.imm);
      if (target & 3) {
        take_trap(TrapCause::exception(ExcCause::InstrAddrMisaligned, target));
      } else {
        wb = {in.rd, pc + 4};
        next_pc = target;
      }
      break;
    }
    case Mnemonic::Jalr: {
      const uint32_t target = (rs1v + static_cast<uint32_t>(in.imm)) & ~1u;
      if (target & 3) {
        take_trap(TrapCause::exception(ExcCause::InstrAddrMisaligned, target));
      } else {
        wb = {in.rd, pc + 4};
        next_pc = target;
      }
      break;
    }
    case Mnemonic::Beq:
    case Mnemonic::Bne:
    case Mnemonic::Blt:
    case Mnemonic::Bge:
    case Mnemonic::Bltu:
    case Mnemonic::Bgeu:
      if (branch_taken(in.mnemonic, rs1v, rs2v)) {
        const uint32_t target = pc + static_cast<uint32_t>(in.imm);
        if (target & 3)
          take_trap(TrapCause::exception(ExcCause::InstrAddrMisaligned, target));
        else
          next_pc = target;
      }
      break;
    case Mnemonic::Lb:
    case Mnemonic::Lh:
    case Mnemonic::Lw:
    case Mnemonic::Lbu:
    case Mnemonic::Lhu:
    case Mnemonic::Sb:
    case Mnemonic::Sh:
    case Mnemonic::Sw: {
      const uint32_t addr = rs1v + static_cast<uint32_t>(in.imm);
      const MemOutcome mo = immediate_mem_access(bus_, in.mnemonic, addr, rs2v,
                                                 cfg_.misaligned_trap);
      if (!mo.ok) {
        take_trap(mo.trap);
      } else {
        if (is_load(in.mnemonic)) wb = {in.rd, mo.value};
        res.mem_effect = MemEffect{addr, mem_access_size(in.mnemonic),
                                   is_store(in.mnemonic), mo.value};
      }
      break;
    }
    case Mnemonic::Addi:
    case Mnemonic::Slti:
    case Mnemonic::Sltiu:
    case Mnemonic::Xori:
    case Mnemonic::Ori:
    case Mnemonic::Andi:
    case Mnemonic::Slli:
    case Mnemonic::Srli:
    case Mnemonic::Srai:
      wb = {in.rd, alu_eval(in.mnemonic, rs1v, static_cast<uint32_t>(in.imm))};
      break;
    case Mnemonic::Add:
    case Mnemonic::Sub:
    case Mnemonic::Sll:
    case Mnemonic::Slt:
    case Mnemonic::Sltu:
    case Mnemonic::Xor:
    case Mnemonic::Srl:
    case Mnemonic::Sra:
    case Mnemonic::Or:
    case Mnemonic::And:
      wb = {in.rd, alu_eval(in.mnemonic, rs1v, rs2v)};
      break;
    case Mnemonic::Fence:
    case Mnemonic::FenceI:
      break;  // no caches, nothing to order
    case Mnemonic::Ecall:
      take_trap(TrapCause::exception(ExcCause::EcallFromM));
      break;
    case Mnemonic::Ebreak:
      take_trap(TrapCause::exception(ExcCause::Breakpoint));
      break;
    case Mnemonic::Csrrw:
    case Mnemonic::Csrrs:
    case Mnemonic::Csrrc:
    case Mnemonic::Csrrwi:
    case Mnemonic::Csrrsi:
    case Mnemonic::Csrrci: {
      const uint32_t operand =
          is_csr_imm(in.mnemonic) ? static_cast<uint32_t>(in.imm) : rs1v;
      const uint8_t rs1_index =
          is_csr_imm(in.mnemonic) ? static_cast<uint8_t>(in.imm) : in.rs1;
      const CsrAccessResult cr = csr_access(state_, in.mnemonic, in.csr_addr,
                                            operand, rs1_index, in.rd, raw);
      if (!cr.ok) {
        take_trap(cr.trap);
      } else {
        wb = {in.rd, cr.read_value};
        suppress_instret_inc = cr.wrote_minstret;
      }
      break;
    }
    case Mnemonic::Mret:
      trap_return(state_);
      next_pc = state_.pc;
      break;
    case Mnemonic::Wfi:
      if ((state_.csrs.mip & state_.csrs.mie) == 0) {
        state_.waiting_for_interrupt = true;
        res.retired = false;
        res.next_pc = pc;
        return res;
      }
      break;  // something already pending: completes immediately
  }

  if (!res.trap) {
    if (wb) {
      state_.regs.write(wb->first, wb->second);
      if (wb->first != 0) res.writeback = wb;
    }
    if (!suppress_instret_inc) ++state_.csrs.minstret;
  }
  state_.pc = next_pc;
  res.next_pc = next_pc;
  return res;
}

RunResult RefIss::run_until(const StopCondition& stop) {
  RunResult out;
  for (uint64_t steps = 0; steps < stop.max_steps; ++steps) {
    if (state_.waiting_for_interrupt &&
        (state_.csrs.mie & (kIntSoftware | kIntTimer | kIntExternal)) == 0) {
      out.outcome = RunOutcome::InfiniteWfi;
      return out;
    }
    const StepResult r = step();
    if (r.fetch_fault) {
      out.trace.push_back(r);
      out.outcome = RunOutcome::FetchFault;
      return out;
    }
    if (!r.retired) continue;
    out.trace.push_back(r);
    if (bus_.exit_code()) {
      out.outcome = RunOutcome::ExitWrite;
      return out;
    }
    const bool is_ecall = r.instr && r.instr->mnemonic == Mnemonic::Ecall;
    const bool is_ebreak = r.instr && r.instr->mnemonic == Mnemonic::Ebreak;
    switch (stop.kind) {
      case StopKind::Ecall:
        if (is_ecall) { out.outcome = RunOutcome::Stopped; return out; }
        break;
      case StopKind::Ebreak:
        if (is_ebreak) { out.outcome = RunOutcome::Stopped; return out; }
        break;
      case StopKind::PcEquals:
        if (r.next_pc == stop.pc_value) { out.outcome = RunOutcome::Stopped; return out; }
        break;
      case StopKind::MaxSteps:
        break;
    }
  }
  out.outcome = RunOutcome::MaxStepsReached;
  return out;
}

}  // namespace nox
