#include "nox/pipeline.hpp"

#include "nox/lsu.hpp"
#include "nox/ref_iss.hpp"

namespace nox {

NoxCore::NoxCore(const CoreConfig& cfg, Bus& bus) : cfg_(cfg), bus_(bus) {
  reset();
}

void NoxCore::reset() {
  arch_ = ArchState{};
  arch_.pc = cfg_.reset_pc;
  fifo_.clear();
  fetch_pc_ = cfg_.reset_pc;
  ifetch_discard_ = false;
  dec_ = DecSlot{};
  ex_ = ExSlot{};
  s4_ = S4Slot{};
  redirect_pending_ = false;
  redirect_from_s4_ = false;
  wb_tap_.reset();
  pending_reg_write_.reset();
  delivered_since_reset_ = false;
  delivered_since_redirect_ = true;
  wfi_gated_ = false;
  fetch_fault_halt_ = false;
  cycle_ = 0;
  events_.clear();
  st_ = StatsReport{};
}

void NoxCore::refresh_mip() {
  uint32_t mip = arch_.csrs.mip & ~(kIntTimer | kIntSoftware);
  if (bus_.timer_pending()) mip |= kIntTimer;
  if (bus_.software_pending()) mip |= kIntSoftware;
  arch_.csrs.mip = mip;
}

void NoxCore::charge_bubble(BubbleReason r) {
  switch (r) {
    case BubbleReason::Fill: ++st_.fill_cycles; break;
    case BubbleReason::FetchWait: ++st_.stall_cycles_fetch; break;
    case BubbleReason::Flush: ++st_.flush_bubble_cycles; break;
    case BubbleReason::WfiWait: ++st_.wfi_wait_cycles; break;
    case BubbleReason::CsrHold: ++st_.csr_hold_cycles; break;
    case BubbleReason::IntrDrain: ++st_.intr_drain_cycles; break;
  }
}

void NoxCore::redirect(uint32_t target, RedirectReason) {
  redirect_pending_ = true;
  redirect_target_ = target;
  ++st_.flush_count;
}

void NoxCore::retire(const S4Op& op,
                     std::optional<std::pair<uint8_t, uint32_t>> wb,
                     bool suppress_instret) {
  RetireEvent e;
  e.cycle = cycle_;
  e.pc = op.pc;
  e.raw = op.raw;
  e.instr = op.instr;
  e.illegal = op.illegal;
  if (wb && wb->first != 0) {
    e.writeback = wb;
    pending_reg_write_ = wb;
    wb_tap_ = wb;
    wb_tap_is_load_ = op.is_mem && !op.mem_write;
  }
  ++st_.retire_slot_cycles;
  ++st_.instret;
  if (!suppress_instret) ++arch_.csrs.minstret;
  events_.push_back(e);
}

void NoxCore::retire_trap(const S4Op& op, const TrapCause& cause) {
  RetireEvent e;
  e.cycle = cycle_;
  e.pc = op.pc;
  e.raw = op.raw;
  e.instr = op.instr;
  e.illegal = op.illegal;
  e.trap = cause;
  ++st_.retire_slot_cycles;
  events_.push_back(e);
  trap_enter(arch_, cause, op.pc);
  redirect(arch_.pc, RedirectReason::Trap);
  redirect_from_s4_ = true;
}

// ---------------------------------------------------------------------------
// Stage 4: the LSU and Memory & Writeback units share this slot. Stores finish
// when their last bus response arrives; loads additionally write back. All
// traps are taken here, in retirement order.
void NoxCore::stage4() {
  if (!s4_.valid) {
    charge_bubble(s4_.bubble);
    return;
  }
  S4Op& op = s4_.op;

  if (op.trap) {
    retire_trap(op, *op.trap);
    s4_.valid = false;
    return;
  }

  if (op.is_mem) {
    if (op.pieces.empty()) {
      op.pieces = split_access(op.mem_addr, op.mem_size);
      if (op.pieces.size() > 1) ++st_.split_accesses;
    }
    if (!op.piece_issued) {
      const AccessPiece& p = op.pieces[op.piece_idx];
      BusTransaction txn;
      txn.address = p.address;
      txn.size = p.size;
      txn.is_write = op.mem_write;
      txn.wdata = op.mem_wdata >> (8 * p.byte_offset);
      txn.port = BusPortId::Data;
      if (bus_.issue(txn)) op.piece_issued = true;
    }
    if (op.piece_issued) {
      if (auto resp = bus_.take_response(BusPortId::Data)) {
        const AccessPiece& p = op.pieces[op.piece_idx];
        if (resp->status != BusStatus::Okay) {
          retire_trap(op, TrapCause::exception(op.mem_write
                                                   ? ExcCause::StoreAccessFault
                                                   : ExcCause::LoadAccessFault,
                                               p.address));
          s4_.valid = false;
          return;
        }
        if (!op.mem_write) {
          const uint32_t mask = 0xFFFFFFFFu >> (8 * (4 - p.size));
          op.mem_value |= (resp->rdata & mask) << (8 * p.byte_offset);
        }
        ++op.piece_idx;
        op.piece_issued = false;
        if (op.piece_idx == op.pieces.size()) {
          if (op.mem_write) {
            retire(op, std::nullopt, false);
          } else {
            retire(op, {{op.instr.rd, load_extend(op.instr.mnemonic, op.mem_value)}},
                   false);
          }
          s4_.valid = false;
          return;
        }
      }
    }
    ++st_.stall_cycles_lsu;  // in-flight data transaction holds the slot
    return;
  }

  if (op.is_csr) {
    const CsrAccessResult cr =
        csr_access(arch_, op.instr.mnemonic, op.instr.csr_addr, op.csr_operand,
                   op.csr_rs1_index, op.instr.rd, op.raw);
    if (!cr.ok) {
      retire_trap(op, cr.trap);
    } else {
      retire(op, {{op.instr.rd, cr.read_value}}, cr.wrote_minstret);
    }
    s4_.valid = false;
    return;
  }

  if (op.is_mret) {
    retire(op, std::nullopt, false);
    trap_return(arch_);
    redirect(arch_.pc, RedirectReason::Mret);
    redirect_from_s4_ = true;
    s4_.valid = false;
    return;
  }

  if (op.is_fencei) {
    // Prefetched words may predate stores to the instruction stream; restart
    // the front end at the next pc.
    retire(op, std::nullopt, false);
    redirect(op.pc + 4, RedirectReason::FenceI);
    redirect_from_s4_ = true;
    s4_.valid = false;
    return;
  }

  retire(op, op.wb_value ? std::optional<std::pair<uint8_t, uint32_t>>(
                               {op.instr.rd, *op.wb_value})
                         : std::nullopt,
         false);
  s4_.valid = false;
}

uint32_t NoxCore::resolve_operand(uint8_t rs, int which) {
  last_src_[which] = BypassSource::RegFile;
  if (rs == 0) return 0;
  if (!bypass_fault_ && wb_tap_ && wb_tap_->first == rs) {
    last_src_[which] =
        wb_tap_is_load_ ? BypassSource::LsuData : BypassSource::Writeback;
    return wb_tap_->second;
  }
  return arch_.regs.read(rs);
}

// ---------------------------------------------------------------------------
// Execute: operands are resolved through the bypass network the cycle the
// instruction advances into stage 4, so a value produced by the instruction
// retiring this very cycle (including fresh lsu_rd_data) is picked up without
// a stall.
void NoxCore::execute() {
  if (redirect_from_s4_) {
    ex_.valid = false;
    s4_.bubble = BubbleReason::Flush;
    return;
  }
  if (s4_.valid) return;  // back-pressure from the LSU slot

  if (!ex_.valid) {
    s4_.bubble = ex_.bubble;
    return;
  }

  S4Op op;
  op.pc = ex_.pc;
  op.raw = ex_.entry.word;
  const DecodeResult& dr = ex_.dec;

  if (!dr.legal) {
    op.illegal = true;
    op.trap = TrapCause::exception(ExcCause::IllegalInstruction, op.raw);
  } else {
    const DecodedInstruction& in = dr.instr;
    op.instr = in;
    const uint32_t rs1v = resolve_operand(in.rs1, 0);
    const uint32_t rs2v = resolve_operand(in.rs2, 1);
    const uint32_t imm = static_cast<uint32_t>(in.imm);

    auto control_to = [&](uint32_t target, RedirectReason why) {
      if (target & 3) {
        op.trap = TrapCause::exception(ExcCause::InstrAddrMisaligned, target);
        op.wb_value.reset();
      } else {
        redirect(target, why);
      }
    };

    switch (in.mnemonic) {
      case Mnemonic::Lui: op.wb_value = imm; break;
      case Mnemonic::Auipc: op.wb_value = op.pc + imm; break;
      case Mnemonic::Jal:
        op.wb_value = op.pc + 4;
        control_to(op.pc + imm, RedirectReason::Jump);
        break;
      case Mnemonic::Jalr:
        op.wb_value = op.pc + 4;
        control_to((rs1v + imm) & ~1u, RedirectReason::Jump);
        break;
      case Mnemonic::Beq:
      case Mnemonic::Bne:
      case Mnemonic::Blt:
      case Mnemonic::Bge:
      case Mnemonic::Bltu:
      case Mnemonic::Bgeu: {
        bool taken = false;
        switch (in.mnemonic) {
          case Mnemonic::Beq: taken = rs1v == rs2v; break;
          case Mnemonic::Bne: taken = rs1v != rs2v; break;
          case Mnemonic::Blt: taken = static_cast<int32_t>(rs1v) < static_cast<int32_t>(rs2v); break;
          case Mnemonic::Bge: taken = static_cast<int32_t>(rs1v) >= static_cast<int32_t>(rs2v); break;
          case Mnemonic::Bltu: taken = rs1v < rs2v; break;
          default: taken = rs1v >= rs2v; break;
        }
        if (taken) control_to(op.pc + imm, RedirectReason::Branch);
        break;
      }
      case Mnemonic::Lb:
      case Mnemonic::Lh:
      case Mnemonic::Lw:
      case Mnemonic::Lbu:
      case Mnemonic::Lhu:
      case Mnemonic::Sb:
      case Mnemonic::Sh:
      case Mnemonic::Sw: {
        const uint32_t addr = rs1v + imm;
        if (auto t = misaligned_check(in.mnemonic, addr, cfg_.misaligned_trap)) {
          op.trap = *t;
        } else {
          op.is_mem = true;
          op.mem_write = is_store(in.mnemonic);
          op.mem_addr = addr;
          op.mem_wdata = rs2v;
          op.mem_size = mem_access_size(in.mnemonic);
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
        op.wb_value = alu_eval(in.mnemonic, rs1v, imm);
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
        op.wb_value = alu_eval(in.mnemonic, rs1v, rs2v);
        break;
      case Mnemonic::Fence:
        break;
      case Mnemonic::FenceI:
        op.is_fencei = true;
        break;
      case Mnemonic::Ecall:
        op.trap = TrapCause::exception(ExcCause::EcallFromM);
        break;
      case Mnemonic::Ebreak:
        op.trap = TrapCause::exception(ExcCause::Breakpoint);
        break;
      case Mnemonic::Csrrw:
      case Mnemonic::Csrrs:
      case Mnemonic::Csrrc:
      case Mnemonic::Csrrwi:
      case Mnemonic::Csrrsi:
      case Mnemonic::Csrrci:
        op.is_csr = true;
        if (is_csr_imm(in.mnemonic)) {
          op.csr_operand = imm;
          op.csr_rs1_index = static_cast<uint8_t>(in.imm);
        } else {
          op.csr_operand = rs1v;
          op.csr_rs1_index = in.rs1;
        }
        break;
      case Mnemonic::Mret:
        op.is_mret = true;
        break;
      case Mnemonic::Wfi:
        break;  // the Decode gate already released it
    }
  }

  s4_.valid = true;
  s4_.op = std::move(op);
  ex_.valid = false;
}

// ---------------------------------------------------------------------------
// Decode: reads the FIFO-fed slot, applies the WFI gate, takes interrupts at
// instruction boundaries, serializes behind in-flight CSR writes and hands
// decoded work to Execute.
void NoxCore::decode_stage() {
  if (redirect_pending_) {
    dec_.valid = false;
    wfi_gated_ = false;
    if (!ex_.valid) ex_.bubble = BubbleReason::Flush;
    return;
  }

  if (!dec_.valid) {
    if (!ex_.valid) {
      ex_.bubble = !delivered_since_reset_ ? BubbleReason::Fill
                   : !delivered_since_redirect_ ? BubbleReason::Flush
                                                : BubbleReason::FetchWait;
    }
    return;
  }

  const DecodeResult dr =
      dec_.entry.fault ? DecodeResult{} : decode(dec_.entry.word);
  const bool is_wfi =
      !dec_.entry.fault && dr.legal && dr.instr.mnemonic == Mnemonic::Wfi;

  if (is_wfi && (arch_.csrs.mip & arch_.csrs.mie) == 0) {
    wfi_gated_ = true;
    if (!ex_.valid) ex_.bubble = BubbleReason::WfiWait;
    return;
  }
  wfi_gated_ = false;

  // The oldest un-issued instruction is the interrupt target; older ones in
  // Execute/stage 4 drain first so the trap is precise. A waking WFI issues
  // before any interrupt is taken.
  if (!is_wfi) {
    if (auto irq = pending_interrupt(arch_)) {
      if (!ex_.valid && !s4_.valid) {
        trap_enter(arch_, *irq, dec_.entry.pc);
        redirect(arch_.pc, RedirectReason::Interrupt);
        dec_.valid = false;
        ex_.bubble = BubbleReason::Flush;
        return;
      }
      if (!ex_.valid) ex_.bubble = BubbleReason::IntrDrain;
      return;
    }
  }

  if (dec_.entry.fault) {
    if (!ex_.valid && !s4_.valid) {
      fetch_fault_halt_ = true;
      fetch_fault_pc_ = dec_.entry.pc;
    }
    if (!ex_.valid) ex_.bubble = BubbleReason::FetchWait;
    return;
  }

  const bool ex_serializes =
      ex_.valid && ex_.dec.legal &&
      (is_zicsr(ex_.dec.instr.mnemonic) || ex_.dec.instr.mnemonic == Mnemonic::Mret);
  const bool s4_serializes = s4_.valid && (s4_.op.is_csr || s4_.op.is_mret);
  if (ex_serializes || s4_serializes) {
    if (!ex_.valid) ex_.bubble = BubbleReason::CsrHold;
    return;
  }

  if (ex_.valid) return;  // Execute still occupied

  ex_.valid = true;
  ex_.pc = dec_.entry.pc;
  ex_.entry = dec_.entry;
  ex_.dec = dr;
  dec_.valid = false;
}

// ---------------------------------------------------------------------------
// Fetch: keeps the level-0 FIFO fed whenever the instruction port is ready,
// with a combinational path from a fresh response into Decode.
void NoxCore::fetch_stage() {
  if (redirect_pending_) {
    fifo_.clear();
    fetch_pc_ = redirect_target_;
    if (!bus_.ready(BusPortId::Instruction)) ifetch_discard_ = true;
    delivered_since_redirect_ = false;
    return;
  }

  if (ifetch_discard_) {
    if (bus_.discard_response(BusPortId::Instruction)) ifetch_discard_ = false;
  }

  bool consumed = false;
  auto try_consume = [&] {
    if (auto r = bus_.take_response(BusPortId::Instruction)) {
      fifo_.push_back({ifetch_pc_, r->rdata, r->status != BusStatus::Okay});
      consumed = true;
    }
  };

  if (!ifetch_discard_) {
    try_consume();
    if (bus_.ready(BusPortId::Instruction) && fifo_.size() < cfg_.fifo_depth) {
      BusTransaction txn;
      txn.address = fetch_pc_;
      txn.size = 4;
      txn.port = BusPortId::Instruction;
      if (bus_.issue(txn)) {
        ifetch_pc_ = fetch_pc_;
        fetch_pc_ += 4;
      }
    }
    if (!consumed) try_consume();  // latency-0 response of this cycle's issue
  }

  if (!dec_.valid && !fifo_.empty()) {
    dec_.valid = true;
    dec_.entry = fifo_.front();
    fifo_.pop_front();
    delivered_since_reset_ = true;
    delivered_since_redirect_ = true;
  }
}

const std::vector<RetireEvent>& NoxCore::tick() {
  events_.clear();
  ++cycle_;
  bus_.advance_cycle();
  refresh_mip();
  ++arch_.csrs.mcycle;  // a CSR write retiring this cycle overrides

  redirect_pending_ = false;
  redirect_from_s4_ = false;
  wb_tap_.reset();
  pending_reg_write_.reset();

  stage4();
  execute();
  decode_stage();
  fetch_stage();

  if (pending_reg_write_)
    arch_.regs.write(pending_reg_write_->first, pending_reg_write_->second);
  st_.fifo_occupancy_sum += fifo_.size();
  return events_;
}

StatsReport NoxCore::stats() const {
  StatsReport s = st_;
  s.cycles = cycle_;
  return s;
}

}  // namespace nox
