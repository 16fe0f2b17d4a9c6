#include "nox/isa.hpp"

#include <array>
#include <cstdio>
#include <stdexcept>

namespace nox {

namespace {

constexpr uint32_t bits(uint32_t w, int hi, int lo) {
  return (w >> lo) & ((1u << (hi - lo + 1)) - 1);
}

constexpr int32_t sext(uint32_t v, int width) {
  const uint32_t m = 1u << (width - 1);
  return static_cast<int32_t>((v ^ m) - m);
}

constexpr uint32_t kOpcLui = 0x37, kOpcAuipc = 0x17, kOpcJal = 0x6F,
                   kOpcJalr = 0x67, kOpcBranch = 0x63, kOpcLoad = 0x03,
                   kOpcStore = 0x23, kOpcOpImm = 0x13, kOpcOp = 0x33,
                   kOpcMiscMem = 0x0F, kOpcSystem = 0x73;

int32_t imm_i(uint32_t w) { return sext(bits(w, 31, 20), 12); }
int32_t imm_s(uint32_t w) { return sext((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12); }
int32_t imm_b(uint32_t w) {
  return sext((bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) |
                  (bits(w, 30, 25) << 5) | (bits(w, 11, 8) << 1),
              13);
}
int32_t imm_u(uint32_t w) { return static_cast<int32_t>(w & 0xFFFFF000u); }
int32_t imm_j(uint32_t w) {
  return sext((bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) |
                  (bits(w, 20, 20) << 11) | (bits(w, 30, 21) << 1),
              21);
}

struct EncInfo {
  uint32_t opcode;
  uint32_t funct3;
  uint32_t funct7;  // also funct12 for SYSTEM non-CSR ops
};

const EncInfo& enc_info(Mnemonic m) {
  static const std::array<EncInfo, kMnemonicCount> table = [] {
    std::array<EncInfo, kMnemonicCount> t{};
    auto set = [&](Mnemonic mn, uint32_t opc, uint32_t f3 = 0, uint32_t f7 = 0) {
      t[static_cast<int>(mn)] = {opc, f3, f7};
    };
    set(Mnemonic::Lui, kOpcLui);
    set(Mnemonic::Auipc, kOpcAuipc);
    set(Mnemonic::Jal, kOpcJal);
    set(Mnemonic::Jalr, kOpcJalr, 0);
    set(Mnemonic::Beq, kOpcBranch, 0);
    set(Mnemonic::Bne, kOpcBranch, 1);
    set(Mnemonic::Blt, kOpcBranch, 4);
    set(Mnemonic::Bge, kOpcBranch, 5);
    set(Mnemonic::Bltu, kOpcBranch, 6);
    set(Mnemonic::Bgeu, kOpcBranch, 7);
    set(Mnemonic::Lb, kOpcLoad, 0);
    set(Mnemonic::Lh, kOpcLoad, 1);
    set(Mnemonic::Lw, kOpcLoad, 2);
    set(Mnemonic::Lbu, kOpcLoad, 4);
    set(Mnemonic::Lhu, kOpcLoad, 5);
    set(Mnemonic::Sb, kOpcStore, 0);
    set(Mnemonic::Sh, kOpcStore, 1);
    set(Mnemonic::Sw, kOpcStore, 2);
    set(Mnemonic::Addi, kOpcOpImm, 0);
    set(Mnemonic::Slti, kOpcOpImm, 2);
    set(Mnemonic::Sltiu, kOpcOpImm, 3);
    set(Mnemonic::Xori, kOpcOpImm, 4);
    set(Mnemonic::Ori, kOpcOpImm, 6);
    set(Mnemonic::Andi, kOpcOpImm, 7);
    set(Mnemonic::Slli, kOpcOpImm, 1, 0x00);
    set(Mnemonic::Srli, kOpcOpImm, 5, 0x00);
    set(Mnemonic::Srai, kOpcOpImm, 5, 0x20);
    set(Mnemonic::Add, kOpcOp, 0, 0x00);
    set(Mnemonic::Sub, kOpcOp, 0, 0x20);
    set(Mnemonic::Sll, kOpcOp, 1, 0x00);
    set(Mnemonic::Slt, kOpcOp, 2, 0x00);
    set(Mnemonic::Sltu, kOpcOp, 3, 0x00);
    set(Mnemonic::Xor, kOpcOp, 4, 0x00);
    set(Mnemonic::Srl, kOpcOp, 5, 0x00);
    set(Mnemonic::Sra, kOpcOp, 5, 0x20);
    set(Mnemonic::Or, kOpcOp, 6, 0x00);
    set(Mnemonic::And, kOpcOp, 7, 0x00);
    set(Mnemonic::Fence, kOpcMiscMem, 0);
    set(Mnemonic::FenceI, kOpcMiscMem, 1);
    set(Mnemonic::Ecall, kOpcSystem, 0, 0x000);
    set(Mnemonic::Ebreak, kOpcSystem, 0, 0x001);
    set(Mnemonic::Mret, kOpcSystem, 0, 0x302);
    set(Mnemonic::Wfi, kOpcSystem, 0, 0x105);
    set(Mnemonic::Csrrw, kOpcSystem, 1);
    set(Mnemonic::Csrrs, kOpcSystem, 2);
    set(Mnemonic::Csrrc, kOpcSystem, 3);
    set(Mnemonic::Csrrwi, kOpcSystem, 5);
    set(Mnemonic::Csrrsi, kOpcSystem, 6);
    set(Mnemonic::Csrrci, kOpcSystem, 7);
    return t;
  }();
  return table[static_cast<int>(m)];
}

DecodeResult legal(DecodedInstruction d) {
  DecodeResult r;
  r.legal = true;
  r.instr = d;
  return r;
}

DecodeResult illegal(uint32_t raw, IllegalReason why) {
  DecodeResult r;
  r.legal = false;
  r.fault = {raw, why};
  return r;
}

const char* kNames[kMnemonicCount] = {
    "lui",   "auipc", "jal",    "jalr",   "beq",    "bne",    "blt",
    "bge",   "bltu",  "bgeu",   "lb",     "lh",     "lw",     "lbu",
    "lhu",   "sb",    "sh",     "sw",     "addi",   "slti",   "sltiu",
    "xori",  "ori",   "andi",   "slli",   "srli",   "srai",   "add",
    "sub",   "sll",   "slt",    "sltu",   "xor",    "srl",    "sra",
    "or",    "and",   "fence",  "ecall",  "ebreak", "fence.i", "csrrw",
    "csrrs", "csrrc", "csrrwi", "csrrsi", "csrrci", "mret",   "wfi",
};

}  // namespace

const char* mnemonic_name(Mnemonic m) { return kNames[static_cast<int>(m)]; }

bool is_load(Mnemonic m) { return m >= Mnemonic::Lb && m <= Mnemonic::Lhu; }
bool is_store(Mnemonic m) { return m >= Mnemonic::Sb && m <= Mnemonic::Sw; }
bool is_branch(Mnemonic m) { return m >= Mnemonic::Beq && m <= Mnemonic::Bgeu; }
bool is_zicsr(Mnemonic m) { return m >= Mnemonic::Csrrw && m <= Mnemonic::Csrrci; }
bool is_csr_imm(Mnemonic m) { return m >= Mnemonic::Csrrwi && m <= Mnemonic::Csrrci; }

bool is_base_rv32i(Mnemonic m) {
  return m <= Mnemonic::Ebreak;  // Lui .. Ebreak, 40 mnemonics
}

bool writes_rd(Mnemonic m) {
  if (is_store(m) || is_branch(m)) return false;
  switch (m) {
    case Mnemonic::Fence:
    case Mnemonic::FenceI:
    case Mnemonic::Ecall:
    case Mnemonic::Ebreak:
    case Mnemonic::Mret:
    case Mnemonic::Wfi:
      return false;
    default:
      return true;
  }
}

DecodeResult decode(uint32_t w) {
  if ((w & 0x3) != 0x3) return illegal(w, IllegalReason::UnknownOpcode);

  DecodedInstruction d;
  d.raw = w;
  const uint32_t opcode = bits(w, 6, 0);
  const uint32_t rd = bits(w, 11, 7);
  const uint32_t funct3 = bits(w, 14, 12);
  const uint32_t rs1 = bits(w, 19, 15);
  const uint32_t rs2 = bits(w, 24, 20);
  const uint32_t funct7 = bits(w, 31, 25);

  switch (opcode) {
    case kOpcLui:
    case kOpcAuipc:
      d.mnemonic = opcode == kOpcLui ? Mnemonic::Lui : Mnemonic::Auipc;
      d.format = Format::U;
      d.rd = rd;
      d.imm = imm_u(w);
      return legal(d);

    case kOpcJal:
      d.mnemonic = Mnemonic::Jal;
      d.format = Format::J;
      d.rd = rd;
      d.imm = imm_j(w);
      return legal(d);

    case kOpcJalr:
      if (funct3 != 0) return illegal(w, IllegalReason::ReservedFunct);
      d.mnemonic = Mnemonic::Jalr;
      d.format = Format::I;
      d.rd = rd;
      d.rs1 = rs1;
      d.imm = imm_i(w);
      return legal(d);

    case kOpcBranch: {
      switch (funct3) {
        case 0: d.mnemonic = Mnemonic::Beq; break;
        case 1: d.mnemonic = Mnemonic::Bne; break;
        case 4: d.mnemonic = Mnemonic::Blt; break;
        case 5: d.mnemonic = Mnemonic::Bge; break;
        case 6: d.mnemonic = Mnemonic::Bltu; break;
        case 7: d.mnemonic = Mnemonic::Bgeu; break;
        default: return illegal(w, IllegalReason::ReservedFunct);
      }
      d.format = Format::B;
      d.rs1 = rs1;
      d.rs2 = rs2;
      d.imm = imm_b(w);
      return legal(d);
    }

    case kOpcLoad: {
      switch (funct3) {
        case 0: d.mnemonic = Mnemonic::Lb; break;
        case 1: d.mnemonic = Mnemonic::Lh; break;
        case 2: d.mnemonic = Mnemonic::Lw; break;
        case 4: d.mnemonic = Mnemonic::Lbu; break;
        case 5: d.mnemonic = Mnemonic::Lhu; break;
        default: return illegal(w, IllegalReason::ReservedFunct);
      }
      d.format = Format::I;
      d.rd = rd;
      d.rs1 = rs1;
      d.imm = imm_i(w);
      return legal(d);
    }

    case kOpcStore: {
      switch (funct3) {
        case 0: d.mnemonic = Mnemonic::Sb; break;
        case 1: d.mnemonic = Mnemonic::Sh; break;
        case 2: d.mnemonic = Mnemonic::Sw; break;
        default: return illegal(w, IllegalReason::ReservedFunct);
      }
      d.format = Format::S;
      d.rs1 = rs1;
      d.rs2 = rs2;
      d.imm = imm_s(w);
      return legal(d);
    }

    case kOpcOpImm: {
      d.format = Format::I;
      d.rd = rd;
      d.rs1 = rs1;
      switch (funct3) {
        case 0: d.mnemonic = Mnemonic::Addi; d.imm = imm_i(w); return legal(d);
        case 2: d.mnemonic = Mnemonic::Slti; d.imm = imm_i(w); return legal(d);
        case 3: d.mnemonic = Mnemonic::Sltiu; d.imm = imm_i(w); return legal(d);
        case 4: d.mnemonic = Mnemonic::Xori; d.imm = imm_i(w); return legal(d);
        case 6: d.mnemonic = Mnemonic::Ori; d.imm = imm_i(w); return legal(d);
        case 7: d.mnemonic = Mnemonic::Andi; d.imm = imm_i(w); return legal(d);
        case 1:
          if (funct7 & 1) return illegal(w, IllegalReason::BadShamt);
          if (funct7 != 0x00) return illegal(w, IllegalReason::ReservedFunct);
          d.mnemonic = Mnemonic::Slli;
          d.imm = static_cast<int32_t>(rs2);
          return legal(d);
        case 5:
          if (funct7 & 1) return illegal(w, IllegalReason::BadShamt);
          if (funct7 == 0x00) d.mnemonic = Mnemonic::Srli;
          else if (funct7 == 0x20) d.mnemonic = Mnemonic::Srai;
          else return illegal(w, IllegalReason::ReservedFunct);
          d.imm = static_cast<int32_t>(rs2);
          return legal(d);
        default: return illegal(w, IllegalReason::ReservedFunct);
      }
    }

    case kOpcOp: {
      if (funct7 != 0x00 && funct7 != 0x20)
        return illegal(w, IllegalReason::ReservedFunct);
      const bool alt = funct7 == 0x20;
      switch (funct3) {
        case 0: d.mnemonic = alt ? Mnemonic::Sub : Mnemonic::Add; break;
        case 5: d.mnemonic = alt ? Mnemonic::Sra : Mnemonic::Srl; break;
        case 1: d.mnemonic = Mnemonic::Sll; if (alt) return illegal(w, IllegalReason::ReservedFunct); break;
        case 2: d.mnemonic = Mnemonic::Slt; if (alt) return illegal(w, IllegalReason::ReservedFunct); break;
        case 3: d.mnemonic = Mnemonic::Sltu; if (alt) return illegal(w, IllegalReason::ReservedFunct); break;
        case 4: d.mnemonic = Mnemonic::Xor; if (alt) return illegal(w, IllegalReason::ReservedFunct); break;
        case 6: d.mnemonic = Mnemonic::Or; if (alt) return illegal(w, IllegalReason::ReservedFunct); break;
        case 7: d.mnemonic = Mnemonic::And; if (alt) return illegal(w, IllegalReason::ReservedFunct); break;
        default: return illegal(w, IllegalReason::ReservedFunct);
      }
      d.format = Format::R;
      d.rd = rd;
      d.rs1 = rs1;
      d.rs2 = rs2;
      return legal(d);
    }

    case kOpcMiscMem: {
      if (funct3 == 0) d.mnemonic = Mnemonic::Fence;
      else if (funct3 == 1) d.mnemonic = Mnemonic::FenceI;
      else return illegal(w, IllegalReason::ReservedFunct);
      d.format = Format::I;
      d.rd = rd;
      d.rs1 = rs1;
      d.imm = imm_i(w);
      return legal(d);
    }

    case kOpcSystem: {
      d.format = Format::System;
      if (funct3 == 0) {
        if (rd != 0 || rs1 != 0) return illegal(w, IllegalReason::ReservedFunct);
        switch (bits(w, 31, 20)) {
          case 0x000: d.mnemonic = Mnemonic::Ecall; break;
          case 0x001: d.mnemonic = Mnemonic::Ebreak; break;
          case 0x302: d.mnemonic = Mnemonic::Mret; break;
          case 0x105: d.mnemonic = Mnemonic::Wfi; break;
          default: return illegal(w, IllegalReason::ReservedFunct);
        }
        return legal(d);
      }
      if (funct3 == 4) return illegal(w, IllegalReason::ReservedFunct);
      switch (funct3) {
        case 1: d.mnemonic = Mnemonic::Csrrw; break;
        case 2: d.mnemonic = Mnemonic::Csrrs; break;
        case 3: d.mnemonic = Mnemonic::Csrrc; break;
        case 5: d.mnemonic = Mnemonic::Csrrwi; break;
        case 6: d.mnemonic = Mnemonic::Csrrsi; break;
        case 7: d.mnemonic = Mnemonic::Csrrci; break;
      }
      d.rd = rd;
      d.csr_addr = static_cast<uint16_t>(bits(w, 31, 20));
      if (is_csr_imm(d.mnemonic)) {
        d.imm = static_cast<int32_t>(rs1);  // zimm, zero-extended
      } else {
        d.rs1 = rs1;
      }
      return legal(d);
    }

    default:
      return illegal(w, IllegalReason::UnknownOpcode);
  }
}

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

void check_reg(uint8_t r, const char* what) { require(r <= 31, what); }

}  // namespace

uint32_t encode(const DecodedInstruction& d) {
  const EncInfo& e = enc_info(d.mnemonic);
  const uint32_t imm = static_cast<uint32_t>(d.imm);
  check_reg(d.rd, "rd out of range");
  check_reg(d.rs1, "rs1 out of range");
  check_reg(d.rs2, "rs2 out of range");

  switch (d.mnemonic) {
    case Mnemonic::Lui:
    case Mnemonic::Auipc:
      require((imm & 0xFFF) == 0, "U immediate has nonzero low bits");
      return imm | (d.rd << 7) | e.opcode;

    case Mnemonic::Jal: {
      require(d.imm >= -(1 << 20) && d.imm < (1 << 20), "J immediate out of range");
      require((imm & 1) == 0, "J immediate has bit 0 set");
      uint32_t w = e.opcode | (d.rd << 7);
      w |= bits(imm, 19, 12) << 12;
      w |= bits(imm, 11, 11) << 20;
      w |= bits(imm, 10, 1) << 21;
      w |= bits(imm, 20, 20) << 31;
      return w;
    }

    case Mnemonic::Beq:
    case Mnemonic::Bne:
    case Mnemonic::Blt:
    case Mnemonic::Bge:
    case Mnemonic::Bltu:
    case Mnemonic::Bgeu: {
      require(d.imm >= -(1 << 12) && d.imm < (1 << 12), "B immediate out of range");
      require((imm & 1) == 0, "B immediate has bit 0 set");
      uint32_t w = e.opcode | (e.funct3 << 12) | (d.rs1 << 15) | (d.rs2 << 20);
      w |= bits(imm, 11, 11) << 7;
      w |= bits(imm, 4, 1) << 8;
      w |= bits(imm, 10, 5) << 25;
      w |= bits(imm, 12, 12) << 31;
      return w;
    }

    case Mnemonic::Sb:
    case Mnemonic::Sh:
    case Mnemonic::Sw:
      require(d.imm >= -2048 && d.imm <= 2047, "S immediate out of range");
      return e.opcode | (bits(imm, 4, 0) << 7) | (e.funct3 << 12) |
             (d.rs1 << 15) | (d.rs2 << 20) | (bits(imm, 11, 5) << 25);

    case Mnemonic::Slli:
    case Mnemonic::Srli:
    case Mnemonic::Srai:
      require(d.imm >= 0 && d.imm < 32, "shamt out of range");
      return e.opcode | (d.rd << 7) | (e.funct3 << 12) | (d.rs1 << 15) |
             (imm << 20) | (e.funct7 << 25);

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
      return e.opcode | (d.rd << 7) | (e.funct3 << 12) | (d.rs1 << 15) |
             (d.rs2 << 20) | (e.funct7 << 25);

    case Mnemonic::Ecall:
    case Mnemonic::Ebreak:
    case Mnemonic::Mret:
    case Mnemonic::Wfi:
      return e.opcode | (e.funct7 << 20);

    case Mnemonic::Csrrw:
    case Mnemonic::Csrrs:
    case Mnemonic::Csrrc:
      require(d.csr_addr <= 0xFFF, "csr address out of range");
      return e.opcode | (d.rd << 7) | (e.funct3 << 12) | (d.rs1 << 15) |
             (static_cast<uint32_t>(d.csr_addr) << 20);

    case Mnemonic::Csrrwi:
    case Mnemonic::Csrrsi:
    case Mnemonic::Csrrci:
      require(d.csr_addr <= 0xFFF, "csr address out of range");
      require(d.imm >= 0 && d.imm < 32, "csr zimm out of range");
      return e.opcode | (d.rd << 7) | (e.funct3 << 12) | (imm << 15) |
             (static_cast<uint32_t>(d.csr_addr) << 20);

    default:
      // I-format: JALR, loads, ALU immediates, FENCE, FENCE.I
      require(d.imm >= -2048 && d.imm <= 2047, "I immediate out of range");
      return e.opcode | (d.rd << 7) | (e.funct3 << 12) | (d.rs1 << 15) |
             (bits(imm, 11, 0) << 20);
  }
}

std::string disassemble(const DecodedInstruction& d) {
  char buf[64];
  const char* n = mnemonic_name(d.mnemonic);
  switch (d.mnemonic) {
    case Mnemonic::Lui:
    case Mnemonic::Auipc:
      std::snprintf(buf, sizeof buf, "%s x%u, %d", n, d.rd, d.imm >> 12);
      break;
    case Mnemonic::Jal:
      std::snprintf(buf, sizeof buf, "%s x%u, %d", n, d.rd, d.imm);
      break;
    case Mnemonic::Jalr:
      std::snprintf(buf, sizeof buf, "%s x%u, x%u, %d", n, d.rd, d.rs1, d.imm);
      break;
    case Mnemonic::Beq:
    case Mnemonic::Bne:
    case Mnemonic::Blt:
    case Mnemonic::Bge:
    case Mnemonic::Bltu:
    case Mnemonic::Bgeu:
      std::snprintf(buf, sizeof buf, "%s x%u, x%u, %d", n, d.rs1, d.rs2, d.imm);
      break;
    case Mnemonic::Lb:
    case Mnemonic::Lh:
    case Mnemonic::Lw:
    case Mnemonic::Lbu:
    case Mnemonic::Lhu:
      std::snprintf(buf, sizeof buf, "%s x%u, %d(x%u)", n, d.rd, d.imm, d.rs1);
      break;
    case Mnemonic::Sb:
    case Mnemonic::Sh:
    case Mnemonic::Sw:
      std::snprintf(buf, sizeof buf, "%s x%u, %d(x%u)", n, d.rs2, d.imm, d.rs1);
      break;
    case Mnemonic::Fence:
    case Mnemonic::FenceI:
    case Mnemonic::Ecall:
    case Mnemonic::Ebreak:
    case Mnemonic::Mret:
    case Mnemonic::Wfi:
      std::snprintf(buf, sizeof buf, "%s", n);
      break;
    case Mnemonic::Csrrw:
    case Mnemonic::Csrrs:
    case Mnemonic::Csrrc:
      std::snprintf(buf, sizeof buf, "%s x%u, 0x%x, x%u", n, d.rd, d.csr_addr, d.rs1);
      break;
    case Mnemonic::Csrrwi:
    case Mnemonic::Csrrsi:
    case Mnemonic::Csrrci:
      std::snprintf(buf, sizeof buf, "%s x%u, 0x%x, %d", n, d.rd, d.csr_addr, d.imm);
      break;
    default:
      // R-type and remaining I-type ALU ops
      if (d.format == Format::R)
        std::snprintf(buf, sizeof buf, "%s x%u, x%u, x%u", n, d.rd, d.rs1, d.rs2);
      else
        std::snprintf(buf, sizeof buf, "%s x%u, x%u, %d", n, d.rd, d.rs1, d.imm);
      break;
  }
  return buf;
}

}  // namespace nox
