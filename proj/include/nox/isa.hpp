#pragma once

#include <cstdint>
#include <string>

namespace nox {

// Instruction identities: the RV32I base set, the Zicsr ops, FENCE.I and the
// machine-mode ops the core understands.
enum class Mnemonic : uint8_t {
  Lui, Auipc, Jal, Jalr,
  Beq, Bne, Blt, Bge, Bltu, Bgeu,
  Lb, Lh, Lw, Lbu, Lhu,
  Sb, Sh, Sw,
  Addi, Slti, Sltiu, Xori, Ori, Andi, Slli, Srli, Srai,
  Add, Sub, Sll, Slt, Sltu, Xor, Srl, Sra, Or, And,
  Fence, Ecall, Ebreak,
  FenceI,
  Csrrw, Csrrs, Csrrc, Csrrwi, Csrrsi, Csrrci,
  Mret, Wfi,
};

inline constexpr int kMnemonicCount = static_cast<int>(Mnemonic::Wfi) + 1;

enum class Format : uint8_t { R, I, S, B, U, J, System };

struct DecodedInstruction {
  Mnemonic mnemonic = Mnemonic::Addi;
  Format format = Format::I;
  uint8_t rd = 0;
  uint8_t rs1 = 0;
  uint8_t rs2 = 0;
  int32_t imm = 0;        // sign-extended per format; zimm for CSR immediate forms
  uint16_t csr_addr = 0;  // Zicsr only
  uint32_t raw = 0;

  bool operator==(const DecodedInstruction&) const = default;
};

enum class IllegalReason : uint8_t { UnknownOpcode, ReservedFunct, BadShamt };

struct IllegalEncoding {
  uint32_t raw = 0;
  IllegalReason reason = IllegalReason::UnknownOpcode;
};

struct DecodeResult {
  bool legal = false;
  DecodedInstruction instr{};   // valid iff legal
  IllegalEncoding fault{};      // valid iff !legal
};

// Total over all 2^32 words; illegality is a value, not an error.
DecodeResult decode(uint32_t word);

// Inverse of decode for legal field combinations. Throws std::invalid_argument
// on out-of-range fields (register index > 31, shamt >= 32, immediate does not
// fit the format, ...).
uint32_t encode(const DecodedInstruction& instr);

// Stable lower-case text, numeric register names, signed decimal immediates,
// hex CSR addresses. Loads/stores use offset(base) syntax.
std::string disassemble(const DecodedInstruction& instr);

const char* mnemonic_name(Mnemonic m);

bool is_load(Mnemonic m);
bool is_store(Mnemonic m);
bool is_branch(Mnemonic m);
bool is_zicsr(Mnemonic m);
// CSRRWI/CSRRSI/CSRRCI
bool is_csr_imm(Mnemonic m);
// True for the 40 mnemonics of the base integer set (Zicsr, FENCE.I, MRET and
// WFI excluded).
bool is_base_rv32i(Mnemonic m);
// True when the instruction architecturally writes rd (rd may still be x0).
bool writes_rd(Mnemonic m);

}  // namespace nox
