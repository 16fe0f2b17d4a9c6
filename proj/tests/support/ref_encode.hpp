#pragma once

// Independent instruction encoder used as the oracle for the decoder and
// encoder under test. Bit layouts are written out longhand, one helper per
// format, straight from the base ISA encoding tables; nothing here may use
// nox::encode or nox::decode.

#include <cstdint>

namespace ref {

inline uint32_t r_type(uint32_t funct7, uint32_t rs2, uint32_t rs1,
                       uint32_t funct3, uint32_t rd, uint32_t opcode) {
  return (funct7 << 25) | (rs2 << 20) | (rs1 << 15) | (funct3 << 12) |
         (rd << 7) | opcode;
}

inline uint32_t i_type(int32_t imm, uint32_t rs1, uint32_t funct3, uint32_t rd,
                       uint32_t opcode) {
  return (static_cast<uint32_t>(imm & 0xFFF) << 20) | (rs1 << 15) |
         (funct3 << 12) | (rd << 7) | opcode;
}

inline uint32_t s_type(int32_t imm, uint32_t rs2, uint32_t rs1, uint32_t funct3,
                       uint32_t opcode) {
  const uint32_t u = static_cast<uint32_t>(imm);
  return (((u >> 5) & 0x7F) << 25) | (rs2 << 20) | (rs1 << 15) |
         (funct3 << 12) | ((u & 0x1F) << 7) | opcode;
}

inline uint32_t b_type(int32_t imm, uint32_t rs2, uint32_t rs1, uint32_t funct3,
                       uint32_t opcode) {
  const uint32_t u = static_cast<uint32_t>(imm);
  return (((u >> 12) & 1) << 31) | (((u >> 5) & 0x3F) << 25) | (rs2 << 20) |
         (rs1 << 15) | (funct3 << 12) | (((u >> 1) & 0xF) << 8) |
         (((u >> 11) & 1) << 7) | opcode;
}

inline uint32_t u_type(uint32_t imm31_12, uint32_t rd, uint32_t opcode) {
  return (imm31_12 << 12) | (rd << 7) | opcode;
}

inline uint32_t j_type(int32_t imm, uint32_t rd, uint32_t opcode) {
  const uint32_t u = static_cast<uint32_t>(imm);
  return (((u >> 20) & 1) << 31) | (((u >> 1) & 0x3FF) << 21) |
         (((u >> 11) & 1) << 20) | (((u >> 12) & 0xFF) << 12) | (rd << 7) |
         opcode;
}

// --- named helpers ---------------------------------------------------------

inline uint32_t lui(uint32_t rd, uint32_t imm20) { return u_type(imm20, rd, 0b0110111); }
inline uint32_t auipc(uint32_t rd, uint32_t imm20) { return u_type(imm20, rd, 0b0010111); }
inline uint32_t jal(uint32_t rd, int32_t off) { return j_type(off, rd, 0b1101111); }
inline uint32_t jalr(uint32_t rd, uint32_t rs1, int32_t off) { return i_type(off, rs1, 0b000, rd, 0b1100111); }

inline uint32_t beq(uint32_t rs1, uint32_t rs2, int32_t off) { return b_type(off, rs2, rs1, 0b000, 0b1100011); }
inline uint32_t bne(uint32_t rs1, uint32_t rs2, int32_t off) { return b_type(off, rs2, rs1, 0b001, 0b1100011); }
inline uint32_t blt(uint32_t rs1, uint32_t rs2, int32_t off) { return b_type(off, rs2, rs1, 0b100, 0b1100011); }
inline uint32_t bge(uint32_t rs1, uint32_t rs2, int32_t off) { return b_type(off, rs2, rs1, 0b101, 0b1100011); }
inline uint32_t bltu(uint32_t rs1, uint32_t rs2, int32_t off) { return b_type(off, rs2, rs1, 0b110, 0b1100011); }
inline uint32_t bgeu(uint32_t rs1, uint32_t rs2, int32_t off) { return b_type(off, rs2, rs1, 0b111, 0b1100011); }

inline uint32_t lb(uint32_t rd, uint32_t rs1, int32_t off) { return i_type(off, rs1, 0b000, rd, 0b0000011); }
inline uint32_t lh(uint32_t rd, uint32_t rs1, int32_t off) { return i_type(off, rs1, 0b001, rd, 0b0000011); }
inline uint32_t lw(uint32_t rd, uint32_t rs1, int32_t off) { return i_type(off, rs1, 0b010, rd, 0b0000011); }
inline uint32_t lbu(uint32_t rd, uint32_t rs1, int32_t off) { return i_type(off, rs1, 0b100, rd, 0b0000011); }
inline uint32_t lhu(uint32_t rd, uint32_t rs1, int32_t off) { return i_type(off, rs1, 0b101, rd, 0b0000011); }

inline uint32_t sb(uint32_t rs2, uint32_t rs1, int32_t off) { return s_type(off, rs2, rs1, 0b000, 0b0100011); }
inline uint32_t sh(uint32_t rs2, uint32_t rs1, int32_t off) { return s_type(off, rs2, rs1, 0b001, 0b0100011); }
inline uint32_t sw(uint32_t rs2, uint32_t rs1, int32_t off) { return s_type(off, rs2, rs1, 0b010, 0b0100011); }

inline uint32_t addi(uint32_t rd, uint32_t rs1, int32_t imm) { return i_type(imm, rs1, 0b000, rd, 0b0010011); }
inline uint32_t slti(uint32_t rd, uint32_t rs1, int32_t imm) { return i_type(imm, rs1, 0b010, rd, 0b0010011); }
inline uint32_t sltiu(uint32_t rd, uint32_t rs1, int32_t imm) { return i_type(imm, rs1, 0b011, rd, 0b0010011); }
inline uint32_t xori(uint32_t rd, uint32_t rs1, int32_t imm) { return i_type(imm, rs1, 0b100, rd, 0b0010011); }
inline uint32_t ori(uint32_t rd, uint32_t rs1, int32_t imm) { return i_type(imm, rs1, 0b110, rd, 0b0010011); }
inline uint32_t andi(uint32_t rd, uint32_t rs1, int32_t imm) { return i_type(imm, rs1, 0b111, rd, 0b0010011); }
inline uint32_t slli(uint32_t rd, uint32_t rs1, uint32_t sh) { return r_type(0b0000000, sh, rs1, 0b001, rd, 0b0010011); }
inline uint32_t srli(uint32_t rd, uint32_t rs1, uint32_t sh) { return r_type(0b0000000, sh, rs1, 0b101, rd, 0b0010011); }
inline uint32_t srai(uint32_t rd, uint32_t rs1, uint32_t sh) { return r_type(0b0100000, sh, rs1, 0b101, rd, 0b0010011); }

inline uint32_t add(uint32_t rd, uint32_t rs1, uint32_t rs2) { return r_type(0b0000000, rs2, rs1, 0b000, rd, 0b0110011); }
inline uint32_t sub(uint32_t rd, uint32_t rs1, uint32_t rs2) { return r_type(0b0100000, rs2, rs1, 0b000, rd, 0b0110011); }
inline uint32_t sll(uint32_t rd, uint32_t rs1, uint32_t rs2) { return r_type(0b0000000, rs2, rs1, 0b001, rd, 0b0110011); }
inline uint32_t slt(uint32_t rd, uint32_t rs1, uint32_t rs2) { return r_type(0b0000000, rs2, rs1, 0b010, rd, 0b0110011); }
inline uint32_t sltu(uint32_t rd, uint32_t rs1, uint32_t rs2) { return r_type(0b0000000, rs2, rs1, 0b011, rd, 0b0110011); }
inline uint32_t xor_(uint32_t rd, uint32_t rs1, uint32_t rs2) { return r_type(0b0000000, rs2, rs1, 0b100, rd, 0b0110011); }
inline uint32_t srl(uint32_t rd, uint32_t rs1, uint32_t rs2) { return r_type(0b0000000, rs2, rs1, 0b101, rd, 0b0110011); }
inline uint32_t sra(uint32_t rd, uint32_t rs1, uint32_t rs2) { return r_type(0b0100000, rs2, rs1, 0b101, rd, 0b0110011); }
inline uint32_t or_(uint32_t rd, uint32_t rs1, uint32_t rs2) { return r_type(0b0000000, rs2, rs1, 0b110, rd, 0b0110011); }
inline uint32_t and_(uint32_t rd, uint32_t rs1, uint32_t rs2) { return r_type(0b0000000, rs2, rs1, 0b111, rd, 0b0110011); }

inline uint32_t fence(uint32_t rd, uint32_t rs1, int32_t imm) { return i_type(imm, rs1, 0b000, rd, 0b0001111); }
inline uint32_t fence_i(uint32_t rd, uint32_t rs1, int32_t imm) { return i_type(imm, rs1, 0b001, rd, 0b0001111); }
inline uint32_t ecall() { return 0x00000073; }
inline uint32_t ebreak() { return 0x00100073; }
inline uint32_t mret() { return 0x30200073; }
inline uint32_t wfi() { return 0x10500073; }

inline uint32_t csrrw(uint32_t rd, uint32_t csr, uint32_t rs1) { return i_type(static_cast<int32_t>(csr), rs1, 0b001, rd, 0b1110011); }
inline uint32_t csrrs(uint32_t rd, uint32_t csr, uint32_t rs1) { return i_type(static_cast<int32_t>(csr), rs1, 0b010, rd, 0b1110011); }
inline uint32_t csrrc(uint32_t rd, uint32_t csr, uint32_t rs1) { return i_type(static_cast<int32_t>(csr), rs1, 0b011, rd, 0b1110011); }
inline uint32_t csrrwi(uint32_t rd, uint32_t csr, uint32_t zimm) { return i_type(static_cast<int32_t>(csr), zimm, 0b101, rd, 0b1110011); }
inline uint32_t csrrsi(uint32_t rd, uint32_t csr, uint32_t zimm) { return i_type(static_cast<int32_t>(csr), zimm, 0b110, rd, 0b1110011); }
inline uint32_t csrrci(uint32_t rd, uint32_t csr, uint32_t zimm) { return i_type(static_cast<int32_t>(csr), zimm, 0b111, rd, 0b1110011); }

}  // namespace ref
