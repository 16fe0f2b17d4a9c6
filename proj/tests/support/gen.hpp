#pragma once

// Random legal-instruction generator for property tests.

#include <random>

#include "nox/isa.hpp"

namespace testgen {

inline nox::DecodedInstruction random_instruction(std::mt19937& rng) {
  using nox::DecodedInstruction;
  using nox::Format;
  using nox::Mnemonic;

  auto r = [&](uint32_t n) { return static_cast<uint32_t>(rng() % n); };
  auto sextbits = [&](int width) {
    const uint32_t v = rng() & ((1u << width) - 1);
    const uint32_t m = 1u << (width - 1);
    return static_cast<int32_t>((v ^ m) - m);
  };

  DecodedInstruction d;
  d.mnemonic = static_cast<Mnemonic>(r(nox::kMnemonicCount));
  const Mnemonic m = d.mnemonic;

  if (m == Mnemonic::Lui || m == Mnemonic::Auipc) {
    d.format = Format::U;
    d.rd = static_cast<uint8_t>(r(32));
    d.imm = static_cast<int32_t>(r(1u << 20) << 12);
  } else if (m == Mnemonic::Jal) {
    d.format = Format::J;
    d.rd = static_cast<uint8_t>(r(32));
    d.imm = sextbits(21) & ~1;
  } else if (nox::is_branch(m)) {
    d.format = Format::B;
    d.rs1 = static_cast<uint8_t>(r(32));
    d.rs2 = static_cast<uint8_t>(r(32));
    d.imm = sextbits(13) & ~1;
  } else if (nox::is_store(m)) {
    d.format = Format::S;
    d.rs1 = static_cast<uint8_t>(r(32));
    d.rs2 = static_cast<uint8_t>(r(32));
    d.imm = sextbits(12);
  } else if (m >= Mnemonic::Add && m <= Mnemonic::And) {
    d.format = Format::R;
    d.rd = static_cast<uint8_t>(r(32));
    d.rs1 = static_cast<uint8_t>(r(32));
    d.rs2 = static_cast<uint8_t>(r(32));
  } else if (m == Mnemonic::Slli || m == Mnemonic::Srli || m == Mnemonic::Srai) {
    d.format = Format::I;
    d.rd = static_cast<uint8_t>(r(32));
    d.rs1 = static_cast<uint8_t>(r(32));
    d.imm = static_cast<int32_t>(r(32));
  } else if (m == Mnemonic::Ecall || m == Mnemonic::Ebreak ||
             m == Mnemonic::Mret || m == Mnemonic::Wfi) {
    d.format = Format::System;
  } else if (nox::is_zicsr(m)) {
    d.format = Format::System;
    d.rd = static_cast<uint8_t>(r(32));
    d.csr_addr = static_cast<uint16_t>(r(0x1000));
    if (nox::is_csr_imm(m)) {
      d.imm = static_cast<int32_t>(r(32));
    } else {
      d.rs1 = static_cast<uint8_t>(r(32));
    }
  } else {
    // JALR, loads, ALU immediates, FENCE, FENCE.I
    d.format = Format::I;
    d.rd = static_cast<uint8_t>(r(32));
    d.rs1 = static_cast<uint8_t>(r(32));
    d.imm = sextbits(12);
  }
  return d;
}

}  // namespace testgen
