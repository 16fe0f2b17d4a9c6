#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nox/bus.hpp"
#include "nox/config.hpp"

namespace nox {

struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedImage {
  struct Segment {
    uint32_t addr = 0;
    std::vector<uint8_t> bytes;
  };
  std::vector<Segment> segments;
  uint32_t entry = 0;
  std::map<std::string, uint32_t> symbols;  // ELF only
};

// Single segment at `base`, entry = base. Throws LoadError when any byte falls
// outside the map's ram/rom regions (or, for an empty payload, when the base
// itself is unmapped).
LoadedImage load_flat(std::span<const uint8_t> bytes, uint32_t base,
                      const MemoryMap& map);

// Minimal static ELF32 executable loader: little-endian RISC-V ET_EXEC, all
// PT_LOAD segments, zero fill for memsz > filesz, symbols when present.
LoadedImage load_elf(std::span<const uint8_t> bytes, const MemoryMap& map);

// Copies every segment into the bus backing stores.
void apply_image(const LoadedImage& image, Bus& bus);

struct AsmError : std::runtime_error {
  AsmError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_number(line) {}
  int line_number;
};

struct AsmProgram {
  uint32_t origin = 0;
  std::vector<uint32_t> words;
  std::map<std::string, uint32_t> labels;

  std::vector<uint8_t> to_bytes() const;
};

// Two-pass assembler for test programs. Supported per line:
//   label:   instruction | .word VALUE | .org ADDR
// with numeric registers (x0..x31), decimal/hex immediates, label targets for
// branches/jumps, CSR names or addresses, offset(base) memory operands and
// the pseudo-ops nop / li / mv / j / ret. li accepts labels and expands to
// lui+addi unless the (numeric) value fits 12 signed bits.
AsmProgram assemble(const std::string& source, uint32_t origin);

}  // namespace nox
