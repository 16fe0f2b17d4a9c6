#pragma once

#include <optional>

#include "nox/arch_state.hpp"
#include "nox/bus.hpp"
#include "nox/isa.hpp"

namespace nox {

inline uint8_t mem_access_size(Mnemonic m) {
  switch (m) {
    case Mnemonic::Lb:
    case Mnemonic::Lbu:
    case Mnemonic::Sb:
      return 1;
    case Mnemonic::Lh:
    case Mnemonic::Lhu:
    case Mnemonic::Sh:
      return 2;
    default:
      return 4;
  }
}

inline uint32_t load_extend(Mnemonic m, uint32_t v) {
  switch (m) {
    case Mnemonic::Lb: return static_cast<uint32_t>(static_cast<int32_t>(static_cast<int8_t>(v)));
    case Mnemonic::Lh: return static_cast<uint32_t>(static_cast<int32_t>(static_cast<int16_t>(v)));
    case Mnemonic::Lbu: return v & 0xFF;
    case Mnemonic::Lhu: return v & 0xFFFF;
    default: return v;
  }
}

// Misalignment check shared by both execution models.
inline std::optional<TrapCause> misaligned_check(Mnemonic m, uint32_t addr,
                                                 bool trap_enabled) {
  const uint8_t size = mem_access_size(m);
  if (!trap_enabled || size == 1 || (addr % size) == 0) return std::nullopt;
  return TrapCause::exception(
      is_store(m) ? ExcCause::StoreAddrMisaligned : ExcCause::LoadAddrMisaligned,
      addr);
}

struct MemOutcome {
  bool ok = false;
  uint32_t value = 0;  // extended load data
  TrapCause trap{};    // valid iff !ok
  unsigned pieces = 0;
};

// Immediate (zero-latency) data access with the same splitting behaviour the
// staged LSU uses: unaligned accesses decompose into aligned pieces applied in
// order; the first ERROR piece faults with that piece's address, leaving
// earlier pieces applied.
inline MemOutcome immediate_mem_access(Bus& bus, Mnemonic m, uint32_t addr,
                                       uint32_t wdata, bool misaligned_trap) {
  MemOutcome out;
  if (auto trap = misaligned_check(m, addr, misaligned_trap)) {
    out.trap = *trap;
    return out;
  }
  const bool write = is_store(m);
  uint32_t value = 0;
  const auto pieces = split_access(addr, mem_access_size(m));
  out.pieces = static_cast<unsigned>(pieces.size());
  for (const auto& p : pieces) {
    BusTransaction txn;
    txn.address = p.address;
    txn.size = p.size;
    txn.is_write = write;
    txn.wdata = wdata >> (8 * p.byte_offset);
    txn.port = BusPortId::Data;
    const BusResponse resp = bus.access(txn);
    if (resp.status != BusStatus::Okay) {
      out.trap = TrapCause::exception(
          write ? ExcCause::StoreAccessFault : ExcCause::LoadAccessFault,
          p.address);
      return out;
    }
    if (!write) value |= (resp.rdata & (0xFFFFFFFFu >> (8 * (4 - p.size)))) << (8 * p.byte_offset);
  }
  out.ok = true;
  out.value = write ? wdata : load_extend(m, value);
  return out;
}

}  // namespace nox
