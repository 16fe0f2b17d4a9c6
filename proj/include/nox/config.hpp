#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nox {

enum class RegionKind : uint8_t { Ram, Rom, MmioTimer, MmioConsole, MmioExit };

struct MemoryRegion {
  std::string name;
  uint32_t base = 0;
  uint32_t size = 0;
  RegionKind kind = RegionKind::Ram;
  // Per-region latency overrides; the port default applies when unset.
  std::optional<unsigned> imem_latency;
  std::optional<unsigned> dmem_latency;

  bool contains(uint32_t addr, uint32_t len = 1) const {
    return addr >= base && len <= size && addr - base <= size - len;
  }
};

struct MemoryMap {
  std::vector<MemoryRegion> regions;

  const MemoryRegion* find(uint32_t addr, uint32_t len = 1) const {
    for (const auto& r : regions)
      if (r.contains(addr, len)) return &r;
    return nullptr;
  }
};

// rom/code at 0x8000_0000, ram above it, CLINT-style timer, console byte and
// exit/iteration-report words. All overridable.
MemoryMap default_memory_map();

// Parses one region per line, "name:base:size:kind", used by the NOXSIM_MAP
// override. Throws std::invalid_argument on malformed input.
MemoryMap parse_memory_map(const std::string& text);

struct RandomLatency {
  unsigned min = 0;
  unsigned max = 4;
  uint64_t seed = 1;
};

struct CoreConfig {
  unsigned fifo_depth = 2;
  bool misaligned_trap = false;
  unsigned imem_latency = 0;
  unsigned dmem_latency = 0;
  std::optional<RandomLatency> random_latency;
  uint32_t reset_pc = 0x80000000;
  MemoryMap map = default_memory_map();
  // Addresses whose accesses complete with an ERROR response.
  std::vector<uint32_t> error_addrs;
};

inline constexpr uint32_t kDefaultRomBase = 0x80000000;
inline constexpr uint32_t kDefaultRamBase = 0x80400000;
inline constexpr uint32_t kDefaultTimerBase = 0x02000000;
inline constexpr uint32_t kDefaultConsoleAddr = 0x10000000;
inline constexpr uint32_t kDefaultExitAddr = 0x10000004;
inline constexpr uint32_t kDefaultIterationsAddr = 0x10000008;

// CLINT-compatible offsets within the timer region.
inline constexpr uint32_t kTimerMsipOffset = 0x0;
inline constexpr uint32_t kTimerMtimecmpOffset = 0x4000;
inline constexpr uint32_t kTimerMtimeOffset = 0xBFF8;

}  // namespace nox
