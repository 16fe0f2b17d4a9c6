#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "nox/config.hpp"

namespace nox {

enum class BusPortId : uint8_t { Instruction = 0, Data = 1 };
enum class BusStatus : uint8_t { Okay, Error };

struct BusTransaction {
  uint32_t address = 0;
  uint8_t size = 4;  // 1, 2 or 4 bytes
  bool is_write = false;
  uint32_t wdata = 0;
  BusPortId port = BusPortId::Data;
};

struct BusResponse {
  BusStatus status = BusStatus::Okay;
  uint32_t rdata = 0;
};

// One aligned slice of a possibly unaligned access.
struct AccessPiece {
  uint32_t address = 0;
  uint8_t size = 0;
  uint8_t byte_offset = 0;  // position of this slice within the full value
};

// Greedy decomposition into the minimal sequence of size-aligned pieces.
// An aligned access yields a single piece.
std::vector<AccessPiece> split_access(uint32_t address, uint8_t size);

// Valid/ready memory system with one instruction port and one data port. Each
// port carries at most one transaction in flight; a response becomes visible
// `latency` cycles after issue (latency 0 responds within the issue cycle).
// Write effects and device side effects apply when the response is taken.
class Bus {
 public:
  explicit Bus(const CoreConfig& cfg);

  // --- queued interface (pipeline) -------------------------------------
  bool ready(BusPortId port) const { return !ports_[idx(port)].busy; }
  bool issue(const BusTransaction& txn);
  // Response if the in-flight transaction on `port` has matured.
  std::optional<BusResponse> take_response(BusPortId port);
  // Drops the matured response instead of delivering it (flushed fetches).
  // Returns true once the transaction has been reclaimed.
  bool discard_response(BusPortId port);
  void advance_cycle();  // one core cycle: ++cycle, ++mtime

  // Convenience for tests: advance one cycle and drain matured responses.
  std::vector<std::pair<BusPortId, BusResponse>> tick();

  // --- immediate interface (reference interpreter) ---------------------
  BusResponse access(const BusTransaction& txn);

  // --- timer / devices --------------------------------------------------
  bool timer_pending() const { return mtime_ >= mtimecmp_; }
  bool software_pending() const { return (msip_ & 1) != 0; }
  uint64_t mtime() const { return mtime_; }
  void set_mtime(uint64_t t) { mtime_ = t; }  // lockstep time sync
  std::optional<uint32_t> exit_code() const { return exit_code_; }
  std::optional<uint32_t> iterations() const { return iterations_; }
  void set_console_sink(std::function<void(uint8_t)> sink) {
    console_sink_ = std::move(sink);
  }

  // --- direct image access (loaders, tests) -----------------------------
  // Bypasses the transaction machinery; only ram/rom backing stores.
  bool load_bytes(uint32_t addr, const uint8_t* data, size_t len);
  bool peek(uint32_t addr, uint8_t size, uint32_t& out) const;

  const MemoryMap& map() const { return map_; }
  uint64_t accepted_count() const { return accepted_; }
  uint64_t response_count() const { return responded_; }

 private:
  struct Port {
    bool busy = false;
    BusTransaction txn{};
    uint64_t ready_at = 0;
  };
  struct Backing {
    std::vector<uint8_t> bytes;
  };

  static size_t idx(BusPortId p) { return static_cast<size_t>(p); }
  unsigned latency_for(const BusTransaction& txn) const;
  BusResponse complete(const BusTransaction& txn);
  BusResponse device_access(const MemoryRegion& r, const BusTransaction& txn);

  MemoryMap map_;
  std::vector<Backing> backing_;  // parallel to map_.regions (empty for mmio)
  unsigned imem_latency_ = 0;
  unsigned dmem_latency_ = 0;
  std::optional<RandomLatency> random_latency_;
  mutable std::mt19937_64 rng_;
  std::vector<uint32_t> error_addrs_;

  Port ports_[2];
  uint64_t cycle_ = 0;
  uint64_t accepted_ = 0;
  uint64_t responded_ = 0;

  uint64_t mtime_ = 0;
  uint64_t mtimecmp_ = ~0ull;  // reset value: never pending
  uint32_t msip_ = 0;
  std::optional<uint32_t> exit_code_;
  std::optional<uint32_t> iterations_;
  std::function<void(uint8_t)> console_sink_;
};

}  // namespace nox
