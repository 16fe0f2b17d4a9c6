#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "nox/arch_state.hpp"
#include "nox/bus.hpp"
#include "nox/config.hpp"

namespace nox {

// Why a retire-slot cycle carried no instruction. Every cycle is charged to
// exactly one category (or to a retirement).
enum class BubbleReason : uint8_t {
  Fill,       // cold pipeline after reset
  FetchWait,  // instruction port could not keep the FIFO non-empty
  Flush,      // slot killed by a redirect, or refill gap after one
  WfiWait,    // Decode gated on WFI
  CsrHold,    // serialization behind an in-flight CSR/MRET
  IntrDrain,  // draining older instructions before interrupt entry
};

enum class RedirectReason : uint8_t { Branch, Jump, Trap, Mret, FenceI, Interrupt };

enum class BypassSource : uint8_t { RegFile, Writeback, LsuData };

struct RetireEvent {
  uint64_t cycle = 0;
  uint32_t pc = 0;
  uint32_t raw = 0;
  DecodedInstruction instr{};  // meaningless when illegal
  bool illegal = false;
  std::optional<std::pair<uint8_t, uint32_t>> writeback;  // rd != x0
  std::optional<TrapCause> trap;
};

struct StatsReport {
  uint64_t cycles = 0;
  uint64_t instret = 0;
  uint64_t stall_cycles_fetch = 0;
  uint64_t stall_cycles_lsu = 0;
  uint64_t flush_count = 0;
  uint64_t fifo_occupancy_sum = 0;
  // Full per-cycle attribution; cycles is always the exact sum of
  // retire_slot_cycles and every bubble category.
  uint64_t retire_slot_cycles = 0;
  uint64_t fill_cycles = 0;
  uint64_t flush_bubble_cycles = 0;
  uint64_t wfi_wait_cycles = 0;
  uint64_t csr_hold_cycles = 0;
  uint64_t intr_drain_cycles = 0;
  uint64_t split_accesses = 0;

  std::optional<double> cpi() const {
    if (instret == 0) return std::nullopt;
    return static_cast<double>(cycles) / static_cast<double>(instret);
  }
  double fifo_avg_occupancy() const {
    return cycles ? static_cast<double>(fifo_occupancy_sum) / static_cast<double>(cycles) : 0.0;
  }
  uint64_t attributed() const {
    return retire_slot_cycles + fill_cycles + stall_cycles_fetch +
           stall_cycles_lsu + flush_bubble_cycles + wfi_wait_cycles +
           csr_hold_cycles + intr_drain_cycles;
  }
};

// Cycle-level model of the 4-stage single-issue in-order pipeline: Fetch with
// a level-0 prefetch FIFO, Decode with the stall interlock, Execute with the
// CSR unit, and a combined LSU / Memory & Writeback slot. Results bypass to
// younger consumers; the only stalls are bus back-pressure from the
// instruction port or an in-flight data transaction.
class NoxCore {
 public:
  NoxCore(const CoreConfig& cfg, Bus& bus);

  void reset();
  // Advances one cycle; returns the retirements of this cycle (at most one,
  // trap entries excluded: interrupt entry retires nothing).
  const std::vector<RetireEvent>& tick();

  StatsReport stats() const;
  ArchState& arch() { return arch_; }
  const ArchState& arch() const { return arch_; }
  Bus& bus() { return bus_; }

  bool fetch_fault_halt() const { return fetch_fault_halt_; }
  uint32_t fetch_fault_pc() const { return fetch_fault_pc_; }
  // Decode is gated on a WFI that no enabled interrupt source can ever wake.
  bool wfi_unwakeable() const {
    return wfi_gated_ &&
           (arch_.csrs.mie & (kIntSoftware | kIntTimer | kIntExternal)) == 0;
  }
  size_t fifo_size() const { return fifo_.size(); }
  unsigned fifo_capacity() const { return cfg_.fifo_depth; }

  // Test hook: forces register-file reads even when a bypass tap matches,
  // reproducing a broken forwarding select.
  void set_bypass_fault(bool v) { bypass_fault_ = v; }
  // Source chosen for the most recent operand resolutions (observability).
  BypassSource last_bypass_rs1() const { return last_src_[0]; }
  BypassSource last_bypass_rs2() const { return last_src_[1]; }

 private:
  struct FetchEntry {
    uint32_t pc = 0;
    uint32_t word = 0;
    bool fault = false;
  };
  struct DecSlot {
    bool valid = false;
    FetchEntry entry{};
  };
  struct ExSlot {
    bool valid = false;
    BubbleReason bubble = BubbleReason::Fill;
    uint32_t pc = 0;
    FetchEntry entry{};
    DecodeResult dec{};
  };
  struct S4Op {
    uint32_t pc = 0;
    uint32_t raw = 0;
    DecodedInstruction instr{};
    bool illegal = false;
    std::optional<TrapCause> trap;  // decided before retirement
    std::optional<uint32_t> wb_value;
    bool is_mem = false;
    bool mem_write = false;
    uint32_t mem_addr = 0;
    uint32_t mem_wdata = 0;
    uint8_t mem_size = 0;
    std::vector<AccessPiece> pieces;
    size_t piece_idx = 0;
    bool piece_issued = false;
    uint32_t mem_value = 0;
    bool is_csr = false;
    uint32_t csr_operand = 0;
    uint8_t csr_rs1_index = 0;
    bool is_mret = false;
    bool is_fencei = false;
    bool is_wfi = false;
  };
  struct S4Slot {
    bool valid = false;
    BubbleReason bubble = BubbleReason::Fill;
    S4Op op{};
  };

  void stage4();
  void execute();
  void decode_stage();
  void fetch_stage();

  void refresh_mip();
  uint32_t resolve_operand(uint8_t rs, int which);
  void redirect(uint32_t target, RedirectReason reason);
  void retire(const S4Op& op, std::optional<std::pair<uint8_t, uint32_t>> wb,
              bool suppress_instret);
  void retire_trap(const S4Op& op, const TrapCause& cause);
  void charge_bubble(BubbleReason r);

  CoreConfig cfg_;
  Bus& bus_;
  ArchState arch_;

  std::deque<FetchEntry> fifo_;
  uint32_t fetch_pc_ = 0;
  bool ifetch_discard_ = false;
  uint32_t ifetch_pc_ = 0;
  DecSlot dec_;
  ExSlot ex_;
  S4Slot s4_;

  // intra-cycle communication
  bool redirect_pending_ = false;
  uint32_t redirect_target_ = 0;
  bool redirect_from_s4_ = false;
  bool ex_freed_ = false;
  bool dec_freed_ = false;
  std::optional<std::pair<uint8_t, uint32_t>> wb_tap_;  // retiring this cycle
  bool wb_tap_is_load_ = false;
  std::optional<std::pair<uint8_t, uint32_t>> pending_reg_write_;

  bool delivered_since_reset_ = false;
  bool delivered_since_redirect_ = true;
  bool wfi_gated_ = false;
  bool fetch_fault_halt_ = false;
  uint32_t fetch_fault_pc_ = 0;

  uint64_t cycle_ = 0;
  std::vector<RetireEvent> events_;
  StatsReport st_;
  bool bypass_fault_ = false;
  BypassSource last_src_[2] = {BypassSource::RegFile, BypassSource::RegFile};
};

}  // namespace nox
