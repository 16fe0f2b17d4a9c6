#pragma once

#include <memory>
#include <optional>
#include <string>

#include "nox/bus.hpp"
#include "nox/pipeline.hpp"
#include "nox/program_io.hpp"
#include "nox/ref_iss.hpp"

namespace nox {

struct Divergence {
  uint64_t retire_index = 0;
  std::string message;
};

// Runs the reference interpreter one retirement behind the pipeline and
// compares architectural state after every retirement: pc/raw of the retired
// instruction, trap outcome, the full register file and every implemented CSR
// except mcycle. The oracle's timer is slaved to the pipeline's so interrupt
// boundaries coincide.
class Lockstep {
 public:
  Lockstep(const CoreConfig& cfg, const LoadedImage& image);

  // Call once per pipeline RetireEvent, passing the pipeline core.
  std::optional<Divergence> check(const RetireEvent& ev, const NoxCore& core);

  // After the pipeline halts on an instruction fetch fault, the oracle must
  // fault at the same pc.
  std::optional<Divergence> check_fetch_fault(uint32_t pc, const NoxCore& core);

  uint64_t retire_count() const { return retire_index_; }
  RefIss& oracle() { return iss_; }

 private:
  std::unique_ptr<Bus> bus_;
  RefIss iss_;
  uint64_t retire_index_ = 0;
};

}  // namespace nox
