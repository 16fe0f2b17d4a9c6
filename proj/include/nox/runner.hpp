#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "nox/config.hpp"
#include "nox/lockstep.hpp"
#include "nox/pipeline.hpp"
#include "nox/program_io.hpp"

namespace nox {

enum class ImageKind : uint8_t { FlatBinary, Elf, Assembly };

// Process exit codes outside the program's own exit value.
inline constexpr int kExitLoadError = 121;
inline constexpr int kExitMaxCycles = 122;
inline constexpr int kExitFetchFault = 123;
inline constexpr int kExitWfiSleep = 124;
inline constexpr int kExitDivergence = 125;

struct RunConfig {
  std::string image_path;
  ImageKind image_kind = ImageKind::FlatBinary;
  CoreConfig core;
  uint64_t max_cycles = 100'000'000;
  bool stop_on_ebreak = true;  // only honored while mtvec == 0
  bool verify = false;
  std::ostream* trace = nullptr;    // one line per retirement when set
  std::ostream* console = nullptr;  // program console output (default stdout)
};

enum class StopReason : uint8_t {
  ExitWrite,
  Ebreak,
  MaxCycles,
  FetchFault,
  WfiSleep,
  Divergence,
};

struct RunOutput {
  StopReason stop = StopReason::MaxCycles;
  int exit_code = 0;
  StatsReport stats;
  std::optional<Divergence> divergence;
  ArchState final_state;
  std::optional<uint32_t> iterations;  // benchmark iteration-report MMIO
};

// `C<cycle> <pc> <raw> <disasm>[ x<rd>=<value>]`
std::string trace_line(const RetireEvent& ev);

LoadedImage load_image(const RunConfig& cfg);

// Simulates `image` on a pipeline built from cfg.core until a stop condition.
RunOutput run_simulation(const RunConfig& cfg, const LoadedImage& image);

// JSON stats document; cpi with 4-decimal precision, null when instret is 0.
// Includes iterations per megacycle when the program reported a count.
std::string stats_json(const StatsReport& stats, std::optional<uint32_t> iterations);
std::string stats_human(const StatsReport& stats, std::optional<uint32_t> iterations);

// Reads NOXSIM_MAP when present and applies it to cfg.map.
void apply_env_memory_map(CoreConfig& cfg);

}  // namespace nox
