#include "nox/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace nox {

std::string trace_line(const RetireEvent& ev) {
  char head[64];
  std::snprintf(head, sizeof head, "C%llu %08x %08x ",
                static_cast<unsigned long long>(ev.cycle), ev.pc, ev.raw);
  std::string line = head;
  line += ev.illegal ? "illegal" : disassemble(ev.instr);
  if (ev.writeback) {
    char wb[32];
    std::snprintf(wb, sizeof wb, " [x%u=%08x]", ev.writeback->first,
                  ev.writeback->second);
    line += wb;
  }
  return line;
}

LoadedImage load_image(const RunConfig& cfg) {
  std::ifstream in(cfg.image_path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + cfg.image_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  const auto* bytes = reinterpret_cast<const uint8_t*>(data.data());
  switch (cfg.image_kind) {
    case ImageKind::FlatBinary:
      return load_flat({bytes, data.size()}, cfg.core.reset_pc, cfg.core.map);
    case ImageKind::Elf:
      return load_elf({bytes, data.size()}, cfg.core.map);
    case ImageKind::Assembly: {
      AsmProgram prog = assemble(data, cfg.core.reset_pc);
      const auto raw = prog.to_bytes();
      return load_flat({raw.data(), raw.size()}, prog.origin, cfg.core.map);
    }
  }
  throw LoadError("unknown image kind");
}

RunOutput run_simulation(const RunConfig& cfg, const LoadedImage& image) {
  RunOutput out;
  CoreConfig core_cfg = cfg.core;
  if (cfg.image_kind == ImageKind::Elf) core_cfg.reset_pc = image.entry;

  Bus bus(core_cfg);
  std::ostream* console = cfg.console ? cfg.console : &std::cout;
  bus.set_console_sink([console](uint8_t b) {
    console->put(static_cast<char>(b));
    console->flush();
  });
  apply_image(image, bus);

  NoxCore core(core_cfg, bus);
  std::optional<Lockstep> lock;
  if (cfg.verify) lock.emplace(core_cfg, image);

  while (true) {
    const auto& events = core.tick();
    for (const RetireEvent& ev : events) {
      if (cfg.trace) (*cfg.trace) << trace_line(ev) << '\n';
      if (lock) {
        if (auto d = lock->check(ev, core)) {
          out.stop = StopReason::Divergence;
          out.exit_code = kExitDivergence;
          out.divergence = d;
          out.stats = core.stats();
          out.final_state = core.arch();
          return out;
        }
      }
    }

    if (auto code = bus.exit_code()) {
      out.stop = StopReason::ExitWrite;
      out.exit_code = static_cast<int>(*code & 0xFF);
      break;
    }
    bool ebreak_stop = false;
    if (cfg.stop_on_ebreak && core.arch().csrs.mtvec == 0) {
      for (const RetireEvent& ev : events)
        if (ev.trap && !ev.trap->is_interrupt &&
            ev.trap->code == static_cast<uint32_t>(ExcCause::Breakpoint))
          ebreak_stop = true;
    }
    if (ebreak_stop) {
      out.stop = StopReason::Ebreak;
      out.exit_code = 0;
      break;
    }
    if (core.fetch_fault_halt()) {
      if (lock) {
        if (auto d = lock->check_fetch_fault(core.fetch_fault_pc(), core)) {
          out.stop = StopReason::Divergence;
          out.exit_code = kExitDivergence;
          out.divergence = d;
          out.stats = core.stats();
          out.final_state = core.arch();
          return out;
        }
      }
      out.stop = StopReason::FetchFault;
      out.exit_code = kExitFetchFault;
      break;
    }
    if (core.wfi_unwakeable()) {
      out.stop = StopReason::WfiSleep;
      out.exit_code = kExitWfiSleep;
      break;
    }
    if (core.stats().cycles >= cfg.max_cycles) {
      out.stop = StopReason::MaxCycles;
      out.exit_code = kExitMaxCycles;
      break;
    }
  }

  out.stats = core.stats();
  out.final_state = core.arch();
  out.iterations = bus.iterations();
  return out;
}

std::string stats_json(const StatsReport& s, std::optional<uint32_t> iterations) {
  nlohmann::json j;
  j["cycles"] = s.cycles;
  j["instret"] = s.instret;
  if (auto c = s.cpi()) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4f", *c);
    j["cpi"] = std::atof(b);
  } else {
    j["cpi"] = nullptr;
  }
  j["stall_cycles_fetch"] = s.stall_cycles_fetch;
  j["stall_cycles_lsu"] = s.stall_cycles_lsu;
  j["flush_count"] = s.flush_count;
  j["fifo_avg_occupancy"] = s.fifo_avg_occupancy();
  j["fill_cycles"] = s.fill_cycles;
  j["flush_bubble_cycles"] = s.flush_bubble_cycles;
  j["wfi_wait_cycles"] = s.wfi_wait_cycles;
  j["csr_hold_cycles"] = s.csr_hold_cycles;
  j["intr_drain_cycles"] = s.intr_drain_cycles;
  j["split_accesses"] = s.split_accesses;
  if (iterations) {
    j["iterations"] = *iterations;
    j["iterations_per_megacycle"] =
        s.cycles ? static_cast<double>(*iterations) * 1e6 / static_cast<double>(s.cycles)
                 : 0.0;
  }
  return j.dump(2);
}

std::string stats_human(const StatsReport& s, std::optional<uint32_t> iterations) {
  std::ostringstream o;
  o << "cycles             " << s.cycles << '\n';
  o << "instret            " << s.instret << '\n';
  if (auto c = s.cpi()) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4f", *c);
    o << "cpi                " << b << '\n';
  } else {
    o << "cpi                n/a\n";
  }
  o << "stall_cycles_fetch " << s.stall_cycles_fetch << '\n';
  o << "stall_cycles_lsu   " << s.stall_cycles_lsu << '\n';
  o << "flush_count        " << s.flush_count << '\n';
  o << "fifo_avg_occupancy " << s.fifo_avg_occupancy() << '\n';
  if (iterations) {
    o << "iterations         " << *iterations << '\n';
    o << "iterations/Mcycle  "
      << (s.cycles ? static_cast<double>(*iterations) * 1e6 / static_cast<double>(s.cycles) : 0.0)
      << '\n';
  }
  return o.str();
}

void apply_env_memory_map(CoreConfig& cfg) {
  if (const char* env = std::getenv("NOXSIM_MAP")) {
    cfg.map = parse_memory_map(env);
  }
}

}  // namespace nox
