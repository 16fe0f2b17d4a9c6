#include "nox/lockstep.hpp"

#include <cstdio>
#include <sstream>

namespace nox {

namespace {

std::string hex(uint32_t v) {
  char b[16];
  std::snprintf(b, sizeof b, "%08x", v);
  return b;
}

void compare_arch(const ArchState& pipe, const ArchState& oracle,
                  std::ostringstream& out) {
  for (uint8_t i = 0; i < 32; ++i) {
    if (pipe.regs.read(i) != oracle.regs.read(i))
      out << " x" << int(i) << ": pipeline=" << hex(pipe.regs.read(i))
          << " oracle=" << hex(oracle.regs.read(i));
  }
  const CsrFile& a = pipe.csrs;
  const CsrFile& b = oracle.csrs;
  auto csr = [&](const char* name, uint32_t va, uint32_t vb) {
    if (va != vb)
      out << " " << name << ": pipeline=" << hex(va) << " oracle=" << hex(vb);
  };
  csr("mstatus", a.mstatus, b.mstatus);
  csr("mie", a.mie, b.mie);
  csr("mip", a.mip, b.mip);
  csr("mtvec", a.mtvec, b.mtvec);
  csr("mscratch", a.mscratch, b.mscratch);
  csr("mepc", a.mepc, b.mepc);
  csr("mcause", a.mcause, b.mcause);
  csr("mtval", a.mtval, b.mtval);
  if (a.minstret != b.minstret)
    out << " minstret: pipeline=" << a.minstret << " oracle=" << b.minstret;
}

}  // namespace

Lockstep::Lockstep(const CoreConfig& cfg, const LoadedImage& image)
    : bus_(std::make_unique<Bus>(cfg)), iss_(cfg, *bus_) {
  bus_->set_console_sink([](uint8_t) {});  // pipeline owns the real console
  apply_image(image, *bus_);
  iss_.set_external_time(true);
}

std::optional<Divergence> Lockstep::check(const RetireEvent& ev,
                                          const NoxCore& core) {
  bus_->set_mtime(core.bus().mtime());
  StepResult r = iss_.step();
  ++retire_index_;

  std::ostringstream out;
  if (r.fetch_fault) {
    out << "oracle hit a fetch fault at pc=" << hex(r.pc)
        << " while the pipeline retired pc=" << hex(ev.pc);
    return Divergence{retire_index_, out.str()};
  }
  if (!r.retired) {
    out << "oracle made no retirement (wfi idle) while the pipeline retired pc="
        << hex(ev.pc);
    return Divergence{retire_index_, out.str()};
  }
  if (r.pc != ev.pc || r.raw != ev.raw)
    out << " retired instruction: pipeline pc=" << hex(ev.pc) << " raw="
        << hex(ev.raw) << ", oracle pc=" << hex(r.pc) << " raw=" << hex(r.raw);
  const bool pipe_trap = ev.trap.has_value();
  const bool iss_trap = r.trap.has_value();
  if (pipe_trap != iss_trap ||
      (pipe_trap && !(*ev.trap == *r.trap)))
    out << " trap outcome differs";
  if (ev.writeback != r.writeback) out << " writeback differs";
  compare_arch(core.arch(), iss_.state(), out);

  if (out.str().empty()) return std::nullopt;
  return Divergence{retire_index_, "retirement " + std::to_string(retire_index_) +
                                       ":" + out.str()};
}

std::optional<Divergence> Lockstep::check_fetch_fault(uint32_t pc,
                                                      const NoxCore& core) {
  bus_->set_mtime(core.bus().mtime());
  StepResult r = iss_.step();
  if (!r.fetch_fault || r.pc != pc) {
    return Divergence{retire_index_,
                      "pipeline halted on a fetch fault at pc=" + hex(pc) +
                          " but the oracle did not"};
  }
  return std::nullopt;
}

}  // namespace nox
