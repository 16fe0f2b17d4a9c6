#include "nox/bus.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace nox {

MemoryMap default_memory_map() {
  MemoryMap m;
  m.regions.push_back({"rom", kDefaultRomBase, 4u << 20, RegionKind::Rom, {}, {}});
  m.regions.push_back({"ram", kDefaultRamBase, 4u << 20, RegionKind::Ram, {}, {}});
  m.regions.push_back({"clint", kDefaultTimerBase, 0x10000, RegionKind::MmioTimer, {}, {}});
  m.regions.push_back({"console", kDefaultConsoleAddr, 4, RegionKind::MmioConsole, {}, {}});
  // +0 exit code, +4 benchmark iteration report
  m.regions.push_back({"exit", kDefaultExitAddr, 8, RegionKind::MmioExit, {}, {}});
  return m;
}

MemoryMap parse_memory_map(const std::string& text) {
  MemoryMap m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name, base_s, size_s, kind_s;
    if (!std::getline(ls, name, ':') || !std::getline(ls, base_s, ':') ||
        !std::getline(ls, size_s, ':') || !std::getline(ls, kind_s))
      throw std::invalid_argument("memory map line: " + line);
    MemoryRegion r;
    r.name = name;
    r.base = static_cast<uint32_t>(std::stoul(base_s, nullptr, 0));
    r.size = static_cast<uint32_t>(std::stoul(size_s, nullptr, 0));
    if (kind_s == "ram") r.kind = RegionKind::Ram;
    else if (kind_s == "rom") r.kind = RegionKind::Rom;
    else if (kind_s == "mmio-timer") r.kind = RegionKind::MmioTimer;
    else if (kind_s == "mmio-console") r.kind = RegionKind::MmioConsole;
    else if (kind_s == "mmio-exit") r.kind = RegionKind::MmioExit;
    else throw std::invalid_argument("memory map kind: " + kind_s);
    m.regions.push_back(r);
  }
  for (size_t i = 0; i < m.regions.size(); ++i)
    for (size_t j = i + 1; j < m.regions.size(); ++j) {
      const auto& a = m.regions[i];
      const auto& b = m.regions[j];
      if (a.base < b.base + b.size && b.base < a.base + a.size)
        throw std::invalid_argument("memory map regions overlap: " + a.name +
                                    " and " + b.name);
    }
  return m;
}

std::vector<AccessPiece> split_access(uint32_t address, uint8_t size) {
  std::vector<AccessPiece> pieces;
  uint8_t done = 0;
  while (done < size) {
    uint32_t a = address + done;
    uint8_t s = 4;
    while (s > 1 && ((a % s) != 0 || s > size - done)) s /= 2;
    pieces.push_back({a, s, done});
    done += s;
  }
  return pieces;
}

Bus::Bus(const CoreConfig& cfg)
    : map_(cfg.map),
      imem_latency_(cfg.imem_latency),
      dmem_latency_(cfg.dmem_latency),
      random_latency_(cfg.random_latency),
      rng_(cfg.random_latency ? cfg.random_latency->seed : 0),
      error_addrs_(cfg.error_addrs) {
  backing_.resize(map_.regions.size());
  for (size_t i = 0; i < map_.regions.size(); ++i) {
    const auto& r = map_.regions[i];
    if (r.kind == RegionKind::Ram || r.kind == RegionKind::Rom)
      backing_[i].bytes.assign(r.size, 0);
  }
}

unsigned Bus::latency_for(const BusTransaction& txn) const {
  if (random_latency_) {
    std::uniform_int_distribution<unsigned> dist(random_latency_->min,
                                                 random_latency_->max);
    return dist(rng_);
  }
  const MemoryRegion* r = map_.find(txn.address, txn.size);
  const bool ifetch = txn.port == BusPortId::Instruction;
  if (r) {
    const auto& ov = ifetch ? r->imem_latency : r->dmem_latency;
    if (ov) return *ov;
  }
  return ifetch ? imem_latency_ : dmem_latency_;
}

bool Bus::issue(const BusTransaction& txn) {
  Port& p = ports_[idx(txn.port)];
  if (p.busy) return false;
  p.busy = true;
  p.txn = txn;
  p.ready_at = cycle_ + latency_for(txn);
  ++accepted_;
  return true;
}

std::optional<BusResponse> Bus::take_response(BusPortId port) {
  Port& p = ports_[idx(port)];
  if (!p.busy || cycle_ < p.ready_at) return std::nullopt;
  p.busy = false;
  ++responded_;
  return complete(p.txn);
}

bool Bus::discard_response(BusPortId port) {
  Port& p = ports_[idx(port)];
  if (!p.busy) return true;
  if (cycle_ < p.ready_at) return false;
  p.busy = false;
  ++responded_;
  // A discarded fetch is a read; completing it has no memory side effects
  // beyond device reads, which the instruction port never addresses.
  complete(p.txn);
  return true;
}

void Bus::advance_cycle() {
  ++cycle_;
  ++mtime_;
}

std::vector<std::pair<BusPortId, BusResponse>> Bus::tick() {
  advance_cycle();
  std::vector<std::pair<BusPortId, BusResponse>> out;
  for (BusPortId port : {BusPortId::Instruction, BusPortId::Data}) {
    if (auto r = take_response(port)) out.emplace_back(port, *r);
  }
  return out;
}

BusResponse Bus::access(const BusTransaction& txn) { return complete(txn); }

BusResponse Bus::complete(const BusTransaction& txn) {
  for (uint32_t bad : error_addrs_) {
    if (bad >= txn.address && bad - txn.address < txn.size)
      return {BusStatus::Error, 0};
  }
  const MemoryRegion* region = map_.find(txn.address, txn.size);
  if (!region) return {BusStatus::Error, 0};

  const size_t ri = static_cast<size_t>(region - map_.regions.data());
  switch (region->kind) {
    case RegionKind::Rom:
      if (txn.is_write) return {BusStatus::Error, 0};
      [[fallthrough]];
    case RegionKind::Ram: {
      auto& bytes = backing_[ri].bytes;
      const uint32_t off = txn.address - region->base;
      if (txn.is_write) {
        for (uint8_t i = 0; i < txn.size; ++i)
          bytes[off + i] = static_cast<uint8_t>(txn.wdata >> (8 * i));
        return {BusStatus::Okay, 0};
      }
      uint32_t v = 0;
      for (uint8_t i = 0; i < txn.size; ++i)
        v |= static_cast<uint32_t>(bytes[off + i]) << (8 * i);
      return {BusStatus::Okay, v};
    }
    default:
      return device_access(*region, txn);
  }
}

BusResponse Bus::device_access(const MemoryRegion& r, const BusTransaction& txn) {
  const uint32_t off = txn.address - r.base;
  switch (r.kind) {
    case RegionKind::MmioTimer: {
      if (txn.size != 4 || (txn.address & 3) != 0) return {BusStatus::Error, 0};
      auto word = [&](uint64_t v, bool hi) {
        return static_cast<uint32_t>(hi ? v >> 32 : v);
      };
      if (txn.is_write) {
        switch (off) {
          case kTimerMsipOffset: msip_ = txn.wdata & 1; return {BusStatus::Okay, 0};
          case kTimerMtimecmpOffset:
            mtimecmp_ = (mtimecmp_ & 0xFFFFFFFF00000000ull) | txn.wdata;
            return {BusStatus::Okay, 0};
          case kTimerMtimecmpOffset + 4:
            mtimecmp_ = (mtimecmp_ & 0xFFFFFFFFull) |
                        (static_cast<uint64_t>(txn.wdata) << 32);
            return {BusStatus::Okay, 0};
          case kTimerMtimeOffset:
            mtime_ = (mtime_ & 0xFFFFFFFF00000000ull) | txn.wdata;
            return {BusStatus::Okay, 0};
          case kTimerMtimeOffset + 4:
            mtime_ = (mtime_ & 0xFFFFFFFFull) |
                     (static_cast<uint64_t>(txn.wdata) << 32);
            return {BusStatus::Okay, 0};
          default: return {BusStatus::Error, 0};
        }
      }
      switch (off) {
        case kTimerMsipOffset: return {BusStatus::Okay, msip_};
        case kTimerMtimecmpOffset: return {BusStatus::Okay, word(mtimecmp_, false)};
        case kTimerMtimecmpOffset + 4: return {BusStatus::Okay, word(mtimecmp_, true)};
        case kTimerMtimeOffset: return {BusStatus::Okay, word(mtime_, false)};
        case kTimerMtimeOffset + 4: return {BusStatus::Okay, word(mtime_, true)};
        default: return {BusStatus::Error, 0};
      }
    }
    case RegionKind::MmioConsole:
      if (!txn.is_write || txn.size != 1 || off != 0) return {BusStatus::Error, 0};
      if (console_sink_) console_sink_(static_cast<uint8_t>(txn.wdata));
      return {BusStatus::Okay, 0};
    case RegionKind::MmioExit:
      if (!txn.is_write || txn.size != 4) return {BusStatus::Error, 0};
      if (off == 0) exit_code_ = txn.wdata;
      else if (off == 4) iterations_ = txn.wdata;
      else return {BusStatus::Error, 0};
      return {BusStatus::Okay, 0};
    default:
      return {BusStatus::Error, 0};
  }
}

bool Bus::load_bytes(uint32_t addr, const uint8_t* data, size_t len) {
  size_t done = 0;
  while (done < len) {
    const MemoryRegion* region = map_.find(addr + done);
    if (!region ||
        (region->kind != RegionKind::Ram && region->kind != RegionKind::Rom))
      return false;
    const size_t ri = static_cast<size_t>(region - map_.regions.data());
    const uint32_t off = addr + static_cast<uint32_t>(done) - region->base;
    const size_t chunk = std::min<size_t>(len - done, region->size - off);
    std::copy(data + done, data + done + chunk, backing_[ri].bytes.begin() + off);
    done += chunk;
  }
  return true;
}

bool Bus::peek(uint32_t addr, uint8_t size, uint32_t& out) const {
  const MemoryRegion* region = map_.find(addr, size);
  if (!region ||
      (region->kind != RegionKind::Ram && region->kind != RegionKind::Rom))
    return false;
  const size_t ri = static_cast<size_t>(region - map_.regions.data());
  const uint32_t off = addr - region->base;
  uint32_t v = 0;
  for (uint8_t i = 0; i < size; ++i)
    v |= static_cast<uint32_t>(backing_[ri].bytes[off + i]) << (8 * i);
  out = v;
  return true;
}

}  // namespace nox
