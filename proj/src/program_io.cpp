#include "nox/program_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <optional>
#include <sstream>

#include "nox/arch_state.hpp"
#include "nox/isa.hpp"

namespace nox {

namespace {

bool in_loadable_region(const MemoryMap& map, uint32_t addr) {
  const MemoryRegion* r = map.find(addr);
  return r && (r->kind == RegionKind::Ram || r->kind == RegionKind::Rom);
}

void check_range_loadable(const MemoryMap& map, uint32_t base, size_t len,
                          const std::string& what) {
  if (len == 0) {
    if (!in_loadable_region(map, base))
      throw LoadError(what + ": base 0x" + [&] {
        char b[16];
        std::snprintf(b, sizeof b, "%08x", base);
        return std::string(b);
      }() + " is not in a ram/rom region");
    return;
  }
  for (size_t i = 0; i < len;) {
    const MemoryRegion* r = map.find(base + static_cast<uint32_t>(i));
    if (!r || (r->kind != RegionKind::Ram && r->kind != RegionKind::Rom))
      throw LoadError(what + ": bytes fall outside ram/rom regions");
    const size_t room = r->base + r->size - (base + i);
    i += std::min(room, len - i);
  }
}

uint16_t rd16(std::span<const uint8_t> b, size_t off) {
  return static_cast<uint16_t>(b[off] | (b[off + 1] << 8));
}
uint32_t rd32(std::span<const uint8_t> b, size_t off) {
  return b[off] | (b[off + 1] << 8) | (b[off + 2] << 16) |
         (static_cast<uint32_t>(b[off + 3]) << 24);
}

}  // namespace

LoadedImage load_flat(std::span<const uint8_t> bytes, uint32_t base,
                      const MemoryMap& map) {
  check_range_loadable(map, base, bytes.size(), "flat image");
  LoadedImage img;
  img.entry = base;
  img.segments.push_back({base, {bytes.begin(), bytes.end()}});
  return img;
}

LoadedImage load_elf(std::span<const uint8_t> bytes, const MemoryMap& map) {
  if (bytes.size() < 52) throw LoadError("elf: file shorter than an ELF32 header");
  static const uint8_t magic[4] = {0x7F, 'E', 'L', 'F'};
  if (std::memcmp(bytes.data(), magic, 4) != 0) throw LoadError("elf: bad magic");
  if (bytes[4] != 1) throw LoadError("elf: not ELFCLASS32");
  if (bytes[5] != 1) throw LoadError("elf: not little-endian");
  if (rd16(bytes, 16) != 2) throw LoadError("elf: not an executable (ET_EXEC)");
  if (rd16(bytes, 18) != 243) throw LoadError("elf: machine is not RISC-V");

  LoadedImage img;
  img.entry = rd32(bytes, 24);
  if (img.entry & 3) throw LoadError("elf: entry point is not 4-byte aligned");

  const uint32_t phoff = rd32(bytes, 28);
  const uint16_t phentsize = rd16(bytes, 42);
  const uint16_t phnum = rd16(bytes, 44);
  if (phentsize < 32) throw LoadError("elf: bad program header entry size");
  for (uint16_t i = 0; i < phnum; ++i) {
    const size_t ph = phoff + static_cast<size_t>(i) * phentsize;
    if (ph + 32 > bytes.size()) throw LoadError("elf: truncated program headers");
    if (rd32(bytes, ph) != 1) continue;  // PT_LOAD
    const uint32_t offset = rd32(bytes, ph + 4);
    const uint32_t vaddr = rd32(bytes, ph + 8);
    const uint32_t filesz = rd32(bytes, ph + 16);
    const uint32_t memsz = rd32(bytes, ph + 20);
    if (filesz > memsz) throw LoadError("elf: filesz exceeds memsz");
    if (static_cast<size_t>(offset) + filesz > bytes.size())
      throw LoadError("elf: segment data out of file bounds");
    check_range_loadable(map, vaddr, memsz, "elf segment");
    LoadedImage::Segment seg;
    seg.addr = vaddr;
    seg.bytes.assign(memsz, 0);
    std::copy(bytes.begin() + offset, bytes.begin() + offset + filesz,
              seg.bytes.begin());
    img.segments.push_back(std::move(seg));
  }

  // Optional symbol table.
  const uint32_t shoff = rd32(bytes, 32);
  const uint16_t shentsize = rd16(bytes, 46);
  const uint16_t shnum = rd16(bytes, 48);
  if (shoff && shentsize >= 40 &&
      shoff + static_cast<size_t>(shnum) * shentsize <= bytes.size()) {
    for (uint16_t i = 0; i < shnum; ++i) {
      const size_t sh = shoff + static_cast<size_t>(i) * shentsize;
      if (rd32(bytes, sh + 4) != 2) continue;  // SHT_SYMTAB
      const uint32_t symoff = rd32(bytes, sh + 16);
      const uint32_t symsize = rd32(bytes, sh + 20);
      const uint32_t link = rd32(bytes, sh + 24);
      if (link >= shnum) continue;
      const size_t strsh = shoff + static_cast<size_t>(link) * shentsize;
      const uint32_t stroff = rd32(bytes, strsh + 16);
      const uint32_t strsize = rd32(bytes, strsh + 20);
      for (uint32_t s = 0; s + 16 <= symsize; s += 16) {
        const size_t sym = symoff + s;
        if (sym + 16 > bytes.size()) break;
        const uint32_t nameoff = rd32(bytes, sym);
        if (!nameoff || nameoff >= strsize) continue;
        const char* start = reinterpret_cast<const char*>(bytes.data()) + stroff + nameoff;
        const size_t maxlen = strsize - nameoff;
        const size_t len = strnlen(start, maxlen);
        img.symbols[std::string(start, len)] = rd32(bytes, sym + 4);
      }
    }
  }
  return img;
}

void apply_image(const LoadedImage& image, Bus& bus) {
  for (const auto& seg : image.segments)
    if (!bus.load_bytes(seg.addr, seg.bytes.data(), seg.bytes.size()))
      throw LoadError("image segment does not fit the memory map");
}

std::vector<uint8_t> AsmProgram::to_bytes() const {
  std::vector<uint8_t> out;
  out.reserve(words.size() * 4);
  for (uint32_t w : words) {
    out.push_back(static_cast<uint8_t>(w));
    out.push_back(static_cast<uint8_t>(w >> 8));
    out.push_back(static_cast<uint8_t>(w >> 16));
    out.push_back(static_cast<uint8_t>(w >> 24));
  }
  return out;
}

// ----------------------------------------------------------------------------
// assembler

namespace {

struct Token {
  std::string text;
};

struct Line {
  int number = 0;
  std::string label;
  std::string mnemonic;
  std::vector<std::string> operands;
};

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<Line> parse_lines(const std::string& source) {
  std::vector<Line> lines;
  std::istringstream in(source);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    // comments: '#', ';' and '//'
    for (const char* c : {"#", ";", "//"}) {
      if (size_t p = raw.find(c); p != std::string::npos) raw.erase(p);
    }
    std::string text = strip(raw);
    if (text.empty()) continue;
    Line line;
    line.number = number;
    if (size_t colon = text.find(':'); colon != std::string::npos &&
                                       text.find_first_of(" \t") > colon) {
      line.label = strip(text.substr(0, colon));
      if (line.label.empty()) throw AsmError(number, "empty label");
      text = strip(text.substr(colon + 1));
    }
    if (!text.empty()) {
      size_t sp = text.find_first_of(" \t");
      line.mnemonic = text.substr(0, sp);
      std::transform(line.mnemonic.begin(), line.mnemonic.end(),
                     line.mnemonic.begin(), [](unsigned char ch) { return std::tolower(ch); });
      if (sp != std::string::npos) {
        std::string rest = text.substr(sp + 1);
        std::string cur;
        for (char ch : rest) {
          if (ch == ',') {
            line.operands.push_back(strip(cur));
            cur.clear();
          } else {
            cur += ch;
          }
        }
        if (!strip(cur).empty()) line.operands.push_back(strip(cur));
      }
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

const std::map<std::string, uint16_t>& csr_names() {
  static const std::map<std::string, uint16_t> m = {
      {"mstatus", csr::kMstatus},   {"misa", csr::kMisa},
      {"mie", csr::kMie},           {"mtvec", csr::kMtvec},
      {"mscratch", csr::kMscratch}, {"mepc", csr::kMepc},
      {"mcause", csr::kMcause},     {"mtval", csr::kMtval},
      {"mip", csr::kMip},           {"mhartid", csr::kMhartid},
      {"mcycle", csr::kMcycle},     {"minstret", csr::kMinstret},
      {"mcycleh", csr::kMcycleh},   {"minstreth", csr::kMinstreth},
  };
  return m;
}

class Assembler {
 public:
  Assembler(const std::string& source, uint32_t origin)
      : lines_(parse_lines(source)), origin_(origin) {}

  AsmProgram run() {
    first_pass();
    second_pass();
    AsmProgram p;
    p.origin = origin_;
    p.words = std::move(words_);
    p.labels = std::move(labels_);
    return p;
  }

 private:
  static bool is_number(const std::string& s) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i >= s.size()) return false;
    return std::isdigit(static_cast<unsigned char>(s[i])) != 0;
  }

  static int64_t to_number(const std::string& s, int line) {
    try {
      size_t pos = 0;
      const int64_t v = std::stoll(s, &pos, 0);
      if (pos != s.size()) throw AsmError(line, "bad number: " + s);
      return v;
    } catch (const AsmError&) {
      throw;
    } catch (...) {
      throw AsmError(line, "bad number: " + s);
    }
  }

  uint8_t reg(const std::string& s, int line) const {
    if (s.size() >= 2 && (s[0] == 'x' || s[0] == 'X')) {
      const std::string idx = s.substr(1);
      if (is_number(idx)) {
        const int64_t v = to_number(idx, line);
        if (v >= 0 && v <= 31) return static_cast<uint8_t>(v);
      }
    }
    throw AsmError(line, "bad register name: " + s + " (numeric x0..x31 only)");
  }

  // Size in words a statement will occupy (pass 1).
  uint32_t statement_words(const Line& l) const {
    if (l.mnemonic == "li") {
      if (l.operands.size() == 2 && is_number(l.operands[1])) {
        const int64_t v = to_number(l.operands[1], l.number);
        const int32_t v32 = static_cast<int32_t>(v);
        if (v32 >= -2048 && v32 <= 2047) return 1;
      }
      return 2;  // lui+addi (labels always take the long form)
    }
    return 1;
  }

  void first_pass() {
    uint32_t loc = origin_;
    for (const Line& l : lines_) {
      if (!l.label.empty()) {
        if (labels_.count(l.label))
          throw AsmError(l.number, "duplicate label: " + l.label);
        labels_[l.label] = loc;
      }
      if (l.mnemonic.empty()) continue;
      if (l.mnemonic == ".org") {
        if (l.operands.size() != 1 || !is_number(l.operands[0]))
          throw AsmError(l.number, ".org needs a numeric address");
        const uint32_t target = static_cast<uint32_t>(to_number(l.operands[0], l.number));
        if (target < loc) throw AsmError(l.number, ".org moves backwards");
        if (target & 3) throw AsmError(l.number, ".org address not 4-byte aligned");
        loc = target;
        continue;
      }
      loc += 4 * statement_words(l);
    }
  }

  int64_t value_or_label(const std::string& s, int line) const {
    if (is_number(s)) return to_number(s, line);
    auto it = labels_.find(s);
    if (it == labels_.end()) throw AsmError(line, "undefined label: " + s);
    return it->second;
  }

  int32_t branch_offset(const std::string& s, uint32_t pc, int line) const {
    if (is_number(s)) return static_cast<int32_t>(to_number(s, line));
    auto it = labels_.find(s);
    if (it == labels_.end()) throw AsmError(line, "undefined label: " + s);
    return static_cast<int32_t>(it->second - pc);
  }

  uint16_t csr_operand(const std::string& s, int line) const {
    if (is_number(s)) {
      const int64_t v = to_number(s, line);
      if (v < 0 || v > 0xFFF) throw AsmError(line, "csr address out of range");
      return static_cast<uint16_t>(v);
    }
    auto it = csr_names().find(s);
    if (it == csr_names().end()) throw AsmError(line, "unknown csr name: " + s);
    return it->second;
  }

  // "imm(base)" memory operand
  std::pair<int32_t, uint8_t> mem_operand(const std::string& s, int line) const {
    const size_t open = s.find('(');
    const size_t close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw AsmError(line, "expected offset(base): " + s);
    const std::string off = strip(s.substr(0, open));
    const std::string base = strip(s.substr(open + 1, close - open - 1));
    const int32_t imm = off.empty() ? 0 : static_cast<int32_t>(to_number(off, line));
    return {imm, reg(base, line)};
  }

  void emit(const DecodedInstruction& d, int line) {
    try {
      words_.push_back(encode(d));
    } catch (const std::invalid_argument& e) {
      throw AsmError(line, e.what());
    }
    loc_ += 4;
  }

  void need_operands(const Line& l, size_t n) const {
    if (l.operands.size() != n)
      throw AsmError(l.number, l.mnemonic + " expects " + std::to_string(n) +
                                   " operand(s)");
  }

  void second_pass() {
    loc_ = origin_;
    for (const Line& l : lines_) {
      if (l.mnemonic.empty()) continue;
      if (l.mnemonic == ".org") {
        const uint32_t target = static_cast<uint32_t>(to_number(l.operands[0], l.number));
        while (loc_ < target) {
          words_.push_back(0);
          loc_ += 4;
        }
        continue;
      }
      if (l.mnemonic == ".word") {
        need_operands(l, 1);
        words_.push_back(static_cast<uint32_t>(value_or_label(l.operands[0], l.number)));
        loc_ += 4;
        continue;
      }
      assemble_instruction(l);
    }
  }

  void assemble_instruction(const Line& l) {
    const int n = l.number;
    DecodedInstruction d;

    // pseudo-ops
    if (l.mnemonic == "nop") {
      need_operands(l, 0);
      d.mnemonic = Mnemonic::Addi;
      emit(d, n);
      return;
    }
    if (l.mnemonic == "mv") {
      need_operands(l, 2);
      d.mnemonic = Mnemonic::Addi;
      d.rd = reg(l.operands[0], n);
      d.rs1 = reg(l.operands[1], n);
      emit(d, n);
      return;
    }
    if (l.mnemonic == "j") {
      need_operands(l, 1);
      d.mnemonic = Mnemonic::Jal;
      d.format = Format::J;
      d.imm = branch_offset(l.operands[0], loc_, n);
      emit(d, n);
      return;
    }
    if (l.mnemonic == "ret") {
      need_operands(l, 0);
      d.mnemonic = Mnemonic::Jalr;
      d.rs1 = 1;
      emit(d, n);
      return;
    }
    if (l.mnemonic == "li") {
      need_operands(l, 2);
      const uint8_t rd = reg(l.operands[0], n);
      const bool numeric = is_number(l.operands[1]);
      const uint32_t value = static_cast<uint32_t>(value_or_label(l.operands[1], n));
      const int32_t sv = static_cast<int32_t>(value);
      if (numeric && sv >= -2048 && sv <= 2047) {
        d.mnemonic = Mnemonic::Addi;
        d.rd = rd;
        d.imm = sv;
        emit(d, n);
        return;
      }
      const uint32_t hi = (value + 0x800) >> 12;
      const int32_t lo = static_cast<int32_t>(value - (hi << 12));
      DecodedInstruction u;
      u.mnemonic = Mnemonic::Lui;
      u.format = Format::U;
      u.rd = rd;
      u.imm = static_cast<int32_t>(hi << 12);
      emit(u, n);
      d.mnemonic = Mnemonic::Addi;
      d.rd = rd;
      d.rs1 = rd;
      d.imm = lo;
      emit(d, n);
      return;
    }

    // real mnemonics
    static const std::map<std::string, Mnemonic> mnem = [] {
      std::map<std::string, Mnemonic> m;
      for (int i = 0; i < kMnemonicCount; ++i)
        m[mnemonic_name(static_cast<Mnemonic>(i))] = static_cast<Mnemonic>(i);
      return m;
    }();
    auto it = mnem.find(l.mnemonic);
    if (it == mnem.end()) throw AsmError(n, "unknown mnemonic: " + l.mnemonic);
    const Mnemonic m = it->second;
    d.mnemonic = m;

    switch (m) {
      case Mnemonic::Lui:
      case Mnemonic::Auipc:
        need_operands(l, 2);
        d.format = Format::U;
        d.rd = reg(l.operands[0], n);
        d.imm = static_cast<int32_t>(
                    static_cast<uint32_t>(to_number(l.operands[1], n)) << 12);
        break;
      case Mnemonic::Jal:
        need_operands(l, 2);
        d.format = Format::J;
        d.rd = reg(l.operands[0], n);
        d.imm = branch_offset(l.operands[1], loc_, n);
        break;
      case Mnemonic::Jalr:
        need_operands(l, 3);
        d.rd = reg(l.operands[0], n);
        d.rs1 = reg(l.operands[1], n);
        d.imm = static_cast<int32_t>(to_number(l.operands[2], n));
        break;
      case Mnemonic::Beq:
      case Mnemonic::Bne:
      case Mnemonic::Blt:
      case Mnemonic::Bge:
      case Mnemonic::Bltu:
      case Mnemonic::Bgeu:
        need_operands(l, 3);
        d.format = Format::B;
        d.rs1 = reg(l.operands[0], n);
        d.rs2 = reg(l.operands[1], n);
        d.imm = branch_offset(l.operands[2], loc_, n);
        break;
      case Mnemonic::Lb:
      case Mnemonic::Lh:
      case Mnemonic::Lw:
      case Mnemonic::Lbu:
      case Mnemonic::Lhu: {
        need_operands(l, 2);
        d.rd = reg(l.operands[0], n);
        auto [imm, base] = mem_operand(l.operands[1], n);
        d.imm = imm;
        d.rs1 = base;
        break;
      }
      case Mnemonic::Sb:
      case Mnemonic::Sh:
      case Mnemonic::Sw: {
        need_operands(l, 2);
        d.format = Format::S;
        d.rs2 = reg(l.operands[0], n);
        auto [imm, base] = mem_operand(l.operands[1], n);
        d.imm = imm;
        d.rs1 = base;
        break;
      }
      case Mnemonic::Slli:
      case Mnemonic::Srli:
      case Mnemonic::Srai:
      case Mnemonic::Addi:
      case Mnemonic::Slti:
      case Mnemonic::Sltiu:
      case Mnemonic::Xori:
      case Mnemonic::Ori:
      case Mnemonic::Andi:
        need_operands(l, 3);
        d.rd = reg(l.operands[0], n);
        d.rs1 = reg(l.operands[1], n);
        d.imm = static_cast<int32_t>(to_number(l.operands[2], n));
        break;
      case Mnemonic::Add:
      case Mnemonic::Sub:
      case Mnemonic::Sll:
      case Mnemonic::Slt:
      case Mnemonic::Sltu:
      case Mnemonic::Xor:
      case Mnemonic::Srl:
      case Mnemonic::Sra:
      case Mnemonic::Or:
      case Mnemonic::And:
        need_operands(l, 3);
        d.format = Format::R;
        d.rd = reg(l.operands[0], n);
        d.rs1 = reg(l.operands[1], n);
        d.rs2 = reg(l.operands[2], n);
        break;
      case Mnemonic::Fence:
        need_operands(l, 0);
        d.imm = 0x0FF;  // iorw,iorw
        break;
      case Mnemonic::FenceI:
      case Mnemonic::Ecall:
      case Mnemonic::Ebreak:
      case Mnemonic::Mret:
      case Mnemonic::Wfi:
        need_operands(l, 0);
        d.format = m == Mnemonic::FenceI ? Format::I : Format::System;
        break;
      case Mnemonic::Csrrw:
      case Mnemonic::Csrrs:
      case Mnemonic::Csrrc:
        need_operands(l, 3);
        d.format = Format::System;
        d.rd = reg(l.operands[0], n);
        d.csr_addr = csr_operand(l.operands[1], n);
        d.rs1 = reg(l.operands[2], n);
        break;
      case Mnemonic::Csrrwi:
      case Mnemonic::Csrrsi:
      case Mnemonic::Csrrci:
        need_operands(l, 3);
        d.format = Format::System;
        d.rd = reg(l.operands[0], n);
        d.csr_addr = csr_operand(l.operands[1], n);
        d.imm = static_cast<int32_t>(to_number(l.operands[2], n));
        break;
    }
    emit(d, n);
  }

  std::vector<Line> lines_;
  uint32_t origin_ = 0;
  uint32_t loc_ = 0;
  std::vector<uint32_t> words_;
  std::map<std::string, uint32_t> labels_;
};

}  // namespace

AsmProgram assemble(const std::string& source, uint32_t origin) {
  return Assembler(source, origin).run();
}

}  // namespace nox
