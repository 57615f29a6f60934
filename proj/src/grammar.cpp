#include "hwfuzz/grammar.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace hwfuzz {

namespace {

uint32_t load_le32(std::span<const uint8_t> b) {
  return uint32_t{b[0]} | (uint32_t{b[1]} << 8) | (uint32_t{b[2]} << 16) |
         (uint32_t{b[3]} << 24);
}

void store_le32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<uint32_t> parse_hex(std::string_view tok) {
  if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
    tok.remove_prefix(2);
  }
  if (tok.empty()) return std::nullopt;
  uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, 16);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

}  // namespace

std::optional<Opcode> decode_opcode(uint8_t byte, OpcodeFormat format) {
  if (format == OpcodeFormat::Mapped) {
    if (byte < kMappedReadFirst) return Opcode::Wait;
    if (byte < kMappedWriteFirst) return Opcode::Read;
    return Opcode::Write;
  }
  switch (byte) {
    case kConstantWait:
      return Opcode::Wait;
    case kConstantRead:
      return Opcode::Read;
    case kConstantWrite:
      return Opcode::Write;
    default:
      return std::nullopt;
  }
}

uint8_t encode_opcode(Opcode op, OpcodeFormat format) {
  if (format == OpcodeFormat::Mapped) {
    switch (op) {
      case Opcode::Wait:
        return 0x00;
      case Opcode::Read:
        return kMappedReadFirst;
      case Opcode::Write:
        return kMappedWriteFirst;
    }
  }
  switch (op) {
    case Opcode::Wait:
      return kConstantWait;
    case Opcode::Read:
      return kConstantRead;
    case Opcode::Write:
      return kConstantWrite;
  }
  return kConstantWait;
}

size_t frame_bytes(Opcode op, FrameFormat format) {
  if (format == FrameFormat::Fixed) return kFixedFrameBytes;
  switch (op) {
    case Opcode::Wait:
      return 1;
    case Opcode::Read:
      return 5;
    case Opcode::Write:
      return 9;
  }
  return 1;
}

std::optional<HwfInstruction> decode_next(std::span<const uint8_t> bytes, size_t& pos,
                                          GrammarFormat format) {
  while (pos < bytes.size()) {
    const auto op = decode_opcode(bytes[pos], format.opcode);
    if (!op) {
      ++pos;
      continue;
    }
    const size_t len = frame_bytes(*op, format.frame);
    if (bytes.size() - pos < len) {
      pos = bytes.size();
      return std::nullopt;
    }
    HwfInstruction instr{*op, 0, 0};
    if (*op != Opcode::Wait) instr.address = load_le32(bytes.subspan(pos + 1, 4));
    if (*op == Opcode::Write) instr.data = load_le32(bytes.subspan(pos + 5, 4));
    pos += len;
    return instr;
  }
  return std::nullopt;
}

std::vector<HwfInstruction> decode_stream(std::span<const uint8_t> bytes,
                                          GrammarFormat format) {
  std::vector<HwfInstruction> out;
  size_t pos = 0;
  while (auto instr = decode_next(bytes, pos, format)) out.push_back(*instr);
  return out;
}

std::vector<uint8_t> encode_instructions(std::span<const HwfInstruction> instrs,
                                         GrammarFormat format) {
  std::vector<uint8_t> out;
  for (const auto& in : instrs) {
    const size_t start = out.size();
    out.push_back(encode_opcode(in.opcode, format.opcode));
    if (in.opcode != Opcode::Wait) store_le32(out, in.address);
    if (in.opcode == Opcode::Write) store_le32(out, in.data);
    out.resize(start + frame_bytes(in.opcode, format.frame), 0);
  }
  return out;
}

std::vector<HwfInstruction> parse_seed_text(std::string_view text) {
  std::vector<HwfInstruction> out;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty()) continue;

    const std::string verb = lower(tok[0]);
    auto number = [&](size_t i, const char* what) {
      auto v = parse_hex(tok[i]);
      if (!v) throw SeedParseError(lineno, std::string("bad ") + what + " '" + tok[i] + "'");
      return *v;
    };
    if (verb == "wait" && tok.size() == 1) {
      out.push_back(HwfInstruction::wait());
    } else if (verb == "read" && tok.size() == 2) {
      out.push_back(HwfInstruction::read(number(1, "address")));
    } else if (verb == "write" && tok.size() == 3) {
      out.push_back(HwfInstruction::write(number(1, "address"), number(2, "data")));
    } else if (verb == "wait" || verb == "read" || verb == "write") {
      throw SeedParseError(lineno, "wrong number of operands for '" + verb + "'");
    } else {
      throw SeedParseError(lineno, "unknown instruction '" + tok[0] + "'");
    }
  }
  return out;
}

std::vector<uint8_t> compile_seed_text(std::string_view text, GrammarFormat format) {
  return encode_instructions(parse_seed_text(text), format);
}

std::string_view to_string(Opcode op) {
  switch (op) {
    case Opcode::Wait:
      return "wait";
    case Opcode::Read:
      return "read";
    case Opcode::Write:
      return "write";
  }
  return "?";
}

std::string_view to_string(OpcodeFormat f) {
  return f == OpcodeFormat::Constant ? "constant" : "mapped";
}

std::string_view to_string(FrameFormat f) {
  return f == FrameFormat::Fixed ? "fixed" : "variable";
}

OpcodeFormat parse_opcode_format(std::string_view s) {
  const auto l = lower(s);
  if (l == "constant") return OpcodeFormat::Constant;
  if (l == "mapped") return OpcodeFormat::Mapped;
  throw std::invalid_argument("unknown opcode format '" + std::string(s) + "'");
}

FrameFormat parse_frame_format(std::string_view s) {
  const auto l = lower(s);
  if (l == "fixed") return FrameFormat::Fixed;
  if (l == "variable") return FrameFormat::Variable;
  throw std::invalid_argument("unknown frame format '" + std::string(s) + "'");
}

}  // namespace hwfuzz
