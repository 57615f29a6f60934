#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hwfuzz {

enum class Opcode : uint8_t { Wait, Read, Write };

// One decoded bus instruction. Wait carries no address or data, Read carries
// an address, Write carries both; unused fields are zero.
struct HwfInstruction {
  Opcode opcode = Opcode::Wait;
  uint32_t address = 0;
  uint32_t data = 0;

  static HwfInstruction wait() { return {Opcode::Wait, 0, 0}; }
  static HwfInstruction read(uint32_t addr) { return {Opcode::Read, addr, 0}; }
  static HwfInstruction write(uint32_t addr, uint32_t data) {
    return {Opcode::Write, addr, data};
  }
  friend bool operator==(const HwfInstruction&, const HwfInstruction&) = default;
};

// Constant: only 0x00 (wait), 0x01 (read), 0x02 (write) are valid.
// Mapped: [0x00,0x55] wait, [0x56,0xAA] read, [0xAB,0xFF] write.
enum class OpcodeFormat : uint8_t { Constant, Mapped };

// Fixed: every frame is 9 bytes. Variable: 1, 5 or 9 bytes by opcode.
enum class FrameFormat : uint8_t { Fixed, Variable };

struct GrammarFormat {
  OpcodeFormat opcode = OpcodeFormat::Constant;
  FrameFormat frame = FrameFormat::Variable;
  friend bool operator==(const GrammarFormat&, const GrammarFormat&) = default;
};

inline constexpr uint8_t kConstantWait = 0x00;
inline constexpr uint8_t kConstantRead = 0x01;
inline constexpr uint8_t kConstantWrite = 0x02;
inline constexpr uint8_t kMappedReadFirst = 0x56;
inline constexpr uint8_t kMappedWriteFirst = 0xAB;
inline constexpr size_t kFixedFrameBytes = 9;

std::optional<Opcode> decode_opcode(uint8_t byte, OpcodeFormat format);
uint8_t encode_opcode(Opcode op, OpcodeFormat format);
size_t frame_bytes(Opcode op, FrameFormat format);

// Total: any byte string decodes. Invalid Constant opcodes are skipped one
// byte at a time; a trailing frame lacking its address/data bytes is dropped.
// Decodes the instruction starting at or after `pos` and advances past it.
std::optional<HwfInstruction> decode_next(std::span<const uint8_t> bytes, size_t& pos,
                                          GrammarFormat format);
std::vector<HwfInstruction> decode_stream(std::span<const uint8_t> bytes,
                                          GrammarFormat format);

std::vector<uint8_t> encode_instructions(std::span<const HwfInstruction> instrs,
                                         GrammarFormat format);

class SeedParseError : public std::runtime_error {
 public:
  SeedParseError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Line-oriented seed text: `wait`, `read <addr>`, `write <addr> <data>`,
// `#` comments and blank lines. Numbers are hex (0x prefix optional).
std::vector<HwfInstruction> parse_seed_text(std::string_view text);
std::vector<uint8_t> compile_seed_text(std::string_view text, GrammarFormat format);

std::string_view to_string(Opcode op);
std::string_view to_string(OpcodeFormat f);
std::string_view to_string(FrameFormat f);
OpcodeFormat parse_opcode_format(std::string_view s);
FrameFormat parse_frame_format(std::string_view s);

}  // namespace hwfuzz
