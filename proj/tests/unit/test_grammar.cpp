#include "doctest.h"
#include "hwfuzz/grammar.hpp"
#include "hwfuzz/rng.hpp"

using namespace hwfuzz;

namespace {

const GrammarFormat kAll[] = {
    {OpcodeFormat::Constant, FrameFormat::Fixed},
    {OpcodeFormat::Constant, FrameFormat::Variable},
    {OpcodeFormat::Mapped, FrameFormat::Fixed},
    {OpcodeFormat::Mapped, FrameFormat::Variable},
};

std::vector<HwfInstruction> random_program(Rng& rng) {
  std::vector<HwfInstruction> p(rng.below(40));
  for (auto& in : p) {
    switch (rng.below(3)) {
      case 0:
        in = HwfInstruction::wait();
        break;
      case 1:
        in = HwfInstruction::read(static_cast<uint32_t>(rng.bits(32)));
        break;
      default:
        in = HwfInstruction::write(static_cast<uint32_t>(rng.bits(32)),
                                   static_cast<uint32_t>(rng.bits(32)));
    }
  }
  return p;
}

}  // namespace

TEST_CASE("decode examples") {
  CHECK(decode_stream({}, {}).empty());
  const std::vector<uint8_t> wait{0x00};
  CHECK(decode_stream(wait, {OpcodeFormat::Constant, FrameFormat::Variable}) ==
        std::vector<HwfInstruction>{HwfInstruction::wait()});

  const std::vector<uint8_t> w{0xC0, 0x10, 0x00, 0x00, 0x00, 0xEF, 0xBE, 0xAD, 0xDE};
  CHECK(decode_stream(w, {OpcodeFormat::Mapped, FrameFormat::Fixed}) ==
        std::vector<HwfInstruction>{HwfInstruction::write(0x10, 0xDEADBEEF)});
}

TEST_CASE("encode examples") {
  const std::vector<HwfInstruction> wait{HwfInstruction::wait()};
  CHECK(encode_instructions(wait, {OpcodeFormat::Constant, FrameFormat::Variable}) ==
        std::vector<uint8_t>{0x00});
  CHECK(encode_instructions(wait, {OpcodeFormat::Constant, FrameFormat::Fixed}) ==
        std::vector<uint8_t>(9, 0x00));
  CHECK(encode_instructions({}, {}).empty());
  const std::vector<HwfInstruction> rd{HwfInstruction::read(0x04030201)};
  CHECK(encode_instructions(rd, {OpcodeFormat::Constant, FrameFormat::Variable}) ==
        std::vector<uint8_t>{0x01, 0x01, 0x02, 0x03, 0x04});
}

TEST_CASE("opcode tables") {
  int constant_valid = 0;
  for (int b = 0; b < 256; ++b) {
    const auto byte = static_cast<uint8_t>(b);
    CHECK(decode_opcode(byte, OpcodeFormat::Mapped).has_value());
    if (decode_opcode(byte, OpcodeFormat::Constant)) ++constant_valid;
  }
  CHECK(constant_valid == 3);
  CHECK(decode_opcode(0x55, OpcodeFormat::Mapped) == Opcode::Wait);
  CHECK(decode_opcode(0x56, OpcodeFormat::Mapped) == Opcode::Read);
  CHECK(decode_opcode(0xAA, OpcodeFormat::Mapped) == Opcode::Read);
  CHECK(decode_opcode(0xAB, OpcodeFormat::Mapped) == Opcode::Write);
  CHECK(decode_opcode(0xFF, OpcodeFormat::Mapped) == Opcode::Write);
}

TEST_CASE("single byte streams") {
  for (int b = 0; b < 256; ++b) {
    const std::vector<uint8_t> one{static_cast<uint8_t>(b)};
    const auto n = decode_stream(one, {OpcodeFormat::Constant, FrameFormat::Variable}).size();
    CHECK(n == (b == 0x00 ? 1u : 0u));
    // Mapped totality: padding makes every opcode byte a full instruction.
    std::vector<uint8_t> padded(9, 0);
    padded[0] = static_cast<uint8_t>(b);
    CHECK(decode_stream(padded, {OpcodeFormat::Mapped, FrameFormat::Fixed}).size() == 1);
  }
}

TEST_CASE("invalid opcodes skip one byte, truncated frames are dropped") {
  const std::vector<uint8_t> s{0x07, 0x08, 0x00, 0x01, 0xAA};
  CHECK(decode_stream(s, {OpcodeFormat::Constant, FrameFormat::Variable}) ==
        std::vector<HwfInstruction>{HwfInstruction::wait()});
  const std::vector<uint8_t> junk(100, 0x42);
  CHECK(decode_stream(junk, {OpcodeFormat::Constant, FrameFormat::Fixed}).empty());
}

TEST_CASE("round trip on 10000 random programs in every format") {
  Rng rng(2024);
  for (int i = 0; i < 10000; ++i) {
    const auto prog = random_program(rng);
    for (const auto& f : kAll) {
      const auto bytes = encode_instructions(prog, f);
      REQUIRE(decode_stream(bytes, f) == prog);
    }
  }
}

TEST_CASE("variable frames decode at least as many instructions as fixed") {
  Rng rng(77);
  for (int i = 0; i < 20000; ++i) {
    std::vector<uint8_t> b(rng.below(64));
    for (auto& x : b) x = static_cast<uint8_t>(rng.chance(1, 2) ? rng.below(4) : rng.bits(8));
    for (auto op : {OpcodeFormat::Constant, OpcodeFormat::Mapped}) {
      CHECK(decode_stream(b, {op, FrameFormat::Variable}).size() >=
            decode_stream(b, {op, FrameFormat::Fixed}).size());
    }
  }
}

TEST_CASE("decode_next walks the same instructions as decode_stream") {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    std::vector<uint8_t> b(rng.below(80));
    for (auto& x : b) x = static_cast<uint8_t>(rng.below(6));
    for (const auto& f : kAll) {
      std::vector<HwfInstruction> walked;
      size_t pos = 0;
      while (auto in = decode_next(b, pos, f)) walked.push_back(*in);
      CHECK(walked == decode_stream(b, f));
    }
  }
}

TEST_CASE("seed text") {
  const auto p = parse_seed_text("wait\nwrite 0x10 0xdeadbeef");
  CHECK(p == std::vector<HwfInstruction>{HwfInstruction::wait(),
                                         HwfInstruction::write(0x10, 0xDEADBEEF)});
  CHECK(parse_seed_text("read 0x04") == std::vector<HwfInstruction>{HwfInstruction::read(4)});
  CHECK(parse_seed_text("# only a comment\n\n  READ 8  # trailing\n") ==
        std::vector<HwfInstruction>{HwfInstruction::read(8)});

  try {
    parse_seed_text("frobnicate");
    FAIL("expected a parse error");
  } catch (const SeedParseError& e) {
    CHECK(e.line() == 1);
  }
  try {
    parse_seed_text("wait\nread\n");
    FAIL("expected a parse error");
  } catch (const SeedParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_seed_text("write 1 zz"), SeedParseError);
  CHECK_THROWS_AS(parse_seed_text("wait 3"), SeedParseError);

  CHECK(compile_seed_text("wait\nread 4", {OpcodeFormat::Mapped, FrameFormat::Variable}) ==
        std::vector<uint8_t>{0x00, 0x56, 0x04, 0x00, 0x00, 0x00});
}

TEST_CASE("format names") {
  for (const auto& f : kAll) {
    CHECK(parse_opcode_format(to_string(f.opcode)) == f.opcode);
    CHECK(parse_frame_format(to_string(f.frame)) == f.frame);
  }
  CHECK_THROWS_AS(parse_opcode_format("sparse"), std::invalid_argument);
}
