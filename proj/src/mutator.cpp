#include "hwfuzz/mutator.hpp"

#include <algorithm>
#include <array>

namespace hwfuzz {

namespace {

constexpr std::array<int32_t, 27> kInteresting = {
    // 8-bit
    -128, -1, 0, 1, 16, 32, 64, 100, 127,
    // 16-bit
    -32768, -129, 128, 255, 256, 512, 1000, 1024, 4096, 32767,
    // 32-bit
    -2147483647 - 1, -100663046, -32769, 32768, 65535, 65536, 100663045, 2147483647};

uint32_t load(const Bytes& d, size_t pos, unsigned width, bool big_endian) {
  uint32_t v = 0;
  for (unsigned i = 0; i < width; ++i) {
    const unsigned shift = big_endian ? 8 * (width - 1 - i) : 8 * i;
    v |= uint32_t{d[pos + i]} << shift;
  }
  return v;
}

void store(Bytes& d, size_t pos, unsigned width, uint32_t v, bool big_endian) {
  for (unsigned i = 0; i < width; ++i) {
    const unsigned shift = big_endian ? 8 * (width - 1 - i) : 8 * i;
    d[pos + i] = static_cast<uint8_t>(v >> shift);
  }
}

unsigned pick_width(Rng& rng) {
  static constexpr unsigned kWidths[] = {1, 2, 4};
  return kWidths[rng.below(3)];
}

}  // namespace

std::span<const int32_t> interesting_values(unsigned width_bytes) {
  const size_t n = width_bytes <= 1 ? 9 : width_bytes == 2 ? 19 : kInteresting.size();
  return {kInteresting.data(), n};
}

void flip_bits(Bytes& data, size_t bit, unsigned width) {
  for (unsigned i = 0; i < width; ++i) {
    const size_t b = bit + i;
    if (b / 8 >= data.size()) return;
    data[b / 8] ^= static_cast<uint8_t>(1u << (b % 8));
  }
}

void flip_bytes(Bytes& data, size_t pos, unsigned width) {
  if (pos + width > data.size()) return;
  for (unsigned i = 0; i < width; ++i) data[pos + i] ^= 0xFF;
}

void add_arith(Bytes& data, size_t pos, unsigned width, int delta, bool big_endian) {
  if (pos + width > data.size()) return;
  const uint32_t v = load(data, pos, width, big_endian);
  store(data, pos, width, v + static_cast<uint32_t>(delta), big_endian);
}

void set_interesting(Bytes& data, size_t pos, unsigned width, int32_t value,
                     bool big_endian) {
  if (pos + width > data.size()) return;
  store(data, pos, width, static_cast<uint32_t>(value), big_endian);
}

void delete_block(Bytes& data, size_t pos, size_t len) {
  if (pos >= data.size()) return;
  len = std::min(len, data.size() - pos);
  data.erase(data.begin() + static_cast<ptrdiff_t>(pos),
             data.begin() + static_cast<ptrdiff_t>(pos + len));
}

void insert_block(Bytes& data, size_t pos, std::span<const uint8_t> block) {
  pos = std::min(pos, data.size());
  data.insert(data.begin() + static_cast<ptrdiff_t>(pos), block.begin(), block.end());
}

void overwrite_block(Bytes& data, size_t pos, std::span<const uint8_t> block) {
  for (size_t i = 0; i < block.size() && pos + i < data.size(); ++i) {
    data[pos + i] = block[i];
  }
}

Bytes splice(std::span<const uint8_t> a, size_t split_a, std::span<const uint8_t> b,
             size_t split_b) {
  split_a = std::min(split_a, a.size());
  split_b = std::min(split_b, b.size());
  Bytes out(a.begin(), a.begin() + static_cast<ptrdiff_t>(split_a));
  out.insert(out.end(), b.begin() + static_cast<ptrdiff_t>(split_b), b.end());
  return out;
}

size_t Mutator::block_len(Rng& rng, size_t limit) const {
  if (limit == 0) return 0;
  // Mostly small blocks, occasionally medium ones.
  size_t lo = 1, hi = 32;
  if (rng.chance(1, 10)) {
    lo = 32;
    hi = 128;
  }
  lo = std::min(lo, limit);
  hi = std::min(hi, limit);
  return static_cast<size_t>(rng.between(lo, hi));
}

void Mutator::havoc_op(Bytes& data, Rng& rng) const {
  if (data.empty()) {
    Bytes block(block_len(rng, std::max<size_t>(1, config_.max_len)));
    for (auto& b : block) b = static_cast<uint8_t>(rng.bits(8));
    insert_block(data, 0, block);
    return;
  }
  const size_t n = data.size();
  switch (rng.below(15)) {
    case 0:
      flip_bits(data, rng.below(n * 8), 1);
      break;
    case 1:
    case 2:
    case 3: {
      const unsigned w = pick_width(rng);
      if (n < w) break;
      const auto vals = interesting_values(w);
      set_interesting(data, rng.below(n - w + 1), w,
                      vals[rng.below(vals.size())], rng.chance(1, 2));
      break;
    }
    case 4:
    case 5:
    case 6:
    case 7:
    case 8:
    case 9: {
      const unsigned w = pick_width(rng);
      if (n < w) break;
      int delta = static_cast<int>(rng.between(1, kArithMax));
      if (rng.chance(1, 2)) delta = -delta;
      add_arith(data, rng.below(n - w + 1), w, delta, rng.chance(1, 2));
      break;
    }
    case 10:
      data[rng.below(n)] ^= static_cast<uint8_t>(rng.between(1, 255));
      break;
    case 11:
    case 12: {
      if (n < 2) {
        data.clear();
        break;
      }
      const size_t len = block_len(rng, n - 1);
      delete_block(data, rng.below(n - len + 1), len);
      break;
    }
    case 13: {
      if (n >= config_.max_len) break;
      const size_t room = config_.max_len - n;
      Bytes block;
      if (rng.chance(3, 4)) {
        const size_t len = block_len(rng, std::min(n, room));
        const size_t from = rng.below(n - len + 1);
        block.assign(data.begin() + static_cast<ptrdiff_t>(from),
                     data.begin() + static_cast<ptrdiff_t>(from + len));
      } else {
        const size_t len = block_len(rng, std::min<size_t>(room, 128));
        const uint8_t fill =
            rng.chance(1, 2) ? static_cast<uint8_t>(rng.bits(8)) : data[rng.below(n)];
        block.assign(len, fill);
      }
      insert_block(data, rng.below(n + 1), block);
      break;
    }
    case 14: {
      if (n < 2) {
        data[0] = static_cast<uint8_t>(rng.bits(8));
        break;
      }
      const size_t len = block_len(rng, n - 1);
      const size_t to = rng.below(n - len + 1);
      if (rng.chance(3, 4)) {
        const size_t from = rng.below(n - len + 1);
        const Bytes block(data.begin() + static_cast<ptrdiff_t>(from),
                          data.begin() + static_cast<ptrdiff_t>(from + len));
        overwrite_block(data, to, block);
      } else {
        const uint8_t fill =
            rng.chance(1, 2) ? static_cast<uint8_t>(rng.bits(8)) : data[rng.below(n)];
        std::fill_n(data.begin() + static_cast<ptrdiff_t>(to), len, fill);
      }
      break;
    }
  }
}

Bytes Mutator::apply_stage(MutationStage stage, std::span<const uint8_t> input, Rng& rng,
                           std::span<const uint8_t> splice_partner) const {
  Bytes data(input.begin(), input.end());
  const size_t n = data.size();
  switch (stage) {
    case MutationStage::BitFlip:
      if (n) flip_bits(data, rng.below(n * 8), 1u << rng.below(3));
      break;
    case MutationStage::ByteFlip: {
      const unsigned w = pick_width(rng);
      if (n >= w) flip_bytes(data, rng.below(n - w + 1), w);
      break;
    }
    case MutationStage::Arith: {
      const unsigned w = pick_width(rng);
      if (n >= w) {
        int delta = static_cast<int>(rng.between(1, kArithMax));
        if (rng.chance(1, 2)) delta = -delta;
        add_arith(data, rng.below(n - w + 1), w, delta, w > 1 && rng.chance(1, 2));
      }
      break;
    }
    case MutationStage::Interesting: {
      const unsigned w = pick_width(rng);
      if (n >= w) {
        const auto vals = interesting_values(w);
        set_interesting(data, rng.below(n - w + 1), w, vals[rng.below(vals.size())],
                        w > 1 && rng.chance(1, 2));
      }
      break;
    }
    case MutationStage::Havoc: {
      const uint64_t stack = rng.between(1, std::max(1u, config_.havoc_stack_max));
      for (uint64_t i = 0; i < stack; ++i) havoc_op(data, rng);
      break;
    }
    case MutationStage::Splice:
      if (!splice_partner.empty()) {
        data = splice(input, rng.below(n + 1), splice_partner,
                      rng.below(splice_partner.size() + 1));
      }
      break;
  }
  if (data.size() > config_.max_len) data.resize(config_.max_len);
  return data;
}

Bytes Mutator::mutate(std::span<const uint8_t> input, Rng& rng,
                      std::span<const uint8_t> splice_partner) const {
  if (input.empty()) {
    Bytes out;
    while (out.empty()) out = apply_stage(MutationStage::Havoc, input, rng);
    return out;
  }
  // Weights: four single-operator stages 1 each, havoc 5, splice 1.
  const uint64_t total = splice_partner.empty() ? 9 : 10;
  const uint64_t r = rng.below(total);
  MutationStage stage;
  if (r < 4) {
    stage = static_cast<MutationStage>(r);
  } else if (r < 9) {
    stage = MutationStage::Havoc;
  } else {
    stage = MutationStage::Splice;
  }
  return apply_stage(stage, input, rng, splice_partner);
}

}  // namespace hwfuzz
