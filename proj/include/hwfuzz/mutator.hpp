#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hwfuzz/rng.hpp"

namespace hwfuzz {

using Bytes = std::vector<uint8_t>;

inline constexpr int kArithMax = 35;

// AFL's interesting values, sign-extended; narrower sets are prefixes of the
// wider ones.
std::span<const int32_t> interesting_values(unsigned width_bytes);

// Individual operators. Out-of-range positions leave the input unchanged.
void flip_bits(Bytes& data, size_t bit, unsigned width);        // width 1, 2 or 4
void flip_bytes(Bytes& data, size_t pos, unsigned width);       // width 1, 2 or 4
void add_arith(Bytes& data, size_t pos, unsigned width, int delta, bool big_endian);
void set_interesting(Bytes& data, size_t pos, unsigned width, int32_t value,
                     bool big_endian);
void delete_block(Bytes& data, size_t pos, size_t len);
void insert_block(Bytes& data, size_t pos, std::span<const uint8_t> block);
void overwrite_block(Bytes& data, size_t pos, std::span<const uint8_t> block);
// Prefix of `a` up to `split_a` followed by `b` from `split_b`.
Bytes splice(std::span<const uint8_t> a, size_t split_a, std::span<const uint8_t> b,
             size_t split_b);

enum class MutationStage : uint8_t {
  BitFlip,
  ByteFlip,
  Arith,
  Interesting,
  Havoc,
  Splice,
};

struct MutatorConfig {
  size_t max_len = 4096;
  unsigned havoc_stack_max = 16;
};

class Mutator {
 public:
  explicit Mutator(MutatorConfig config = {}) : config_(config) {}

  // Apply one randomly drawn stage. `splice_partner` may be empty, in which
  // case splicing is not drawn. The result never exceeds max_len.
  Bytes mutate(std::span<const uint8_t> input, Rng& rng,
               std::span<const uint8_t> splice_partner = {}) const;

  Bytes apply_stage(MutationStage stage, std::span<const uint8_t> input, Rng& rng,
                    std::span<const uint8_t> splice_partner = {}) const;

  const MutatorConfig& config() const { return config_; }

 private:
  void havoc_op(Bytes& data, Rng& rng) const;
  size_t block_len(Rng& rng, size_t limit) const;

  MutatorConfig config_;
};

}  // namespace hwfuzz
