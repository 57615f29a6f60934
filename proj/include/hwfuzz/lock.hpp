#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hwfuzz/model.hpp"

namespace hwfuzz {

struct LockConfig {
  unsigned state_bits = 1;  // N; the lock has 2^N states
  unsigned code_width = 1;  // M; codes are M-bit words
  uint64_t rng_seed = 0;    // generates the correct-code table

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  uint32_t state_count() const { return uint32_t{1} << state_bits; }
  uint32_t unlocked_state() const { return state_count() - 1; }
  uint64_t fingerprint(uint64_t kind) const;
  friend bool operator==(const LockConfig&, const LockConfig&) = default;
};

// Cycle model of the N-state combination lock: the state advances by one
// when the presented code matches the code for the current state, holds on a
// wrong code, and clears on reset. `unlocked` is high in the all-ones state.
class DigitalLock {
 public:
  explicit DigitalLock(LockConfig config);

  // One full clock cycle: rising-edge update, then the output is computed
  // from the new state. Inputs wider than M bits are masked.
  bool eval(bool reset_n, uint32_t code, Tracer* tracer = nullptr);

  bool unlocked() const { return state_ == config_.unlocked_state(); }
  uint32_t state() const { return state_; }
  uint64_t cycle() const { return cycle_; }
  const LockConfig& config() const { return config_; }
  // 2^N entries; the last one is never compared.
  std::span<const uint32_t> correct_codes() const { return codes_; }
  // The codes that walk state 0 to the unlocked state, in order.
  std::vector<uint32_t> unlock_sequence() const;

  DutSnapshot snapshot() const;
  void restore(const DutSnapshot& snap);
  // Register values of a newly instantiated model.
  void power_on() {
    state_ = 0;
    cycle_ = 0;
  }

 private:
  LockConfig config_;
  uint32_t code_mask_;
  std::vector<uint32_t> codes_;
  uint32_t state_ = 0;
  uint64_t cycle_ = 0;
};

// The lock exposed as a port-level DUT for the generic harness. Ports are
// `code` (M bits), preceded by `reset_n` when expose_reset is set. The
// "unlocked" assertion (armed by default) fails once the lock opens.
class LockDut final : public DutModel {
 public:
  struct Options {
    bool expose_reset = false;
    bool arm_unlock_assertion = true;
  };

  explicit LockDut(LockConfig config) : LockDut(config, Options{}) {}
  LockDut(LockConfig config, Options options);

  std::string name() const override { return "lock"; }
  std::unique_ptr<Model> fresh() const override;
  void reset_cycle(Tracer& tracer) override;
  DutSnapshot snapshot() const override { return lock_.snapshot(); }
  void restore(const DutSnapshot& snap) override { lock_.restore(snap); }
  void rearm_assertions() override { assertions_.rearm(); }
  std::optional<std::string> check_assertions() override {
    return assertions_.check(lock_);
  }
  size_t fsm_state_count() const override { return lock_.config().state_count(); }
  uint32_t fsm_state() const override { return lock_.state(); }

  std::span<const PortSpec> inputs() const override { return ports_; }
  void set_input(size_t port, uint64_t value) override;
  void step(Tracer& tracer) override;

  DigitalLock& lock() { return lock_; }
  const DigitalLock& lock() const { return lock_; }
  AssertionRegistry<DigitalLock>& assertions() { return assertions_; }

 private:
  DigitalLock lock_;
  Options options_;
  std::vector<PortSpec> ports_;
  AssertionRegistry<DigitalLock> assertions_;
  bool reset_n_ = true;
  uint32_t code_ = 0;
};

}  // namespace hwfuzz
