#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hwfuzz/bus.hpp"
#include "hwfuzz/lock.hpp"

namespace hwfuzz {

// 64-bit timer with a 12-bit prescaler and an 8-bit step. While active,
// mtime advances by `step` once every (prescaler + 1) ticks and the
// interrupt is raised when mtime >= mtimecmp.
class TimerDevice final : public MmioDevice {
 public:
  static constexpr uint32_t kCtrl = 0x00;          // bit0: active
  static constexpr uint32_t kCfg = 0x04;           // [11:0] prescaler, [19:12] step
  static constexpr uint32_t kMtimeLow = 0x08;
  static constexpr uint32_t kMtimeHigh = 0x0C;
  static constexpr uint32_t kMtimecmpLow = 0x10;
  static constexpr uint32_t kMtimecmpHigh = 0x14;
  static constexpr uint32_t kIntr = 0x18;          // bit0: interrupt, read-only

  static constexpr uint32_t kResetStep = 1;

  TimerDevice();

  std::string name() const override { return "timer"; }
  std::unique_ptr<Model> fresh() const override;
  void reset_cycle(Tracer& tracer) override;
  DutSnapshot snapshot() const override;
  void restore(const DutSnapshot& snap) override;
  void rearm_assertions() override { assertions_.rearm(); }
  std::optional<std::string> check_assertions() override {
    return assertions_.check(*this);
  }

  uint32_t read(uint32_t addr, Tracer& tracer) override;
  void write(uint32_t addr, uint32_t data, Tracer& tracer) override;
  void tick(Tracer& tracer) override;
  std::vector<RegisterInfo> register_map() const override;

  uint64_t mtime() const { return mtime_; }
  uint64_t mtimecmp() const { return mtimecmp_; }
  uint32_t prescaler() const { return prescaler_; }
  uint32_t step() const { return step_; }
  bool active() const { return active_; }
  bool intr() const { return intr_; }

  AssertionRegistry<TimerDevice>& assertions() { return assertions_; }

 private:
  void power_on();

  uint64_t mtime_ = 0;
  uint64_t mtimecmp_ = 0;
  uint32_t prescaler_ = 0;
  uint32_t step_ = kResetStep;
  uint32_t prescale_count_ = 0;
  bool active_ = false;
  bool intr_ = false;
  AssertionRegistry<TimerDevice> assertions_;
};

// A DigitalLock behind three registers. Each CODE write presents one code to
// the lock for one cycle; CTRL bit0 holds the lock in reset while set.
class LockPeripheral final : public MmioDevice {
 public:
  static constexpr uint32_t kCtrl = 0x00;    // bit0: soft reset
  static constexpr uint32_t kCode = 0x04;    // M-bit code
  static constexpr uint32_t kStatus = 0x08;  // bit0: unlocked, read-only

  explicit LockPeripheral(LockConfig config);

  std::string name() const override { return "lock_peripheral"; }
  std::unique_ptr<Model> fresh() const override;
  void reset_cycle(Tracer& tracer) override;
  DutSnapshot snapshot() const override;
  void restore(const DutSnapshot& snap) override;
  void rearm_assertions() override { assertions_.rearm(); }
  std::optional<std::string> check_assertions() override {
    return assertions_.check(lock_);
  }
  size_t fsm_state_count() const override { return lock_.config().state_count(); }
  uint32_t fsm_state() const override { return lock_.state(); }

  uint32_t read(uint32_t addr, Tracer& tracer) override;
  void write(uint32_t addr, uint32_t data, Tracer& tracer) override;
  void tick(Tracer& tracer) override;
  std::vector<RegisterInfo> register_map() const override;

  const DigitalLock& lock() const { return lock_; }
  AssertionRegistry<DigitalLock>& assertions() { return assertions_; }

 private:
  DigitalLock lock_;
  uint32_t ctrl_ = 0;
  uint32_t code_ = 0;
  bool code_pending_ = false;
  AssertionRegistry<DigitalLock> assertions_;
};

}  // namespace hwfuzz
