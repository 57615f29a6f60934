#include <stdexcept>

#include "hwfuzz/devices.hpp"

namespace hwfuzz {

namespace {

constexpr uint64_t kTimerFingerprint = 0x54494D4552ULL;  // "TIMER"
constexpr uint32_t kPrescalerMask = 0xFFF;
constexpr uint32_t kStepMask = 0xFF;

const uint16_t kReadUnmapped = site_id("timer.read_unmapped");
const uint16_t kWriteUnmapped = site_id("timer.write_unmapped");
const uint16_t kWriteReadOnly = site_id("timer.write_ro");
const uint16_t kResetSite = site_id("timer.reset");
const uint16_t kIdleSite = site_id("timer.idle");
const uint16_t kPrescaleSite = site_id("timer.prescale");
const uint16_t kStepSite = site_id("timer.step");
const uint16_t kIntrSetSite = site_id("timer.intr_set");
const uint16_t kIntrClearSite = site_id("timer.intr_clear");

uint64_t set_low(uint64_t v, uint32_t lo) { return (v & ~0xFFFFFFFFULL) | lo; }
uint64_t set_high(uint64_t v, uint32_t hi) {
  return (v & 0xFFFFFFFFULL) | (uint64_t{hi} << 32);
}

}  // namespace

TimerDevice::TimerDevice() {
  assertions_.add("intr_matches_compare", [](const TimerDevice& t) {
    return t.intr_ == (t.active_ && t.mtime_ >= t.mtimecmp_);
  });
}

std::unique_ptr<Model> TimerDevice::fresh() const {
  auto t = std::make_unique<TimerDevice>(*this);
  t->power_on();
  t->assertions_.rearm();
  return t;
}

void TimerDevice::power_on() {
  mtime_ = 0;
  mtimecmp_ = 0;
  prescaler_ = 0;
  step_ = kResetStep;
  prescale_count_ = 0;
  active_ = false;
  intr_ = false;
  bus_error_ = false;
}

void TimerDevice::reset_cycle(Tracer& tracer) {
  tracer.site(Component::Dut, kResetSite);
  power_on();
}

DutSnapshot TimerDevice::snapshot() const {
  return {kTimerFingerprint,
          {mtime_, mtimecmp_, prescaler_, step_, prescale_count_,
           uint64_t{active_}, uint64_t{intr_}, uint64_t{bus_error_}}};
}

void TimerDevice::restore(const DutSnapshot& snap) {
  if (snap.fingerprint != kTimerFingerprint || snap.words.size() != 8) {
    throw std::invalid_argument("snapshot was not taken from a timer");
  }
  mtime_ = snap.words[0];
  mtimecmp_ = snap.words[1];
  prescaler_ = static_cast<uint32_t>(snap.words[2]);
  step_ = static_cast<uint32_t>(snap.words[3]);
  prescale_count_ = static_cast<uint32_t>(snap.words[4]);
  active_ = snap.words[5] != 0;
  intr_ = snap.words[6] != 0;
  bus_error_ = snap.words[7] != 0;
}

uint32_t TimerDevice::read(uint32_t addr, Tracer& tracer) {
  uint32_t v = 0;
  switch (addr) {
    case kCtrl:
      v = active_ ? 1 : 0;
      break;
    case kCfg:
      v = prescaler_ | (step_ << 12);
      break;
    case kMtimeLow:
      v = static_cast<uint32_t>(mtime_);
      break;
    case kMtimeHigh:
      v = static_cast<uint32_t>(mtime_ >> 32);
      break;
    case kMtimecmpLow:
      v = static_cast<uint32_t>(mtimecmp_);
      break;
    case kMtimecmpHigh:
      v = static_cast<uint32_t>(mtimecmp_ >> 32);
      break;
    case kIntr:
      v = intr_ ? 1 : 0;
      break;
    default:
      tracer.site(Component::Dut, kReadUnmapped);
      flag_bus_error();
      return 0;
  }
  tracer.site(Component::Dut, site_id("timer.read", addr));
  return v;
}

void TimerDevice::write(uint32_t addr, uint32_t data, Tracer& tracer) {
  switch (addr) {
    case kCtrl:
      active_ = (data & 1) != 0;
      break;
    case kCfg:
      prescaler_ = data & kPrescalerMask;
      step_ = (data >> 12) & kStepMask;
      break;
    case kMtimeLow:
      mtime_ = set_low(mtime_, data);
      break;
    case kMtimeHigh:
      mtime_ = set_high(mtime_, data);
      break;
    case kMtimecmpLow:
      mtimecmp_ = set_low(mtimecmp_, data);
      break;
    case kMtimecmpHigh:
      mtimecmp_ = set_high(mtimecmp_, data);
      break;
    case kIntr:
      tracer.site(Component::Dut, kWriteReadOnly);
      flag_bus_error();
      return;
    default:
      tracer.site(Component::Dut, kWriteUnmapped);
      flag_bus_error();
      return;
  }
  tracer.site(Component::Dut, site_id("timer.write", addr));
}

void TimerDevice::tick(Tracer& tracer) {
  if (!active_) {
    tracer.site(Component::Dut, kIdleSite);
  } else if (prescale_count_ >= prescaler_) {
    tracer.site(Component::Dut, kStepSite);
    prescale_count_ = 0;
    mtime_ += step_;
  } else {
    tracer.site(Component::Dut, kPrescaleSite);
    ++prescale_count_;
  }
  const bool next = active_ && mtime_ >= mtimecmp_;
  if (next != intr_) tracer.site(Component::Dut, next ? kIntrSetSite : kIntrClearSite);
  intr_ = next;
}

std::vector<RegisterInfo> TimerDevice::register_map() const {
  return {
      {kCtrl, "CTRL", Access::ReadWrite, "[0] active"},
      {kCfg, "CFG", Access::ReadWrite, "[11:0] prescaler, [19:12] step"},
      {kMtimeLow, "MTIME_LOW", Access::ReadWrite, "mtime[31:0]"},
      {kMtimeHigh, "MTIME_HIGH", Access::ReadWrite, "mtime[63:32]"},
      {kMtimecmpLow, "MTIMECMP_LOW", Access::ReadWrite, "mtimecmp[31:0]"},
      {kMtimecmpHigh, "MTIMECMP_HIGH", Access::ReadWrite, "mtimecmp[63:32]"},
      {kIntr, "INTR", Access::ReadOnly, "[0] mtime >= mtimecmp"},
  };
}

}  // namespace hwfuzz
