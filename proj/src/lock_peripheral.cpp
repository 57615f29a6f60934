#include <stdexcept>

#include "hwfuzz/devices.hpp"

namespace hwfuzz {

namespace {

constexpr uint64_t kPeripheralKind = 0x4C4F434B50ULL;  // "LOCKP"

const uint16_t kReadUnmapped = site_id("lockp.read_unmapped");
const uint16_t kWriteUnmapped = site_id("lockp.write_unmapped");
const uint16_t kWriteReadOnly = site_id("lockp.write_ro");
const uint16_t kIdleSite = site_id("lockp.idle");

}  // namespace

LockPeripheral::LockPeripheral(LockConfig config) : lock_(config) {
  assertions_.add("unlocked", [](const DigitalLock& l) { return !l.unlocked(); });
}

std::unique_ptr<Model> LockPeripheral::fresh() const {
  auto p = std::make_unique<LockPeripheral>(*this);
  p->lock_.power_on();
  p->ctrl_ = 0;
  p->code_ = 0;
  p->code_pending_ = false;
  p->bus_error_ = false;
  p->assertions_.rearm();
  return p;
}

void LockPeripheral::reset_cycle(Tracer& tracer) {
  ctrl_ = 0;
  code_ = 0;
  code_pending_ = false;
  bus_error_ = false;
  lock_.eval(false, 0, &tracer);
}

DutSnapshot LockPeripheral::snapshot() const {
  auto lock_snap = lock_.snapshot();
  return {lock_.config().fingerprint(kPeripheralKind),
          {lock_snap.words[0], lock_snap.words[1], ctrl_, code_,
           uint64_t{code_pending_}, uint64_t{bus_error_}}};
}

void LockPeripheral::restore(const DutSnapshot& snap) {
  if (snap.fingerprint != lock_.config().fingerprint(kPeripheralKind) ||
      snap.words.size() != 6) {
    throw std::invalid_argument(
        "snapshot was taken from a different lock peripheral configuration");
  }
  auto lock_snap = lock_.snapshot();
  lock_snap.words = {snap.words[0], snap.words[1]};
  lock_.restore(lock_snap);
  ctrl_ = static_cast<uint32_t>(snap.words[2]);
  code_ = static_cast<uint32_t>(snap.words[3]);
  code_pending_ = snap.words[4] != 0;
  bus_error_ = snap.words[5] != 0;
}

uint32_t LockPeripheral::read(uint32_t addr, Tracer& tracer) {
  uint32_t v;
  switch (addr) {
    case kCtrl:
      v = ctrl_;
      break;
    case kCode:
      v = code_;
      break;
    case kStatus:
      v = lock_.unlocked() ? 1 : 0;
      break;
    default:
      tracer.site(Component::Dut, kReadUnmapped);
      flag_bus_error();
      return 0;
  }
  tracer.site(Component::Dut, site_id("lockp.read", addr));
  return v;
}

void LockPeripheral::write(uint32_t addr, uint32_t data, Tracer& tracer) {
  switch (addr) {
    case kCtrl:
      ctrl_ = data & 1;
      break;
    case kCode:
      code_ = static_cast<uint32_t>(data & width_mask(lock_.config().code_width));
      code_pending_ = true;
      break;
    case kStatus:
      tracer.site(Component::Dut, kWriteReadOnly);
      flag_bus_error();
      return;
    default:
      tracer.site(Component::Dut, kWriteUnmapped);
      flag_bus_error();
      return;
  }
  tracer.site(Component::Dut, site_id("lockp.write", addr));
}

void LockPeripheral::tick(Tracer& tracer) {
  if (ctrl_ & 1) {
    lock_.eval(false, 0, &tracer);
  } else if (code_pending_) {
    lock_.eval(true, code_, &tracer);
  } else {
    tracer.site(Component::Dut, kIdleSite);
  }
  code_pending_ = false;
}

std::vector<RegisterInfo> LockPeripheral::register_map() const {
  return {
      {kCtrl, "CTRL", Access::ReadWrite, "[0] soft reset (held while set)"},
      {kCode, "CODE", Access::ReadWrite,
       "[" + std::to_string(lock_.config().code_width - 1) +
           ":0] code, applied for one cycle per write"},
      {kStatus, "STATUS", Access::ReadOnly, "[0] unlocked"},
  };
}

}  // namespace hwfuzz
