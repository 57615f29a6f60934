#include "hwfuzz/targets.hpp"

#include <stdexcept>

namespace hwfuzz {

std::unique_ptr<Harness> make_harness(const TargetConfig& target, HarnessOptions options) {
  switch (target.kind) {
    case TargetKind::Lock:
      return std::make_unique<GenericHarness>(std::make_unique<LockDut>(target.lock), options);
    case TargetKind::Timer:
      return std::make_unique<BusHarness>(std::make_unique<TimerDevice>(), target.format,
                                          options);
    case TargetKind::LockPeripheral:
      return std::make_unique<BusHarness>(std::make_unique<LockPeripheral>(target.lock),
                                          target.format, options);
  }
  throw std::invalid_argument("unknown target");
}

std::unique_ptr<MmioDevice> make_device(std::string_view name, const LockConfig& lock) {
  switch (parse_target_kind(name)) {
    case TargetKind::Timer:
      return std::make_unique<TimerDevice>();
    case TargetKind::LockPeripheral:
      return std::make_unique<LockPeripheral>(lock);
    case TargetKind::Lock:
      break;
  }
  throw std::invalid_argument("'" + std::string(name) + "' is not a bus device");
}

std::string_view to_string(TargetKind k) {
  switch (k) {
    case TargetKind::Lock:
      return "lock";
    case TargetKind::Timer:
      return "timer";
    case TargetKind::LockPeripheral:
      return "lock_peripheral";
  }
  return "?";
}

TargetKind parse_target_kind(std::string_view s) {
  if (s == "lock") return TargetKind::Lock;
  if (s == "timer") return TargetKind::Timer;
  if (s == "lock_peripheral") return TargetKind::LockPeripheral;
  throw std::invalid_argument("unknown target '" + std::string(s) + "'");
}

}  // namespace hwfuzz
