#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "hwfuzz/devices.hpp"
#include "hwfuzz/grammar.hpp"
#include "hwfuzz/harness.hpp"
#include "hwfuzz/lock.hpp"

namespace hwfuzz {

// `lock` is driven port-by-port through the generic harness; the devices are
// driven through the bus harness.
enum class TargetKind : uint8_t { Lock, Timer, LockPeripheral };

struct TargetConfig {
  TargetKind kind = TargetKind::Lock;
  LockConfig lock;
  GrammarFormat format;
};

std::unique_ptr<Harness> make_harness(const TargetConfig& target,
                                      HarnessOptions options = {});
// "timer" or "lock_peripheral".
std::unique_ptr<MmioDevice> make_device(std::string_view name, const LockConfig& lock = {});

std::string_view to_string(TargetKind k);
TargetKind parse_target_kind(std::string_view s);

}  // namespace hwfuzz
