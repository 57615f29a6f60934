#include "../oracles.hpp"
#include "doctest.h"
#include "hwfuzz/devices.hpp"
#include "hwfuzz/rng.hpp"

using namespace hwfuzz;

namespace {

struct Bench {
  CoverageMap map;
  Tracer tracer{map, Scope::All};
};

template <class Device>
void reset(Device& d, Tracer& t) {
  d.reset_cycle(t);
  d.reset_cycle(t);
}

}  // namespace

TEST_CASE("timer reads after reset") {
  Bench b;
  TimerDevice timer;
  reset(timer, b.tracer);
  BusHost host(timer, b.tracer);
  CHECK(host.get(TimerDevice::kMtimeLow) == 0);
  CHECK(host.get(TimerDevice::kIntr) == 0);
  CHECK(host.get(TimerDevice::kCfg) == (TimerDevice::kResetStep << 12));
  CHECK_FALSE(timer.bus_error());
}

TEST_CASE("timer counts five ticks") {
  Bench b;
  TimerDevice timer;
  reset(timer, b.tracer);
  BusHost host(timer, b.tracer);
  host.put_full(TimerDevice::kCtrl, 1);
  for (int i = 0; i < 4; ++i) host.wait();
  CHECK(host.get(TimerDevice::kMtimeLow) == 5);
}

TEST_CASE("timer interrupt at compare") {
  Bench b;
  TimerDevice timer;
  reset(timer, b.tracer);
  BusHost host(timer, b.tracer);
  host.put_full(TimerDevice::kMtimecmpLow, 3);
  host.put_full(TimerDevice::kCtrl, 1);
  CHECK(timer.mtime() == 1);
  CHECK_FALSE(timer.intr());
  host.wait();
  host.wait();
  CHECK(timer.mtime() == 3);
  CHECK(timer.intr());
  CHECK(host.get(TimerDevice::kIntr) == 1);
  CHECK_FALSE(timer.check_assertions().has_value());
}

TEST_CASE("timer matches the brute-force tick loop") {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto prescaler = static_cast<uint32_t>(rng.below(6));
    const auto step = static_cast<uint32_t>(rng.below(256));
    const uint64_t ticks = rng.between(1, 120);
    Bench b;
    TimerDevice timer;
    reset(timer, b.tracer);
    BusHost host(timer, b.tracer);
    host.put_full(TimerDevice::kCfg, prescaler | (step << 12));
    REQUIRE(timer.mtime() == 0);
    host.put_full(TimerDevice::kCtrl, 1);
    for (uint64_t t = 1; t < ticks; ++t) host.wait();
    CHECK(timer.mtime() == oracle::timer_mtime(prescaler, step, ticks));
  }
}

TEST_CASE("read-write registers are lossless up to their field width") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    Bench b;
    TimerDevice timer;
    reset(timer, b.tracer);
    BusHost host(timer, b.tracer);
    const auto v = static_cast<uint32_t>(rng.bits(32));
    for (uint32_t reg : {TimerDevice::kMtimeLow, TimerDevice::kMtimeHigh,
                         TimerDevice::kMtimecmpLow, TimerDevice::kMtimecmpHigh}) {
      host.put_full(reg, v);
      CHECK(host.get(reg) == v);
    }
    host.put_full(TimerDevice::kCfg, v);
    CHECK(host.get(TimerDevice::kCfg) == (v & 0xFFFFFu));
    host.put_full(TimerDevice::kCtrl, v & ~1u);
    CHECK(host.get(TimerDevice::kCtrl) == 0);

    LockPeripheral lp({2, 4, 1});
    reset(lp, b.tracer);
    BusHost lhost(lp, b.tracer);
    lhost.put_full(LockPeripheral::kCode, v);
    CHECK(lhost.get(LockPeripheral::kCode) == (v & 0xF));
  }
}

TEST_CASE("unmapped and read-only accesses set the sticky flag") {
  Bench b;
  TimerDevice timer;
  reset(timer, b.tracer);
  BusHost host(timer, b.tracer);
  CHECK(host.get(0x40) == 0);
  CHECK(timer.bus_error());
  host.wait();
  CHECK(timer.bus_error());
  reset(timer, b.tracer);
  CHECK_FALSE(timer.bus_error());
  host.put_full(TimerDevice::kIntr, 1);
  CHECK(timer.bus_error());
  CHECK_FALSE(timer.intr());
  reset(timer, b.tracer);
  host.get(TimerDevice::kCfg + 1);
  CHECK(timer.bus_error());

  LockPeripheral lp({1, 4, 5});
  reset(lp, b.tracer);
  BusHost lhost(lp, b.tracer);
  lhost.put_full(LockPeripheral::kStatus, 0xFFFFFFFF);
  CHECK(lp.bus_error());
  CHECK(lhost.get(LockPeripheral::kStatus) == 0);
}

TEST_CASE("one correct code opens a two-state peripheral") {
  Bench b;
  LockPeripheral lp({1, 4, 5});
  reset(lp, b.tracer);
  BusHost host(lp, b.tracer);
  CHECK(host.get(LockPeripheral::kStatus) == 0);
  host.put_full(LockPeripheral::kCode, lp.lock().unlock_sequence()[0]);
  CHECK(host.get(LockPeripheral::kStatus) == 1);
  // Soft reset through CTRL.
  host.put_full(LockPeripheral::kCtrl, 1);
  CHECK(host.get(LockPeripheral::kStatus) == 0);
}

TEST_CASE("peripheral is transparent to the bare lock") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const LockConfig cfg{3, 2, rng()};
    Bench b;
    LockPeripheral lp(cfg);
    reset(lp, b.tracer);
    BusHost host(lp, b.tracer);
    DigitalLock bare(cfg);
    bare.eval(false, 0);
    for (int i = 0; i < 60; ++i) {
      if (rng.chance(1, 4)) {
        host.wait();
        continue;
      }
      const auto code = static_cast<uint32_t>(rng.bits(2));
      host.put_full(LockPeripheral::kCode, code);
      bare.eval(true, code);
      CHECK(lp.fsm_state() == bare.state());
    }
  }
}

TEST_CASE("register maps") {
  TimerDevice timer;
  const auto tmap = timer.register_map();
  std::vector<std::string> names;
  for (const auto& r : tmap) {
    CHECK(r.offset % 4 == 0);
    names.push_back(r.name);
  }
  CHECK(names == std::vector<std::string>{"CTRL", "CFG", "MTIME_LOW", "MTIME_HIGH",
                                          "MTIMECMP_LOW", "MTIMECMP_HIGH", "INTR"});
  LockPeripheral lp({2, 4, 0});
  const auto lmap = lp.register_map();
  REQUIRE(lmap.size() == 3);
  CHECK(lmap[0].offset == 0x00);
  CHECK(lmap[0].name == "CTRL");
  CHECK(lmap[1].offset == 0x04);
  CHECK(lmap[1].name == "CODE");
  CHECK(lmap[2].offset == 0x08);
  CHECK(lmap[2].name == "STATUS");
  CHECK(lmap[2].access == Access::ReadOnly);
  const auto md = render_register_map(lp);
  CHECK(md.find("| 0x08 | STATUS | RO |") != std::string::npos);
}

TEST_CASE("device snapshots round trip and reject strangers") {
  Bench b;
  TimerDevice timer;
  reset(timer, b.tracer);
  BusHost host(timer, b.tracer);
  host.put_full(TimerDevice::kCtrl, 1);
  const auto snap = timer.snapshot();
  host.wait();
  timer.restore(snap);
  CHECK(timer.snapshot() == snap);
  LockPeripheral lp({2, 4, 0});
  CHECK_THROWS_AS(lp.restore(snap), std::invalid_argument);
  CHECK_THROWS_AS(timer.restore(lp.snapshot()), std::invalid_argument);
}
