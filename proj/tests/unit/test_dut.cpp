#include <set>

#include "doctest.h"
#include "hwfuzz/lock.hpp"
#include "hwfuzz/rng.hpp"

using namespace hwfuzz;

TEST_CASE("lock config bounds name the field") {
  CHECK_THROWS_WITH_AS(DigitalLock(LockConfig{0, 4, 0}), doctest::Contains("state_bits"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(DigitalLock(LockConfig{17, 4, 0}), doctest::Contains("state_bits"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(DigitalLock(LockConfig{2, 0, 0}), doctest::Contains("code_width"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(DigitalLock(LockConfig{2, 33, 0}), doctest::Contains("code_width"),
                       std::invalid_argument);
  CHECK_NOTHROW(DigitalLock(LockConfig{16, 32, 0}));
}

TEST_CASE("smallest lock has one comparable code in {0,1}") {
  DigitalLock lock({1, 1, 7});
  REQUIRE(lock.unlock_sequence().size() == 1);
  CHECK(lock.unlock_sequence()[0] <= 1);
}

TEST_CASE("code tables are deterministic per seed") {
  DigitalLock a({2, 4, 99}), b({2, 4, 99}), c({2, 4, 100});
  CHECK(std::vector<uint32_t>(a.correct_codes().begin(), a.correct_codes().end()) ==
        std::vector<uint32_t>(b.correct_codes().begin(), b.correct_codes().end()));
  DigitalLock big({6, 4, 1});
  CHECK(big.config().state_count() == 64);
  CHECK(big.correct_codes().size() == 64);
  for (uint32_t code : big.correct_codes()) CHECK(code < 16);
  (void)c;
}

TEST_CASE("correct codes walk the lock open on the last one") {
  DigitalLock lock({2, 4, 3});
  const auto seq = lock.unlock_sequence();
  REQUIRE(seq.size() == 3);
  std::vector<bool> out;
  for (uint32_t code : seq) out.push_back(lock.eval(true, code));
  CHECK(out == std::vector<bool>{false, false, true});
  CHECK(lock.state() == 3);
}

TEST_CASE("wrong code holds state") {
  DigitalLock lock({2, 4, 3});
  const auto seq = lock.unlock_sequence();
  const uint32_t wrong = (seq[0] + 1) & 0xF;
  CHECK_FALSE(lock.eval(true, wrong));
  CHECK(lock.state() == 0);
  int cycles = 1;
  for (uint32_t code : seq) {
    lock.eval(true, code);
    ++cycles;
  }
  CHECK(lock.unlocked());
  CHECK(cycles == 4);
}

TEST_CASE("reset clears state and unlocked") {
  DigitalLock lock({2, 4, 3});
  for (uint32_t code : lock.unlock_sequence()) lock.eval(true, code);
  REQUIRE(lock.unlocked());
  CHECK_FALSE(lock.eval(false, 0));
  CHECK(lock.state() == 0);
}

TEST_CASE("unlocked state is sticky until reset and inputs are masked") {
  DigitalLock lock({1, 2, 5});
  const uint32_t code = lock.unlock_sequence()[0];
  CHECK(lock.eval(true, code | 0xF0u));
  for (uint32_t c = 0; c < 8; ++c) CHECK(lock.eval(true, c));
}

TEST_CASE("state never decreases without reset") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    DigitalLock lock({3, 2, rng()});
    uint32_t prev = 0;
    for (int i = 0; i < 200; ++i) {
      lock.eval(true, static_cast<uint32_t>(rng.bits(2)));
      CHECK(lock.state() >= prev);
      CHECK(lock.unlocked() == (lock.state() == 7));
      prev = lock.state();
    }
  }
}

TEST_CASE("snapshot restore is equivalent to the unrestored run") {
  LockConfig cfg{3, 3, 8};
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<uint32_t> prefix(rng.below(10)), suffix(rng.below(10));
    for (auto& c : prefix) c = static_cast<uint32_t>(rng.bits(3));
    for (auto& c : suffix) c = static_cast<uint32_t>(rng.bits(3));

    CoverageMap m1, m2;
    Tracer t1(m1, Scope::All), t2(m2, Scope::All);
    DigitalLock straight(cfg), resumed(cfg);
    for (auto c : prefix) {
      straight.eval(true, c, &t1);
      resumed.eval(true, c, &t2);
    }
    const auto snap = resumed.snapshot();
    for (int i = 0; i < 5; ++i) resumed.eval(true, static_cast<uint32_t>(rng.bits(3)));
    resumed.restore(snap);
    CHECK(resumed.snapshot() == snap);
    std::vector<bool> a, b;
    for (auto c : suffix) {
      a.push_back(straight.eval(true, c, &t1));
      b.push_back(resumed.eval(true, c, &t2));
    }
    CHECK(a == b);
    CHECK(straight.state() == resumed.state());
  }
}

TEST_CASE("snapshot after reset then correct codes unlocks in 2^N - 1 cycles") {
  DigitalLock lock({3, 4, 21});
  lock.eval(false, 0);
  const auto snap = lock.snapshot();
  for (uint32_t c = 0; c < 30; ++c) lock.eval(true, c * 7);
  lock.restore(snap);
  unsigned cycles = 0;
  for (uint32_t code : lock.unlock_sequence()) {
    lock.eval(true, code);
    ++cycles;
  }
  CHECK(lock.unlocked());
  CHECK(cycles == 7);
}

TEST_CASE("restore rejects a snapshot from another configuration") {
  DigitalLock a({2, 4, 1}), b({3, 4, 1}), c({2, 4, 2});
  CHECK_THROWS_AS(b.restore(a.snapshot()), std::invalid_argument);
  CHECK_THROWS_AS(c.restore(a.snapshot()), std::invalid_argument);
  CHECK_NOTHROW(a.restore(a.snapshot()));
}

TEST_CASE("identical runs emit identical coverage") {
  CoverageMap m1, m2;
  Tracer t1(m1, Scope::All), t2(m2, Scope::All);
  DigitalLock a({2, 2, 6}), b({2, 2, 6});
  for (uint32_t c : {1u, 3u, 0u, 2u, 2u, 1u}) {
    a.eval(true, c, &t1);
    b.eval(true, c, &t2);
  }
  CHECK(m1 == m2);
  CHECK(m1.edges_covered() > 0);
}

TEST_CASE("lock dut ports and assertion") {
  LockDut dut({2, 4, 3});
  REQUIRE(dut.inputs().size() == 1);
  CHECK(dut.inputs()[0].name == "code");
  CHECK(dut.inputs()[0].width == 4);
  LockDut with_reset({2, 4, 3}, {true, true});
  REQUIRE(with_reset.inputs().size() == 2);
  CHECK(with_reset.inputs()[0].name == "reset_n");

  CoverageMap m;
  Tracer t(m, Scope::All);
  for (uint32_t code : dut.lock().unlock_sequence()) {
    dut.set_input(0, code);
    dut.step(t);
  }
  CHECK(dut.check_assertions() == std::optional<std::string>("unlocked"));
  CHECK_FALSE(dut.check_assertions().has_value());
  dut.rearm_assertions();
  CHECK(dut.check_assertions().has_value());
}

TEST_CASE("assertion registry") {
  AssertionRegistry<int> reg;
  reg.add("positive", [](const int& v) { return v > 0; });
  reg.add("small", [](const int& v) { return v < 10; });
  CHECK_FALSE(reg.check(5).has_value());
  CHECK(reg.check(20) == std::optional<std::string>("small"));
  CHECK(reg.check(-1) == std::optional<std::string>("positive"));
  CHECK(reg.remove("small"));
  CHECK_FALSE(reg.remove("small"));
  CHECK(reg.names() == std::vector<std::string>{"positive"});
}
