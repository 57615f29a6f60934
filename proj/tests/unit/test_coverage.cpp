#include "doctest.h"
#include "hwfuzz/coverage.hpp"
#include "hwfuzz/harness.hpp"
#include "hwfuzz/lock.hpp"
#include "hwfuzz/mutator.hpp"
#include "hwfuzz/rng.hpp"

using namespace hwfuzz;

TEST_CASE("edge index and count classes") {
  CHECK(edge_index(0x0002, 0x0010) == 0x0011);
  CHECK(edge_index(0xFFFF, 0x0000) == 0x7FFF);
  const uint8_t expected[] = {0, 1, 2, 3, 4, 4, 4, 4, 5, 5};
  for (int c = 0; c < 10; ++c) CHECK(count_class(static_cast<uint8_t>(c)) == expected[c]);
  CHECK(count_class(15) == 5);
  CHECK(count_class(16) == 6);
  CHECK(count_class(31) == 6);
  CHECK(count_class(32) == 7);
  CHECK(count_class(127) == 7);
  CHECK(count_class(128) == 8);
  CHECK(count_class(255) == 8);
}

TEST_CASE("trace counts, filters and saturates") {
  CoverageMap m;
  trace_edge(m, 1, 2, Component::Dut, Scope::DutOnly);
  trace_edge(m, 1, 2, Component::Dut, Scope::DutOnly);
  CHECK(m[edge_index(1, 2)] == 2);

  CoverageMap h;
  trace_edge(h, 1, 2, Component::Harness, Scope::DutOnly);
  trace_edge(h, 1, 2, Component::Bus, Scope::DutOnly);
  CHECK(h.edges_covered() == 0);
  trace_edge(h, 1, 2, Component::Harness, Scope::All);
  CHECK(h.edges_covered() == 1);

  CoverageMap s;
  for (int i = 0; i < 300; ++i) s.hit(9);
  CHECK(s[9] == 255);
  s.hit(9);
  CHECK(s[9] == 255);
}

TEST_CASE("interestingness") {
  CoverageMap global, test;
  test.hit(5);
  CHECK(is_interesting(test, global));
  merge(global, test);
  CHECK_FALSE(is_interesting(test, global));

  CoverageMap twice;
  twice.hit(5);
  twice.hit(5);
  CHECK(is_interesting(twice, global));

  // Same class (4-7) is not new.
  CoverageMap g2, a, b;
  for (int i = 0; i < 4; ++i) a.hit(1);
  for (int i = 0; i < 7; ++i) b.hit(1);
  merge(g2, a);
  CHECK_FALSE(is_interesting(b, g2));
}

TEST_CASE("merge is monotone and reaches a fixed point") {
  Rng rng(3);
  CoverageMap global;
  size_t prev_total = 0;
  for (int round = 0; round < 200; ++round) {
    CoverageMap m;
    const auto hits = rng.below(50);
    for (uint64_t i = 0; i < hits; ++i) m.hit(static_cast<uint16_t>(rng.below(64)));
    merge(global, m);
    CHECK_FALSE(is_interesting(m, global));
    const size_t total = class_total(global);
    CHECK(total >= prev_total);
    prev_total = total;
  }
}

TEST_CASE("dut-only map is a per-edge subset of the all map") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Bytes bytes(rng.below(64));
    for (auto& b : bytes) b = static_cast<uint8_t>(rng.bits(8));
    LockDut dut({3, 2, 4});
    GenericHarness dut_only(std::make_unique<LockDut>(dut), {ForkPoint::AtStart, Scope::DutOnly});
    GenericHarness all(std::make_unique<LockDut>(dut), {ForkPoint::AtStart, Scope::All});
    dut_only.run(bytes);
    all.run(bytes);
    for (uint16_t e : dut_only.coverage().touched()) {
      CHECK(dut_only.coverage()[e] <= all.coverage()[e]);
    }
    CHECK(all.coverage().edges_covered() >= dut_only.coverage().edges_covered());
  }
}

TEST_CASE("fsm coverage fraction") {
  CHECK(fsm_coverage_fraction(std::vector<uint32_t>{0}, 4) == doctest::Approx(0.25));
  CHECK(fsm_coverage_fraction(std::vector<uint32_t>{0, 1, 2, 3}, 4) == doctest::Approx(1.0));
  CHECK(fsm_coverage_fraction(std::vector<uint32_t>{0, 0, 0}, 4) == doctest::Approx(0.25));

  DigitalLock lock({2, 4, 1});
  FsmCoverage fsm(4);
  lock.eval(false, 0);
  fsm.visit(lock.state());
  CHECK(fsm.fraction() == doctest::Approx(0.25));
  for (uint32_t c : lock.unlock_sequence()) {
    lock.eval(true, c);
    fsm.visit(lock.state());
  }
  CHECK(fsm.fraction() == doctest::Approx(1.0));
}

TEST_CASE("map clear and assign touch only live entries") {
  CoverageMap a, b;
  a.hit(1);
  a.hit(1000);
  b.hit(7);
  b.assign(a);
  CHECK(b == a);
  CHECK(b[7] == 0);
  b.clear();
  CHECK(b.edges_covered() == 0);
  CHECK(b[1] == 0);
  CHECK(a.sparse() == std::vector<EdgeHit>{{1, 1}, {1000, 1}});
}

TEST_CASE("site ids are stable and distinguish indices") {
  static_assert(site_id("lock.match", 0) != site_id("lock.match", 1));
  CHECK(site_id("x") == site_id("x", 0));
}
