#include "../oracles.hpp"
#include "doctest.h"
#include "hwfuzz/fuzzer.hpp"
#include "hwfuzz/stats.hpp"
#include "hwfuzz/targets.hpp"

using namespace hwfuzz;

namespace {

// Fails its assertion on the first cycle of every test.
class AlwaysFails final : public DutModel {
 public:
  std::string name() const override { return "always_fails"; }
  std::unique_ptr<Model> fresh() const override { return std::make_unique<AlwaysFails>(); }
  void reset_cycle(Tracer&) override {}
  DutSnapshot snapshot() const override { return {2, {}}; }
  void restore(const DutSnapshot&) override {}
  void rearm_assertions() override { fired_ = false; }
  std::optional<std::string> check_assertions() override {
    if (fired_) return std::nullopt;
    fired_ = true;
    return "always";
  }
  std::span<const PortSpec> inputs() const override { return ports_; }
  void set_input(size_t, uint64_t) override {}
  void step(Tracer& t) override { t.site(Component::Dut, site_id("always.step")); }

 private:
  bool fired_ = false;
  std::vector<PortSpec> ports_{{"x", 8}};
};

FuzzerConfig small_config(uint64_t seed, uint64_t execs) {
  FuzzerConfig c;
  c.rng_seed = seed;
  c.budget.max_execs = execs;
  c.sample_every = 100;
  return c;
}

}  // namespace

TEST_CASE("mutator examples") {
  Bytes one{0x00};
  flip_bits(one, 0, 1);
  CHECK(one == Bytes{0x01});

  Bytes a{1, 2, 3, 4}, b{9, 8, 7};
  CHECK(splice(a, 2, b, 1) == Bytes{1, 2, 8, 7});

  Bytes d{5};
  delete_block(d, 0, 1);
  CHECK(d.empty());

  Bytes arith{0xFF, 0x00};
  add_arith(arith, 0, 2, 1, false);
  CHECK(arith == Bytes{0x00, 0x01});
  Bytes be{0x00, 0xFF};
  add_arith(be, 0, 2, 1, true);
  CHECK(be == Bytes{0x01, 0x00});

  Bytes in{0, 0, 0, 0};
  set_interesting(in, 0, 4, -1, false);
  CHECK(in == Bytes{0xFF, 0xFF, 0xFF, 0xFF});
  CHECK(interesting_values(1).size() == 9);
  CHECK(interesting_values(2).size() == 19);
  CHECK(interesting_values(4).size() == 27);
}

TEST_CASE("mutations respect max_len") {
  Mutator m({64, 16});
  Rng rng(3);
  Bytes cur;
  for (int i = 0; i < 5000; ++i) {
    Bytes partner(rng.below(100), 0xAB);
    cur = m.mutate(cur, rng, partner);
    REQUIRE(cur.size() <= 64);
  }
  Bytes big(64, 1);
  for (int s = 0; s <= static_cast<int>(MutationStage::Splice); ++s) {
    for (int i = 0; i < 200; ++i) {
      CHECK(m.apply_stage(static_cast<MutationStage>(s), big, rng, big).size() <= 64);
    }
  }
}

TEST_CASE("mutation of the empty input produces bytes") {
  Mutator m;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(m.mutate({}, rng).empty());
}

TEST_CASE("campaign configuration errors") {
  auto h = make_harness({TargetKind::Lock, {1, 1, 0}, {}});
  CHECK_THROWS_AS(fuzz_campaign(*h, {}, small_config(1, 10)), std::invalid_argument);
  FuzzerConfig unbounded;
  CHECK_THROWS_AS(fuzz_campaign(*h, {TestCase{}}, unbounded), std::invalid_argument);
}

TEST_CASE("a harness that always fails crashes on the first exec") {
  GenericHarness h(std::make_unique<AlwaysFails>());
  const auto r = fuzz_campaign(h, {TestCase{{0x00}}}, small_config(1, 100));
  REQUIRE(r.crashed());
  CHECK(*r.execs_to_first_crash == 1);
  CHECK(r.crashes.size() == 1);
}

TEST_CASE("smallest lock falls from an empty seed") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto h = make_harness({TargetKind::Lock, {1, 1, seed}, {}});
    const auto r = fuzz_campaign(*h, {TestCase{}}, small_config(seed, 200));
    REQUIRE(r.crashed());
    CHECK(*r.execs_to_first_crash <= 200);
  }
}

TEST_CASE("campaigns are deterministic and crashes replay") {
  for (auto kind : {TargetKind::Lock, TargetKind::LockPeripheral}) {
    const TargetConfig t{kind, {2, 3, 5}, {OpcodeFormat::Constant, FrameFormat::Variable}};
    auto h1 = make_harness(t);
    auto h2 = make_harness(t);
    auto cfg = small_config(42, 200000);
    const auto a = fuzz_campaign(*h1, {TestCase{}}, cfg);
    const auto b = fuzz_campaign(*h2, {TestCase{}}, cfg);
    CHECK(same_exec_metrics(a, b));
    REQUIRE(a.crashed());
    for (const auto& c : a.crashes) {
      for (auto fp : {ForkPoint::AtStart, ForkPoint::AfterReset}) {
        auto replay = make_harness(t, {fp});
        const auto out = replay->run(c.bytes);
        REQUIRE(out.crashed());
        CHECK(*out.crash == c.crash);
      }
    }
  }
}

TEST_CASE("campaign invariants") {
  auto h = make_harness({TargetKind::LockPeripheral, {3, 3, 1}, {}});
  auto cfg = small_config(9, 20000);
  cfg.stop_on_first_crash = false;
  const auto r = fuzz_campaign(*h, {TestCase{}, TestCase{{0x01, 0x08, 0, 0, 0}}}, cfg);
  CHECK(r.total_execs == 20000);
  CHECK(r.crashed() == !r.crashes.empty());
  for (size_t i = 1; i < r.trajectory.size(); ++i) {
    CHECK(r.trajectory[i].edges_covered >= r.trajectory[i - 1].edges_covered);
    CHECK(r.trajectory[i].fsm_fraction >= r.trajectory[i - 1].fsm_fraction);
    CHECK(r.trajectory[i].execs > r.trajectory[i - 1].execs);
  }
  REQUIRE(r.queue.size() >= 2);
  CHECK_FALSE(r.queue[0].parent.has_value());
  CHECK_FALSE(r.queue[1].parent.has_value());
  for (const auto& tc : r.queue) CHECK(tc.bytes.size() <= cfg.max_len);
  CHECK(r.edges_covered == r.covered_edges.size());
  CHECK(r.edges_covered == r.trajectory.back().edges_covered);
}

TEST_CASE("cycle and wall budgets stop campaigns") {
  auto h = make_harness({TargetKind::Lock, {8, 8, 1}, {}});
  FuzzerConfig c;
  c.budget.max_sim_cycles = 5000;
  const auto r = fuzz_campaign(*h, {TestCase{}}, c);
  CHECK_FALSE(r.crashed());
  CHECK(r.total_sim_cycles >= 5000);
  FuzzerConfig w;
  w.budget.max_wall_ms = 50;
  const auto r2 = fuzz_campaign(*h, {TestCase{}}, w);
  CHECK(r2.wall_ms >= 50);
  CHECK(r2.wall_ms < 2000);
}

TEST_CASE("artifacts are written with queue and crash names") {
  auto h = make_harness({TargetKind::Lock, {1, 2, 3}, {}});
  const auto r = fuzz_campaign(*h, {TestCase{}}, small_config(1, 1000));
  const auto dir = std::filesystem::temp_directory_path() / "hwfuzz_unit_artifacts";
  std::filesystem::remove_all(dir);
  write_artifacts(r, dir);
  for (const auto& tc : r.queue) {
    CHECK(std::filesystem::exists(dir / "queue" / ("id" + std::to_string(tc.id) + ".hwf")));
  }
  CHECK(std::filesystem::exists(dir / "crashes" / "id0.hwf") == r.crashed());
  std::filesystem::remove_all(dir);
}

TEST_CASE("crv attempts follow the geometric mean") {
  for (unsigned m : {1u, 2u}) {
    std::vector<double> attempts;
    for (uint64_t s = 0; s < 4000; ++s) {
      CrvConfig c{s, {1000, 0, 0}, 0};
      const auto r = crv_campaign({1, m, 77}, c);
      REQUIRE(r.crashed());
      attempts.push_back(static_cast<double>(*r.execs_to_first_crash));
    }
    CHECK(mean(attempts) == doctest::Approx(oracle::crv_expected_attempts(1, m)).epsilon(0.1));
  }
}

TEST_CASE("crv crash bytes replay on the generic harness") {
  const LockConfig lock{2, 2, 4};
  const auto r = crv_campaign(lock, {3, {100000, 0, 0}, 0});
  REQUIRE(r.crashed());
  const auto out = run_generic(LockDut(lock), r.crashes[0].bytes, ForkPoint::AtStart);
  REQUIRE(out.crashed());
  CHECK(*out.crash == r.crashes[0].crash);
  CHECK(*r.sim_cycles_to_first_crash ==
        *r.execs_to_first_crash * kResetCycles + (*r.execs_to_first_crash - 1) * 3 +
            r.crashes[0].crash.cycle);
}
