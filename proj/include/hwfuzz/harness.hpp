#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hwfuzz/bus.hpp"
#include "hwfuzz/coverage.hpp"
#include "hwfuzz/grammar.hpp"
#include "hwfuzz/model.hpp"

namespace hwfuzz {

// Where a test execution starts. AtStart re-instantiates the model and
// simulates its reset for every test; AfterReset restores a snapshot taken
// once right after reset. Both give identical outcomes.
enum class ForkPoint : uint8_t { AtStart, AfterReset };

inline constexpr unsigned kResetCycles = 2;

struct Crash {
  std::string assertion;
  uint64_t cycle;  // 1-based test cycle at which the assertion fired
  friend bool operator==(const Crash&, const Crash&) = default;
};

struct TestOutcome {
  std::optional<Crash> crash;
  uint64_t executed_cycles = 0;
  uint64_t decoded_instructions = 0;  // bus instructions performed
  std::vector<EdgeHit> edges;         // sorted by index
  std::vector<uint32_t> fsm_states;   // distinct states visited, sorted

  bool crashed() const { return crash.has_value(); }
  friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

// Work spent on a run that does not affect its outcome.
struct RunCost {
  uint64_t reset_cycles = 0;
  bool reinstantiated = false;
};

struct HarnessOptions {
  ForkPoint fork_point = ForkPoint::AtStart;
  Scope scope = Scope::DutOnly;
};

class Harness {
 public:
  virtual ~Harness() = default;

  void configure(const HarnessOptions& options);
  const HarnessOptions& options() const { return options_; }

  TestOutcome run(std::span<const uint8_t> bytes);

  // Coverage of the most recent run.
  const CoverageMap& coverage() const { return map_; }
  const RunCost& last_cost() const { return cost_; }
  size_t fsm_state_count() const { return model().fsm_state_count(); }
  virtual std::string describe() const = 0;

 protected:
  explicit Harness(std::unique_ptr<Model> prototype);

  Model& model() { return *model_; }
  const Model& model() const { return *model_; }
  Tracer& tracer() { return tracer_; }

  // Apply stimulus for one test; stops at the first assertion failure.
  virtual void execute(std::span<const uint8_t> bytes, TestOutcome& out) = 0;
  // Re-point any references to the model after it was replaced.
  virtual void on_model_replaced() {}

  // Check assertions after a cycle; returns true if the test must stop.
  bool end_cycle(TestOutcome& out);

 private:
  void prepare();
  void capture_fork_state();

  std::unique_ptr<Model> prototype_;
  std::unique_ptr<Model> model_;
  HarnessOptions options_;
  CoverageMap map_;
  Tracer tracer_;
  RunCost cost_;
  std::vector<uint32_t> visited_;

  // State at the post-reset fork point.
  DutSnapshot fork_snapshot_;
  CoverageMap fork_map_;
  uint16_t fork_prev_site_ = 0;
};

// Maps a flat byte string onto the DUT's input ports cycle by cycle: each
// cycle consumes ceil(width/8) little-endian bytes per port, in declaration
// order, then advances the clock once. A port that runs out of bytes is
// zero-filled and the test ends after that cycle.
class GenericHarness final : public Harness {
 public:
  explicit GenericHarness(std::unique_ptr<DutModel> dut, HarnessOptions options = {});
  std::string describe() const override;
  size_t bytes_per_cycle() const;

 protected:
  void execute(std::span<const uint8_t> bytes, TestOutcome& out) override;
};

// Decodes the byte string into wait/read/write instructions and performs
// them as TL-UL transactions against the attached device. Each instruction
// takes one clock cycle.
class BusHarness final : public Harness {
 public:
  BusHarness(std::unique_ptr<MmioDevice> device, GrammarFormat format,
             HarnessOptions options = {});
  std::string describe() const override;
  const GrammarFormat& format() const { return format_; }

 protected:
  void execute(std::span<const uint8_t> bytes, TestOutcome& out) override;

 private:
  GrammarFormat format_;
};

// One-shot conveniences over the harness classes.
TestOutcome run_generic(const DutModel& dut, std::span<const uint8_t> bytes,
                        ForkPoint fork_point, Scope scope = Scope::DutOnly);
TestOutcome run_bus(const MmioDevice& device, std::span<const uint8_t> bytes,
                    GrammarFormat format, ForkPoint fork_point,
                    Scope scope = Scope::DutOnly);

std::string_view to_string(ForkPoint f);
std::string_view to_string(Scope s);
ForkPoint parse_fork_point(std::string_view s);
Scope parse_scope(std::string_view s);

}  // namespace hwfuzz
