#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hwfuzz/fuzzer.hpp"
#include "hwfuzz/grammar.hpp"
#include "hwfuzz/targets.hpp"

namespace hwfuzz {

enum class ExperimentKind : uint8_t {
  FuzzVsCrv,
  InstrumentationScope,
  ForkPoint,
  GrammarAblation,
  EmptySeedCoverage,
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::FuzzVsCrv;
  std::vector<unsigned> n_grid = {1, 2};
  std::vector<unsigned> m_grid = {1, 2};
  // Bus device for grammar_ablation and empty_seed_coverage.
  std::vector<std::string> devices = {"lock_peripheral"};
  unsigned trials = 5;
  uint64_t base_seed = 1;
  // Each lock's code table is seeded from this and its (N, M).
  uint64_t lock_seed = 0x10C4;
  Budget fuzz_budget{1'000'000, 0, 0};
  Budget crv_budget{0, 10'000'000, 0};
  std::vector<OpcodeFormat> opcode_formats = {OpcodeFormat::Constant};
  std::vector<FrameFormat> frame_formats = {FrameFormat::Variable};
  ForkPoint fork_point = ForkPoint::AfterReset;
  Scope scope = Scope::DutOnly;
  size_t max_len = kDefaultMaxLen;
  unsigned havoc_stack_max = 16;
  uint64_t sample_every = 1000;
  size_t trace_points = 100;
  unsigned workers = 0;  // 0: hardware concurrency
  std::filesystem::path out_dir = "out";

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string experiment_config_json(const ExperimentConfig& config);

LockConfig cell_lock(const ExperimentConfig& config, unsigned n, unsigned m);

// One trial of one condition in one grid cell.
struct TrialRecord {
  std::string cell;       // e.g. "n4_m4" or "timer"
  std::string condition;  // e.g. "fuzz", "crv", "dut_only", "constant_variable"
  unsigned n = 0;
  unsigned m = 0;
  unsigned trial = 0;
  uint64_t seed = 0;
  CampaignResult result;
  // Reachable-edge fraction for empty-seed campaigns, else negative.
  double reachable_fraction = -1;

  // To first crash, or the total spent when the trial was censored.
  bool censored() const { return !result.crashed(); }
  double execs() const;
  double sim_cycles() const;
  double wall_ms() const;
};

struct TracePoint {
  double execs = 0;
  double sim_cycles = 0;
  double wall_ms = 0;
  double edges_covered = 0;
  double fsm_fraction = 0;
};

// Averages the trials' step-function trajectories on a common exec grid of
// `points` samples. Trials that stopped early hold their last sample.
std::vector<TracePoint> report_coverage_trace(const std::vector<const CampaignResult*>& runs,
                                              size_t points);

struct ExperimentSummary {
  std::filesystem::path out_dir;
  std::vector<TrialRecord> trials;
};

// Runs every trial on a worker pool and writes the CSV artifacts into
// config.out_dir.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// DUT edges reached by structured directed tests that know the register map
// and the lock codes.
std::vector<uint16_t> reference_edges(const TargetConfig& target, uint64_t seed = 7);
double reachable_fraction(const CoverageMap& global, const std::vector<uint16_t>& reference);

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view s);

}  // namespace hwfuzz
