#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hwfuzz/harness.hpp"
#include "hwfuzz/lock.hpp"
#include "hwfuzz/mutator.hpp"

namespace hwfuzz {

inline constexpr size_t kDefaultMaxLen = 4096;

struct TestCase {
  Bytes bytes;
  uint64_t id = 0;
  std::optional<uint64_t> parent;  // empty for seeds
  uint64_t discovered_at_exec = 0;
};

// Campaign stops at whichever bound is hit first. Zero means unbounded;
// at least one bound must be set.
struct Budget {
  uint64_t max_execs = 0;
  uint64_t max_sim_cycles = 0;
  uint64_t max_wall_ms = 0;

  bool bounded() const { return max_execs || max_sim_cycles || max_wall_ms; }
};

struct FuzzerConfig {
  uint64_t rng_seed = 0;
  size_t max_len = kDefaultMaxLen;
  unsigned havoc_stack_max = 16;
  Budget budget;
  ForkPoint fork_point = ForkPoint::AtStart;
  Scope scope = Scope::DutOnly;
  bool stop_on_first_crash = true;
  // Trajectory sample period in execs (0 disables periodic samples; samples
  // are still taken on new coverage and at the end).
  uint64_t sample_every = 0;
  // Mutations per scheduled queue entry.
  unsigned energy = 32;
};

struct CoverageSample {
  uint64_t execs = 0;
  uint64_t sim_cycles = 0;
  double wall_ms = 0;
  uint64_t edges_covered = 0;
  double fsm_fraction = 0;
};

struct CrashRecord {
  Bytes bytes;
  Crash crash;
  uint64_t exec_index = 0;
};

enum class EventKind : uint8_t { Queued, Crash };

// Exec-indexed log of what the campaign discovered; wall-clock free.
struct CampaignEvent {
  uint64_t exec_index;
  EventKind kind;
  uint64_t id;
  friend bool operator==(const CampaignEvent&, const CampaignEvent&) = default;
};

struct CampaignResult {
  std::optional<uint64_t> execs_to_first_crash;
  std::optional<uint64_t> sim_cycles_to_first_crash;
  std::optional<double> wall_ms_to_first_crash;
  uint64_t total_execs = 0;
  uint64_t total_sim_cycles = 0;
  double wall_ms = 0;
  uint64_t edges_covered = 0;
  double fsm_fraction = 0;
  std::vector<uint16_t> covered_edges;  // sorted map indices
  std::vector<CoverageSample> trajectory;
  std::vector<TestCase> queue;
  std::vector<CrashRecord> crashes;
  std::vector<CampaignEvent> events;

  bool crashed() const { return execs_to_first_crash.has_value(); }
  size_t queue_size() const { return queue.size(); }
};

// True if the two results agree on everything except wall-clock fields.
bool same_exec_metrics(const CampaignResult& a, const CampaignResult& b);

// Coverage-guided campaign. The harness is reconfigured with the config's
// fork point and scope. Throws std::invalid_argument on an empty seed list
// or an unbounded budget.
CampaignResult fuzz_campaign(Harness& harness, const std::vector<TestCase>& seeds,
                             const FuzzerConfig& config);

// Writes queue/id{N}.hwf and crashes/id{N}.hwf under `dir`.
void write_artifacts(const CampaignResult& result, const std::filesystem::path& dir);

struct CrvConfig {
  uint64_t rng_seed = 0;
  Budget budget;
  // Attempts between trajectory samples (0: only the final sample).
  uint64_t sample_every = 0;
};

// Constrained-random baseline: reset the lock, drive 2^N - 1 uniformly random
// M-bit codes, repeat until it unlocks or the budget runs out. One attempt is
// one exec; reset cycles count toward simulated cycles.
CampaignResult crv_campaign(const LockConfig& lock, const CrvConfig& config);

}  // namespace hwfuzz
