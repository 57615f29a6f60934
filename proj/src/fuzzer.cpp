#include "hwfuzz/fuzzer.hpp"
#include "hwfuzz/rng.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <fstream>
#include <stdexcept>

namespace hwfuzz {

namespace {

using Clock = std::chrono::steady_clock;

constexpr size_t kTrimMinBytes = 4;
constexpr size_t kTrimStartSteps = 16;
constexpr size_t kTrimEndSteps = 1024;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct QueueEntry {
  TestCase tc;
  std::vector<uint16_t> edges;
  double raised = 0;  // coverage classes raised at discovery
  double score = 0;   // raised per byte
  bool favored = false;
  bool fuzzed = false;
  bool trimmed = false;
};

// Order-independent hash of the bucketed coverage of a run.
uint64_t class_checksum(const CoverageMap& map) {
  uint64_t sum = 0;
  for (uint16_t idx : map.touched()) {
    sum += splitmix64((uint64_t{idx} << 8) | count_class(map[idx]));
  }
  return sum;
}

class Campaign {
 public:
  Campaign(Harness& harness, const FuzzerConfig& config)
      : harness_(harness),
        config_(config),
        rng_(config.rng_seed),
        mutator_({config.max_len, config.havoc_stack_max}),
        fsm_(0),
        top_rated_(kMapSize, -1) {
    harness_.configure({config.fork_point, config.scope});
    fsm_ = FsmCoverage(harness_.fsm_state_count());
  }

  CampaignResult run(const std::vector<TestCase>& seeds) {
    start_ = Clock::now();
    for (const auto& seed : seeds) {
      if (done()) break;
      Bytes bytes = seed.bytes;
      if (bytes.size() > config_.max_len) bytes.resize(config_.max_len);
      execute(bytes, std::nullopt, /*is_seed=*/true);
    }
    sample();
    size_t cursor = 0;
    while (!done() && !queue_.empty()) {
      if (cull_needed_) cull();
      const size_t idx = cursor;
      cursor = (cursor + 1) % queue_.size();
      if (skip(queue_[idx])) continue;
      fuzz_one(idx);
    }
    finish();
    return std::move(result_);
  }

 private:
  bool done() {
    if (config_.stop_on_first_crash && result_.crashed()) return true;
    const Budget& b = config_.budget;
    if (b.max_execs && result_.total_execs >= b.max_execs) return true;
    if (b.max_sim_cycles && result_.total_sim_cycles >= b.max_sim_cycles) return true;
    if (b.max_wall_ms && ms_since(start_) >= static_cast<double>(b.max_wall_ms)) return true;
    return false;
  }

  bool skip(const QueueEntry& e) {
    if (pending_favored_ > 0) {
      return (e.fuzzed || !e.favored) && rng_.chance(99, 100);
    }
    if (!e.favored && queue_.size() > 10) {
      return e.fuzzed ? rng_.chance(95, 100) : rng_.chance(75, 100);
    }
    return false;
  }

  // Drop blocks that do not change the bucketed coverage, largest first.
  void trim(size_t idx) {
    queue_[idx].trimmed = true;
    Bytes cur = queue_[idx].tc.bytes;
    if (cur.size() < kTrimMinBytes) return;
    const uint64_t want = quiet_run(cur).value_or(0);
    bool changed = false;
    size_t len_p2 = std::bit_ceil(cur.size());
    size_t remove = std::max(len_p2 / kTrimStartSteps, kTrimMinBytes);
    const size_t last = std::max(len_p2 / kTrimEndSteps, kTrimMinBytes);
    while (remove >= last && !done()) {
      size_t pos = remove;
      while (pos < cur.size() && !done()) {
        const size_t n = std::min(remove, cur.size() - pos);
        Bytes cand = cur;
        cand.erase(cand.begin() + static_cast<ptrdiff_t>(pos),
                   cand.begin() + static_cast<ptrdiff_t>(pos + n));
        if (quiet_run(cand) == want) {
          cur = std::move(cand);
          changed = true;
        } else {
          pos += remove;
        }
      }
      remove /= 2;
    }
    if (changed) {
      auto& e = queue_[idx];
      e.tc.bytes = std::move(cur);
      e.score = e.raised / static_cast<double>(std::max<size_t>(1, e.tc.bytes.size()));
      for (uint16_t edge : e.edges) {
        int64_t& top = top_rated_[edge];
        if (top < 0 || e.score > queue_[static_cast<size_t>(top)].score) {
          top = static_cast<int64_t>(idx);
        }
      }
      cull_needed_ = true;
    }
  }

  // Executes without queueing; returns the coverage checksum, or nothing if
  // the run crashed.
  std::optional<uint64_t> quiet_run(const Bytes& bytes) {
    const TestOutcome out = harness_.run(bytes);
    ++result_.total_execs;
    result_.total_sim_cycles += out.executed_cycles + harness_.last_cost().reset_cycles;
    if (out.crash) return std::nullopt;
    return class_checksum(harness_.coverage());
  }

  void fuzz_one(size_t idx) {
    if (!queue_[idx].trimmed) trim(idx);
    const Bytes parent = queue_[idx].tc.bytes;
    const uint64_t parent_id = queue_[idx].tc.id;
    const unsigned energy = queue_[idx].favored ? config_.energy * 2 : config_.energy;
    for (unsigned i = 0; i < energy && !done(); ++i) {
      std::span<const uint8_t> partner;
      if (queue_.size() > 1) {
        size_t p = rng_.below(queue_.size() - 1);
        if (p >= idx) ++p;
        partner = queue_[p].tc.bytes;
      }
      Bytes child = mutator_.mutate(parent, rng_, partner);
      execute(child, parent_id, false);
    }
    auto& e = queue_[idx];
    if (!e.fuzzed) {
      e.fuzzed = true;
      if (e.favored && pending_favored_ > 0) --pending_favored_;
    }
  }

  void execute(const Bytes& bytes, std::optional<uint64_t> parent, bool is_seed) {
    const TestOutcome out = harness_.run(bytes);
    ++result_.total_execs;
    result_.total_sim_cycles += out.executed_cycles + harness_.last_cost().reset_cycles;
    fsm_.visit(out.fsm_states);
    const CoverageMap& map = harness_.coverage();

    if (out.crash) {
      if (!result_.crashed()) {
        result_.execs_to_first_crash = result_.total_execs;
        result_.sim_cycles_to_first_crash = result_.total_sim_cycles;
        result_.wall_ms_to_first_crash = ms_since(start_);
      }
      if (merge(crash_global_, map) > 0 || result_.crashes.empty()) {
        result_.events.push_back(
            {result_.total_execs, EventKind::Crash, result_.crashes.size()});
        result_.crashes.push_back({bytes, *out.crash, result_.total_execs});
      }
      sample();
      return;
    }

    const size_t raised = merge(global_, map);
    if (raised > 0 || is_seed) {
      QueueEntry e;
      e.tc = {bytes, next_id_++, parent, result_.total_execs};
      e.edges.assign(map.touched().begin(), map.touched().end());
      e.raised = static_cast<double>(raised);
      e.score = static_cast<double>(raised) / static_cast<double>(std::max<size_t>(1, bytes.size()));
      const auto qi = static_cast<int64_t>(queue_.size());
      for (uint16_t edge : e.edges) {
        int64_t& top = top_rated_[edge];
        if (top < 0 || e.score > queue_[static_cast<size_t>(top)].score) top = qi;
      }
      result_.events.push_back({result_.total_execs, EventKind::Queued, e.tc.id});
      queue_.push_back(std::move(e));
      cull_needed_ = true;
      sample();
    } else if (config_.sample_every && result_.total_execs % config_.sample_every == 0) {
      sample();
    }
  }

  // Mark a minimal set of entries that together hold the best-rated entry
  // for every covered edge.
  void cull() {
    cull_needed_ = false;
    std::vector<bool> covered(kMapSize, false);
    for (auto& e : queue_) e.favored = false;
    pending_favored_ = 0;
    for (uint16_t edge : global_.touched()) {
      const int64_t top = top_rated_[edge];
      if (top < 0 || covered[edge]) continue;
      auto& e = queue_[static_cast<size_t>(top)];
      if (!e.favored) {
        e.favored = true;
        if (!e.fuzzed) ++pending_favored_;
      }
      for (uint16_t x : e.edges) covered[x] = true;
    }
  }

  void sample() {
    CoverageSample s;
    s.execs = result_.total_execs;
    s.sim_cycles = result_.total_sim_cycles;
    s.wall_ms = ms_since(start_);
    s.edges_covered = global_.edges_covered();
    s.fsm_fraction = fsm_.fraction();
    if (!result_.trajectory.empty() && result_.trajectory.back().execs == s.execs) {
      result_.trajectory.back() = s;
    } else {
      result_.trajectory.push_back(s);
    }
  }

  void finish() {
    sample();
    result_.wall_ms = ms_since(start_);
    result_.edges_covered = global_.edges_covered();
    result_.fsm_fraction = fsm_.fraction();
    result_.covered_edges.assign(global_.touched().begin(), global_.touched().end());
    std::sort(result_.covered_edges.begin(), result_.covered_edges.end());
    result_.queue.reserve(queue_.size());
    for (auto& e : queue_) result_.queue.push_back(std::move(e.tc));
  }

  Harness& harness_;
  FuzzerConfig config_;
  Rng rng_;
  Mutator mutator_;
  CoverageMap global_;
  CoverageMap crash_global_;
  FsmCoverage fsm_;
  std::vector<QueueEntry> queue_;
  std::vector<int64_t> top_rated_;
  size_t pending_favored_ = 0;
  bool cull_needed_ = false;
  uint64_t next_id_ = 0;
  Clock::time_point start_;
  CampaignResult result_;
};

bool same_samples(const std::vector<CoverageSample>& a, const std::vector<CoverageSample>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].execs != b[i].execs || a[i].sim_cycles != b[i].sim_cycles ||
        a[i].edges_covered != b[i].edges_covered || a[i].fsm_fraction != b[i].fsm_fraction) {
      return false;
    }
  }
  return true;
}

void write_file(const std::filesystem::path& p, const Bytes& bytes) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

bool same_exec_metrics(const CampaignResult& a, const CampaignResult& b) {
  if (a.execs_to_first_crash != b.execs_to_first_crash ||
      a.sim_cycles_to_first_crash != b.sim_cycles_to_first_crash ||
      a.total_execs != b.total_execs || a.total_sim_cycles != b.total_sim_cycles ||
      a.edges_covered != b.edges_covered || a.fsm_fraction != b.fsm_fraction ||
      a.events != b.events || a.queue.size() != b.queue.size() ||
      a.crashes.size() != b.crashes.size()) {
    return false;
  }
  for (size_t i = 0; i < a.queue.size(); ++i) {
    if (a.queue[i].bytes != b.queue[i].bytes) return false;
  }
  for (size_t i = 0; i < a.crashes.size(); ++i) {
    if (a.crashes[i].bytes != b.crashes[i].bytes || !(a.crashes[i].crash == b.crashes[i].crash)) {
      return false;
    }
  }
  return same_samples(a.trajectory, b.trajectory);
}

CampaignResult fuzz_campaign(Harness& harness, const std::vector<TestCase>& seeds,
                             const FuzzerConfig& config) {
  if (seeds.empty()) throw std::invalid_argument("fuzz_campaign needs at least one seed");
  if (!config.budget.bounded()) {
    throw std::invalid_argument("fuzz_campaign needs at least one finite budget bound");
  }
  Campaign c(harness, config);
  return c.run(seeds);
}

void write_artifacts(const CampaignResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "queue");
  std::filesystem::create_directories(dir / "crashes");
  for (const auto& tc : result.queue) {
    write_file(dir / "queue" / ("id" + std::to_string(tc.id) + ".hwf"), tc.bytes);
  }
  for (size_t i = 0; i < result.crashes.size(); ++i) {
    write_file(dir / "crashes" / ("id" + std::to_string(i) + ".hwf"), result.crashes[i].bytes);
  }
}

CampaignResult crv_campaign(const LockConfig& lock_config, const CrvConfig& config) {
  if (!config.budget.bounded()) {
    throw std::invalid_argument("crv_campaign needs at least one finite budget bound");
  }
  DigitalLock lock(lock_config);
  Rng rng(config.rng_seed);
  FsmCoverage fsm(lock_config.state_count());
  const uint32_t length = lock_config.unlocked_state();
  const unsigned width = lock_config.code_width;
  const auto start = Clock::now();
  CampaignResult r;
  std::vector<uint32_t> codes(length);

  auto sample = [&] {
    r.trajectory.push_back({r.total_execs, r.total_sim_cycles, ms_since(start), 0,
                            fsm.fraction()});
  };

  const Budget& b = config.budget;
  while (true) {
    if (b.max_execs && r.total_execs >= b.max_execs) break;
    if (b.max_sim_cycles && r.total_sim_cycles >= b.max_sim_cycles) break;
    if (b.max_wall_ms && (r.total_execs & 1023) == 0 &&
        ms_since(start) >= static_cast<double>(b.max_wall_ms)) {
      break;
    }
    ++r.total_execs;
    for (unsigned i = 0; i < kResetCycles; ++i) lock.eval(false, 0);
    r.total_sim_cycles += kResetCycles;
    fsm.visit(lock.state());
    bool opened = false;
    uint32_t cycle = 0;
    while (cycle < length) {
      codes[cycle] = static_cast<uint32_t>(rng.bits(width));
      lock.eval(true, codes[cycle]);
      ++cycle;
      fsm.visit(lock.state());
      if (lock.unlocked()) {
        opened = true;
        break;
      }
    }
    r.total_sim_cycles += cycle;
    if (config.sample_every && r.total_execs % config.sample_every == 0) sample();
    if (opened) {
      r.execs_to_first_crash = r.total_execs;
      r.sim_cycles_to_first_crash = r.total_sim_cycles;
      r.wall_ms_to_first_crash = ms_since(start);
      // Encoded as generic-harness input so the crash can be replayed.
      Bytes bytes;
      const unsigned per_code = (width + 7) / 8;
      for (uint32_t i = 0; i < cycle; ++i) {
        for (unsigned k = 0; k < per_code; ++k) {
          bytes.push_back(static_cast<uint8_t>(codes[i] >> (8 * k)));
        }
      }
      r.events.push_back({r.total_execs, EventKind::Crash, 0});
      r.crashes.push_back({std::move(bytes), Crash{"unlocked", cycle}, r.total_execs});
      break;
    }
  }
  sample();
  r.wall_ms = ms_since(start);
  r.fsm_fraction = fsm.fraction();
  return r;
}

}  // namespace hwfuzz
