#include "hwfuzz/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hwfuzz/rng.hpp"
#include "hwfuzz/stats.hpp"
#include "json.hpp"

namespace hwfuzz {

using nlohmann::json;

namespace {

Budget parse_budget(const json& j, const char* field) {
  if (!j.is_object()) throw std::invalid_argument(std::string(field) + " must be an object");
  Budget b;
  for (const auto& [key, value] : j.items()) {
    if (key == "max_execs") {
      b.max_execs = value.get<uint64_t>();
    } else if (key == "max_sim_cycles") {
      b.max_sim_cycles = value.get<uint64_t>();
    } else if (key == "max_wall_ms") {
      b.max_wall_ms = value.get<uint64_t>();
    } else {
      throw std::invalid_argument(std::string(field) + ": unknown key '" + key + "'");
    }
  }
  return b;
}

json budget_json(const Budget& b) {
  return {{"max_execs", b.max_execs},
          {"max_sim_cycles", b.max_sim_cycles},
          {"max_wall_ms", b.max_wall_ms}};
}

bool uses_lock_grid(const ExperimentConfig& c) {
  if (c.kind == ExperimentKind::FuzzVsCrv || c.kind == ExperimentKind::InstrumentationScope ||
      c.kind == ExperimentKind::ForkPoint) {
    return true;
  }
  return std::find(c.devices.begin(), c.devices.end(), "lock_peripheral") != c.devices.end();
}

std::string cell_name(unsigned n, unsigned m) {
  return "n" + std::to_string(n) + "_m" + std::to_string(m);
}

std::string format_name(OpcodeFormat op, FrameFormat fr) {
  return std::string(to_string(op)) + "_" + std::string(to_string(fr));
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

struct Job {
  std::string cell;
  std::string condition;
  unsigned n = 0;
  unsigned m = 0;
  unsigned trial = 0;
  uint64_t seed = 0;
  std::function<CampaignResult()> run;
  std::function<double(const CampaignResult&)> post;
};

FuzzerConfig base_fuzzer(const ExperimentConfig& c, uint64_t seed) {
  FuzzerConfig f;
  f.rng_seed = seed;
  f.max_len = c.max_len;
  f.havoc_stack_max = c.havoc_stack_max;
  f.budget = c.fuzz_budget;
  f.fork_point = c.fork_point;
  f.scope = c.scope;
  f.sample_every = c.sample_every;
  return f;
}

std::vector<Job> plan_jobs(const ExperimentConfig& c) {
  std::vector<Job> jobs;
  auto add = [&](std::string cell, std::string condition, unsigned n, unsigned m,
                 const std::function<CampaignResult(uint64_t)>& run,
                 std::function<double(const CampaignResult&)> post = nullptr) {
    for (unsigned t = 0; t < c.trials; ++t) {
      const uint64_t seed = c.base_seed + t;
      jobs.push_back({cell, condition, n, m, t, seed, [run, seed] { return run(seed); }, post});
    }
  };
  auto fuzz_lock = [&c](LockConfig lock, auto tweak) {
    return [&c, lock, tweak](uint64_t seed) {
      FuzzerConfig f = base_fuzzer(c, seed);
      tweak(f);
      TargetConfig target{TargetKind::Lock, lock, {}};
      auto h = make_harness(target);
      return fuzz_campaign(*h, {TestCase{}}, f);
    };
  };

  switch (c.kind) {
    case ExperimentKind::FuzzVsCrv:
      for (unsigned n : c.n_grid) {
        for (unsigned m : c.m_grid) {
          const LockConfig lock = cell_lock(c, n, m);
          add(cell_name(n, m), "fuzz", n, m, fuzz_lock(lock, [](FuzzerConfig&) {}));
          add(cell_name(n, m), "crv", n, m, [&c, lock](uint64_t seed) {
            CrvConfig crv{seed, c.crv_budget, c.sample_every};
            return crv_campaign(lock, crv);
          });
        }
      }
      break;
    case ExperimentKind::InstrumentationScope:
      for (unsigned n : c.n_grid) {
        for (unsigned m : c.m_grid) {
          const LockConfig lock = cell_lock(c, n, m);
          for (Scope s : {Scope::DutOnly, Scope::All}) {
            add(cell_name(n, m), std::string(to_string(s)), n, m,
                fuzz_lock(lock, [s](FuzzerConfig& f) { f.scope = s; }));
          }
        }
      }
      break;
    case ExperimentKind::ForkPoint:
      for (unsigned n : c.n_grid) {
        for (unsigned m : c.m_grid) {
          const LockConfig lock = cell_lock(c, n, m);
          for (ForkPoint fp : {ForkPoint::AtStart, ForkPoint::AfterReset}) {
            add(cell_name(n, m), std::string(to_string(fp)), n, m,
                fuzz_lock(lock, [fp](FuzzerConfig& f) { f.fork_point = fp; }));
          }
        }
      }
      break;
    case ExperimentKind::GrammarAblation:
    case ExperimentKind::EmptySeedCoverage: {
      const bool coverage = c.kind == ExperimentKind::EmptySeedCoverage;
      auto add_device = [&](const std::string& cell, TargetConfig target, unsigned n,
                            unsigned m) {
        for (OpcodeFormat op : c.opcode_formats) {
          for (FrameFormat fr : c.frame_formats) {
            TargetConfig t = target;
            t.format = {op, fr};
            std::function<double(const CampaignResult&)> post;
            if (coverage) {
              auto ref = std::make_shared<std::vector<uint16_t>>(reference_edges(t));
              post = [ref](const CampaignResult& r) {
                CoverageMap global;
                for (uint16_t e : r.covered_edges) global.hit(e);
                return reachable_fraction(global, *ref);
              };
            }
            add(cell, format_name(op, fr), n, m,
                [&c, t, coverage](uint64_t seed) {
                  FuzzerConfig f = base_fuzzer(c, seed);
                  f.stop_on_first_crash = !coverage;
                  auto h = make_harness(t);
                  return fuzz_campaign(*h, {TestCase{}}, f);
                },
                post);
          }
        }
      };
      for (const auto& dev : c.devices) {
        const TargetKind kind = parse_target_kind(dev);
        if (kind == TargetKind::LockPeripheral) {
          for (unsigned n : c.n_grid) {
            for (unsigned m : c.m_grid) {
              add_device(dev + "_" + cell_name(n, m), {kind, cell_lock(c, n, m), {}}, n, m);
            }
          }
        } else {
          add_device(dev, {kind, {}, {}}, 0, 0);
        }
      }
      break;
    }
  }
  return jobs;
}

void run_jobs(std::vector<Job>& jobs, std::vector<TrialRecord>& out, unsigned workers) {
  out.resize(jobs.size());
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto worker = [&](unsigned w) {
    try {
      for (size_t i = next++; i < jobs.size(); i = next++) {
        Job& j = jobs[i];
        TrialRecord& r = out[i];
        r.cell = j.cell;
        r.condition = j.condition;
        r.n = j.n;
        r.m = j.m;
        r.trial = j.trial;
        r.seed = j.seed;
        r.result = j.run();
        if (j.post) r.reachable_fraction = j.post(r.result);
      }
    } catch (...) {
      errors[w] = std::current_exception();
      next = jobs.size();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker, w);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

using Group = std::vector<const TrialRecord*>;

// (cell, condition) -> trials in trial order.
std::map<std::pair<std::string, std::string>, Group> group_trials(
    const std::vector<TrialRecord>& trials) {
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const auto& t : trials) groups[{t.cell, t.condition}].push_back(&t);
  return groups;
}

std::vector<double> metric_values(const Group& g, const std::string& metric) {
  std::vector<double> v;
  for (const auto* t : g) {
    if (metric == "execs") {
      v.push_back(t->execs());
    } else if (metric == "sim_cycles") {
      v.push_back(t->sim_cycles());
    } else {
      v.push_back(t->wall_ms());
    }
  }
  return v;
}

size_t censored_count(const Group& g) {
  return std::count_if(g.begin(), g.end(), [](const TrialRecord* t) { return t->censored(); });
}

bool any_censored(const Group& g) {
  return censored_count(g) > 0;
}

void write_trials(const std::filesystem::path& dir, const std::vector<TrialRecord>& trials) {
  auto out = open_out(dir / "trials.csv");
  out << "cell,n,m,condition,trial,seed,crashed,execs,sim_cycles,wall_ms,total_execs,"
         "total_sim_cycles,edges_covered,fsm_fraction,queue_size,crashes,reachable_fraction\n";
  for (const auto& t : trials) {
    const auto& r = t.result;
    out << t.cell << ',' << t.n << ',' << t.m << ',' << t.condition << ',' << t.trial << ','
        << t.seed << ',' << (r.crashed() ? 1 : 0) << ',' << num(t.execs()) << ','
        << num(t.sim_cycles()) << ',' << num(t.wall_ms()) << ',' << r.total_execs << ','
        << r.total_sim_cycles << ',' << r.edges_covered << ',' << num(r.fsm_fraction) << ','
        << r.queue_size() << ',' << r.crashes.size() << ',';
    if (t.reachable_fraction >= 0) out << num(t.reachable_fraction);
    out << '\n';
  }
}

void write_trajectories(const std::filesystem::path& dir,
                        const std::map<std::pair<std::string, std::string>, Group>& groups,
                        size_t points) {
  std::filesystem::create_directories(dir / "trajectories");
  std::filesystem::create_directories(dir / "traces");
  for (const auto& [key, g] : groups) {
    const std::string stem = key.first + "__" + key.second + ".csv";
    auto out = open_out(dir / "trajectories" / stem);
    out << "trial_id,execs,sim_cycles,wall_ms,edges_covered,fsm_fraction\n";
    std::vector<const CampaignResult*> runs;
    for (const auto* t : g) {
      runs.push_back(&t->result);
      for (const auto& s : t->result.trajectory) {
        out << t->trial << ',' << s.execs << ',' << s.sim_cycles << ',' << num(s.wall_ms) << ','
            << s.edges_covered << ',' << num(s.fsm_fraction) << '\n';
      }
    }
    auto trace = open_out(dir / "traces" / stem);
    trace << "execs,sim_cycles,wall_ms,edges_covered,fsm_fraction\n";
    for (const auto& p : report_coverage_trace(runs, points)) {
      trace << num(p.execs) << ',' << num(p.sim_cycles) << ',' << num(p.wall_ms) << ','
            << num(p.edges_covered) << ',' << num(p.fsm_fraction) << '\n';
    }
  }
}

// Rows are state counts, columns code widths. A ">=" prefix marks cells with
// censored trials, whose mean is then a lower bound.
void write_heatmap(const std::filesystem::path& path, const ExperimentConfig& c,
                   const std::map<std::pair<std::string, std::string>, Group>& groups,
                   const std::string& prefix, const std::string& condition,
                   const std::string& metric) {
  auto out = open_out(path);
  out << "states";
  for (unsigned m : c.m_grid) out << ",m" << m;
  out << '\n';
  for (unsigned n : c.n_grid) {
    out << (uint64_t{1} << n);
    for (unsigned m : c.m_grid) {
      out << ',';
      auto it = groups.find({prefix + cell_name(n, m), condition});
      if (it == groups.end()) continue;
      if (any_censored(it->second)) out << ">=";
      out << num(mean(metric_values(it->second, metric)));
    }
    out << '\n';
  }
}

struct Pair {
  std::string a;
  std::string b;
  std::string metric;
};

void write_stats(const std::filesystem::path& path,
                 const std::map<std::pair<std::string, std::string>, Group>& groups,
                 const std::vector<std::string>& cells, const std::vector<Pair>& pairs) {
  auto out = open_out(path);
  out << "cell,metric,condition_a,condition_b,median_a,median_b,censored_a,censored_b,u,z,"
         "p_value,significant\n";
  for (const auto& cell : cells) {
    for (const auto& p : pairs) {
      auto ia = groups.find({cell, p.a});
      auto ib = groups.find({cell, p.b});
      if (ia == groups.end() || ib == groups.end()) continue;
      const auto va = metric_values(ia->second, p.metric);
      const auto vb = metric_values(ib->second, p.metric);
      const auto u = mann_whitney_u(va, vb);
      out << cell << ',' << p.metric << ',' << p.a << ',' << p.b << ',' << num(median(va)) << ','
          << num(median(vb)) << ',' << censored_count(ia->second) << ','
          << censored_count(ib->second)
          << ',' << num(u.u_statistic) << ',' << num(u.z) << ',' << num(u.p_value) << ','
          << (u.significant ? 1 : 0) << '\n';
    }
  }
}

void write_ratio(const std::filesystem::path& path, const ExperimentConfig& c,
                 const std::map<std::pair<std::string, std::string>, Group>& groups) {
  auto out = open_out(path);
  out << "n,m,states,fuzz_median_cycles,crv_median_cycles,median_ratio,fuzz_mean_cycles,"
         "crv_mean_cycles,mean_ratio,fuzz_censored,crv_censored\n";
  for (unsigned n : c.n_grid) {
    for (unsigned m : c.m_grid) {
      const auto& f = groups.at({cell_name(n, m), "fuzz"});
      const auto& r = groups.at({cell_name(n, m), "crv"});
      const auto vf = metric_values(f, "sim_cycles");
      const auto vr = metric_values(r, "sim_cycles");
      out << n << ',' << m << ',' << (uint64_t{1} << n) << ',' << num(median(vf)) << ','
          << num(median(vr)) << ',' << num(median(vr) / median(vf)) << ',' << num(mean(vf))
          << ',' << num(mean(vr)) << ',' << num(mean(vr) / mean(vf)) << ','
          << censored_count(f) << ',' << censored_count(r) << '\n';
    }
  }
}

void write_reports(const ExperimentConfig& c, const std::vector<TrialRecord>& trials) {
  const auto& dir = c.out_dir;
  const auto groups = group_trials(trials);
  write_trials(dir, trials);
  write_trajectories(dir, groups, c.trace_points);

  std::vector<std::string> cells;
  std::vector<std::string> conditions;
  for (const auto& t : trials) {
    if (std::find(cells.begin(), cells.end(), t.cell) == cells.end()) cells.push_back(t.cell);
    if (std::find(conditions.begin(), conditions.end(), t.condition) == conditions.end()) {
      conditions.push_back(t.condition);
    }
  }

  std::vector<Pair> pairs;
  std::vector<std::string> heat_metrics = {"sim_cycles", "execs"};
  std::string heat_prefix;
  switch (c.kind) {
    case ExperimentKind::FuzzVsCrv:
      pairs = {{"fuzz", "crv", "sim_cycles"}};
      write_ratio(dir / "ratio.csv", c, groups);
      break;
    case ExperimentKind::InstrumentationScope:
      pairs = {{"dut_only", "all", "sim_cycles"}, {"dut_only", "all", "execs"}};
      break;
    case ExperimentKind::ForkPoint:
      pairs = {{"at_start", "after_reset", "wall_ms"}, {"at_start", "after_reset", "sim_cycles"}};
      heat_metrics.push_back("wall_ms");
      break;
    case ExperimentKind::GrammarAblation:
    case ExperimentKind::EmptySeedCoverage:
      for (OpcodeFormat op : c.opcode_formats) {
        pairs.push_back({format_name(op, FrameFormat::Variable),
                         format_name(op, FrameFormat::Fixed), "execs"});
      }
      for (FrameFormat fr : c.frame_formats) {
        pairs.push_back({format_name(OpcodeFormat::Constant, fr),
                         format_name(OpcodeFormat::Mapped, fr), "execs"});
      }
      heat_prefix = "lock_peripheral_";
      break;
  }
  write_stats(dir / "stats.csv", groups, cells, pairs);

  if (uses_lock_grid(c)) {
    for (const auto& cond : conditions) {
      for (const auto& metric : heat_metrics) {
        write_heatmap(dir / ("heatmap_" + cond + "_" + metric + ".csv"), c, groups, heat_prefix,
                      cond, metric);
      }
    }
  }

  if (c.kind == ExperimentKind::EmptySeedCoverage) {
    auto out = open_out(dir / "coverage.csv");
    out << "cell,condition,trials,mean_reachable_fraction,min_reachable_fraction,"
           "mean_fsm_fraction,min_fsm_fraction\n";
    for (const auto& [key, g] : groups) {
      std::vector<double> reach, fsm;
      for (const auto* t : g) {
        reach.push_back(t->reachable_fraction);
        fsm.push_back(t->result.fsm_fraction);
      }
      out << key.first << ',' << key.second << ',' << g.size() << ',' << num(mean(reach)) << ','
          << num(*std::min_element(reach.begin(), reach.end())) << ',' << num(mean(fsm)) << ','
          << num(*std::min_element(fsm.begin(), fsm.end())) << '\n';
    }
  }
}

// Structured stimulus for the reference edge set.
struct ProgramGen {
  std::vector<uint32_t> addrs;
  std::vector<uint32_t> data;
  Rng rng;

  HwfInstruction op() {
    const uint64_t r = rng.below(8);
    auto addr = [&] { return addrs[rng.below(addrs.size())]; };
    auto value = [&]() -> uint32_t {
      switch (rng.below(3)) {
        case 0:
          return data[rng.below(data.size())];
        case 1:
          return static_cast<uint32_t>(rng.below(16));
        default:
          return static_cast<uint32_t>(rng.bits(32));
      }
    };
    if (r < 2) return HwfInstruction::wait();
    if (r < 4) return HwfInstruction::read(addr());
    return HwfInstruction::write(addr(), value());
  }
};

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (!fuzz_budget.bounded()) throw std::invalid_argument("fuzz_budget must set a bound");
  if (kind == ExperimentKind::FuzzVsCrv && !crv_budget.bounded()) {
    throw std::invalid_argument("crv_budget must set a bound");
  }
  if (kind == ExperimentKind::GrammarAblation || kind == ExperimentKind::EmptySeedCoverage) {
    if (devices.empty()) throw std::invalid_argument("devices must not be empty");
    for (const auto& d : devices) {
      if (parse_target_kind(d) == TargetKind::Lock) {
        throw std::invalid_argument("devices: 'lock' is not a bus device");
      }
    }
    if (opcode_formats.empty() || frame_formats.empty()) {
      throw std::invalid_argument("opcode_formats and frame_formats must not be empty");
    }
  }
  if (uses_lock_grid(*this)) {
    if (n_grid.empty()) throw std::invalid_argument("n_grid must not be empty");
    if (m_grid.empty()) throw std::invalid_argument("m_grid must not be empty");
    for (unsigned n : n_grid) {
      LockConfig{n, 1, 0}.validate();
    }
    for (unsigned m : m_grid) {
      LockConfig{1, m, 0}.validate();
    }
  }
  if (trace_points < 2) throw std::invalid_argument("trace_points must be at least 2");
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "kind") {
        c.kind = parse_experiment_kind(v.get<std::string>());
      } else if (key == "n_grid") {
        c.n_grid = v.get<std::vector<unsigned>>();
      } else if (key == "m_grid") {
        c.m_grid = v.get<std::vector<unsigned>>();
      } else if (key == "devices") {
        c.devices = v.get<std::vector<std::string>>();
      } else if (key == "trials") {
        c.trials = v.get<unsigned>();
      } else if (key == "base_seed") {
        c.base_seed = v.get<uint64_t>();
      } else if (key == "lock_seed") {
        c.lock_seed = v.get<uint64_t>();
      } else if (key == "fuzz_budget") {
        c.fuzz_budget = parse_budget(v, "fuzz_budget");
      } else if (key == "crv_budget") {
        c.crv_budget = parse_budget(v, "crv_budget");
      } else if (key == "opcode_formats") {
        c.opcode_formats.clear();
        for (const auto& s : v) c.opcode_formats.push_back(parse_opcode_format(s.get<std::string>()));
      } else if (key == "frame_formats") {
        c.frame_formats.clear();
        for (const auto& s : v) c.frame_formats.push_back(parse_frame_format(s.get<std::string>()));
      } else if (key == "fork_point") {
        c.fork_point = parse_fork_point(v.get<std::string>());
      } else if (key == "scope") {
        c.scope = parse_scope(v.get<std::string>());
      } else if (key == "max_len") {
        c.max_len = v.get<size_t>();
      } else if (key == "havoc_stack_max") {
        c.havoc_stack_max = v.get<unsigned>();
      } else if (key == "sample_every") {
        c.sample_every = v.get<uint64_t>();
      } else if (key == "trace_points") {
        c.trace_points = v.get<size_t>();
      } else if (key == "workers") {
        c.workers = v.get<unsigned>();
      } else if (key == "out_dir") {
        c.out_dir = v.get<std::string>();
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const json::exception& e) {
      throw std::invalid_argument(key + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(key + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string experiment_config_json(const ExperimentConfig& c) {
  json ops = json::array();
  for (auto op : c.opcode_formats) ops.push_back(std::string(to_string(op)));
  json frames = json::array();
  for (auto fr : c.frame_formats) frames.push_back(std::string(to_string(fr)));
  json j = {{"kind", std::string(to_string(c.kind))},
            {"n_grid", c.n_grid},
            {"m_grid", c.m_grid},
            {"devices", c.devices},
            {"trials", c.trials},
            {"base_seed", c.base_seed},
            {"lock_seed", c.lock_seed},
            {"fuzz_budget", budget_json(c.fuzz_budget)},
            {"crv_budget", budget_json(c.crv_budget)},
            {"opcode_formats", ops},
            {"frame_formats", frames},
            {"fork_point", std::string(to_string(c.fork_point))},
            {"scope", std::string(to_string(c.scope))},
            {"max_len", c.max_len},
            {"havoc_stack_max", c.havoc_stack_max},
            {"sample_every", c.sample_every},
            {"trace_points", c.trace_points},
            {"workers", c.workers},
            {"out_dir", c.out_dir.string()}};
  return j.dump(2) + "\n";
}

LockConfig cell_lock(const ExperimentConfig& c, unsigned n, unsigned m) {
  return {n, m, derive_seed(c.lock_seed, (uint64_t{n} << 8) | m)};
}

double TrialRecord::execs() const {
  return static_cast<double>(result.execs_to_first_crash.value_or(result.total_execs));
}

double TrialRecord::sim_cycles() const {
  return static_cast<double>(result.sim_cycles_to_first_crash.value_or(result.total_sim_cycles));
}

double TrialRecord::wall_ms() const {
  return result.wall_ms_to_first_crash.value_or(result.wall_ms);
}

std::vector<TracePoint> report_coverage_trace(const std::vector<const CampaignResult*>& runs,
                                              size_t points) {
  std::vector<TracePoint> out;
  if (runs.empty() || points < 2) return out;
  uint64_t horizon = 0;
  for (const auto* r : runs) {
    if (!r->trajectory.empty()) horizon = std::max(horizon, r->trajectory.back().execs);
  }
  out.resize(points);
  std::vector<size_t> cursor(runs.size(), 0);
  for (size_t i = 0; i < points; ++i) {
    const double x = static_cast<double>(horizon) * static_cast<double>(i) /
                     static_cast<double>(points - 1);
    TracePoint& p = out[i];
    p.execs = x;
    for (size_t k = 0; k < runs.size(); ++k) {
      const auto& traj = runs[k]->trajectory;
      if (traj.empty()) continue;
      size_t& c = cursor[k];
      while (c + 1 < traj.size() && static_cast<double>(traj[c + 1].execs) <= x) ++c;
      // Before the first sample nothing has been covered.
      if (static_cast<double>(traj[c].execs) > x) continue;
      p.sim_cycles += static_cast<double>(traj[c].sim_cycles);
      p.wall_ms += traj[c].wall_ms;
      p.edges_covered += static_cast<double>(traj[c].edges_covered);
      p.fsm_fraction += traj[c].fsm_fraction;
    }
    const auto n = static_cast<double>(runs.size());
    p.sim_cycles /= n;
    p.wall_ms /= n;
    p.edges_covered /= n;
    p.fsm_fraction /= n;
  }
  return out;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  {
    auto echo = open_out(config.out_dir / "config.json");
    echo << experiment_config_json(config);
  }
  auto jobs = plan_jobs(config);
  unsigned workers = config.workers ? config.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  ExperimentSummary summary;
  summary.out_dir = config.out_dir;
  run_jobs(jobs, summary.trials, workers);
  write_reports(config, summary.trials);
  return summary;
}

std::vector<uint16_t> reference_edges(const TargetConfig& target, uint64_t seed) {
  if (target.kind == TargetKind::Lock) {
    throw std::invalid_argument("reference edges are defined for bus devices only");
  }
  auto harness = make_harness(target, {ForkPoint::AfterReset, Scope::DutOnly});
  auto device = make_device(to_string(target.kind), target.lock);

  ProgramGen gen{{}, {0, 1, 2, 0xFFFFFFFFu}, Rng(seed)};
  for (const auto& reg : device->register_map()) {
    gen.addrs.push_back(reg.offset);
  }
  const uint32_t top = gen.addrs.back();
  gen.addrs.push_back(top + 4);
  gen.addrs.push_back(top + 0x100);
  gen.addrs.push_back(1);

  std::vector<HwfInstruction> prefix_pool;
  std::vector<std::vector<HwfInstruction>> prefixes = {{}};
  if (target.kind == TargetKind::LockPeripheral) {
    const DigitalLock lock(target.lock);
    for (uint32_t code : lock.correct_codes()) gen.data.push_back(code);
    std::vector<HwfInstruction> walk;
    for (uint32_t code : lock.unlock_sequence()) {
      walk.push_back(HwfInstruction::write(LockPeripheral::kCode, code));
      prefixes.push_back(walk);
    }
  } else {
    for (uint32_t v : {0x1000u, 0x2000u, 0xFF000u, 0x1001u, 0xFFFu, 3u, 4u, 8u}) {
      gen.data.push_back(v);
    }
    // Running timer with a near compare value, and one that wraps.
    prefixes.push_back({HwfInstruction::write(TimerDevice::kMtimecmpLow, 3),
                        HwfInstruction::write(TimerDevice::kCtrl, 1)});
    prefixes.push_back({HwfInstruction::write(TimerDevice::kCfg, 0x2001),
                        HwfInstruction::write(TimerDevice::kMtimeLow, 0xFFFFFFF0u),
                        HwfInstruction::write(TimerDevice::kMtimecmpHigh, 1),
                        HwfInstruction::write(TimerDevice::kCtrl, 1)});
  }

  CoverageMap all;
  constexpr unsigned kProgramsPerPrefix = 400;
  for (const auto& prefix : prefixes) {
    for (unsigned i = 0; i < kProgramsPerPrefix; ++i) {
      std::vector<HwfInstruction> prog = prefix;
      const uint64_t len = gen.rng.between(1, 24);
      for (uint64_t k = 0; k < len; ++k) prog.push_back(gen.op());
      if (gen.rng.chance(1, 2)) {
        for (uint64_t k = gen.rng.between(1, 16); k > 0; --k) {
          prog.push_back(HwfInstruction::wait());
        }
      }
      harness->run(encode_instructions(prog, target.format));
      merge(all, harness->coverage());
    }
  }
  std::vector<uint16_t> out(all.touched().begin(), all.touched().end());
  std::sort(out.begin(), out.end());
  return out;
}

double reachable_fraction(const CoverageMap& global, const std::vector<uint16_t>& reference) {
  if (reference.empty()) return 1.0;
  size_t hit = 0;
  for (uint16_t e : reference) {
    if (global[e]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(reference.size());
}

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::FuzzVsCrv:
      return "fuzz_vs_crv";
    case ExperimentKind::InstrumentationScope:
      return "instrumentation_scope";
    case ExperimentKind::ForkPoint:
      return "fork_point";
    case ExperimentKind::GrammarAblation:
      return "grammar_ablation";
    case ExperimentKind::EmptySeedCoverage:
      return "empty_seed_coverage";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view s) {
  for (auto k : {ExperimentKind::FuzzVsCrv, ExperimentKind::InstrumentationScope,
                 ExperimentKind::ForkPoint, ExperimentKind::GrammarAblation,
                 ExperimentKind::EmptySeedCoverage}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown experiment kind '" + std::string(s) + "'");
}

}  // namespace hwfuzz
