#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "hwfuzz/experiment.hpp"
#include "hwfuzz/fuzzer.hpp"
#include "hwfuzz/grammar.hpp"
#include "hwfuzz/targets.hpp"

using namespace hwfuzz;

namespace {

struct TargetArgs {
  std::string target = "lock";
  unsigned n = 2;
  unsigned m = 2;
  uint64_t lock_seed = 0;
  std::string opcode = "constant";
  std::string frame = "variable";

  void add(CLI::App* app) {
    app->add_option("-t,--target", target, "lock, timer or lock_peripheral")
        ->check(CLI::IsMember({"lock", "timer", "lock_peripheral"}));
    app->add_option("-n,--state-bits", n, "lock has 2^N states");
    app->add_option("-m,--code-width", m, "lock code width in bits");
    app->add_option("--lock-seed", lock_seed, "seed of the lock code table");
    app->add_option("--opcode", opcode, "constant or mapped");
    app->add_option("--frame", frame, "fixed or variable");
  }

  TargetConfig config() const {
    LockConfig lock{n, m, lock_seed};
    lock.validate();
    return {parse_target_kind(target), lock,
            {parse_opcode_format(opcode), parse_frame_format(frame)}};
  }
};

struct BudgetArgs {
  uint64_t max_execs = 0;
  uint64_t max_cycles = 0;
  uint64_t max_ms = 0;

  void add(CLI::App* app) {
    app->add_option("--max-execs", max_execs);
    app->add_option("--max-cycles", max_cycles, "simulated cycles");
    app->add_option("--max-ms", max_ms, "wall-clock milliseconds");
  }

  Budget budget() const {
    Budget b{max_execs, max_cycles, max_ms};
    if (!b.bounded()) b.max_execs = 100'000;
    return b;
  }
};

Bytes read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_trajectory(const CampaignResult& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "trial_id,execs,sim_cycles,wall_ms,edges_covered,fsm_fraction\n";
  for (const auto& s : r.trajectory) {
    out << 0 << ',' << s.execs << ',' << s.sim_cycles << ',' << s.wall_ms << ','
        << s.edges_covered << ',' << s.fsm_fraction << '\n';
  }
}

void print_result(const CampaignResult& r) {
  if (r.crashed()) {
    const auto& c = r.crashes.front().crash;
    std::printf("crash: %s at cycle %llu\n", c.assertion.c_str(),
                static_cast<unsigned long long>(c.cycle));
    std::printf("execs_to_first_crash: %llu\nsim_cycles_to_first_crash: %llu\n",
                static_cast<unsigned long long>(*r.execs_to_first_crash),
                static_cast<unsigned long long>(*r.sim_cycles_to_first_crash));
  } else {
    std::printf("no crash within budget\n");
  }
  std::printf("total_execs: %llu\ntotal_sim_cycles: %llu\nwall_ms: %.1f\n",
              static_cast<unsigned long long>(r.total_execs),
              static_cast<unsigned long long>(r.total_sim_cycles), r.wall_ms);
  std::printf("edges_covered: %llu\nfsm_fraction: %.4f\nqueue: %zu\n",
              static_cast<unsigned long long>(r.edges_covered), r.fsm_fraction, r.queue_size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage-guided fuzzing of cycle-level hardware models"};
  app.require_subcommand(1);

  // fuzz
  auto* fuzz = app.add_subcommand("fuzz", "run one fuzzing campaign");
  TargetArgs fuzz_target;
  BudgetArgs fuzz_budget;
  fuzz_target.add(fuzz);
  fuzz_budget.add(fuzz);
  FuzzerConfig fcfg;
  std::vector<std::string> seed_files;
  std::string fork = "after_reset", scope = "dut_only", fuzz_out;
  bool keep_going = false;
  fuzz->add_option("--seed", fcfg.rng_seed, "fuzzer rng seed");
  fuzz->add_option("-i,--input", seed_files, "seed files (default: one empty seed)");
  fuzz->add_option("--fork-point", fork, "at_start or after_reset");
  fuzz->add_option("--scope", scope, "dut_only or all");
  fuzz->add_option("--max-len", fcfg.max_len);
  fuzz->add_option("--havoc-stack", fcfg.havoc_stack_max);
  fuzz->add_option("--sample-every", fcfg.sample_every);
  fuzz->add_flag("--keep-going", keep_going, "do not stop at the first crash");
  fuzz->add_option("-o,--out", fuzz_out, "write queue/, crashes/ and trajectory.csv here");

  // crv
  auto* crv = app.add_subcommand("crv", "run the constrained-random baseline on a lock");
  TargetArgs crv_target;
  BudgetArgs crv_budget;
  crv->add_option("-n,--state-bits", crv_target.n);
  crv->add_option("-m,--code-width", crv_target.m);
  crv->add_option("--lock-seed", crv_target.lock_seed);
  crv_budget.add(crv);
  CrvConfig ccfg;
  crv->add_option("--seed", ccfg.rng_seed);

  // replay
  auto* replay = app.add_subcommand("replay", "run one test file and report its outcome");
  TargetArgs replay_target;
  replay_target.add(replay);
  std::string replay_file, replay_fork = "at_start";
  replay->add_option("testfile", replay_file)->required();
  replay->add_option("--fork-point", replay_fork);

  // experiment
  auto* exp = app.add_subcommand("experiment", "run an experiment described by a JSON config");
  std::string exp_file, exp_out;
  unsigned exp_trials = 0, exp_workers = 0;
  uint64_t exp_seed = 0;
  exp->add_option("config", exp_file)->required();
  exp->add_option("-o,--out", exp_out, "overrides out_dir");
  exp->add_option("--trials", exp_trials, "overrides trials");
  exp->add_option("--workers", exp_workers, "overrides workers");
  exp->add_option("--base-seed", exp_seed, "overrides base_seed");

  // seed-compile
  auto* sc = app.add_subcommand("seed-compile", "compile seed text into a .hwf test file");
  std::string sc_in, sc_out, sc_opcode = "constant", sc_frame = "variable";
  sc->add_option("text", sc_in)->required();
  sc->add_option("-o,--output", sc_out)->required();
  sc->add_option("--opcode", sc_opcode);
  sc->add_option("--frame", sc_frame);

  // regmap
  auto* rm = app.add_subcommand("regmap", "print a device register map");
  std::string rm_device;
  unsigned rm_m = 4;
  rm->add_option("device", rm_device)->required()->check(CLI::IsMember({"timer", "lock_peripheral"}));
  rm->add_option("-m,--code-width", rm_m);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fuzz) {
      const TargetConfig target = fuzz_target.config();
      fcfg.budget = fuzz_budget.budget();
      fcfg.fork_point = parse_fork_point(fork);
      fcfg.scope = parse_scope(scope);
      fcfg.stop_on_first_crash = !keep_going;
      std::vector<TestCase> seeds;
      for (const auto& f : seed_files) seeds.push_back({read_bytes(f)});
      if (seeds.empty()) seeds.push_back({});
      auto h = make_harness(target);
      std::printf("target: %s\n", h->describe().c_str());
      const CampaignResult r = fuzz_campaign(*h, seeds, fcfg);
      print_result(r);
      if (!fuzz_out.empty()) {
        write_artifacts(r, fuzz_out);
        write_trajectory(r, std::filesystem::path(fuzz_out) / "trajectory.csv");
      }
      return 0;
    }
    if (*crv) {
      LockConfig lock{crv_target.n, crv_target.m, crv_target.lock_seed};
      lock.validate();
      ccfg.budget = crv_budget.budget();
      print_result(crv_campaign(lock, ccfg));
      return 0;
    }
    if (*replay) {
      auto h = make_harness(replay_target.config(), {parse_fork_point(replay_fork)});
      const TestOutcome out = h->run(read_bytes(replay_file));
      if (out.crash) {
        std::printf("crash: %s at cycle %llu\n", out.crash->assertion.c_str(),
                    static_cast<unsigned long long>(out.crash->cycle));
      } else {
        std::printf("no crash\n");
      }
      std::printf("cycles: %llu\nedges: %zu\nfsm_states:",
                  static_cast<unsigned long long>(out.executed_cycles), out.edges.size());
      for (uint32_t s : out.fsm_states) std::printf(" %u", s);
      std::printf("\n");
      return out.crash ? 1 : 0;
    }
    if (*exp) {
      ExperimentConfig cfg = load_experiment_config(exp_file);
      if (!exp_out.empty()) cfg.out_dir = exp_out;
      if (exp_trials) cfg.trials = exp_trials;
      if (exp_workers) cfg.workers = exp_workers;
      if (exp->count("--base-seed")) cfg.base_seed = exp_seed;
      const auto summary = run_experiment(cfg);
      std::printf("%zu trials written to %s\n", summary.trials.size(),
                  summary.out_dir.string().c_str());
      return 0;
    }
    if (*sc) {
      const auto bytes = compile_seed_text(
          read_text(sc_in), {parse_opcode_format(sc_opcode), parse_frame_format(sc_frame)});
      std::ofstream out(sc_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + sc_out);
      out.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
      std::printf("%zu bytes\n", bytes.size());
      return 0;
    }
    if (*rm) {
      LockConfig lock{2, rm_m, 0};
      lock.validate();
      std::cout << render_register_map(*make_device(rm_device, lock));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
