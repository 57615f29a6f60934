#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hwfuzz/bus.hpp"
#include "hwfuzz/experiment.hpp"
#include "hwfuzz/fuzzer.hpp"
#include "hwfuzz/grammar.hpp"
#include "hwfuzz/stats.hpp"
#include "hwfuzz/targets.hpp"

namespace py = pybind11;
using namespace hwfuzz;

namespace {

Bytes to_bytes(const py::bytes& b) {
  const std::string s = b;
  return Bytes(s.begin(), s.end());
}

py::bytes to_py(const Bytes& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

std::vector<TestCase> seeds_from(const std::vector<py::bytes>& seeds) {
  std::vector<TestCase> out;
  for (const auto& s : seeds) out.push_back({to_bytes(s)});
  if (out.empty()) out.push_back({});
  return out;
}

}  // namespace

PYBIND11_MODULE(_hwfuzz, m) {
  m.doc() = "Coverage-guided fuzzing of cycle-level hardware models";

  py::register_exception<std::invalid_argument>(m, "ConfigError", PyExc_ValueError);

  py::enum_<OpcodeFormat>(m, "OpcodeFormat")
      .value("CONSTANT", OpcodeFormat::Constant)
      .value("MAPPED", OpcodeFormat::Mapped);
  py::enum_<FrameFormat>(m, "FrameFormat")
      .value("FIXED", FrameFormat::Fixed)
      .value("VARIABLE", FrameFormat::Variable);
  py::enum_<Opcode>(m, "Opcode")
      .value("WAIT", Opcode::Wait)
      .value("READ", Opcode::Read)
      .value("WRITE", Opcode::Write);
  py::enum_<ForkPoint>(m, "ForkPoint")
      .value("AT_START", ForkPoint::AtStart)
      .value("AFTER_RESET", ForkPoint::AfterReset);
  py::enum_<Scope>(m, "Scope").value("DUT_ONLY", Scope::DutOnly).value("ALL", Scope::All);
  py::enum_<TargetKind>(m, "TargetKind")
      .value("LOCK", TargetKind::Lock)
      .value("TIMER", TargetKind::Timer)
      .value("LOCK_PERIPHERAL", TargetKind::LockPeripheral);

  py::class_<LockConfig>(m, "LockConfig")
      .def(py::init([](unsigned n, unsigned m, uint64_t seed) {
             LockConfig c{n, m, seed};
             c.validate();
             return c;
           }),
           py::arg("state_bits") = 1, py::arg("code_width") = 1, py::arg("rng_seed") = 0)
      .def_readwrite("state_bits", &LockConfig::state_bits)
      .def_readwrite("code_width", &LockConfig::code_width)
      .def_readwrite("rng_seed", &LockConfig::rng_seed)
      .def("unlock_sequence",
           [](const LockConfig& c) { return DigitalLock(c).unlock_sequence(); });

  py::class_<GrammarFormat>(m, "GrammarFormat")
      .def(py::init<OpcodeFormat, FrameFormat>(), py::arg("opcode") = OpcodeFormat::Constant,
           py::arg("frame") = FrameFormat::Variable)
      .def_readwrite("opcode", &GrammarFormat::opcode)
      .def_readwrite("frame", &GrammarFormat::frame);

  py::class_<HwfInstruction>(m, "Instruction")
      .def(py::init<Opcode, uint32_t, uint32_t>(), py::arg("opcode"), py::arg("address") = 0,
           py::arg("data") = 0)
      .def_readwrite("opcode", &HwfInstruction::opcode)
      .def_readwrite("address", &HwfInstruction::address)
      .def_readwrite("data", &HwfInstruction::data)
      .def(py::self == py::self)
      .def("__repr__", [](const HwfInstruction& i) {
        return "Instruction(" + std::string(to_string(i.opcode)) + ", " +
               std::to_string(i.address) + ", " + std::to_string(i.data) + ")";
      });

  m.def("encode", [](const std::vector<HwfInstruction>& prog, const GrammarFormat& f) {
    return to_py(encode_instructions(prog, f));
  });
  m.def("decode", [](const py::bytes& b, const GrammarFormat& f) {
    return decode_stream(to_bytes(b), f);
  });
  m.def("compile_seed_text", [](const std::string& text, const GrammarFormat& f) {
    return to_py(compile_seed_text(text, f));
  });
  m.def("register_map", [](const std::string& device, const LockConfig& lock) {
    return render_register_map(*make_device(device, lock));
  }, py::arg("device"), py::arg("lock") = LockConfig{});

  py::class_<TargetConfig>(m, "Target")
      .def(py::init([](TargetKind kind, const LockConfig& lock, const GrammarFormat& f) {
             return TargetConfig{kind, lock, f};
           }),
           py::arg("kind") = TargetKind::Lock, py::arg("lock") = LockConfig{},
           py::arg("format") = GrammarFormat{})
      .def_readwrite("kind", &TargetConfig::kind)
      .def_readwrite("lock", &TargetConfig::lock)
      .def_readwrite("format", &TargetConfig::format);

  py::class_<Crash>(m, "Crash")
      .def_readonly("assertion", &Crash::assertion)
      .def_readonly("cycle", &Crash::cycle);

  py::class_<TestOutcome>(m, "TestOutcome")
      .def_readonly("crash", &TestOutcome::crash)
      .def_readonly("executed_cycles", &TestOutcome::executed_cycles)
      .def_readonly("decoded_instructions", &TestOutcome::decoded_instructions)
      .def_readonly("fsm_states", &TestOutcome::fsm_states)
      .def_property_readonly("edges_covered",
                             [](const TestOutcome& o) { return o.edges.size(); })
      .def_property_readonly("crashed", &TestOutcome::crashed);

  m.def(
      "run",
      [](const TargetConfig& t, const py::bytes& b, ForkPoint fp, Scope scope) {
        auto h = make_harness(t, {fp, scope});
        return h->run(to_bytes(b));
      },
      py::arg("target"), py::arg("data"), py::arg("fork_point") = ForkPoint::AfterReset,
      py::arg("scope") = Scope::DutOnly);

  py::class_<CoverageSample>(m, "CoverageSample")
      .def_readonly("execs", &CoverageSample::execs)
      .def_readonly("sim_cycles", &CoverageSample::sim_cycles)
      .def_readonly("wall_ms", &CoverageSample::wall_ms)
      .def_readonly("edges_covered", &CoverageSample::edges_covered)
      .def_readonly("fsm_fraction", &CoverageSample::fsm_fraction);

  py::class_<CampaignResult>(m, "CampaignResult")
      .def_readonly("execs_to_first_crash", &CampaignResult::execs_to_first_crash)
      .def_readonly("sim_cycles_to_first_crash", &CampaignResult::sim_cycles_to_first_crash)
      .def_readonly("wall_ms_to_first_crash", &CampaignResult::wall_ms_to_first_crash)
      .def_readonly("total_execs", &CampaignResult::total_execs)
      .def_readonly("total_sim_cycles", &CampaignResult::total_sim_cycles)
      .def_readonly("wall_ms", &CampaignResult::wall_ms)
      .def_readonly("edges_covered", &CampaignResult::edges_covered)
      .def_readonly("fsm_fraction", &CampaignResult::fsm_fraction)
      .def_readonly("trajectory", &CampaignResult::trajectory)
      .def_property_readonly("crashed", &CampaignResult::crashed)
      .def_property_readonly("queue_size", &CampaignResult::queue_size)
      .def_property_readonly("crash_inputs",
                             [](const CampaignResult& r) {
                               std::vector<py::bytes> out;
                               for (const auto& c : r.crashes) out.push_back(to_py(c.bytes));
                               return out;
                             })
      .def("same_exec_metrics", &same_exec_metrics);

  m.def(
      "fuzz",
      [](const TargetConfig& t, uint64_t seed, uint64_t max_execs, uint64_t max_sim_cycles,
         uint64_t max_wall_ms, const std::vector<py::bytes>& seeds, ForkPoint fp, Scope scope,
         bool stop_on_first_crash, uint64_t sample_every) {
        FuzzerConfig c;
        c.rng_seed = seed;
        c.budget = {max_execs, max_sim_cycles, max_wall_ms};
        c.fork_point = fp;
        c.scope = scope;
        c.stop_on_first_crash = stop_on_first_crash;
        c.sample_every = sample_every;
        auto h = make_harness(t);
        const auto input = seeds_from(seeds);
        py::gil_scoped_release release;
        return fuzz_campaign(*h, input, c);
      },
      py::arg("target"), py::arg("seed") = 0, py::arg("max_execs") = 100000,
      py::arg("max_sim_cycles") = 0, py::arg("max_wall_ms") = 0,
      py::arg("seeds") = std::vector<py::bytes>{}, py::arg("fork_point") = ForkPoint::AfterReset,
      py::arg("scope") = Scope::DutOnly, py::arg("stop_on_first_crash") = true,
      py::arg("sample_every") = 0);

  m.def(
      "crv",
      [](const LockConfig& lock, uint64_t seed, uint64_t max_execs, uint64_t max_sim_cycles) {
        py::gil_scoped_release release;
        return crv_campaign(lock, {seed, {max_execs, max_sim_cycles, 0}, 0});
      },
      py::arg("lock"), py::arg("seed") = 0, py::arg("max_execs") = 0,
      py::arg("max_sim_cycles") = 0);

  py::class_<UTestResult>(m, "UTestResult")
      .def_readonly("u_statistic", &UTestResult::u_statistic)
      .def_readonly("p_value", &UTestResult::p_value)
      .def_readonly("significant", &UTestResult::significant)
      .def_readonly("z", &UTestResult::z);
  m.def("mann_whitney_u", [](const std::vector<double>& a, const std::vector<double>& b) {
    return mann_whitney_u(a, b);
  });

  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("cell", &TrialRecord::cell)
      .def_readonly("condition", &TrialRecord::condition)
      .def_readonly("n", &TrialRecord::n)
      .def_readonly("m", &TrialRecord::m)
      .def_readonly("trial", &TrialRecord::trial)
      .def_readonly("seed", &TrialRecord::seed)
      .def_readonly("result", &TrialRecord::result)
      .def_readonly("reachable_fraction", &TrialRecord::reachable_fraction)
      .def_property_readonly("censored", &TrialRecord::censored)
      .def_property_readonly("execs", &TrialRecord::execs)
      .def_property_readonly("sim_cycles", &TrialRecord::sim_cycles)
      .def_property_readonly("wall_ms", &TrialRecord::wall_ms);

  // Takes the same JSON document as the command-line tool.
  m.def("run_experiment", [](const std::string& json_text) {
    const auto config = parse_experiment_config(json_text);
    py::gil_scoped_release release;
    return run_experiment(config).trials;
  });
}
