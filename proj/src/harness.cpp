#include "hwfuzz/harness.hpp"

#include <algorithm>
#include <stdexcept>

namespace hwfuzz {

namespace {

// Testbench and simulation-engine branch sites. The engine evaluates the
// model on both clock edges of every cycle.
const uint16_t kEvalRiseSite = site_id("sim.eval", 1);
const uint16_t kEvalFallSite = site_id("sim.eval", 0);
const uint16_t kCycleSite = site_id("tb.cycle");
const uint16_t kZeroFillSite = site_id("tb.zero_fill");
const uint16_t kOpSites[] = {site_id("tb.op", 0), site_id("tb.op", 1), site_id("tb.op", 2)};

template <class To>
std::unique_ptr<To> downcast(std::unique_ptr<Model> m) {
  auto* p = dynamic_cast<To*>(m.get());
  if (!p) throw std::logic_error("model has the wrong interface for this harness");
  m.release();
  return std::unique_ptr<To>(p);
}

}  // namespace

Harness::Harness(std::unique_ptr<Model> prototype)
    : prototype_(std::move(prototype)), tracer_(map_, Scope::DutOnly) {
  if (!prototype_) throw std::invalid_argument("harness needs a model");
  model_ = prototype_->fresh();
}

void Harness::configure(const HarnessOptions& options) {
  options_ = options;
  tracer_ = Tracer(map_, options_.scope);
  capture_fork_state();
}

void Harness::capture_fork_state() {
  model_ = prototype_->fresh();
  on_model_replaced();
  map_.clear();
  tracer_.set_prev(0);
  for (unsigned i = 0; i < kResetCycles; ++i) model_->reset_cycle(tracer_);
  fork_snapshot_ = model_->snapshot();
  fork_map_.assign(map_);
  fork_prev_site_ = tracer_.prev();
}

void Harness::prepare() {
  if (options_.fork_point == ForkPoint::AtStart) {
    model_ = prototype_->fresh();
    on_model_replaced();
    map_.clear();
    tracer_.set_prev(0);
    for (unsigned i = 0; i < kResetCycles; ++i) model_->reset_cycle(tracer_);
    cost_ = {kResetCycles, true};
  } else {
    model_->restore(fork_snapshot_);
    map_.assign(fork_map_);
    tracer_.set_prev(fork_prev_site_);
    cost_ = {0, false};
  }
  model_->rearm_assertions();
  visited_.clear();
  if (model_->fsm_state_count() > 0) visited_.push_back(model_->fsm_state());
}

TestOutcome Harness::run(std::span<const uint8_t> bytes) {
  prepare();
  TestOutcome out;
  execute(bytes, out);
  out.edges = map_.sparse();
  std::sort(visited_.begin(), visited_.end());
  visited_.erase(std::unique(visited_.begin(), visited_.end()), visited_.end());
  out.fsm_states = visited_;
  return out;
}

bool Harness::end_cycle(TestOutcome& out) {
  tracer_.site(Component::Harness, kEvalRiseSite);
  tracer_.site(Component::Harness, kEvalFallSite);
  ++out.executed_cycles;
  if (model_->fsm_state_count() > 0) visited_.push_back(model_->fsm_state());
  if (auto fired = model_->check_assertions()) {
    out.crash = Crash{*fired, out.executed_cycles};
    return true;
  }
  return false;
}

GenericHarness::GenericHarness(std::unique_ptr<DutModel> dut, HarnessOptions options)
    : Harness(std::move(dut)) {
  configure(options);
}

std::string GenericHarness::describe() const {
  return "generic(" + model().name() + ")";
}

size_t GenericHarness::bytes_per_cycle() const {
  size_t n = 0;
  for (const auto& p : static_cast<const DutModel&>(model()).inputs()) n += (p.width + 7) / 8;
  return n;
}

void GenericHarness::execute(std::span<const uint8_t> bytes, TestOutcome& out) {
  auto& dut = static_cast<DutModel&>(model());
  const auto ports = dut.inputs();
  size_t pos = 0;
  while (pos < bytes.size()) {
    tracer().site(Component::Harness, kCycleSite);
    bool exhausted = false;
    for (size_t i = 0; i < ports.size(); ++i) {
      const size_t need = (ports[i].width + 7) / 8;
      uint64_t value = 0;
      for (size_t k = 0; k < need; ++k) {
        if (pos < bytes.size()) {
          value |= uint64_t{bytes[pos++]} << (8 * k);
        } else {
          exhausted = true;
        }
      }
      if (exhausted) tracer().site(Component::Harness, kZeroFillSite);
      dut.set_input(i, value);
    }
    dut.step(tracer());
    if (end_cycle(out) || exhausted) return;
  }
}

BusHarness::BusHarness(std::unique_ptr<MmioDevice> device, GrammarFormat format,
                       HarnessOptions options)
    : Harness(std::move(device)), format_(format) {
  configure(options);
}

std::string BusHarness::describe() const {
  return "bus(" + model().name() + ", " + std::string(to_string(format_.opcode)) + "/" +
         std::string(to_string(format_.frame)) + ")";
}

void BusHarness::execute(std::span<const uint8_t> bytes, TestOutcome& out) {
  BusHost host(static_cast<MmioDevice&>(model()), tracer());
  size_t pos = 0;
  while (auto in = decode_next(bytes, pos, format_)) {
    ++out.decoded_instructions;
    tracer().site(Component::Harness, kOpSites[static_cast<size_t>(in->opcode)]);
    switch (in->opcode) {
      case Opcode::Wait:
        host.wait();
        break;
      case Opcode::Read:
        host.get(in->address);
        break;
      case Opcode::Write:
        host.put_full(in->address, in->data);
        break;
    }
    if (end_cycle(out)) return;
  }
}

TestOutcome run_generic(const DutModel& dut, std::span<const uint8_t> bytes,
                        ForkPoint fork_point, Scope scope) {
  GenericHarness h(downcast<DutModel>(dut.fresh()), {fork_point, scope});
  return h.run(bytes);
}

TestOutcome run_bus(const MmioDevice& device, std::span<const uint8_t> bytes,
                    GrammarFormat format, ForkPoint fork_point, Scope scope) {
  BusHarness h(downcast<MmioDevice>(device.fresh()), format, {fork_point, scope});
  return h.run(bytes);
}

std::string_view to_string(ForkPoint f) {
  return f == ForkPoint::AtStart ? "at_start" : "after_reset";
}

std::string_view to_string(Scope s) { return s == Scope::DutOnly ? "dut_only" : "all"; }

ForkPoint parse_fork_point(std::string_view s) {
  if (s == "at_start" || s == "AtStart") return ForkPoint::AtStart;
  if (s == "after_reset" || s == "AfterReset") return ForkPoint::AfterReset;
  throw std::invalid_argument("unknown fork point '" + std::string(s) + "'");
}

Scope parse_scope(std::string_view s) {
  if (s == "dut_only" || s == "DutOnly" || s == "dut") return Scope::DutOnly;
  if (s == "all" || s == "All") return Scope::All;
  throw std::invalid_argument("unknown scope '" + std::string(s) + "'");
}

}  // namespace hwfuzz
