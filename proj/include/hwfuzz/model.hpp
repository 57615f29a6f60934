#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hwfuzz/coverage.hpp"

namespace hwfuzz {

// Serialized register state of a model. The fingerprint identifies the model
// configuration the snapshot was taken from.
struct DutSnapshot {
  uint64_t fingerprint = 0;
  std::vector<uint64_t> words;
  friend bool operator==(const DutSnapshot&, const DutSnapshot&) = default;
};

// Named invariants evaluated after each rising edge. A predicate returns true
// while the property holds; the first failing one is reported as the crash.
// Each assertion fires at most once between rearm() calls.
template <class State>
class AssertionRegistry {
 public:
  using Predicate = std::function<bool(const State&)>;

  void add(std::string name, Predicate holds) {
    entries_.push_back({std::move(name), std::move(holds), false});
  }

  bool remove(std::string_view name) {
    const auto before = entries_.size();
    std::erase_if(entries_, [&](const Entry& e) { return e.name == name; });
    return entries_.size() != before;
  }

  void rearm() {
    for (auto& e : entries_) e.fired = false;
  }

  std::optional<std::string> check(const State& state) {
    for (auto& e : entries_) {
      if (!e.fired && !e.holds(state)) {
        e.fired = true;
        return e.name;
      }
    }
    return std::nullopt;
  }

  size_t size() const { return entries_.size(); }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
  }

 private:
  struct Entry {
    std::string name;
    Predicate holds;
    bool fired;
  };
  std::vector<Entry> entries_;
};

// Behaviour shared by port-level DUTs and bus-attached devices.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;

  // A newly constructed, not yet reset instance with the same configuration
  // and assertion set. Harnesses use this to re-instantiate the model per
  // test when the fork point is at program start.
  virtual std::unique_ptr<Model> fresh() const = 0;

  // One clock cycle with reset asserted.
  virtual void reset_cycle(Tracer& tracer) = 0;

  virtual DutSnapshot snapshot() const = 0;
  // Throws std::invalid_argument if the snapshot's fingerprint differs.
  virtual void restore(const DutSnapshot& snap) = 0;

  virtual void rearm_assertions() = 0;
  virtual std::optional<std::string> check_assertions() = 0;

  // FSM tracked for state coverage; 0 states means none.
  virtual size_t fsm_state_count() const { return 0; }
  virtual uint32_t fsm_state() const { return 0; }
};

struct PortSpec {
  std::string name;
  unsigned width;  // bits
};

// A DUT driven port-by-port (the generic harness).
class DutModel : public Model {
 public:
  virtual std::span<const PortSpec> inputs() const = 0;
  // Values wider than the port are masked.
  virtual void set_input(size_t port, uint64_t value) = 0;
  // One full clock cycle with the current inputs.
  virtual void step(Tracer& tracer) = 0;
};

inline uint64_t width_mask(unsigned width) {
  return width >= 64 ? ~uint64_t{0} : ((uint64_t{1} << width) - 1);
}

}  // namespace hwfuzz
