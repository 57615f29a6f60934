#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace hwfuzz {

inline constexpr size_t kMapSize = size_t{1} << 16;

// Which part of the simulation binary a branch site belongs to.
enum class Component : uint8_t { Dut, Harness, Bus };

// Which instrumented components contribute edges to a coverage map.
enum class Scope : uint8_t { DutOnly, All };

constexpr bool scope_admits(Scope scope, Component c) {
  return scope == Scope::All || c == Component::Dut;
}

// Static 16-bit id of a branch site. Sites are named in the models
// ("lock.match") and optionally indexed (per FSM state, per register).
constexpr uint16_t site_id(std::string_view name, uint32_t index = 0) {
  uint32_t h = 2166136261u;
  for (char ch : name) {
    h ^= static_cast<uint8_t>(ch);
    h *= 16777619u;
  }
  for (int i = 0; i < 4; ++i) {
    h ^= (index >> (8 * i)) & 0xFFu;
    h *= 16777619u;
  }
  return static_cast<uint16_t>((h >> 16) ^ (h & 0xFFFFu));
}

constexpr uint16_t edge_index(uint16_t prev_site, uint16_t cur_site) {
  return static_cast<uint16_t>(((prev_site >> 1) ^ cur_site) & 0xFFFFu);
}

// Hit-count class ordinal: 0, 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128-255
// map to 0..8.
constexpr uint8_t count_class(uint8_t count) {
  if (count <= 3) return count;
  if (count < 8) return 4;
  if (count < 16) return 5;
  if (count < 32) return 6;
  if (count < 128) return 7;
  return 8;
}

struct EdgeHit {
  uint16_t index;
  uint8_t count;
  friend bool operator==(const EdgeHit&, const EdgeHit&) = default;
};

// AFL-style edge map: 2^16 saturating byte counters. Touched indices are
// tracked so clearing and scanning cost O(edges hit) rather than O(map).
class CoverageMap {
 public:
  CoverageMap();

  void hit(uint16_t index) {
    uint8_t& b = buckets_[index];
    if (b == 0) touched_.push_back(index);
    if (b != 0xFF) ++b;
  }

  // Raise the bucket to at least `count` (used by merge).
  void raise(uint16_t index, uint8_t count);

  uint8_t operator[](size_t index) const { return buckets_[index]; }
  void clear();
  // Replace contents with `other`'s, touching only live entries.
  void assign(const CoverageMap& other);

  size_t edges_covered() const { return touched_.size(); }
  std::span<const uint16_t> touched() const { return touched_; }
  // Sorted (index, count) pairs.
  std::vector<EdgeHit> sparse() const;

  friend bool operator==(const CoverageMap& a, const CoverageMap& b);

 private:
  std::vector<uint8_t> buckets_;
  std::vector<uint16_t> touched_;
};

// Record one (prev_site -> cur_site) transition if the scope admits the tag.
inline void trace_edge(CoverageMap& map, uint16_t prev_site, uint16_t cur_site,
                       Component tag, Scope scope) {
  if (scope_admits(scope, tag)) map.hit(edge_index(prev_site, cur_site));
}

// True iff some edge of `test` has a higher count class than `global`.
bool is_interesting(const CoverageMap& test, const CoverageMap& global);

// Raise `global` to the per-edge maximum. Returns the number of edges whose
// class increased.
size_t merge(CoverageMap& global, const CoverageMap& test);

// Sum over edges of count_class; never decreases under merge.
size_t class_total(const CoverageMap& map);

// Stateful tracer carried through one test execution. The previous site is
// always advanced, even for edges the scope filters out, so a DutOnly map is
// a per-edge subset of the All map for the same execution.
class Tracer {
 public:
  Tracer(CoverageMap& map, Scope scope) : map_(&map), scope_(scope) {}

  void site(Component tag, uint16_t cur) {
    trace_edge(*map_, prev_, cur, tag, scope_);
    prev_ = cur;
  }

  uint16_t prev() const { return prev_; }
  void set_prev(uint16_t prev) { prev_ = prev; }
  Scope scope() const { return scope_; }
  CoverageMap& map() { return *map_; }

 private:
  CoverageMap* map_;
  Scope scope_;
  uint16_t prev_ = 0;
};

// Visited-state set of a 2^N-state machine.
class FsmCoverage {
 public:
  explicit FsmCoverage(size_t state_count = 0) : visited_(state_count, false) {}

  void visit(uint32_t state) {
    if (state < visited_.size() && !visited_[state]) {
      visited_[state] = true;
      ++count_;
    }
  }
  void visit(std::span<const uint32_t> states) {
    for (uint32_t s : states) visit(s);
  }

  bool visited(uint32_t state) const {
    return state < visited_.size() && visited_[state];
  }
  size_t state_count() const { return visited_.size(); }
  size_t visited_count() const { return count_; }
  double fraction() const {
    return visited_.empty() ? 0.0
                            : static_cast<double>(count_) / visited_.size();
  }

 private:
  std::vector<bool> visited_;
  size_t count_ = 0;
};

double fsm_coverage_fraction(std::span<const uint32_t> visited_states,
                             size_t state_count);

}  // namespace hwfuzz
