#include "hwfuzz/coverage.hpp"

#include <algorithm>

namespace hwfuzz {

CoverageMap::CoverageMap() : buckets_(kMapSize, 0) { touched_.reserve(256); }

void CoverageMap::raise(uint16_t index, uint8_t count) {
  uint8_t& b = buckets_[index];
  if (count <= b) return;
  if (b == 0) touched_.push_back(index);
  b = count;
}

void CoverageMap::clear() {
  for (uint16_t i : touched_) buckets_[i] = 0;
  touched_.clear();
}

void CoverageMap::assign(const CoverageMap& other) {
  if (&other == this) return;
  clear();
  for (uint16_t i : other.touched_) buckets_[i] = other.buckets_[i];
  touched_ = other.touched_;
}

std::vector<EdgeHit> CoverageMap::sparse() const {
  std::vector<EdgeHit> out;
  out.reserve(touched_.size());
  for (uint16_t i : touched_) out.push_back({i, buckets_[i]});
  std::sort(out.begin(), out.end(),
            [](const EdgeHit& a, const EdgeHit& b) { return a.index < b.index; });
  return out;
}

bool operator==(const CoverageMap& a, const CoverageMap& b) {
  return a.buckets_ == b.buckets_;
}

bool is_interesting(const CoverageMap& test, const CoverageMap& global) {
  for (uint16_t i : test.touched()) {
    if (count_class(test[i]) > count_class(global[i])) return true;
  }
  return false;
}

size_t merge(CoverageMap& global, const CoverageMap& test) {
  size_t raised = 0;
  for (uint16_t i : test.touched()) {
    if (count_class(test[i]) > count_class(global[i])) ++raised;
    global.raise(i, test[i]);
  }
  return raised;
}

size_t class_total(const CoverageMap& map) {
  size_t total = 0;
  for (uint16_t i : map.touched()) total += count_class(map[i]);
  return total;
}

double fsm_coverage_fraction(std::span<const uint32_t> visited_states,
                             size_t state_count) {
  FsmCoverage fsm(state_count);
  fsm.visit(visited_states);
  return fsm.fraction();
}

}  // namespace hwfuzz
