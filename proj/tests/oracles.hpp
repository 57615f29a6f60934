#pragma once

// Reference computations the shipped code is checked against. Each is a
// direct, slow transcription of the definition.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// Two-sided exact permutation p for the Mann-Whitney U of `a`: enumerate
// every way to pick |a| of the pooled observations, compute U with average
// ranks, and count the splits at least as far from n1*n2/2 as the observed.
inline double exact_mwu_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const size_t n = pooled.size();
  std::vector<double> rank(n);
  for (size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (size_t j = 0; j < n; ++j) {
      if (pooled[j] < pooled[i]) ++less;
      if (pooled[j] == pooled[i]) ++equal;
    }
    rank[i] = less + (equal + 1) / 2;
  }
  const size_t n1 = a.size();
  const double base = static_cast<double>(n1 * (n1 + 1)) / 2;
  double observed = -base;
  for (size_t i = 0; i < n1; ++i) observed += rank[i];
  const double mu = static_cast<double>(n1 * b.size()) / 2;
  const double dev = std::fabs(observed - mu);

  uint64_t total = 0, extreme = 0;
  std::vector<size_t> pick;
  std::function<void(size_t, double)> rec = [&](size_t start, double sum) {
    if (pick.size() == n1) {
      ++total;
      if (std::fabs(sum - base - mu) >= dev - 1e-9) ++extreme;
      return;
    }
    for (size_t i = start; i + (n1 - pick.size()) <= n; ++i) {
      pick.push_back(i);
      rec(i + 1, sum + rank[i]);
      pick.pop_back();
    }
  };
  rec(0, 0);
  return static_cast<double>(extreme) / static_cast<double>(total);
}

// U of `a` by pair counting: wins plus half the ties.
inline double pair_count_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : x == y ? 0.5 : 0.0;
  }
  return u;
}

// mtime after `ticks` active ticks from zero, stepping once per
// (prescaler + 1) ticks.
inline uint64_t timer_mtime(uint32_t prescaler, uint32_t step, uint64_t ticks) {
  uint64_t mtime = 0, count = 0;
  for (uint64_t t = 0; t < ticks; ++t) {
    if (++count == uint64_t{prescaler} + 1) {
      mtime += step;
      count = 0;
    }
  }
  return mtime;
}

// Mean attempts of the random baseline: each attempt succeeds with
// probability 2^-(M (2^N - 1)).
inline double crv_expected_attempts(unsigned n, unsigned m) {
  return std::pow(2.0, static_cast<double>(m) * (std::pow(2.0, n) - 1));
}

}  // namespace oracle
