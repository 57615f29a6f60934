#include "hwfuzz/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hwfuzz {

std::vector<double> average_ranks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t i, size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("mann_whitney_u needs two non-empty samples");
  }
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = average_ranks(pooled);
  const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + a.size(), 0.0);

  UTestResult r;
  r.u_statistic = rank_sum_a - n1 * (n1 + 1) / 2.0;

  // Tie term: sum over tie groups of t^3 - t.
  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  double ties = 0;
  for (size_t i = 0; i < sorted.size();) {
    size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }

  const double mu = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1) - ties / (n * (n - 1)));
  if (var <= 0) {
    r.p_value = 1;
    return r;
  }
  const double dev = std::max(0.0, std::abs(r.u_statistic - mu) - 0.5);
  r.z = dev / std::sqrt(var);
  r.p_value = std::clamp(std::erfc(r.z / std::sqrt(2.0)), 0.0, 1.0);
  r.significant = r.p_value < kSignificanceLevel;
  return r;
}

double median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<double> trim_middle_third(std::span<const double> runs) {
  if (runs.size() < 3) throw std::invalid_argument("trimming needs at least 3 runs");
  std::vector<double> v(runs.begin(), runs.end());
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return {v.begin() + static_cast<ptrdiff_t>(n / 3),
          v.begin() + static_cast<ptrdiff_t>(2 * n / 3)};
}

std::vector<double> normalize(std::span<const double> runs, double reference) {
  if (reference == 0) throw std::invalid_argument("cannot normalize to zero");
  std::vector<double> out;
  out.reserve(runs.size());
  for (double r : runs) out.push_back(r / reference);
  return out;
}

std::vector<double> normalize_to_median(std::span<const double> runs,
                                        std::span<const double> reference) {
  return normalize(runs, median(reference));
}

}  // namespace hwfuzz
