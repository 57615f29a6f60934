#pragma once

#include <span>
#include <vector>

namespace hwfuzz {

inline constexpr double kSignificanceLevel = 0.05;

struct UTestResult {
  double u_statistic = 0;  // U of the first sample
  double p_value = 1;      // two-sided
  bool significant = false;
  double z = 0;
};

// Mann-Whitney U with average ranks for ties; two-sided p from the normal
// approximation with tie-corrected variance and a 0.5 continuity correction.
// Throws std::invalid_argument if either sample is empty.
UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Average (1-based) ranks of the pooled values, ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

double median(std::span<const double> values);
double mean(std::span<const double> values);

// Sorted middle third: indices [n/3, 2n/3). Needs at least 3 values.
std::vector<double> trim_middle_third(std::span<const double> runs);

std::vector<double> normalize(std::span<const double> runs, double reference);
// Divide by the median of `reference`.
std::vector<double> normalize_to_median(std::span<const double> runs,
                                        std::span<const double> reference);

}  // namespace hwfuzz
