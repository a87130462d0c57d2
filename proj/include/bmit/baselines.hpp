#pragma once

#include <span>
#include <vector>

namespace bmit {

/// 1-based ranks with ties sharing their average rank.
std::vector<double> midranks(std::span<const double> v);

/// Spearman's rho: Pearson correlation of the midranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// Kendall's tau-b, O(n log n) via merge-sort swap counting.
double kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace bmit
