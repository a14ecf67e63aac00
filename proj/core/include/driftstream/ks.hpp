#pragma once

#include <cstddef>
#include <span>

namespace driftstream {

/// Two-sample Kolmogorov-Smirnov statistic: sup over pooled points of
/// |ECDF_a - ECDF_b|. Throws EmptyInput if either sample is empty.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Asymptotic two-sided p-value Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
/// with lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * d and ne = n*m/(n+m).
/// The series stops once a term drops below 1e-10. For lambda < 1.18 the same
/// function is evaluated as 1 - sqrt(2 pi)/lambda sum_k exp(-(2k-1)^2 pi^2 / (8 lambda^2)).
/// Result is clamped to [0, 1].
double ks_pvalue(double d, std::size_t n, std::size_t m);

}  // namespace driftstream
