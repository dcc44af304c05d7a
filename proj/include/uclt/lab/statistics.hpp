#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace uclt::lab {

/// Per-block sums of a fixed set of accumulators plus the block's replication count.
struct BlockSums {
  std::vector<double> sums;
  std::size_t count = 0;
};

struct Estimate {
  double value = 0.0;      ///< jackknife bias-corrected
  double plain = 0.0;      ///< statistic on the pooled sums
  double std_error = 0.0;  ///< delete-one-block jackknife
};

/// Pools per-block sums into totals.
BlockSums pool(const std::vector<BlockSums>& blocks);

/// Delete-one-block jackknife of `statistic(sums, count)`.
Estimate jackknife(const std::vector<BlockSums>& blocks,
                   const std::function<double(const std::vector<double>&, double)>& statistic);

/// Vector-valued variant: one Estimate per statistic output.
std::vector<Estimate> jackknife_vector(
    const std::vector<BlockSums>& blocks, std::size_t outputs,
    const std::function<void(const std::vector<double>&, double, std::vector<double>&)>& statistic);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic two-sample critical value c(alpha) sqrt((n+m)/(nm)).
double ks_critical_value(std::size_t n, std::size_t m, double alpha = 0.05);

double normal_cdf(double x, double sigma = 1.0);

}  // namespace uclt::lab
