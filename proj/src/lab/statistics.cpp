#include "uclt/lab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uclt/errors.hpp"

namespace uclt::lab {

BlockSums pool(const std::vector<BlockSums>& blocks) {
  BlockSums total;
  if (blocks.empty()) return total;
  total.sums.assign(blocks.front().sums.size(), 0.0);
  for (const auto& b : blocks) {
    if (b.sums.size() != total.sums.size()) throw InvalidArgument("pool: ragged block sums");
    for (std::size_t k = 0; k < b.sums.size(); ++k) total.sums[k] += b.sums[k];
    total.count += b.count;
  }
  return total;
}

std::vector<Estimate> jackknife_vector(
    const std::vector<BlockSums>& blocks, std::size_t outputs,
    const std::function<void(const std::vector<double>&, double, std::vector<double>&)>& statistic) {
  const BlockSums total = pool(blocks);
  std::vector<double> full(outputs, 0.0);
  statistic(total.sums, static_cast<double>(total.count), full);
  std::vector<Estimate> out(outputs);
  for (std::size_t j = 0; j < outputs; ++j) out[j] = {full[j], full[j], 0.0};
  const std::size_t g = blocks.size();
  if (g < 2) return out;

  std::vector<std::vector<double>> leave_out(g, std::vector<double>(outputs, 0.0));
  std::vector<double> sums(total.sums.size());
  for (std::size_t b = 0; b < g; ++b) {
    for (std::size_t k = 0; k < sums.size(); ++k) sums[k] = total.sums[k] - blocks[b].sums[k];
    statistic(sums, static_cast<double>(total.count - blocks[b].count), leave_out[b]);
  }
  const double gd = static_cast<double>(g);
  for (std::size_t j = 0; j < outputs; ++j) {
    double mean = 0.0;
    for (std::size_t b = 0; b < g; ++b) mean += leave_out[b][j];
    mean /= gd;
    double ss = 0.0;
    for (std::size_t b = 0; b < g; ++b) ss += (leave_out[b][j] - mean) * (leave_out[b][j] - mean);
    out[j].std_error = std::sqrt((gd - 1.0) / gd * ss);
    out[j].value = gd * full[j] - (gd - 1.0) * mean;
  }
  return out;
}

Estimate jackknife(const std::vector<BlockSums>& blocks,
                   const std::function<double(const std::vector<double>&, double)>& statistic) {
  return jackknife_vector(blocks, 1,
                          [&](const std::vector<double>& s, double n, std::vector<double>& o) {
                            o[0] = statistic(s, n);
                          })
      .front();
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("ks_one_sample: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = cdf(samples[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0 || !(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("ks_critical_value: need positive sizes and alpha in (0,1)");
  }
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  return c * std::sqrt((nd + md) / (nd * md));
}

double normal_cdf(double x, double sigma) {
  return 0.5 * std::erfc(-x / (sigma * std::numbers::sqrt2));
}

}  // namespace uclt::lab
