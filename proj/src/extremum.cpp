#include "uclt/extremum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "uclt/errors.hpp"

namespace uclt {

Extremum golden_section_min(const std::function<double(double)>& f, double a, double b,
                            double rel_tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > rel_tol * std::max(std::abs(a), std::abs(b))) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  // endpoints too, so a minimum at the bracket boundary is not lost
  Extremum best{c, fc};
  for (double t : {a, b}) {
    const double ft = f(t);
    if (ft < best.value) best = {t, ft};
  }
  if (fd < best.value) best = {d, fd};
  return best;
}

Extremum minimize_log_grid(const std::function<double(double)>& f, double lo, double hi,
                           const GridOptions& options) {
  if (!(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("minimize_log_grid: need 0 < lo <= hi");
  if (lo == hi) return {lo, f(lo)};
  const int n = std::max(options.nodes, 3);
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / (n - 1);
  std::vector<double> nodes(n);
  for (int k = 0; k < n; ++k) nodes[k] = k == n - 1 ? hi : std::exp(log_lo + step * k);
  nodes[0] = lo;

  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double v = f(nodes[k]);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  if (!std::isfinite(best_value)) return {nodes[best], best_value};

  const double a = nodes[std::max(best - 1, 0)];
  const double b = nodes[std::min(best + 1, n - 1)];
  Extremum refined = golden_section_min(f, a, b, options.rel_tol);
  if (refined.value <= best_value) return refined;
  return {nodes[best], best_value};
}

Extremum maximize_log_grid(const std::function<double(double)>& f, double lo, double hi,
                           const GridOptions& options) {
  Extremum e = minimize_log_grid([&](double t) { return -f(t); }, lo, hi, options);
  return {e.arg, -e.value};
}

}  // namespace uclt
