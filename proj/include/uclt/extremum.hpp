#pragma once

#include <functional>

namespace uclt {

/// Location and value of a one-dimensional extremum.
struct Extremum {
  double arg = 0.0;
  double value = 0.0;
};

struct GridOptions {
  int nodes = 512;         ///< log-spaced scan nodes
  double rel_tol = 1e-9;   ///< golden-section stopping width, relative to the argument
};

/// Minimizes `f` over [lo, hi] (0 < lo <= hi): log-spaced scan followed by one golden-section
/// refinement around the best node. `f` may return +inf where undefined.
Extremum minimize_log_grid(const std::function<double(double)>& f, double lo, double hi,
                           const GridOptions& options = {});

/// Maximizes `f` over [lo, hi]; `f` may return -inf where undefined.
Extremum maximize_log_grid(const std::function<double(double)>& f, double lo, double hi,
                           const GridOptions& options = {});

/// Golden-section minimization of a unimodal `f` on [a, b].
Extremum golden_section_min(const std::function<double(double)>& f, double a, double b,
                            double rel_tol);

}  // namespace uclt
