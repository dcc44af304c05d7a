#include "uclt/tail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "uclt/errors.hpp"
#include "uclt/extremum.hpp"

namespace uclt {

namespace {

double gaussian_term(double x, double v) { return std::exp(-x * x / (8.0 * v * v)); }

}  // namespace

TailFunction TailFunction::closed_weibull(double K, double q) {
  if (!(K > 0.0) || !(q > 0.0) || !std::isfinite(K) || !std::isfinite(q)) {
    throw InvalidArgument("closed_weibull tail: K and q must be positive and finite");
  }
  TailFunction t;
  t.form_ = Form::ClosedWeibull;
  t.k_ = K;
  t.q_ = q;
  return t;
}

TailFunction TailFunction::tabulated(std::vector<double> x_grid, std::vector<double> values) {
  if (x_grid.empty() || x_grid.size() != values.size()) {
    throw InvalidArgument("tabulated tail: grid and values must be nonempty and equal length");
  }
  for (std::size_t k = 0; k < x_grid.size(); ++k) {
    if (!(x_grid[k] >= 0.0) || !std::isfinite(x_grid[k])) {
      throw InvalidArgument("tabulated tail: x must be finite and nonnegative");
    }
    if (k > 0 && !(x_grid[k] > x_grid[k - 1])) {
      throw InvalidArgument("tabulated tail: x grid must be strictly ascending");
    }
    if (!(values[k] >= 0.0 && values[k] <= 1.0)) {
      throw InvalidArgument("tabulated tail: values must lie in [0, 1]");
    }
    if (k > 0 && values[k] > values[k - 1]) {
      throw InvalidArgument("tabulated tail: values must be nonincreasing");
    }
  }
  if (x_grid.front() == 0.0 && values.front() != 1.0) {
    throw InvalidArgument("tabulated tail: T(0) must equal 1");
  }
  if (values.back() > kEndTolerance) {
    throw InvalidArgument(
        fmt::format("tabulated tail: last value {} does not decay below {}", values.back(), kEndTolerance));
  }
  TailFunction t;
  t.form_ = Form::Tabulated;
  t.x_ = std::move(x_grid);
  t.values_ = std::move(values);
  return t;
}

TailFunction TailFunction::degenerate_zero() { return TailFunction{}; }

double TailFunction::operator()(double x) const {
  if (x < 0.0) return 1.0;
  switch (form_) {
    case Form::ClosedWeibull:
      return std::exp(-std::pow(x / k_, q_));
    case Form::Tabulated: {
      const auto it = std::upper_bound(x_.begin(), x_.end(), x);
      if (it == x_.begin()) return 1.0;
      return values_[static_cast<std::size_t>(it - x_.begin()) - 1];
    }
    case Form::DegenerateZero:
      return x == 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double tail_second_moment(const TailFunction& tail, double v) {
  const double from = std::max(v, 0.0);
  switch (tail.form()) {
    case TailFunction::Form::DegenerateZero:
      return 0.0;
    case TailFunction::Form::ClosedWeibull: {
      // ∫_v^∞ y² dF with F the Weibull law: K² Γ(1 + 2/q, (v/K)^q)
      const double K = tail.K();
      const double q = tail.q();
      return K * K * boost::math::tgamma(1.0 + 2.0 / q, std::pow(from / K, q));
    }
    case TailFunction::Form::Tabulated: {
      const auto& xs = tail.x_grid();
      const auto& ts = tail.values();
      if (ts.back() > 0.0) {
        throw NonIntegrable(fmt::format(
            "tabulated tail leaves mass {} beyond x = {}; the second moment is unbounded",
            ts.back(), xs.back()));
      }
      double sum = 0.0;
      double previous = 1.0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double mass = previous - ts[k];
        if (xs[k] > from) sum += xs[k] * xs[k] * mass;
        previous = ts[k];
      }
      return sum;
    }
  }
  return 0.0;
}

double w_operator(const TailFunction& tail, double x, const TailOptions& options) {
  if (!(x > 0.0)) throw InvalidArgument("w_operator: x must be positive");
  // v -> 0 limit: the Gaussian term vanishes and the full second moment remains
  double best = tail_second_moment(tail, 0.0);

  switch (tail.form()) {
    case TailFunction::Form::DegenerateZero:
      return 0.0;
    case TailFunction::Form::Tabulated:
      // the bracket increases in v between jump points, so the infimum sits at a jump
      for (double jump : tail.x_grid()) {
        if (jump > 0.0) best = std::min(best, gaussian_term(x, jump) + tail_second_moment(tail, jump));
      }
      break;
    case TailFunction::Form::ClosedWeibull: {
      const auto bracket = [&](double v) { return gaussian_term(x, v) + tail_second_moment(tail, v); };
      const double lo = 1e-6 * x;
      const double hi = 1e3 * (x + tail.K());
      best = std::min(best, minimize_log_grid(bracket, lo, hi, {options.v_nodes, options.rel_tol}).value);
      break;
    }
  }
  return std::min(1.0, best);
}

double weighted_sum_tail_bound(const TailFunction& tail, double x, const TailOptions& options) {
  if (!(x > 1.0)) throw InvalidArgument("weighted_sum_tail_bound: requires x > 1");
  return w_operator(tail, x, options);
}

double weibull_sum_exponent(double q) {
  if (!(q > 0.0)) throw InvalidArgument("weibull_sum_exponent: q must be positive");
  return 2.0 * q / (2.0 + q);
}

double weibull_sum_bound(double K, double q, double x, double c_fit) {
  if (!(K > 0.0) || !(c_fit > 0.0)) {
    throw InvalidArgument("weibull_sum_bound: K and c_fit must be positive");
  }
  if (!(x >= 0.0)) throw InvalidArgument("weibull_sum_bound: x must be nonnegative");
  return std::exp(-c_fit * std::pow(x / K, weibull_sum_exponent(q)));
}

double subq_tail_equivalence(double K, double q, double x, double c_fit) {
  if (!(K > 0.0) || !(q > 0.0) || !(c_fit > 0.0)) {
    throw InvalidArgument("subq_tail_equivalence: K, q and c_fit must be positive");
  }
  if (!(x > 1.0)) throw InvalidArgument("subq_tail_equivalence: requires x > 1");
  return std::exp(-c_fit * std::pow(x / K, q));
}

double calibrate_tail_constant(double K, double exponent,
                               const std::vector<TailObservation>& observations,
                               double se_multiplier) {
  if (observations.empty()) throw InvalidArgument("calibrate_tail_constant: no observations");
  double c = std::numeric_limits<double>::infinity();
  for (const auto& o : observations) {
    const double upper = o.empirical + se_multiplier * o.std_error;
    if (upper >= 1.0) return 0.0;
    if (upper <= 0.0) continue;  // no constraint from an empty tail
    c = std::min(c, -std::log(upper) / std::pow(o.x / K, exponent));
  }
  return std::isfinite(c) ? std::max(c, 0.0) : 0.0;
}

double w_decay_slope(const TailFunction& tail, double lo, double hi, int points,
                     const TailOptions& options) {
  if (!(lo > 0.0 && hi > lo) || points < 2) {
    throw InvalidArgument("w_decay_slope: need 0 < lo < hi and at least two points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double step = (std::log(hi) - std::log(lo)) / (points - 1);
  for (int k = 0; k < points; ++k) {
    const double lx = std::log(lo) + step * k;
    const double w = w_operator(tail, std::exp(lx), options);
    if (!(w < 1.0) || !(w > 0.0)) {
      throw InvalidArgument(fmt::format("w_decay_slope: W[T]({}) = {} has no finite log-log value",
                                        std::exp(lx), w));
    }
    const double ly = std::log(-std::log(w));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = points;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace uclt
