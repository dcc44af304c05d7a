#pragma once

// Tail functions and the nonlinear operator W[T] bounding tails of normalized martingale sums.

#include <vector>

namespace uclt {

/// A tail function: T(0) = 1, nonincreasing, right-continuous, T(inf) = 0.
class TailFunction {
 public:
  enum class Form { ClosedWeibull, Tabulated, DegenerateZero };

  /// T(x) = exp(-(x/K)^q).
  static TailFunction closed_weibull(double K, double q);
  /// Right-continuous step function: T = 1 before x_grid[0], values[k] on [x_k, x_{k+1}),
  /// values.back() beyond the grid. Any mass left at the end (values.back() > 0) sits at +inf.
  static TailFunction tabulated(std::vector<double> x_grid, std::vector<double> values);
  /// The tail of the zero variable: T(x) = 0 for x > 0.
  static TailFunction degenerate_zero();

  Form form() const { return form_; }
  double K() const { return k_; }
  double q() const { return q_; }
  const std::vector<double>& x_grid() const { return x_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(double x) const;

  /// Largest value the last tabulated entry may take.
  static constexpr double kEndTolerance = 1e-6;

 private:
  Form form_ = Form::DegenerateZero;
  double k_ = 0.0;
  double q_ = 0.0;
  std::vector<double> x_;
  std::vector<double> values_;
};

struct TailOptions {
  int v_nodes = 512;
  double rel_tol = 1e-9;
};

/// -∫_v^∞ y² dT(y). Throws NonIntegrable when a tabulated tail leaves mass at infinity.
double tail_second_moment(const TailFunction& tail, double v);

/// W[T](x) = min(1, inf_{v>0} [exp(-x²/(8v²)) + tail_second_moment(T, v)]).
double w_operator(const TailFunction& tail, double x, const TailOptions& options = {});

/// Uniform-in-n bound on max(P(S > x), P(S < -x)) for S a unit-norm weighted sum of centred
/// martingale differences whose tails are dominated by `tail`; requires x > 1.
double weighted_sum_tail_bound(const TailFunction& tail, double x, const TailOptions& options = {});

/// 2q / (2 + q).
double weibull_sum_exponent(double q);

/// exp(-c_fit (x/K)^{2q/(2+q)}); the constant is not known in closed form and is supplied.
double weibull_sum_bound(double K, double q, double x, double c_fit);

/// exp(-c_fit (x/K)^q) for x > 1: the tail shape equivalent to a finite sub-q norm K.
double subq_tail_equivalence(double K, double q, double x, double c_fit);

struct TailObservation {
  double x = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
};

/// Largest c with exp(-c (x/K)^exponent) >= empirical + se_multiplier·SE at every observation;
/// 0 when no positive constant works.
double calibrate_tail_constant(double K, double exponent,
                               const std::vector<TailObservation>& observations,
                               double se_multiplier = 3.0);

/// Least-squares slope of log(-log W[T](x)) against log x on `points` log-spaced x in [lo, hi].
double w_decay_slope(const TailFunction& tail, double lo, double hi, int points = 30,
                     const TailOptions& options = {});

}  // namespace uclt
