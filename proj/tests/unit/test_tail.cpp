#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "uclt/errors.hpp"
#include "uclt/psi.hpp"
#include "uclt/tail.hpp"

namespace uclt {
namespace {

TEST(TailFunctionForms, Values) {
  const auto w = TailFunction::closed_weibull(2.0, 1.0);
  EXPECT_EQ(w(0.0), 1.0);
  EXPECT_NEAR(w(2.0), std::exp(-1.0), 1e-15);
  const auto t = TailFunction::tabulated({1.0, 2.0}, {0.5, 0.0});
  EXPECT_EQ(t(0.5), 1.0);
  EXPECT_EQ(t(1.0), 0.5);
  EXPECT_EQ(t(1.5), 0.5);
  EXPECT_EQ(t(2.0), 0.0);
  EXPECT_EQ(TailFunction::degenerate_zero()(1e-9), 0.0);
}

TEST(TailFunctionForms, Validation) {
  EXPECT_THROW(TailFunction::tabulated({0.0, 1.0}, {0.9, 0.0}), InvalidArgument);
  EXPECT_THROW(TailFunction::tabulated({1.0, 2.0}, {0.2, 0.5}), InvalidArgument);
  EXPECT_THROW(TailFunction::tabulated({1.0, 2.0}, {0.5, 0.1}), InvalidArgument);
  EXPECT_THROW(TailFunction::closed_weibull(-1.0, 2.0), InvalidArgument);
}

TEST(SecondMoment, DegenerateIsZero) { EXPECT_EQ(tail_second_moment(TailFunction::degenerate_zero(), 0.0), 0.0); }

TEST(SecondMoment, WeibullMatchesInverseCdfSampling) {
  // P(Y > y) = exp(-y²): Y² is standard exponential, so E Y² = 1.
  EXPECT_NEAR(tail_second_moment(TailFunction::closed_weibull(1.0, 2.0), 0.0), 1.0, 1e-12);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int draws = 400000;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < draws; ++k) {
    const double y = std::sqrt(-std::log(1.0 - u(rng)));
    sum += y * y;
    sum_sq += y * y * y * y;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  EXPECT_NEAR(mean, 1.0, 3.0 * se);
}

TEST(SecondMoment, WeibullClosedFormWithOffset) {
  // q = 1, K = 1: ∫_v^∞ y² e^{-y} dy = e^{-v}(v² + 2v + 2).
  const auto t = TailFunction::closed_weibull(1.0, 1.0);
  for (double v : {0.0, 0.5, 3.0, 12.0}) {
    EXPECT_NEAR(tail_second_moment(t, v), std::exp(-v) * (v * v + 2 * v + 2), 1e-10) << v;
  }
}

TEST(SecondMoment, TabulatedSumsJumps) {
  const auto t = TailFunction::tabulated({1.0, 2.0}, {0.5, 0.0});
  EXPECT_NEAR(tail_second_moment(t, 0.0), 0.5 * 1.0 + 0.5 * 4.0, 1e-15);
  EXPECT_NEAR(tail_second_moment(t, 1.5), 2.0, 1e-15);
  EXPECT_EQ(tail_second_moment(t, 3.0), 0.0);
}

TEST(SecondMoment, ResidualMassIsNotIntegrable) {
  const auto t = TailFunction::tabulated({1.0, 2.0, 3.0}, {0.5, 0.1, 1e-7});
  EXPECT_THROW(tail_second_moment(t, 0.0), NonIntegrable);
}

TEST(SecondMoment, NonincreasingInV) {
  const auto t = TailFunction::closed_weibull(1.3, 0.7);
  double last = tail_second_moment(t, 0.0);
  for (double v = 0.1; v < 50.0; v *= 1.4) {
    const double m = tail_second_moment(t, v);
    EXPECT_LE(m, last);
    last = m;
  }
}

TEST(WOperator, DegenerateIsZero) { EXPECT_EQ(w_operator(TailFunction::degenerate_zero(), 2.0), 0.0); }

TEST(WOperator, TendsToOneNearZero) {
  EXPECT_NEAR(w_operator(TailFunction::closed_weibull(1.0, 2.0), 1e-6), 1.0, 1e-9);
}

TEST(WOperator, WeibullAgainstDenseGrid) {
  const double x = 10.0;
  double oracle = 1.0;
  const int nodes = 100000;
  for (int k = 0; k <= nodes; ++k) {
    const double v = std::exp(std::log(1e-3) + (std::log(1e3) - std::log(1e-3)) * k / nodes);
    const double moment = std::exp(-v) * (v * v + 2 * v + 2);
    oracle = std::min(oracle, std::exp(-x * x / (8 * v * v)) + moment);
  }
  EXPECT_NEAR(w_operator(TailFunction::closed_weibull(1.0, 1.0), x), oracle, 1e-6 * oracle);
}

TEST(WOperator, NonincreasingAndBounded) {
  const auto t = TailFunction::closed_weibull(1.0, 1.5);
  double last = 1.0;
  for (double x = 0.5; x < 200.0; x *= 1.3) {
    const double w = w_operator(t, x);
    EXPECT_LE(w, last + 1e-12);
    EXPECT_GE(w, 0.0);
    last = w;
  }
}

TEST(WOperator, StableUnderNodeDoubling) {
  const auto t = TailFunction::closed_weibull(1.0, 2.0);
  for (double x : {2.0, 10.0, 60.0}) {
    const double coarse = w_operator(t, x, {512, 1e-9});
    const double fine = w_operator(t, x, {1024, 1e-9});
    EXPECT_LE(std::abs(coarse - fine), 1e-6 * fine) << x;
  }
}

TEST(WOperator, BoundedVariablesTabulated) {
  // |ξ| <= 1: the second moment beyond v >= 1 is zero, so W <= exp(-x²/8).
  const auto t = TailFunction::tabulated({1.0}, {0.0});
  for (double x : {2.0, 4.0, 6.0}) EXPECT_NEAR(w_operator(t, x), std::exp(-x * x / 8.0), 1e-15);
}

TEST(Lemma, RequiresXAboveOne) {
  EXPECT_THROW(weighted_sum_tail_bound(TailFunction::closed_weibull(1.0, 2.0), 1.0), InvalidArgument);
  EXPECT_NO_THROW(weighted_sum_tail_bound(TailFunction::closed_weibull(1.0, 2.0), 1.01));
}

TEST(WeibullSums, ExponentIdentities) {
  EXPECT_DOUBLE_EQ(weibull_sum_exponent(2.0), 1.0);
  EXPECT_DOUBLE_EQ(weibull_sum_exponent(1.0), 2.0 / 3.0);
  for (double q : {0.3, 1.0, 5.0, 40.0}) EXPECT_LT(weibull_sum_exponent(q), q);
  EXPECT_NEAR(weibull_sum_exponent(1e8), 2.0, 1e-7);
  EXPECT_EQ(weibull_sum_bound(1.0, 2.0, 0.0, 0.7), 1.0);
}

TEST(WeibullSums, DecaySlopeMatchesExponent) {
  for (double q : {1.0, 2.0}) {
    const double slope = w_decay_slope(TailFunction::closed_weibull(1.0, q), 10.0, 100.0);
    EXPECT_GE(slope, weibull_sum_exponent(q) - 0.05) << q;
  }
}

TEST(SubqTail, MonotoneInNorm) {
  EXPECT_LT(subq_tail_equivalence(1.0, 2.0, 3.0, 0.5), subq_tail_equivalence(2.0, 2.0, 3.0, 0.5));
  EXPECT_THROW(subq_tail_equivalence(1.0, 2.0, 1.0, 0.5), InvalidArgument);
}

TEST(SubqTail, CalibratedGaussianTailBound) {
  std::vector<double> grid;
  for (double p = 2.0; p <= 40.0; p += 0.5) grid.push_back(p);
  const double K = subq_norm(MomentCurve::gaussian(1.0, grid), 2.0);
  std::mt19937_64 rng(19);
  std::normal_distribution<double> z;
  const int draws = 1000000;
  const std::vector<double> xs{1.5, 2.0, 3.0};
  std::vector<int> hits(xs.size(), 0);
  for (int k = 0; k < draws; ++k) {
    const double a = std::abs(z(rng));
    for (std::size_t j = 0; j < xs.size(); ++j) hits[j] += a > xs[j];
  }
  std::vector<TailObservation> obs;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double f = static_cast<double>(hits[j]) / draws;
    obs.push_back({xs[j], f, std::sqrt(f * (1 - f) / draws)});
  }
  const double c = calibrate_tail_constant(K, 2.0, obs);
  EXPECT_GT(c, 0.0);
  for (const auto& o : obs) EXPECT_GE(subq_tail_equivalence(K, 2.0, o.x, c), o.empirical);
}

TEST(SubqTail, CalibrationRejectsHeavyTails) {
  EXPECT_EQ(calibrate_tail_constant(1.0, 2.0, {{2.0, 0.999, 0.01}}), 0.0);
}

}  // namespace
}  // namespace uclt
