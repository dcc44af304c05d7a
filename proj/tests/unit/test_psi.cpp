#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "uclt/errors.hpp"
#include "uclt/psi.hpp"

namespace uclt {
namespace {

// |Z|_p from the even moments (p-1)!! of a standard Gaussian.
double even_gaussian_norm(int p) {
  double m = 1.0;
  for (int k = p - 1; k > 0; k -= 2) m *= k;
  return std::pow(m, 1.0 / p);
}

// |Z|_p from the Gamma-function moment formula.
double gaussian_norm_oracle(double p) {
  const double log_moment = 0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(M_PI);
  return std::exp(log_moment / p);
}

// Brute-force inf over p in [low, high] of x/p + log ψ(p) on a dense log grid; the endpoints
// stand in for the boundary limits of an open support.
double lower_star_oracle(const std::function<double(double)>& log_psi, double x, double low,
                         double high) {
  double best = kInf;
  const int nodes = 400000;
  const double a = std::log(low), b = std::log(high);
  for (int k = 0; k <= nodes; ++k) {
    const double p = std::exp(a + (b - a) * k / nodes);
    best = std::min(best, x / p + log_psi(p));
  }
  return best;
}

TEST(PsiEval, ClosedPowerValue) { EXPECT_DOUBLE_EQ(eval_psi(PsiFunction::closed_power(2.0), 4.0), 2.0); }

TEST(PsiEval, DegenerateIsOneAtItsPointOnly) {
  const auto psi = PsiFunction::degenerate(3.0);
  EXPECT_EQ(eval_psi(psi, 3.0), 1.0);
  EXPECT_EQ(eval_psi(psi, 3.5), kInf);
}

TEST(PsiEval, InfiniteOutsideOpenSupport) {
  EXPECT_EQ(eval_psi(PsiFunction::closed_power(1.0), 1.5), kInf);
  EXPECT_EQ(eval_psi(PsiFunction::closed_power(2.0), 2.0), kInf);
  EXPECT_EQ(eval_psi(PsiFunction::closed_power(2.0, 2.0, 8.0), 8.0), kInf);
}

TEST(PsiEval, RejectsPBelowOne) { EXPECT_THROW(eval_psi(PsiFunction::closed_power(2.0), 0.5), InvalidArgument); }

TEST(PsiEval, RejectsSupportBelowOne) {
  EXPECT_THROW(PsiFunction::closed_power(2.0, 0.5), InvalidSupport);
  EXPECT_THROW(PsiFunction::degenerate(1.5, 2.0), InvalidSupport);
}

TEST(PsiEval, TabulatedIsGeometricBetweenNodes) {
  const auto psi = PsiFunction::tabulated({2.0, 8.0}, {1.0, 4.0}, 1.0);
  EXPECT_DOUBLE_EQ(psi(2.0), 1.0);
  EXPECT_DOUBLE_EQ(psi(8.0), 4.0);
  EXPECT_NEAR(psi(4.0), 2.0, 1e-12);
  EXPECT_EQ(psi(9.0), kInf);
  EXPECT_EQ(psi(1.5), kInf);
}

TEST(PsiEval, ScaledMultiplies) {
  const auto psi = PsiFunction::scaled(3.0, PsiFunction::closed_power(2.0));
  EXPECT_DOUBLE_EQ(psi(9.0), 9.0);
}

TEST(GlsNorm, DegenerateGivesLrNorm) {
  const std::vector<double> grid{2.5, 3.0, 4.0, 6.0};
  const MomentCurve curve(grid, {0.7, 1.1, 1.9, 2.5});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(gls_norm(curve, PsiFunction::degenerate(grid[k])), curve.norms()[k]);
  }
}

TEST(GlsNorm, ZeroCurveHasZeroNorm) {
  EXPECT_EQ(gls_norm(MomentCurve::zero({3.0, 4.0}), PsiFunction::closed_power(2.0)), 0.0);
}

TEST(GlsNorm, GaussianAgainstEvenMoments) {
  const auto curve = MomentCurve::gaussian(1.0, {2.0, 4.0, 6.0, 8.0});
  double expected = 0.0;
  for (int p : {4, 6, 8}) expected = std::max(expected, even_gaussian_norm(p) / std::sqrt(p));
  EXPECT_NEAR(gls_norm(curve, PsiFunction::closed_power(2.0)), expected, 1e-12);
  EXPECT_NEAR(curve.norms()[0], 1.0, 1e-12);
  EXPECT_NEAR(curve.norms()[1], std::pow(3.0, 0.25), 1e-12);
}

TEST(GlsNorm, EmptyOverlapThrows) {
  EXPECT_THROW(gls_norm(MomentCurve({1.5}, {1.0}), PsiFunction::closed_power(2.0)), EmptySupportOverlap);
}

TEST(GlsNorm, HomogeneousAndMonotoneInPsi) {
  const auto curve = MomentCurve::gaussian(1.0, {3.0, 4.0, 6.0});
  const auto psi = PsiFunction::closed_power(2.0);
  EXPECT_NEAR(gls_norm(curve.scaled(2.5), psi), 2.5 * gls_norm(curve, psi), 1e-12);
  EXPECT_LE(gls_norm(curve, PsiFunction::scaled(2.0, psi)), gls_norm(curve, psi));
}

TEST(SubqNorm, SinglePointCurve) {
  EXPECT_NEAR(subq_norm(MomentCurve({2.0}, {std::pow(2.0, 0.5)}), 2.0), 1.0, 1e-15);
  EXPECT_EQ(subq_norm(MomentCurve::zero({2.0, 3.0}), 1.0), 0.0);
}

TEST(SubqNorm, GaussianDenseGrid) {
  std::vector<double> grid;
  for (double p = 2.0; p <= 20.0; p += 0.5) grid.push_back(p);
  double expected = 0.0;
  for (double p : grid) expected = std::max(expected, gaussian_norm_oracle(p) / std::sqrt(p));
  EXPECT_NEAR(subq_norm(MomentCurve::gaussian(1.0, grid), 2.0), expected, 1e-12);
}

TEST(Rosenthal, ClosedPowerValue) {
  const auto r = rosenthal_transform(PsiFunction::closed_power(1.0, 1.0));
  EXPECT_NEAR(r(4.0), 4.0 / std::log(4.0) * 4.0, 1e-12);
  EXPECT_NEAR(r(4.0), 11.541560327111707, 1e-9);
}

TEST(Rosenthal, DominatesOriginalUpToE) {
  for (const auto& psi : {PsiFunction::closed_power(2.0, 1.0), PsiFunction::closed_power(0.5, 1.0),
                          PsiFunction::tabulated({1.5, 3.0, 9.0}, {1.0, 1.4, 2.7}, 1.0)}) {
    const auto r = rosenthal_transform(psi);
    for (double p = 1.5; p <= 9.0; p += 0.25) {
      EXPECT_LE(psi(p), std::exp(1.0) * r(p) * (1 + 1e-12));
      EXPECT_GE(r(p) / psi(p), std::exp(1.0) * (1 - 1e-12));
    }
  }
}

TEST(LowerStar, KnownValues) {
  EXPECT_NEAR(psi_lower_star(PsiFunction::closed_power(1.0, 1.0), 10.0), 1.0 + std::log(10.0), 1e-9);
  EXPECT_NEAR(psi_lower_star(PsiFunction::closed_power(2.0, 1.0), 2.0), 0.5 * (1.0 + std::log(4.0)), 1e-9);
}

TEST(LowerStar, BoundaryBranchMatchesBruteForce) {
  const double x = std::log(2.0);
  const double oracle = lower_star_oracle([](double p) { return 0.5 * std::log(p); }, x, 2.0, 1e6);
  // the support is open at 2, so the infimum is the limit p -> 2
  EXPECT_NEAR(psi_lower_star(PsiFunction::closed_power(2.0), x), oracle, 1e-6);
  EXPECT_NEAR(oracle, std::log(2.0), 1e-6);
}

TEST(LowerStar, NumericMatchesBruteForceOnTabulated) {
  const auto psi = PsiFunction::tabulated({2.0, 4.0, 8.0, 16.0}, {1.0, 1.5, 2.6, 4.5}, 1.0);
  for (double x : {0.5, 3.0, 12.0, 40.0}) {
    const double oracle = lower_star_oracle([&](double p) { return std::log(psi(p)); }, x, 2.0, 16.0);
    EXPECT_NEAR(psi_lower_star(psi, x), oracle, 1e-6) << "x = " << x;
  }
}

TEST(LowerStar, ConcaveAndNondecreasing) {
  const std::vector<PsiFunction> shapes{
      PsiFunction::closed_power(2.0), PsiFunction::scaled(1.7, PsiFunction::closed_power(1.0)),
      PsiFunction::tabulated({2.0, 4.0, 8.0, 16.0}, {1.0, 1.5, 2.6, 4.5}, 1.0)};
  for (const auto& psi : shapes) {
    std::vector<double> v;
    for (double x = 0.0; x <= 60.0; x += 0.5) v.push_back(psi_lower_star(psi, x));
    for (std::size_t k = 1; k < v.size(); ++k) EXPECT_GE(v[k], v[k - 1] - 1e-9);
    for (std::size_t k = 1; k + 1 < v.size(); ++k) EXPECT_GE(v[k], 0.5 * (v[k - 1] + v[k + 1]) - 1e-7);
  }
}

TEST(LowerStar, AtZeroIsLogInfimum) {
  const auto psi = PsiFunction::tabulated({2.0, 4.0}, {1.5, 2.0}, 1.0);
  EXPECT_NEAR(psi_lower_star(psi, 0.0), std::log(1.5), 1e-9);
}

TEST(YoungFenchel, Quadratic) {
  const auto g = [](double x) { return 0.5 * x * x; };
  const auto at4 = young_fenchel(g, 4.0);
  EXPECT_NEAR(at4.value, 8.0, 1e-9);
  EXPECT_NEAR(at4.arg, 4.0, 1e-4);
  // the stationary point y = 1 lies below the domain, so the maximum is at x = 2
  EXPECT_NEAR(young_fenchel(g, 1.0).value, 0.0, 1e-9);
  EXPECT_NEAR(young_fenchel(g, 1.0).arg, 2.0, 1e-9);
}

TEST(YoungFenchel, LinearAtSlopeIsZero) {
  const double c = 3.0;
  EXPECT_NEAR(young_fenchel([&](double x) { return c * x; }, c).value, 0.0, 1e-9);
}

TEST(YoungFenchel, FenchelInequalityAndConvexity) {
  const auto g = [](double x) { return x * std::log(x); };
  std::vector<double> ys, vals;
  for (double y = 0.5; y <= 5.0; y += 0.25) {
    ys.push_back(y);
    vals.push_back(young_fenchel(g, y).value);
  }
  for (std::size_t k = 0; k < ys.size(); ++k) {
    for (double x = 2.0; x <= 1024.0; x *= 1.7) EXPECT_LE(x * ys[k], g(x) + vals[k] + 1e-6);
  }
  for (std::size_t k = 1; k + 1 < vals.size(); ++k) EXPECT_LE(vals[k], 0.5 * (vals[k - 1] + vals[k + 1]) + 1e-6);
}

TEST(TailBound, ClampsToOneInsideTheNorm) {
  const auto psi = PsiFunction::closed_power(2.0);
  EXPECT_EQ(gls_tail_bound(psi, 2.0, 1.0), 1.0);
  EXPECT_EQ(gls_tail_bound(psi, 2.0, 2.0), 1.0);
}

TEST(TailBound, ConjugateMatchesDenseGrid) {
  const auto psi = PsiFunction::closed_power(2.0);
  for (double y : {1.0, 2.0, 4.0, 8.0}) {
    double oracle = -kInf;
    for (int k = 0; k <= 200000; ++k) {
      const double p = 2.0 + (1024.0 - 2.0) * k / 200000.0;
      oracle = std::max(oracle, p * y - 0.5 * p * std::log(p));
    }
    EXPECT_NEAR(psi_bar_conjugate(psi, y), oracle, 1e-6 * std::max(1.0, std::abs(oracle))) << y;
  }
  EXPECT_NEAR(gls_tail_bound(psi, 1.0, std::exp(2.0)),
              std::min(1.0, 2.0 * std::exp(-psi_bar_conjugate(psi, 2.0))), 1e-15);
}

TEST(TailBound, NonincreasingInU) {
  const auto psi = PsiFunction::closed_power(1.0);
  double last = 1.0;
  for (double u = 0.5; u < 200.0; u *= 1.3) {
    const double b = gls_tail_bound(psi, 1.0, u);
    EXPECT_LE(b, last + 1e-15);
    EXPECT_GE(b, 0.0);
    last = b;
  }
}

TEST(TailBound, DominatesGaussianTail) {
  std::vector<double> grid;
  for (double p = 2.5; p <= 64.0; p *= 1.25) grid.push_back(p);
  const auto psi = PsiFunction::closed_power(2.0);
  const double norm = gls_norm(MomentCurve::gaussian(1.0, grid), psi);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  const int draws = 1000000;
  int hits = 0;
  for (int k = 0; k < draws; ++k) hits += std::abs(z(rng)) > 3.0;
  EXPECT_LE(static_cast<double>(hits) / draws, gls_tail_bound(psi, norm, 3.0));
}

TEST(Orlicz, ZeroAndContinuityAtSquareOfE) {
  const auto psi = PsiFunction::closed_power(2.0);
  EXPECT_EQ(orlicz_n_function(psi, 0.0), 0.0);
  const double e2 = std::exp(2.0);
  const double below = orlicz_n_function(psi, e2 * (1 - 1e-9));
  const double above = orlicz_n_function(psi, e2 * (1 + 1e-9));
  EXPECT_NEAR(below, above, 1e-6 * above);
  const double n20 = std::exp(psi_bar_conjugate(psi, std::log(20.0)));
  EXPECT_NEAR(orlicz_n_function(psi, 20.0), n20, 1e-12 * n20);
  EXPECT_EQ(orlicz_n_function(psi, -3.0), orlicz_n_function(psi, 3.0));
}

TEST(MomentCurveChecks, LyapunovMonotonicity) {
  EXPECT_TRUE(lyapunov_consistent(MomentCurve::gaussian(1.0, {2.0, 3.0, 4.0, 8.0})));
  EXPECT_FALSE(lyapunov_consistent(MomentCurve({2.0, 3.0}, {1.0, 0.9})));
  const MomentCurve noisy({2.0, 3.0}, {1.0, 0.99}, MomentCurve::Provenance::monte_carlo(1, 100), {0.01, 0.01});
  EXPECT_TRUE(lyapunov_consistent(noisy));
}

TEST(MomentCurveChecks, ValidatesInput) {
  EXPECT_THROW(MomentCurve({3.0, 2.0}, {1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(MomentCurve({2.0}, {-1.0}), InvalidArgument);
  EXPECT_THROW(MomentCurve({}, {}), InvalidArgument);
}

}  // namespace
}  // namespace uclt
