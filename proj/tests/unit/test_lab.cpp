#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "uclt/cli/commands.hpp"
#include "uclt/errors.hpp"
#include "uclt/lab/checks.hpp"
#include "uclt/lab/engine.hpp"
#include "uclt/lab/statistics.hpp"

namespace uclt::lab {
namespace {

std::vector<std::vector<double>> line_points(std::initializer_list<double> xs) {
  std::vector<std::vector<double>> out;
  for (double x : xs) out.push_back({x});
  return out;
}

ModelSpec gaussian_spec(Kernel::Kind kind = Kernel::Kind::White, double length = 1.0) {
  ModelSpec s;
  s.name = "gaussian";
  s.kind = ModelSpec::Kind::IidGaussian;
  s.points = line_points({0.0, 0.5, 1.0});
  s.kernel.kind = kind;
  s.kernel.length = length;
  s.seed = 2024;
  return s;
}

ModelSpec sign_spec(bool shared = false) {
  ModelSpec s;
  s.name = "sign";
  s.kind = ModelSpec::Kind::BoundedSign;
  s.points = line_points({0.0, 0.5, 1.0});
  s.shared_sign = shared;
  s.seed = 77;
  return s;
}

ModelSpec garch_spec() {
  ModelSpec s = gaussian_spec(Kernel::Kind::Exponential, 0.5);
  s.name = "garch";
  s.kind = ModelSpec::Kind::GarchLike;
  return s;
}

TEST(Engine, SubstreamSeedsArePure) {
  EXPECT_EQ(substream_seed(5, Stream::Eta, 9), substream_seed(5, Stream::Eta, 9));
  EXPECT_NE(substream_seed(5, Stream::Eta, 9), substream_seed(5, Stream::Eta, 10));
  EXPECT_NE(substream_seed(5, Stream::Eta, 9), substream_seed(5, Stream::Moments, 9));
  EXPECT_NE(substream_seed(5, Stream::Eta, 9), substream_seed(6, Stream::Eta, 9));
}

TEST(Engine, BlocksIndependentOfThreads) {
  const auto work = [](std::size_t b, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t r = begin; r < end; ++r) s += static_cast<double>(make_engine(1, Stream::Eta, r)() % 1000);
    return s + static_cast<double>(b);
  };
  const auto one = run_blocks<double>(1003, {1, 20}, work);
  const auto four = run_blocks<double>(1003, {4, 20}, work);
  EXPECT_EQ(one, four);
  std::size_t covered = 0;
  for (std::size_t b = 0; b < 20; ++b) {
    const auto [begin, end] = block_range(1003, 20, b);
    covered += end - begin;
  }
  EXPECT_EQ(covered, 1003u);
}

TEST(Statistics, JackknifeOfMeanIsUnbiased) {
  std::vector<BlockSums> blocks;
  for (int b = 0; b < 10; ++b) blocks.push_back({{static_cast<double>(b * b)}, 1});
  const auto est = jackknife(blocks, [](const std::vector<double>& s, double n) { return s[0] / n; });
  EXPECT_NEAR(est.value, est.plain, 1e-12);
  EXPECT_NEAR(est.plain, 28.5, 1e-12);
  // delete-one-block SE of a mean equals the classical sd / sqrt(G)
  double ss = 0.0;
  for (int b = 0; b < 10; ++b) ss += (b * b - 28.5) * (b * b - 28.5);
  EXPECT_NEAR(est.std_error, std::sqrt(ss / 9.0 / 10.0), 1e-12);
}

TEST(Statistics, KolmogorovSmirnov) {
  EXPECT_EQ(ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(ks_two_sample({1, 2}, {5, 6}), 1.0);
  EXPECT_NEAR(ks_one_sample({0.5}, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.5, 1e-15);
  EXPECT_NEAR(ks_critical_value(100, 100), 1.3581 * std::sqrt(2.0 / 100.0), 1e-4);
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.96), 0.9750021, 1e-6);
}

TEST(Simulation, FirstSumIsFirstDifference) {
  const MartingaleFieldModel model(garch_spec());
  const auto eta = simulate_eta(model, 1, 50);
  const FieldSampler sampler(model, {0, 1, 2});
  for (std::size_t r = 0; r < 50; ++r) {
    auto path = sampler.path(Stream::Eta, r);
    std::vector<double> xi(3);
    path.next(xi.data());
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(eta.at(r, k), xi[k]);
  }
}

TEST(Simulation, UnitVarianceSums) {
  const std::size_t R = 20000;
  const auto eta = simulate_eta(MartingaleFieldModel(gaussian_spec()), 16, R);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto col = eta.column(k);
    double ss = 0.0;
    for (double v : col) ss += v * v;
    EXPECT_NEAR(ss / R, 1.0, 3.0 * std::sqrt(2.0 / R)) << k;
  }
}

TEST(Simulation, SignWalkFourthMoment) {
  const std::size_t R = 40000, n = 8;
  const auto col = simulate_eta(MartingaleFieldModel(sign_spec()), n, R).column(0);
  double m4 = 0.0, m8 = 0.0;
  for (double v : col) {
    m4 += std::pow(v, 4);
    m8 += std::pow(v, 8);
  }
  m4 /= R;
  m8 /= R;
  const double se = std::sqrt((m8 - m4 * m4) / R);
  EXPECT_NEAR(m4, 3.0 - 2.0 / n, 3.0 * se);
}

TEST(Simulation, HorizonIsEnforced) {
  ModelSpec s = gaussian_spec();
  s.horizon = 16;
  EXPECT_THROW(simulate_eta(MartingaleFieldModel(s), 17, 10), HorizonExceeded);
}

TEST(Simulation, IndependentOfThreadCount) {
  const MartingaleFieldModel model(garch_spec());
  const auto a = simulate_eta(model, 64, 500, {1, 20});
  const auto b = simulate_eta(model, 64, 500, {3, 20});
  EXPECT_EQ(a.values, b.values);
  const auto fa = estimate_moment_curves(model, {2, 4}, 400, 4, {1, 20});
  const auto fb = estimate_moment_curves(model, {2, 4}, 400, 4, {4, 20});
  EXPECT_EQ(fa.pair_curve(3, 0, 2).norms(), fb.pair_curve(3, 0, 2).norms());
}

TEST(Simulation, DrawsRejectInvalidSpecs) {
  ModelSpec s = garch_spec();
  s.alpha = 0.7;
  s.beta = 0.5;
  EXPECT_THROW(MartingaleFieldModel{s}, InvalidArgument);
  ModelSpec empty = gaussian_spec();
  empty.points.clear();
  EXPECT_THROW(MartingaleFieldModel{empty}, InvalidArgument);
}

TEST(MomentCurves, IncrementNormMatchesKernel) {
  const MartingaleFieldModel model(gaussian_spec(Kernel::Kind::Exponential, 0.5));
  const auto field = estimate_moment_curves(model, {2, 3, 4}, 20000, 2);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a + 1; b < 3; ++b) {
      const double expected = std::sqrt(2.0 - 2.0 * *model.analytic_covariance(a, b));
      const auto curve = field.pair_curve(1, a, b);
      EXPECT_NEAR(curve.norms()[0], expected, 3.0 * curve.std_errors()[0]) << a << b;
    }
  }
  EXPECT_EQ(field.pair_curve(0, 1, 1).norms()[0], 0.0);
  EXPECT_NEAR(field.variance(0, 0), 1.0, 0.05);
}

TEST(MomentCurves, ScalingDoublesNorms) {
  const MartingaleFieldModel model(garch_spec());
  const auto f1 = estimate_moment_curves(model, {2, 3, 6}, 500, 3);
  const auto f2 = estimate_moment_curves(model.scaled(2.0), {2, 3, 6}, 500, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(f2.point_curve(i, 1).norms()[k], 2.0 * f1.point_curve(i, 1).norms()[k],
                  1e-10 * f1.point_curve(i, 1).norms()[k]);
      EXPECT_NEAR(f2.pair_curve(i, 0, 2).norms()[k], 2.0 * f1.pair_curve(i, 0, 2).norms()[k],
                  1e-10 * f1.pair_curve(i, 0, 2).norms()[k]);
    }
  }
}

TEST(Osekowski, SingleTermRatioIsLogPOverP) {
  const auto rep = osekowski_check(MartingaleFieldModel(garch_spec()), {0, std::nullopt}, {2, 3, 4, 8}, {1}, 2000);
  for (const auto& row : rep.rows) EXPECT_NEAR(row.ratio.value, std::log(row.p) / row.p, 1e-9) << row.p;
}

TEST(Osekowski, OrthogonalityAtPEqualsTwo) {
  const auto rep = osekowski_check(MartingaleFieldModel(gaussian_spec()), {0, std::nullopt}, {2, 4}, {8, 64}, 20000);
  EXPECT_TRUE(rep.orthogonality_reproduced);
  for (const auto& row : rep.rows) {
    if (row.p == 2.0) {
      EXPECT_NEAR(row.ratio.value, std::log(2.0) / 2.0, 3.0 * row.ratio.std_error + 1e-12);
    }
  }
}

TEST(Osekowski, GarchWithinConstant) {
  const auto rep = osekowski_check(MartingaleFieldModel(garch_spec()), {0, 2}, {3, 4, 6}, {16, 256}, 20000);
  EXPECT_TRUE(rep.passed());
  for (const auto& row : rep.rows) EXPECT_TRUE(row.within_constant);
}

TEST(Osekowski, RejectsPBelowTwo) {
  EXPECT_THROW(osekowski_check(MartingaleFieldModel(gaussian_spec()), {0, std::nullopt}, {1.5}, {4}, 100),
               InvalidArgument);
}

class EquicontinuityTest : public ::testing::Test {
 protected:
  static ModelSpec brownian() {
    ModelSpec s = gaussian_spec(Kernel::Kind::Fbm);
    s.points = line_points({0.1, 0.2, 0.3, 0.5, 0.9});
    s.seed = 31;
    return s;
  }
};

TEST_F(EquicontinuityTest, DiagonalIsZero) {
  const MartingaleFieldModel model(brownian());
  const auto field = estimate_moment_curves(model, {2, 3, 4}, 2000, 4);
  const auto rep = equicontinuity_check(model, field, natural_function(field), {{1, 1}}, {1, 4}, 2000);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].lhs, 0.0);
  EXPECT_EQ(rep.rows[0].dbar, 0.0);
  EXPECT_TRUE(rep.rows[0].dominated);
}

TEST_F(EquicontinuityTest, BrownianRatioIsScaleFree) {
  const MartingaleFieldModel model(brownian());
  const auto field = estimate_moment_curves(model, {2, 3, 4, 6}, 20000, 8);
  const auto rep = equicontinuity_check(model, field, natural_function(field), {{0, 1}, {0, 2}, {1, 3}, {1, 4}},
                                        {1, 8}, 20000);
  EXPECT_TRUE(rep.passed());
  const double first = rep.rows[0].lhs / rep.rows[0].dbar;
  for (const auto& row : rep.rows) EXPECT_NEAR(row.lhs / row.dbar, first, 0.15 * first);
}

TEST(Equicontinuity, GarchDominated) {
  const MartingaleFieldModel model(garch_spec());
  const auto field = estimate_moment_curves(model, {2, 3, 4, 6}, 5000, 16);
  const auto rep = equicontinuity_check(model, field, natural_function(field), {{0, 1}, {0, 2}, {1, 2}},
                                        {1, 4, 16}, 5000);
  EXPECT_TRUE(rep.passed());
}

TEST(Covariance, MatchesKernel) {
  const MartingaleFieldModel model(gaussian_spec(Kernel::Kind::Exponential, 0.5));
  const auto rep = covariance_estimate(model, 32, 20000);
  ASSERT_TRUE(rep.max_z.has_value());
  EXPECT_LE(*rep.max_z, 3.0);
}

TEST(Covariance, SignModelsIdentityOrOnes) {
  EXPECT_EQ(*MartingaleFieldModel(sign_spec()).analytic_covariance(0, 1), 0.0);
  EXPECT_EQ(*MartingaleFieldModel(sign_spec()).analytic_covariance(1, 1), 1.0);
  EXPECT_EQ(*MartingaleFieldModel(sign_spec(true)).analytic_covariance(0, 2), 1.0);
  const auto rep = covariance_estimate(MartingaleFieldModel(sign_spec()), 16, 20000);
  EXPECT_LE(*rep.max_z, 3.0);
}

TEST(Covariance, NoClosedFormWithGrowth) {
  ModelSpec s = gaussian_spec();
  s.variance_growth = 0.5;
  EXPECT_FALSE(MartingaleFieldModel(s).analytic_covariance(0, 0).has_value());
  EXPECT_FALSE(MartingaleFieldModel(s).dominating_tail().has_value());
}

TEST(Clt, IdenticalSizesAgree) {
  const auto rep = clt_diagnostic(MartingaleFieldModel(garch_spec()), 32, 32, 2000);
  EXPECT_LE(rep.ks_supnorm, rep.ks_critical);
  EXPECT_FALSE(rep.note.empty());
}

TEST(Clt, GaussianPerPointAgainstNormal) {
  const auto rep = clt_diagnostic(MartingaleFieldModel(gaussian_spec(Kernel::Kind::Exponential, 0.5)), 8, 64, 2000);
  ASSERT_TRUE(rep.per_point_ks_small.has_value());
  for (double ks : *rep.per_point_ks_small) EXPECT_LE(ks, 0.04);
  for (double ks : *rep.per_point_ks_large) EXPECT_LE(ks, 0.04);
}

TEST(MartingaleProperty, ShippedModelsPass) {
  for (auto spec : cli::shipped_model_suite(9)) {
    const auto rep = martingale_property_check(MartingaleFieldModel(std::move(spec)), 32, 5000);
    EXPECT_TRUE(rep.passed()) << rep.model;
  }
}

TEST(MartingaleProperty, DriftIsDetected) {
  ModelSpec s = sign_spec();
  s.drift_bias = 0.1;
  const auto rep = martingale_property_check(MartingaleFieldModel(s), 32, 5000);
  EXPECT_FALSE(rep.passed());
}

TEST(Tails, DominatingTailForms) {
  const auto sign = MartingaleFieldModel(sign_spec()).dominating_tail();
  ASSERT_TRUE(sign.has_value());
  EXPECT_EQ((*sign)(0.99), 1.0);
  EXPECT_EQ((*sign)(1.0), 0.0);
  ModelSpec w = sign_spec();
  w.kind = ModelSpec::Kind::IidWeibull;
  w.weibull_k = 1.5;
  w.weibull_q = 1.0;
  const auto wt = MartingaleFieldModel(w).dominating_tail();
  ASSERT_TRUE(wt.has_value());
  EXPECT_EQ(wt->form(), TailFunction::Form::ClosedWeibull);
  EXPECT_EQ(wt->K(), 1.5);
}

TEST(Tails, SignWalkDominated) {
  const MartingaleFieldModel model(sign_spec());
  const auto rep = tail_domination_check(model, *model.dominating_tail(), {1.5, 2.0, 3.0}, {16, 64}, 50000);
  EXPECT_TRUE(rep.passed());
  for (const auto& row : rep.rows) EXPECT_NEAR(row.empirical, std::max(row.upper, row.lower), 0.0);
  EXPECT_THROW(tail_domination_check(model, *model.dominating_tail(), {1.0}, {16}, 100), InvalidArgument);
}

TEST(Models, KindNamesRoundTrip) {
  for (auto k : {ModelSpec::Kind::IidGaussian, ModelSpec::Kind::IidWeibull, ModelSpec::Kind::GarchLike,
                 ModelSpec::Kind::BoundedSign}) {
    EXPECT_EQ(model_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(model_kind_from_string("ar1"), InvalidArgument);
}

}  // namespace
}  // namespace uclt::lab
