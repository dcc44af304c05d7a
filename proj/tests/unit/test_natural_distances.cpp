#include <cmath>
#include <filesystem>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "uclt/errors.hpp"
#include "uclt/natural_distances.hpp"

namespace uclt {
namespace {

const std::vector<double> kGrid{2.0, 3.0, 4.0, 6.0, 8.0};

std::vector<double> gaussian_norms(double sd) {
  std::vector<double> out;
  for (double p : kGrid) {
    // |Z|_p through the Gamma-function moment formula.
    const double log_m = 0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(M_PI);
    out.push_back(sd * std::exp(log_m / p));
  }
  return out;
}

/// Gaussian field with Cov(ξ_i(a), ξ_i(b)) = cov(i, a, b).
PairwiseMomentField gaussian_field(std::size_t points, std::size_t indices,
                                   const std::function<double(std::size_t, std::size_t, std::size_t)>& cov) {
  PairwiseMomentField f(kGrid, points, indices);
  for (std::size_t i = 0; i < indices; ++i) {
    for (std::size_t a = 0; a < points; ++a) {
      f.set_point(i, a, gaussian_norms(std::sqrt(cov(i, a, a))));
      f.set_variance(i, a, cov(i, a, a));
      for (std::size_t b = a + 1; b < points; ++b) {
        f.set_pair(i, a, b, gaussian_norms(std::sqrt(cov(i, a, a) + cov(i, b, b) - 2 * cov(i, a, b))));
      }
    }
  }
  return f;
}

const std::vector<double> kBrownianPoints{0.1, 0.2, 0.35, 0.6, 1.0};

PairwiseMomentField brownian_field(std::size_t indices = 4) {
  return gaussian_field(kBrownianPoints.size(), indices, [](std::size_t, std::size_t a, std::size_t b) {
    return std::min(kBrownianPoints[a], kBrownianPoints[b]);
  });
}

PairwiseMomentField unit_field(std::size_t points, std::size_t indices) {
  return gaussian_field(points, indices, [](std::size_t, std::size_t a, std::size_t b) {
    return a == b ? 1.0 : 0.3;
  });
}

TEST(NaturalFunction, GaussianValues) {
  const auto psi = natural_function(unit_field(3, 2));
  EXPECT_NEAR(psi(2.0), 1.0, 1e-12);
  EXPECT_NEAR(psi(4.0), std::pow(3.0, 0.25), 1e-12);
  EXPECT_EQ(psi.support_low(), 1.0);
}

TEST(NaturalFunction, ScalingDoubles) {
  const auto f = unit_field(3, 2);
  const auto psi = natural_function(f);
  const auto psi2 = natural_function(f.scaled(2.0));
  for (double p : kGrid) EXPECT_NEAR(psi2(p), 2.0 * psi(p), 1e-12);
}

TEST(NaturalFunction, DominatesEveryPointCurve) {
  const auto f = brownian_field();
  const auto psi = natural_function(f);
  for (std::size_t i = 0; i < f.index_count(); ++i) {
    for (std::size_t x = 0; x < f.point_count(); ++x) EXPECT_LE(gls_norm(f.point_curve(i, x), psi), 1.0 + 1e-12);
  }
}

TEST(Distances, DiagonalIsZero) {
  const auto f = brownian_field();
  const auto psi = natural_function(f);
  EXPECT_EQ(distance_di(f, 0, 2, 2, psi), 0.0);
  EXPECT_EQ(distance_bar(f, 2, 2, psi, {1, 2, 4}), 0.0);
  EXPECT_EQ(pizier_distance(f, 1, 1, 4.0), 0.0);
  EXPECT_EQ(rho_q_distance(f, 1, 1, 2.0), 0.0);
}

TEST(Distances, NaturalDistanceAtMostTwo) {
  const auto f = unit_field(4, 3);
  const auto psi = natural_function(f);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) EXPECT_LE(distance_di(f, 1, a, b, psi), 2.0 + 1e-12);
  }
}

TEST(Distances, BrownianIsSquareRootOfSeparation) {
  // ψ(p) = |Z|_p and the increment is sqrt|Δx| Z, so every ratio equals sqrt|Δx|.
  const auto f = gaussian_field(kBrownianPoints.size(), 1, [](std::size_t, std::size_t a, std::size_t b) {
    return std::min(kBrownianPoints[a], kBrownianPoints[b]);
  });
  const auto psi = PsiFunction::tabulated(kGrid, gaussian_norms(1.0), 1.0);
  for (std::size_t a = 0; a < kBrownianPoints.size(); ++a) {
    for (std::size_t b = a + 1; b < kBrownianPoints.size(); ++b) {
      const double expected = std::sqrt(kBrownianPoints[b] - kBrownianPoints[a]);
      EXPECT_NEAR(distance_di(f, 0, a, b, psi), expected, 1e-12);
      EXPECT_NEAR(pizier_distance(f, a, b, 2.0), expected, 1e-12);
    }
  }
}

TEST(Distances, BarOfConstantSequence) {
  const auto f = brownian_field(8);
  const auto psi = natural_function(f);
  const double d = distance_di(f, 0, 0, 3, psi);
  EXPECT_NEAR(distance_bar(f, 0, 3, psi, {1, 2, 4, 8}), d, 1e-12);
}

TEST(Distances, BarOfDecreasingSequenceIsFirstTerm) {
  // d_i = c / (i + 1): the running root mean square is largest at n = 1.
  const double c = 0.8;
  const auto f = gaussian_field(2, 8, [&](std::size_t i, std::size_t a, std::size_t b) {
    if (a == b) return 1.0;
    const double inc = c / static_cast<double>(i + 1);
    return 1.0 - 0.5 * inc * inc;
  });
  const auto psi = PsiFunction::tabulated(kGrid, gaussian_norms(1.0), 1.0);
  EXPECT_NEAR(distance_di(f, 3, 0, 1, psi), c / 4.0, 1e-12);
  EXPECT_NEAR(distance_bar(f, 0, 1, psi, {1, 2, 4, 8}), c, 1e-12);
}

TEST(Distances, BarDominatesScaledIndividualDistances) {
  const auto f = gaussian_field(3, 8, [](std::size_t i, std::size_t a, std::size_t b) {
    const double v = 1.0 + 0.1 * static_cast<double>(i);
    return a == b ? v : 0.2 * v;
  });
  const auto psi = natural_function(f);
  const std::vector<std::size_t> n_grid{1, 2, 4, 8};
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_LE(distance_di(f, k, 0, 2, psi), std::sqrt(8.0) * distance_bar(f, 0, 2, psi, n_grid) + 1e-12);
  }
}

TEST(Distances, HomogeneousOfDegreeOne) {
  const auto f = brownian_field();
  const auto psi = natural_function(f);
  const auto g = f.scaled(3.0);
  EXPECT_NEAR(distance_di(g, 1, 0, 4, psi), 3.0 * distance_di(f, 1, 0, 4, psi), 1e-12);
  EXPECT_NEAR(pizier_distance(g, 0, 4, 3.0), 3.0 * pizier_distance(f, 0, 4, 3.0), 1e-12);
  EXPECT_NEAR(rho_q_distance(g, 0, 4, 2.0), 3.0 * rho_q_distance(f, 0, 4, 2.0), 1e-12);
}

TEST(Distances, RhoQOfSqrtCurve) {
  PairwiseMomentField f({2.0, 4.0, 9.0}, 2, 1);
  const double c = 0.7;
  f.set_point(0, 0, {1, 1, 1});
  f.set_point(0, 1, {1, 1, 1});
  f.set_pair(0, 0, 1, {c * std::sqrt(2.0), c * 2.0, c * 3.0});
  EXPECT_NEAR(rho_q_distance(f, 0, 1, 2.0), c, 1e-12);
}

TEST(Distances, PizierNeedsGridPoint) {
  EXPECT_THROW(pizier_distance(brownian_field(), 0, 1, 5.0), MissingData);
}

TEST(Distances, SymmetricMatricesIndependentOfThreads) {
  const auto f = brownian_field(8);
  const auto psi = natural_function(f);
  const auto dist = [&](std::size_t a, std::size_t b) { return distance_bar(f, a, b, psi, {1, 2, 4, 8}); };
  const auto one = assemble_distance_space(f.point_count(), dist, 1);
  const auto four = assemble_distance_space(f.point_count(), dist, 4);
  EXPECT_EQ(one.matrix(), four.matrix());
  for (std::size_t a = 0; a < one.size(); ++a) {
    for (std::size_t b = 0; b < one.size(); ++b) EXPECT_EQ(one(a, b), one(b, a));
  }
}

TEST(SigmaSquared, UnitVariance) {
  const auto s = sigma_squared(unit_field(3, 8), {1, 2, 4, 8});
  EXPECT_NEAR(s.value, 1.0, 1e-12);
  EXPECT_FALSE(s.unbounded_on_grid);
}

TEST(SigmaSquared, InfimumOverPoints) {
  const auto f = gaussian_field(2, 4, [](std::size_t, std::size_t a, std::size_t b) {
    return a == b ? (a == 0 ? 0.5 : 1.0) : 0.0;
  });
  EXPECT_NEAR(sigma_squared(f, {1, 2, 4}).value, 0.5, 1e-12);
}

TEST(SigmaSquared, GrowingVarianceIsUnbounded) {
  const auto f = gaussian_field(2, 64, [](std::size_t i, std::size_t a, std::size_t b) {
    return a == b ? static_cast<double>(i + 1) : 0.0;
  });
  const auto s = sigma_squared(f, dyadic_grid(64));
  EXPECT_TRUE(s.unbounded_on_grid);
  EXPECT_EQ(s.value, kInf);
  EXPECT_EQ(s.flagged_points, 2u);
}

TEST(SigmaSquared, RejectsNBeyondIndices) { EXPECT_THROW(sigma_squared(unit_field(2, 4), {8}), MissingData); }

TEST(Field, MissingEntriesThrow) {
  PairwiseMomentField f(kGrid, 2, 2);
  EXPECT_THROW(f.point_curve(0, 0), MissingData);
  EXPECT_THROW(f.pair_curve(1, 0, 1), MissingData);
  EXPECT_NO_THROW(f.pair_curve(1, 1, 1));
}

TEST(Field, DyadicGrid) {
  EXPECT_EQ(dyadic_grid(1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(dyadic_grid(70), (std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64}));
}

TEST(Field, SaveLoadRoundTrip) {
  const auto f = brownian_field(3);
  const auto dir = std::filesystem::temp_directory_path() / "uclt_field_roundtrip";
  std::filesystem::remove_all(dir);
  save_moment_field(f, dir);
  const auto g = load_moment_field(dir);
  ASSERT_EQ(g.p_grid(), f.p_grid());
  ASSERT_EQ(g.index_count(), f.index_count());
  for (std::size_t i = 0; i < f.index_count(); ++i) {
    for (std::size_t a = 0; a < f.point_count(); ++a) {
      EXPECT_EQ(g.point_curve(i, a).norms(), f.point_curve(i, a).norms());
      EXPECT_EQ(g.variance(i, a), f.variance(i, a));
      for (std::size_t b = a + 1; b < f.point_count(); ++b) {
        EXPECT_EQ(g.pair_curve(i, a, b).norms(), f.pair_curve(i, a, b).norms());
      }
    }
  }
}

}  // namespace
}  // namespace uclt
