#pragma once

// Martingale-difference random fields ξ_i(x) on a finite point set.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uclt/lab/engine.hpp"
#include "uclt/metric_space.hpp"
#include "uclt/tail.hpp"

namespace uclt::lab {

/// Covariance kernel over point coordinates, with Euclidean distances.
struct Kernel {
  enum class Kind { White, Exponential, SquaredExponential, Fbm };
  Kind kind = Kind::White;
  double variance = 1.0;
  double length = 1.0;
  /// Fbm only; 0.5 gives the Brownian kernel with increment variance proportional to distance.
  double hurst = 0.5;

  double operator()(const std::vector<double>& a, const std::vector<double>& b) const;
};

struct ModelSpec {
  enum class Kind { IidGaussian, IidWeibull, GarchLike, BoundedSign };

  std::string name = "model";
  Kind kind = Kind::IidGaussian;
  std::vector<std::vector<double>> points;
  CoordinateMetric base_metric;
  std::size_t horizon = 2048;
  std::uint64_t seed = 1;

  /// IidGaussian, and the innovation correlation of GarchLike.
  Kernel kernel;

  /// IidWeibull: symmetric sign times K·E^{1/q}, E standard exponential, truncated at `clip`.
  double weibull_k = 1.0;
  double weibull_q = 2.0;
  double clip = std::numeric_limits<double>::infinity();

  /// GarchLike: σ_i² = ω + α ξ_{i-1}² + β σ_{i-1}², σ_i clamped to [sigma_min, sigma_max].
  double omega = 0.2;
  double alpha = 0.3;
  double beta = 0.5;
  double sigma_min = 0.5;
  double sigma_max = 2.0;

  /// BoundedSign: ξ_i = ±a_i with a fair sign.
  double amplitude = 1.0;
  /// Signs shared by all points instead of independent per point.
  bool shared_sign = false;

  /// BoundedSign and IidWeibull: the magnitude is multiplied by
  /// 1 - modulation·(1 + tanh(ξ_{i-1}(x)/unit))/2, a predictable factor in [1 - modulation, 1].
  double modulation = 0.0;

  /// Applied to every kind, in this order: ξ_i *= scale · i^variance_growth (i counted from 1),
  /// then ξ_i += drift_bias · sign(ξ_{i-1}). A nonzero drift breaks the martingale property.
  double scale = 1.0;
  double variance_growth = 0.0;
  double drift_bias = 0.0;
};

std::string to_string(ModelSpec::Kind kind);
ModelSpec::Kind model_kind_from_string(const std::string& s);

class MartingaleFieldModel {
 public:
  explicit MartingaleFieldModel(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  std::size_t point_count() const { return spec_.points.size(); }
  std::size_t horizon() const { return spec_.horizon; }
  std::uint64_t seed() const { return spec_.seed; }

  /// Same model with every ξ multiplied by c.
  MartingaleFieldModel scaled(double c) const;

  /// Cov(ξ_i(a), ξ_i(b)), constant in i, when known in closed form.
  std::optional<double> analytic_covariance(std::size_t a, std::size_t b) const;
  /// True when E[ξ_i(x)² | past] = 1 for every i and x.
  bool unit_conditional_variance() const;
  /// T with P(|ξ_i(x)| > t) <= T(t) for every i, x; none when the magnitudes are unbounded in i.
  std::optional<TailFunction> dominating_tail() const;
  /// True when the ξ_i are independent in i.
  bool independent_in_time() const;

 private:
  ModelSpec spec_;
};

/// Draws ξ_i at a subset of the model's points. Draws depend on the subset as well as on the
/// seed, stream and replication.
class FieldSampler {
 public:
  FieldSampler(const MartingaleFieldModel& model, std::vector<std::size_t> points);

  std::size_t width() const { return points_.size(); }
  const std::vector<std::size_t>& points() const { return points_; }

  class Path {
   public:
    /// Writes ξ_i at the sampler's points and advances i. Throws HorizonExceeded past the horizon.
    void next(double* out);
    std::size_t step() const { return step_; }

   private:
    friend class FieldSampler;
    Path(const FieldSampler& owner, Engine engine);

    const FieldSampler* owner_;
    Engine engine_;
    std::normal_distribution<double> normal_;
    std::size_t step_ = 0;
    std::vector<double> previous_;
    std::vector<double> sigma2_;
    std::vector<double> z_;
    std::vector<double> innovation_;
  };

  Path path(Stream stream, std::uint64_t replication) const;

 private:
  void innovations(Path& path) const;

  const ModelSpec* spec_;
  std::vector<std::size_t> points_;
  /// Correlated Gaussian innovations: A z with A Aᵀ the kernel on the subset.
  Eigen::MatrixXd factor_;
  bool diagonal_factor_ = false;
};

}  // namespace uclt::lab
