#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace uclt {

/// A finite (semi-)metric space given by its distance matrix.
///
/// Zero off-diagonal distances are allowed. Triangle-inequality failures do not reject the
/// space; they are counted in `triangle_violations()`.
class FiniteMetricSpace {
 public:
  /// `dist` is row-major n x n.
  FiniteMetricSpace(std::size_t n, std::vector<double> dist,
                    std::vector<std::vector<double>> coordinates = {});

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
  const std::vector<double>& matrix() const { return dist_; }
  const std::vector<std::vector<double>>& coordinates() const { return coordinates_; }
  std::size_t triangle_violations() const { return triangle_violations_; }

  /// Smallest strictly positive pairwise distance, if any.
  std::optional<double> min_positive_distance() const;

 private:
  std::size_t n_;
  std::vector<double> dist_;
  std::vector<std::vector<double>> coordinates_;
  std::size_t triangle_violations_ = 0;
};

enum class CoveringMode { Greedy, Exact };

/// Point-to-point metric for coordinate input. Holder(alpha) is |x - y|^alpha with Euclidean |.|.
struct CoordinateMetric {
  enum class Kind { Euclidean, Sup, Holder };
  Kind kind = Kind::Euclidean;
  double alpha = 1.0;

  double operator()(const std::vector<double>& a, const std::vector<double>& b) const;
};

FiniteMetricSpace space_from_coordinates(std::vector<std::vector<double>> points,
                                         const CoordinateMetric& metric);

/// n equally spaced points on [low, high].
FiniteMetricSpace uniform_grid(std::size_t n, double low, double high,
                               const CoordinateMetric& metric = {});

/// Square numeric CSV; a non-numeric first row is treated as a header.
FiniteMetricSpace load_distance_csv(const std::filesystem::path& path);
/// One point per row; a non-numeric first row is treated as a header.
FiniteMetricSpace load_coordinate_csv(const std::filesystem::path& path,
                                      const CoordinateMetric& metric);

double diameter(const FiniteMetricSpace& space);

/// Greedy cover by closed balls centred at points of the space (upper bound on N(eps)).
std::size_t covering_number_greedy(const FiniteMetricSpace& space, double eps);

inline constexpr std::size_t kExactCoveringCap = 20;

/// Minimum cover size by cardinality-ordered exhaustive search. Throws TooLarge above `cap`.
std::size_t covering_number_exact(const FiniteMetricSpace& space, double eps,
                                  std::size_t cap = kExactCoveringCap);

/// log N(eps) in nats.
double entropy(const FiniteMetricSpace& space, double eps, CoveringMode mode);

/// c2 · eps^{-dim/alpha}: covering bound for a set in R^dim under a Hölder-alpha distance.
double holder_covering_bound(int dim, double alpha, double c2, double eps);

}  // namespace uclt
