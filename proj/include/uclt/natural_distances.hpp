#pragma once

// Semi-distances on a finite index set X built from moment data of a martingale-difference field.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "uclt/metric_space.hpp"
#include "uclt/psi.hpp"

namespace uclt {

/// L_p norms of ξ_i(x) and of ξ_i(x1) - ξ_i(x2) for indices i = 0..index_count-1 (the first
/// martingale difference is index 0), points x = 0..point_count-1 and every unordered pair.
/// Entries start as missing and are filled by `set_*`.
class PairwiseMomentField {
 public:
  PairwiseMomentField(std::vector<double> p_grid, std::size_t point_count,
                      std::size_t index_count,
                      MomentCurve::Provenance provenance = MomentCurve::Provenance::analytic());

  const std::vector<double>& p_grid() const { return p_grid_; }
  std::size_t point_count() const { return point_count_; }
  std::size_t index_count() const { return index_count_; }
  std::size_t pair_count() const { return point_count_ * (point_count_ - 1) / 2; }
  const MomentCurve::Provenance& provenance() const { return provenance_; }

  void set_point(std::size_t i, std::size_t x, const std::vector<double>& norms,
                 const std::vector<double>& std_errors = {});
  void set_pair(std::size_t i, std::size_t x1, std::size_t x2, const std::vector<double>& norms,
                const std::vector<double>& std_errors = {});
  void set_variance(std::size_t i, std::size_t x, double variance);

  /// Throws MissingData when the entry was never set.
  MomentCurve point_curve(std::size_t i, std::size_t x) const;
  /// Symmetric in (x1, x2); the zero curve when x1 == x2.
  MomentCurve pair_curve(std::size_t i, std::size_t x1, std::size_t x2) const;
  double variance(std::size_t i, std::size_t x) const;
  bool has_variance(std::size_t i, std::size_t x) const;

  /// Every curve and variance multiplied by c and c² respectively.
  PairwiseMomentField scaled(double c) const;

 private:
  std::size_t pair_slot(std::size_t x1, std::size_t x2) const;
  MomentCurve curve_at(const std::vector<double>& norms, const std::vector<double>& se,
                       std::size_t offset) const;

  std::vector<double> p_grid_;
  std::size_t point_count_;
  std::size_t index_count_;
  MomentCurve::Provenance provenance_;
  std::vector<double> point_norms_;
  std::vector<double> point_se_;
  std::vector<double> pair_norms_;
  std::vector<double> pair_se_;
  std::vector<double> variances_;
};

/// Tabulated natural function ψ(p) = max_i max_x |ξ_i(x)|_p on the field's p grid, with
/// support (1, inf); the grid must lie above 1.
PsiFunction natural_function(const PairwiseMomentField& field);

/// d_i(x1, x2): the GLS-ψ norm of the increment of index i.
double distance_di(const PairwiseMomentField& field, std::size_t i, std::size_t x1,
                   std::size_t x2, const PsiFunction& psi);

/// d̄(x1, x2) = sup over n in `n_grid` of sqrt(n^{-1} sum_{i<n} d_i²).
double distance_bar(const PairwiseMomentField& field, std::size_t x1, std::size_t x2,
                    const PsiFunction& psi, const std::vector<std::size_t>& n_grid);

/// d_r(x1, x2) = sup_i |ξ_i(x1) - ξ_i(x2)|_r; r must be a grid point.
double pizier_distance(const PairwiseMomentField& field, std::size_t x1, std::size_t x2, double r);

/// ρ_q(x1, x2) = sup_i ‖ξ_i(x1) - ξ_i(x2)‖_(q).
double rho_q_distance(const PairwiseMomentField& field, std::size_t x1, std::size_t x2, double q);

struct SigmaSquared {
  /// +inf when every point looks unbounded on the grid.
  double value = 0.0;
  /// inf over x of the last running supremum, ignoring the divergence flag.
  double truncated_value = 0.0;
  /// True when every point trips the divergence heuristic.
  bool unbounded_on_grid = false;
  std::size_t flagged_points = 0;
};

/// σ² = inf over x of sup over n in `n_grid` of n^{-1} sum_{k<n} Var(ξ_k(x)). A point is flagged
/// when its running supremum grows by more than `divergence_factor` between the last two grid
/// values.
SigmaSquared sigma_squared(const PairwiseMomentField& field, const std::vector<std::size_t>& n_grid,
                           double divergence_factor = 1.5);

/// {1, 2, 4, ...} up to and including the largest power of two <= max_n.
std::vector<std::size_t> dyadic_grid(std::size_t max_n);

/// Distance matrix over all points of `field`; pairs are evaluated in parallel but each entry is
/// computed independently, so the result does not depend on `threads`.
FiniteMetricSpace assemble_distance_space(
    std::size_t point_count, const std::function<double(std::size_t, std::size_t)>& distance,
    unsigned threads = 1, std::vector<std::vector<double>> coordinates = {});

/// Writes `manifest.json` plus one CSV per index into `dir` (created if needed).
void save_moment_field(const PairwiseMomentField& field, const std::filesystem::path& dir);
PairwiseMomentField load_moment_field(const std::filesystem::path& dir);

}  // namespace uclt
