#pragma once

// Monte Carlo checks on martingale-difference fields. Every function is a pure function of the
// model (including its seed), the replication count and the block count; `threads` only changes
// speed.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uclt/lab/model.hpp"
#include "uclt/lab/statistics.hpp"
#include "uclt/natural_distances.hpp"
#include "uclt/psi.hpp"
#include "uclt/tail.hpp"

namespace uclt::lab {

inline constexpr double kOsekowskiConstant = 15.5879;
inline constexpr double kRosenthalConstant = 0.6535;

/// η_n(x) = n^{-1/2} Σ_{i<=n} ξ_i(x) for R replications, row-major R x points.
struct EtaSamples {
  std::size_t n = 0;
  std::size_t replications = 0;
  std::vector<std::size_t> points;
  std::vector<double> values;

  double at(std::size_t replication, std::size_t k) const {
    return values[replication * points.size() + k];
  }
  std::vector<double> column(std::size_t k) const;
};

/// Throws HorizonExceeded when n exceeds the horizon. Empty `points` means every point.
EtaSamples simulate_eta(const MartingaleFieldModel& model, std::size_t n, std::size_t replications,
                        const LabOptions& options = {}, Stream stream = Stream::Eta,
                        std::vector<std::size_t> points = {});

/// η_n for several n read off the same paths; `n_values` ascending.
std::vector<EtaSamples> simulate_eta_multi(const MartingaleFieldModel& model,
                                           const std::vector<std::size_t>& n_values,
                                           std::size_t replications, const LabOptions& options = {},
                                           Stream stream = Stream::Eta,
                                           std::vector<std::size_t> points = {});

/// Jackknife-debiased L_p norms of ξ_i(x) and of every increment ξ_i(x1) - ξ_i(x2) for
/// i < index_count, plus Var ξ_i(x).
PairwiseMomentField estimate_moment_curves(const MartingaleFieldModel& model,
                                           const std::vector<double>& p_grid,
                                           std::size_t replications, std::size_t index_count,
                                           const LabOptions& options = {});

/// ζ_k is ξ_k(first) when `second` is empty, else ξ_k(first) - ξ_k(second).
struct Target {
  std::size_t first = 0;
  std::optional<std::size_t> second;

  std::string label() const;
};

struct OsekowskiRow {
  double p = 0.0;
  std::size_t n = 0;
  double lhs = 0.0;       ///< |η_n(ζ)|_p
  double rms_norm = 0.0;  ///< sqrt(n^{-1} Σ |ζ_k|_p²)
  Estimate ratio;
  bool within_constant = false;   ///< ratio + 3 SE <= 15.5879
  bool within_rosenthal = false;  ///< ratio <= 0.6535; informative for independent models
};

struct OsekowskiReport {
  std::string model;
  std::string target;
  bool independent = false;
  std::vector<OsekowskiRow> rows;
  /// p = 2 rows reproduce ln 2 / 2 within 3 SE.
  bool orthogonality_reproduced = true;
  bool passed() const;
};

OsekowskiReport osekowski_check(const MartingaleFieldModel& model, const Target& target,
                                const std::vector<double>& p_grid,
                                const std::vector<std::size_t>& n_grid, std::size_t replications,
                                const LabOptions& options = {});

struct TailRow {
  std::size_t n = 0;
  double x = 0.0;
  std::string weights;  ///< "uniform" or "random-unit"
  double upper = 0.0;   ///< P(S > x)
  double lower = 0.0;   ///< P(S < -x)
  double empirical = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool dominated = false;  ///< empirical <= bound + 3 SE
};

struct TailDominationReport {
  std::string model;
  TailFunction tail;
  std::vector<TailRow> rows;
  bool passed() const;
};

/// Tails max(P(S > x), P(S < -x)) of S = n^{-1/2} Σ ξ_i(point) and of S = Σ b_i ξ_i with a fixed
/// random unit vector b, against weighted_sum_tail_bound(tail, x). Requires every x > 1.
TailDominationReport tail_domination_check(const MartingaleFieldModel& model,
                                           const TailFunction& tail,
                                           const std::vector<double>& x_values,
                                           const std::vector<std::size_t>& n_values,
                                           std::size_t replications, std::size_t point = 0,
                                           const LabOptions& options = {});

struct MomentCondition {
  std::string feature;
  double mean = 0.0;
  double std_error = 0.0;
  double t_stat = 0.0;
};

struct MartingalePropertyReport {
  std::string model;
  std::size_t index_count = 0;
  std::vector<MomentCondition> conditions;
  /// Largest |mean/SE| of ξ_i(x) over the individual cells (i, x); reported, not asserted.
  double max_cell_t = 0.0;
  double t_threshold = 3.0;
  bool passed() const;
};

/// E[ξ_i(x) f(past)] = 0 for bounded f in {1, sign ξ_{i-1}(x), tanh of the normalized partial sum},
/// aggregated over i < index_count and all points per replication, so replications are the
/// independent units of the t statistic.
MartingalePropertyReport martingale_property_check(const MartingaleFieldModel& model,
                                                   std::size_t index_count,
                                                   std::size_t replications,
                                                   const LabOptions& options = {});

struct CovarianceReport {
  std::string model;
  std::size_t n = 0;
  std::size_t points = 0;
  std::vector<double> estimate;   ///< row-major
  std::vector<double> std_error;  ///< row-major
  std::optional<std::vector<double>> analytic;
  /// Largest |estimate - analytic| / SE, when analytic is present.
  std::optional<double> max_z;
};

CovarianceReport covariance_estimate(const MartingaleFieldModel& model, std::size_t n,
                                     std::size_t replications, const LabOptions& options = {});

struct CltReport {
  std::string model;
  std::size_t n_small = 0;
  std::size_t n_large = 0;
  std::size_t replications = 0;
  double ks_supnorm = 0.0;
  double ks_critical = 0.0;
  /// One-sample KS of η_n(x) against N(0, analytic variance), for n_small and n_large.
  std::optional<std::vector<double>> per_point_ks_small;
  std::optional<std::vector<double>> per_point_ks_large;
  std::string note;
};

/// Evidence of distributional stabilization, not a proof of weak compactness.
CltReport clt_diagnostic(const MartingaleFieldModel& model, std::size_t n_small,
                         std::size_t n_large, std::size_t replications,
                         const LabOptions& options = {});

struct EquicontinuityRow {
  std::size_t x1 = 0;
  std::size_t x2 = 0;
  double lhs = 0.0;  ///< sup_n of the GLS-ψ_R norm of η_n(x1) - η_n(x2)
  double lhs_std_error = 0.0;
  double dbar = 0.0;
  double bound = 0.0;  ///< 15.5879 · d̄
  bool dominated = false;  ///< lhs - 3 SE <= bound
};

struct EquicontinuityReport {
  std::string model;
  std::vector<EquicontinuityRow> rows;
  bool passed() const;
};

/// `field` supplies d̄ (under ψ); the left side uses ψ_R on ψ's p grid.
EquicontinuityReport equicontinuity_check(const MartingaleFieldModel& model,
                                          const PairwiseMomentField& field, const PsiFunction& psi,
                                          const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                          const std::vector<std::size_t>& n_grid,
                                          std::size_t replications, const LabOptions& options = {});

}  // namespace uclt::lab
