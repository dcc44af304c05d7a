#pragma once

// Generating functions ψ of Grand Lebesgue Spaces and the transforms built on them.

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "uclt/extremum.hpp"

namespace uclt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Resolution knobs shared by every extremization over p (or y = 1/p).
struct PsiOptions {
  int grid_nodes = 512;
  double rel_tol = 1e-9;
  /// Cap used in place of an infinite upper support bound.
  double p_max = 1024.0;

  GridOptions grid() const { return {grid_nodes, rel_tol}; }
};

/// A generating function ψ on an open support (A, B), A >= 1, B possibly +inf.
///
/// Immutable; copies share the underlying representation. Outside (A, B) the function is +inf.
/// Tabulated functions are additionally +inf outside their grid (no extrapolation).
class PsiFunction {
 public:
  enum class Form { ClosedPower, Tabulated, Degenerate, Scaled, Rosenthal };

  /// ψ(p) = p^{1/q}.
  static PsiFunction closed_power(double q, double support_low = 2.0, double support_high = kInf);
  /// Log-linear interpolation of log ψ in log p between grid points.
  static PsiFunction tabulated(std::vector<double> grid, std::vector<double> values,
                               double support_low = 2.0, double support_high = kInf);
  /// ψ_r: 1 at p = r, +inf elsewhere. Its GLS norm is the L_r norm.
  static PsiFunction degenerate(double r, double support_low = 2.0, double support_high = kInf);
  /// factor · inner(p).
  static PsiFunction scaled(double factor, const PsiFunction& inner);

  Form form() const;
  double support_low() const;
  double support_high() const;

  double operator()(double p) const;
  /// ψ̄(p) = p · log ψ(p).
  double bar(double p) const;

  /// The single point where ψ is finite, for ψ_r and wrappers of it.
  std::optional<double> point_support() const;
  /// Closed interval on which ψ is finite and evaluable, with +inf replaced by `p_max`.
  std::optional<std::pair<double, double>> finite_range(double p_max) const;

  double q() const;  ///< ClosedPower only
  double r() const;  ///< Degenerate only
  double factor() const;  ///< Scaled only
  const std::vector<double>& grid() const;    ///< Tabulated only
  const std::vector<double>& values() const;  ///< Tabulated only
  PsiFunction inner() const;  ///< Scaled and Rosenthal only

 private:
  struct Node;
  explicit PsiFunction(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;

  friend PsiFunction rosenthal_transform(const PsiFunction& psi);
};

/// Tabulated L_p norms of one random quantity.
class MomentCurve {
 public:
  struct Provenance {
    enum class Kind { Analytic, MonteCarlo };
    Kind kind = Kind::Analytic;
    std::uint64_t seed = 0;
    std::int64_t replications = 0;

    static Provenance analytic() { return {}; }
    static Provenance monte_carlo(std::uint64_t seed, std::int64_t replications) {
      return {Kind::MonteCarlo, seed, replications};
    }
  };

  MomentCurve(std::vector<double> p_grid, std::vector<double> norms,
              Provenance provenance = Provenance::analytic(), std::vector<double> std_errors = {});

  static MomentCurve zero(std::vector<double> p_grid);
  /// Analytic curve of σ·Z, Z standard Gaussian.
  static MomentCurve gaussian(double sigma, std::vector<double> p_grid);

  const std::vector<double>& p_grid() const { return p_grid_; }
  const std::vector<double>& norms() const { return norms_; }
  /// Empty for analytic curves.
  const std::vector<double>& std_errors() const { return std_errors_; }
  const Provenance& provenance() const { return provenance_; }
  std::size_t size() const { return p_grid_.size(); }

  /// Norm at an exact grid point.
  std::optional<double> at(double p) const;
  MomentCurve scaled(double factor) const;

 private:
  std::vector<double> p_grid_;
  std::vector<double> norms_;
  std::vector<double> std_errors_;
  Provenance provenance_;
};

/// |Z|_p = (E|Z|^p)^{1/p} for a standard Gaussian Z.
double gaussian_abs_norm(double p);

/// Lyapunov monotonicity: exact (relative 1e-12) for analytic curves, within `se_multiplier`
/// combined standard errors for Monte Carlo curves.
bool lyapunov_consistent(const MomentCurve& curve, double se_multiplier = 3.0);

double eval_psi(const PsiFunction& psi, double p);

/// sup over grid points p in (A,B) of |f|_p / ψ(p), with C/inf = 0. Throws EmptySupportOverlap.
double gls_norm(const MomentCurve& curve, const PsiFunction& psi);

/// ‖·‖_(q) = sup over grid points p >= 2 of |f|_p / p^{1/q}.
double subq_norm(const MomentCurve& curve, double q);

/// ψ_R(p) = (p / log p) · ψ(p).
PsiFunction rosenthal_transform(const PsiFunction& psi);

/// ψ_*(x) = inf over y in (0,1), 1/y in (A,B), of x·y + log ψ(1/y).
/// Uses the closed form for ψ(p) = p^{1/q}; numerical minimization otherwise.
double psi_lower_star(const PsiFunction& psi, double x, const PsiOptions& options = {});

/// Always the grid-plus-golden-section minimizer, whatever the form.
double psi_lower_star_numeric(const PsiFunction& psi, double x, const PsiOptions& options = {});

/// Exact ψ_* of p^{1/q} on (A,B): the interior stationary value (1/q)(1 + log(qx)) when qx lies
/// in (A,B), else the boundary limit.
double psi_lower_star_power(double q, double x, double support_low = 2.0,
                            double support_high = kInf);

/// Modified Legendre transform g*(y) = sup over x in [2, x_max] of (x·y - g(x)).
/// `g` may return +inf where it is undefined.
Extremum young_fenchel(const std::function<double(double)>& g, double y, double x_max = 1024.0,
                       const GridOptions& options = {});

/// ψ̄*(y) with ψ̄(p) = p log ψ(p), restricted to the finite range of ψ intersected with [2, p_max].
double psi_bar_conjugate(const PsiFunction& psi, double y, const PsiOptions& options = {});

/// min(1, 2 exp(-ψ̄*(log(u / norm)))); 1 whenever u <= norm.
double gls_tail_bound(const PsiFunction& psi, double gls_norm_value, double u,
                      const PsiOptions& options = {});

/// N(u) = exp(ψ̄*(log|u|)) for |u| > e², C·u² below, with C fixed by continuity at e².
double orlicz_n_function(const PsiFunction& psi, double u, const PsiOptions& options = {});

}  // namespace uclt
