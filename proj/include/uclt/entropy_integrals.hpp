#pragma once

// Covering integrals over entropy profiles and the hypothesis classifiers built on them.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uclt/metric_space.hpp"
#include "uclt/psi.hpp"

namespace uclt {

/// Closed-form entropy H(eps) = max(0, log_c2 + rate · log(1/eps)).
/// A Hölder-alpha set in R^dim has rate = dim / alpha; rate = 0 gives a constant profile.
struct EntropyModel {
  double log_c2 = 0.0;
  double rate = 0.0;

  static EntropyModel constant(double h) { return {h, 0.0}; }
  static EntropyModel holder(int dim, double alpha, double c2);

  double at_log_eps(double log_eps) const;
};

/// Entropy H(eps) of a (semi-)metric space on (0, D], in nats.
class EntropyProfile {
 public:
  enum class Kind { Greedy, Exact, Model };

  /// `eps_grid` strictly descending and positive, H nonincreasing in eps.
  static EntropyProfile measured(std::vector<double> eps_grid, std::vector<double> h_values,
                                 double diameter, CoveringMode mode);
  /// Extrapolates below `eps_min` through the closed form.
  static EntropyProfile model(const EntropyModel& model, double diameter,
                              double eps_min_relative = 1e-4);

  Kind kind() const { return kind_; }
  bool is_model() const { return kind_ == Kind::Model; }
  double diameter() const { return diameter_; }
  double eps_min() const { return eps_min_; }
  const std::vector<double>& eps_grid() const { return eps_grid_; }
  const std::vector<double>& h_values() const { return h_values_; }
  const std::optional<EntropyModel>& closed_form() const { return model_; }

  /// H(eps); 0 for eps >= D. Measured profiles use the grid entry at the next smaller eps
  /// (an upper estimate) and are undefined below eps_min.
  double operator()(double eps) const;
  /// Model profiles only; valid for arbitrarily small eps.
  double at_log_eps(double log_eps) const;

 private:
  Kind kind_ = Kind::Model;
  double diameter_ = 0.0;
  double eps_min_ = 0.0;
  std::vector<double> eps_grid_;
  std::vector<double> h_values_;
  std::optional<EntropyModel> model_;
};

/// Entropy of `space` on `nodes` log-spaced radii from D down to half the smallest positive
/// distance (below which the covering number is the point count).
EntropyProfile measure_profile(const FiniteMetricSpace& space, CoveringMode mode,
                               std::size_t nodes = 40);

/// Least-squares fit of H = log_c2 + rate · log(1/eps) to the informative part of a measured
/// profile (1 < N < point count). Returns nullopt when fewer than two such points exist.
std::optional<EntropyModel> fit_entropy_model(const EntropyProfile& measured);

enum class Finiteness { Finite, Divergent, FiniteAtResolution };

std::string to_string(Finiteness f);
std::string to_string(EntropyProfile::Kind k);

struct QuadratureOptions {
  std::size_t nodes = 400;
  /// Tail classification threshold on the integrand's log-slope.
  double slope_margin = 1e-6;
};

struct IntegralTraceRow {
  double eps = 0.0;
  double h = 0.0;
  double integrand = 0.0;
};

struct IntegralReport {
  /// Full integral for model profiles (+inf when divergent); truncated value otherwise.
  double value = 0.0;
  /// Quadrature over [eps_min, D] only.
  double truncated_value = 0.0;
  Finiteness finiteness = Finiteness::FiniteAtResolution;
  double eps_min = 0.0;
  double diameter = 0.0;
  /// d log f / d log eps as eps -> 0 (model profiles).
  std::optional<double> tail_slope;
  std::vector<IntegralTraceRow> trace;

  bool finite() const { return finiteness != Finiteness::Divergent; }
};

/// ∫_0^D f(H(eps)) d eps given log f as a function of H (log f = -inf allowed).
/// Trapezoid rule on log-spaced eps; model tails are classified by their log-slope against -1.
IntegralReport integrate_entropy(const EntropyProfile& profile,
                                 const std::function<double(double)>& log_integrand,
                                 const QuadratureOptions& options = {});

/// J(ψ, d) = ∫_0^D exp(ψ_*(log 2 + H(eps))) d eps.
IntegralReport entropy_integral(const EntropyProfile& profile, const PsiFunction& psi,
                                const QuadratureOptions& options = {},
                                const PsiOptions& psi_options = {});

struct VerdictRecord {
  std::string condition;
  double value = 0.0;
  std::string verdict;     ///< "finite", "divergent" or "finite-at-resolution"
  std::string resolution;  ///< human-readable quadrature and profile resolution
  std::string conclusion;  ///< "hypotheses-satisfied-at-resolution" or "hypothesis-failed(...)"
  std::vector<std::string> notes;
  std::optional<double> sigma2;
  IntegralReport integral;

  bool satisfied() const { return conclusion == "hypotheses-satisfied-at-resolution"; }
};

inline constexpr const char* kSatisfied = "hypotheses-satisfied-at-resolution";
inline constexpr const char* kFailedVariance = "hypothesis-failed(sigma2)";
inline constexpr const char* kFailedPowerIntegral = "hypothesis-failed(entropy-integral)";
inline constexpr const char* kFailedExponentialIntegral = "hypothesis-failed(rho-q-entropy)";
inline constexpr const char* kFailedPizier = "hypothesis-failed(pizier)";

/// Power-level weak-compactness hypotheses: σ² < ∞ and J(ψ_R, d̄) < ∞ on a profile measured under
/// d̄. `sigma2` is +inf when the variance looked unbounded on the grid.
VerdictRecord power_level_check(double sigma2, const EntropyProfile& profile_under_dbar,
                                const PsiFunction& psi, const QuadratureOptions& options = {},
                                const PsiOptions& psi_options = {});

/// Exponential-level hypotheses: σ² < ∞ and ∫_0^D H^{(2+q)/(2q)} d eps < ∞ under ρ_q.
VerdictRecord exponential_level_check(const EntropyProfile& profile_under_rhoq, double q, double sigma2,
                                      const QuadratureOptions& options = {});

/// ∫_0^D N^{1/r} d eps < ∞ under the Pizier distance d_r.
VerdictRecord pizier_condition(const EntropyProfile& profile_under_dr, double r,
                               const QuadratureOptions& options = {});

/// The martingale exponent (2+q)/(2q) next to the independent-case exponent 1/q on one profile.
struct ExponentComparison {
  double martingale_exponent = 0.0;
  double independent_exponent = 0.0;
  IntegralReport martingale;
  IntegralReport independent;
};

ExponentComparison compare_exponents(const EntropyProfile& profile, double q,
                                     const QuadratureOptions& options = {});

}  // namespace uclt
