#include "uclt/entropy_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "uclt/errors.hpp"

namespace uclt {

namespace {

// Log-eps offsets (below eps_min) at which a model tail's asymptotic slope is read off.
constexpr double kTailProbeNear = 1000.0;
constexpr double kTailProbeFar = 2000.0;

double slope_between(const std::function<double(double)>& log_f_at_log_eps, double a, double b) {
  const double fa = log_f_at_log_eps(a);
  const double fb = log_f_at_log_eps(b);
  if (std::isinf(fa) && std::isinf(fb) && fa < 0 && fb < 0) return kInf;  // identically zero
  return (fa - fb) / (a - b);
}

std::string describe_resolution(const EntropyProfile& profile, const QuadratureOptions& options) {
  return fmt::format("trapezoid on {} log-spaced nodes over [{:.6g}, {:.6g}]; profile={}",
                     options.nodes, profile.eps_min(), profile.diameter(),
                     to_string(profile.kind()));
}

VerdictRecord make_record(std::string condition, const EntropyProfile& profile,
                          IntegralReport integral, const QuadratureOptions& options) {
  VerdictRecord record;
  record.condition = std::move(condition);
  record.value = integral.value;
  record.verdict = to_string(integral.finiteness);
  record.resolution = describe_resolution(profile, options);
  if (!profile.is_model()) {
    record.notes.emplace_back(
        "measured profile: finiteness holds at the sampled resolution only; the discretized "
        "covering numbers lower-bound those of the continuum");
  }
  record.integral = std::move(integral);
  return record;
}

}  // namespace

EntropyModel EntropyModel::holder(int dim, double alpha, double c2) {
  if (dim < 1 || !(alpha > 0.0 && alpha <= 1.0) || !(c2 > 0.0)) {
    throw InvalidArgument("holder entropy model: need dim >= 1, alpha in (0,1], c2 > 0");
  }
  return {std::log(c2), static_cast<double>(dim) / alpha};
}

double EntropyModel::at_log_eps(double log_eps) const {
  return std::max(0.0, log_c2 - rate * log_eps);
}

EntropyProfile EntropyProfile::measured(std::vector<double> eps_grid, std::vector<double> h_values,
                                        double diameter, CoveringMode mode) {
  if (eps_grid.size() != h_values.size()) {
    throw InvalidArgument("entropy profile: eps and H lengths differ");
  }
  if (!(diameter >= 0.0)) throw InvalidArgument("entropy profile: negative diameter");
  if (eps_grid.empty() && diameter > 0.0) {
    throw InvalidArgument("entropy profile: empty eps grid");
  }
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] > 0.0) || !(h_values[k] >= 0.0)) {
      throw InvalidArgument("entropy profile: eps must be positive and H nonnegative");
    }
    if (k > 0 && !(eps_grid[k] < eps_grid[k - 1])) {
      throw InvalidArgument("entropy profile: eps grid must be strictly descending");
    }
    if (k > 0 && h_values[k] < h_values[k - 1]) {
      throw InvalidArgument("entropy profile: H must be nonincreasing in eps");
    }
    if (eps_grid[k] >= diameter && h_values[k] != 0.0) {
      throw InvalidArgument("entropy profile: H must vanish for eps >= diameter");
    }
  }
  EntropyProfile profile;
  profile.kind_ = mode == CoveringMode::Greedy ? Kind::Greedy : Kind::Exact;
  profile.diameter_ = diameter;
  profile.eps_min_ = eps_grid.empty() ? 0.0 : eps_grid.back();
  profile.eps_grid_ = std::move(eps_grid);
  profile.h_values_ = std::move(h_values);
  return profile;
}

EntropyProfile EntropyProfile::model(const EntropyModel& model, double diameter,
                                     double eps_min_relative) {
  if (!(diameter > 0.0)) throw InvalidArgument("model entropy profile: diameter must be positive");
  if (!(eps_min_relative > 0.0 && eps_min_relative < 1.0)) {
    throw InvalidArgument("model entropy profile: eps_min_relative must lie in (0, 1)");
  }
  EntropyProfile profile;
  profile.kind_ = Kind::Model;
  profile.diameter_ = diameter;
  profile.eps_min_ = eps_min_relative * diameter;
  profile.model_ = model;
  return profile;
}

double EntropyProfile::operator()(double eps) const {
  if (!(eps > 0.0)) throw InvalidArgument("entropy profile: eps must be positive");
  if (eps >= diameter_) return 0.0;
  if (model_) return model_->at_log_eps(std::log(eps));
  // first grid radius <= eps (grid is descending)
  const auto it = std::find_if(eps_grid_.begin(), eps_grid_.end(), [eps](double e) { return e <= eps; });
  if (it == eps_grid_.end()) return h_values_.back();
  return h_values_[static_cast<std::size_t>(it - eps_grid_.begin())];
}

double EntropyProfile::at_log_eps(double log_eps) const {
  if (!model_) throw InvalidArgument("entropy profile: closed form requested from measured data");
  if (log_eps >= std::log(diameter_)) return 0.0;
  return model_->at_log_eps(log_eps);
}

EntropyProfile measure_profile(const FiniteMetricSpace& space, CoveringMode mode,
                               std::size_t nodes) {
  const double d = diameter(space);
  if (d == 0.0) return EntropyProfile::measured({}, {}, 0.0, mode);
  if (nodes < 2) throw InvalidArgument("measure_profile: need at least two radii");
  const double low = 0.5 * space.min_positive_distance().value_or(d);
  std::vector<double> eps(nodes);
  std::vector<double> h(nodes);
  const double log_hi = std::log(d);
  const double step = (log_hi - std::log(low)) / static_cast<double>(nodes - 1);
  for (std::size_t k = 0; k < nodes; ++k) {
    eps[k] = k == 0 ? d : std::exp(log_hi - step * static_cast<double>(k));
    h[k] = entropy(space, eps[k], mode);
  }
  // keep H monotone against floating-point ties in the greedy heuristic
  for (std::size_t k = 1; k < nodes; ++k) h[k] = std::max(h[k], h[k - 1]);
  return EntropyProfile::measured(std::move(eps), std::move(h), d, mode);
}

std::optional<EntropyModel> fit_entropy_model(const EntropyProfile& measured) {
  if (measured.is_model() || measured.h_values().empty()) return std::nullopt;
  const double h_cap = measured.h_values().back();
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < measured.eps_grid().size(); ++k) {
    const double h = measured.h_values()[k];
    if (h > 0.0 && h < h_cap) {
      xs.push_back(-std::log(measured.eps_grid()[k]));
      ys.push_back(h);
    }
  }
  if (xs.size() < 2) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) return std::nullopt;
  const double slope = (n * sxy - sx * sy) / denom;
  if (!(slope > 0.0)) return std::nullopt;
  return EntropyModel{(sy - slope * sx) / n, slope};
}

std::string to_string(Finiteness f) {
  switch (f) {
    case Finiteness::Finite:
      return "finite";
    case Finiteness::Divergent:
      return "divergent";
    case Finiteness::FiniteAtResolution:
      return "finite-at-resolution";
  }
  return "unknown";
}

std::string to_string(EntropyProfile::Kind k) {
  switch (k) {
    case EntropyProfile::Kind::Greedy:
      return "greedy";
    case EntropyProfile::Kind::Exact:
      return "exact";
    case EntropyProfile::Kind::Model:
      return "model";
  }
  return "unknown";
}

IntegralReport integrate_entropy(const EntropyProfile& profile,
                                 const std::function<double(double)>& log_integrand,
                                 const QuadratureOptions& options) {
  IntegralReport report;
  report.diameter = profile.diameter();
  report.eps_min = profile.eps_min();
  if (profile.diameter() == 0.0) {
    report.finiteness = Finiteness::Finite;
    return report;
  }
  if (options.nodes < 2) throw InvalidArgument("integrate_entropy: need at least two nodes");

  const double log_lo = std::log(report.eps_min);
  const double log_hi = std::log(report.diameter);
  const std::size_t n = options.nodes;
  const double step = (log_hi - log_lo) / static_cast<double>(n - 1);
  report.trace.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double eps = k + 1 == n ? report.diameter : std::exp(log_lo + step * static_cast<double>(k));
    const double h = profile(eps);
    report.trace.push_back({eps, h, std::exp(log_integrand(h))});
  }
  double sum = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const auto& a = report.trace[k - 1];
    const auto& b = report.trace[k];
    sum += 0.5 * (a.integrand + b.integrand) * (b.eps - a.eps);
  }
  report.truncated_value = sum;

  if (!profile.is_model()) {
    report.finiteness = Finiteness::FiniteAtResolution;
    report.value = sum;
    return report;
  }

  const auto log_f = [&](double log_eps) { return log_integrand(profile.at_log_eps(log_eps)); };
  const double slope = slope_between(log_f, log_lo - kTailProbeNear, log_lo - kTailProbeFar);
  report.tail_slope = slope;
  if (!(slope > -1.0 + options.slope_margin)) {
    report.finiteness = Finiteness::Divergent;
    report.value = kInf;
    return report;
  }
  report.finiteness = Finiteness::Finite;
  // ∫_0^{eps_min} f ≈ f(eps_min) eps_min / (1 + s) for a locally power-law integrand
  double local = slope_between(log_f, log_lo, log_lo - 1.0);
  if (!(local > -1.0 + options.slope_margin)) local = slope;
  const double f_min = std::exp(log_f(log_lo));
  const double tail = std::isinf(local) ? 0.0 : f_min * report.eps_min / (1.0 + local);
  report.value = sum + tail;
  return report;
}

IntegralReport entropy_integral(const EntropyProfile& profile, const PsiFunction& psi,
                                const QuadratureOptions& options, const PsiOptions& psi_options) {
  return integrate_entropy(
      profile,
      [&](double h) { return psi_lower_star(psi, std::numbers::ln2 + h, psi_options); }, options);
}

VerdictRecord power_level_check(double sigma2, const EntropyProfile& profile_under_dbar,
                                const PsiFunction& psi, const QuadratureOptions& options,
                                const PsiOptions& psi_options) {
  const PsiFunction psi_r = rosenthal_transform(psi);
  VerdictRecord record = make_record(
      "power-level", profile_under_dbar,
      entropy_integral(profile_under_dbar, psi_r, options, psi_options), options);
  record.sigma2 = sigma2;
  const bool sigma_ok = std::isfinite(sigma2);
  if (!sigma_ok) {
    record.conclusion = kFailedVariance;
  } else if (!record.integral.finite()) {
    record.conclusion = kFailedPowerIntegral;
  } else {
    record.conclusion = kSatisfied;
  }
  const auto range = psi.finite_range(psi_options.p_max);
  if (range && range->second >= psi_options.p_max && !std::isfinite(psi.support_high())) {
    record.notes.push_back(fmt::format(
        "infinite upper support of psi truncated at p_max = {:g}", psi_options.p_max));
  }
  record.notes.emplace_back(
      "weak compactness is inferred from checkable hypotheses; this is evidence, not proof");
  return record;
}

VerdictRecord exponential_level_check(const EntropyProfile& profile_under_rhoq, double q, double sigma2,
                                      const QuadratureOptions& options) {
  if (!(q > 0.0)) throw InvalidArgument("exponential_level_check: q must be positive");
  const double exponent = (2.0 + q) / (2.0 * q);
  VerdictRecord record = make_record(
      "exponential-level", profile_under_rhoq,
      integrate_entropy(
          profile_under_rhoq,
          [exponent](double h) { return h > 0.0 ? exponent * std::log(h) : -kInf; }, options),
      options);
  record.sigma2 = sigma2;
  if (!std::isfinite(sigma2)) {
    record.conclusion = kFailedVariance;
  } else if (!record.integral.finite()) {
    record.conclusion = kFailedExponentialIntegral;
  } else {
    record.conclusion = kSatisfied;
  }
  record.notes.push_back(fmt::format("entropy exponent (2+q)/(2q) = {:.6g}", exponent));
  return record;
}

VerdictRecord pizier_condition(const EntropyProfile& profile_under_dr, double r,
                               const QuadratureOptions& options) {
  if (!(r >= 2.0)) throw InvalidArgument("pizier_condition: r must be >= 2");
  VerdictRecord record = make_record(
      "pizier", profile_under_dr,
      integrate_entropy(profile_under_dr, [r](double h) { return h / r; }, options), options);
  record.conclusion = record.integral.finite() ? kSatisfied : kFailedPizier;
  return record;
}

ExponentComparison compare_exponents(const EntropyProfile& profile, double q,
                                     const QuadratureOptions& options) {
  if (!(q > 0.0)) throw InvalidArgument("compare_exponents: q must be positive");
  ExponentComparison out;
  out.martingale_exponent = (2.0 + q) / (2.0 * q);
  out.independent_exponent = 1.0 / q;
  const auto power = [](double k) {
    return [k](double h) { return h > 0.0 ? k * std::log(h) : -kInf; };
  };
  out.martingale = integrate_entropy(profile, power(out.martingale_exponent), options);
  out.independent = integrate_entropy(profile, power(out.independent_exponent), options);
  return out;
}

}  // namespace uclt
