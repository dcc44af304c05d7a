#include "uclt/psi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "uclt/errors.hpp"

namespace uclt {

namespace {

// Open-interval nudge for closed forms whose infimum sits on the support boundary.
constexpr double kBoundaryNudge = 1e-12;

void check_support(double low, double high) {
  if (!(low >= 1.0) || !(high > low)) {
    throw InvalidSupport(fmt::format("psi support ({}, {}) must satisfy 1 <= A < B", low, high));
  }
}

bool inside(double p, double low, double high) { return p > low && p < high; }

}  // namespace

struct PsiFunction::Node {
  Form form = Form::ClosedPower;
  double low = 2.0;
  double high = kInf;
  double param = 0.0;  // q, r or factor
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> log_grid;
  std::vector<double> log_values;
  std::shared_ptr<const Node> inner;
};

PsiFunction::PsiFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

PsiFunction PsiFunction::closed_power(double q, double support_low, double support_high) {
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidArgument("closed_power: q must be positive");
  check_support(support_low, support_high);
  auto node = std::make_shared<Node>();
  node->form = Form::ClosedPower;
  node->low = support_low;
  node->high = support_high;
  node->param = q;
  return PsiFunction(std::move(node));
}

PsiFunction PsiFunction::tabulated(std::vector<double> grid, std::vector<double> values,
                                   double support_low, double support_high) {
  check_support(support_low, support_high);
  if (grid.empty() || grid.size() != values.size()) {
    throw InvalidArgument("tabulated psi: grid and values must be nonempty and of equal length");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw InvalidArgument("tabulated psi: grid must be strictly ascending");
    }
    if (!inside(grid[k], support_low, support_high)) {
      throw InvalidSupport(fmt::format("tabulated psi: grid point {} outside ({}, {})", grid[k],
                                       support_low, support_high));
    }
    if (!(values[k] > 0.0) || !std::isfinite(values[k])) {
      throw InvalidArgument("tabulated psi: values must be positive and finite");
    }
  }
  auto node = std::make_shared<Node>();
  node->form = Form::Tabulated;
  node->low = support_low;
  node->high = support_high;
  node->log_grid.reserve(grid.size());
  node->log_values.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    node->log_grid.push_back(std::log(grid[k]));
    node->log_values.push_back(std::log(values[k]));
  }
  node->grid = std::move(grid);
  node->values = std::move(values);
  return PsiFunction(std::move(node));
}

PsiFunction PsiFunction::degenerate(double r, double support_low, double support_high) {
  check_support(support_low, support_high);
  if (!inside(r, support_low, support_high)) {
    throw InvalidSupport(fmt::format("degenerate psi: r = {} outside ({}, {})", r, support_low,
                                     support_high));
  }
  auto node = std::make_shared<Node>();
  node->form = Form::Degenerate;
  node->low = support_low;
  node->high = support_high;
  node->param = r;
  return PsiFunction(std::move(node));
}

PsiFunction PsiFunction::scaled(double factor, const PsiFunction& inner) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw InvalidArgument("scaled psi: factor must be positive and finite");
  }
  auto node = std::make_shared<Node>();
  node->form = Form::Scaled;
  node->low = inner.support_low();
  node->high = inner.support_high();
  node->param = factor;
  node->inner = inner.node_;
  return PsiFunction(std::move(node));
}

PsiFunction::Form PsiFunction::form() const { return node_->form; }
double PsiFunction::support_low() const { return node_->low; }
double PsiFunction::support_high() const { return node_->high; }

double PsiFunction::operator()(double p) const {
  const Node& n = *node_;
  if (!inside(p, n.low, n.high)) return kInf;
  switch (n.form) {
    case Form::ClosedPower:
      return std::pow(p, 1.0 / n.param);
    case Form::Tabulated: {
      if (p < n.grid.front() || p > n.grid.back()) return kInf;
      const auto it = std::lower_bound(n.grid.begin(), n.grid.end(), p);
      const auto k = static_cast<std::size_t>(it - n.grid.begin());
      if (*it == p) return n.values[k];
      const double t = (std::log(p) - n.log_grid[k - 1]) / (n.log_grid[k] - n.log_grid[k - 1]);
      return std::exp(n.log_values[k - 1] + t * (n.log_values[k] - n.log_values[k - 1]));
    }
    case Form::Degenerate:
      return p == n.param ? 1.0 : kInf;
    case Form::Scaled:
      return n.param * PsiFunction(n.inner)(p);
    case Form::Rosenthal:
      return p / std::log(p) * PsiFunction(n.inner)(p);
  }
  return kInf;
}

double PsiFunction::bar(double p) const {
  const double v = (*this)(p);
  return std::isfinite(v) ? p * std::log(v) : kInf;
}

std::optional<double> PsiFunction::point_support() const {
  switch (node_->form) {
    case Form::Degenerate:
      return node_->param;
    case Form::Scaled:
    case Form::Rosenthal:
      return PsiFunction(node_->inner).point_support();
    default:
      return std::nullopt;
  }
}

std::optional<std::pair<double, double>> PsiFunction::finite_range(double p_max) const {
  const Node& n = *node_;
  switch (n.form) {
    case Form::ClosedPower: {
      const double lo = n.low * (1.0 + kBoundaryNudge);
      const double hi = std::isfinite(n.high) ? n.high * (1.0 - kBoundaryNudge) : p_max;
      if (!(hi >= lo)) return std::nullopt;
      return std::pair{lo, std::min(hi, std::max(p_max, lo))};
    }
    case Form::Tabulated: {
      const double lo = n.grid.front();
      const double hi = std::min(n.grid.back(), std::max(p_max, lo));
      return std::pair{lo, hi};
    }
    case Form::Degenerate:
      return std::pair{n.param, n.param};
    case Form::Scaled:
    case Form::Rosenthal:
      return PsiFunction(n.inner).finite_range(p_max);
  }
  return std::nullopt;
}

double PsiFunction::q() const {
  if (node_->form != Form::ClosedPower) throw InvalidArgument("psi: q() on a non-power form");
  return node_->param;
}

double PsiFunction::r() const {
  if (node_->form != Form::Degenerate) throw InvalidArgument("psi: r() on a non-degenerate form");
  return node_->param;
}

double PsiFunction::factor() const {
  if (node_->form != Form::Scaled) throw InvalidArgument("psi: factor() on a non-scaled form");
  return node_->param;
}

const std::vector<double>& PsiFunction::grid() const {
  if (node_->form != Form::Tabulated) throw InvalidArgument("psi: grid() on a non-tabulated form");
  return node_->grid;
}

const std::vector<double>& PsiFunction::values() const {
  if (node_->form != Form::Tabulated) {
    throw InvalidArgument("psi: values() on a non-tabulated form");
  }
  return node_->values;
}

PsiFunction PsiFunction::inner() const {
  if (!node_->inner) throw InvalidArgument("psi: inner() on a form without a wrapped function");
  return PsiFunction(node_->inner);
}

// ---------------------------------------------------------------------------------------------

MomentCurve::MomentCurve(std::vector<double> p_grid, std::vector<double> norms,
                         Provenance provenance, std::vector<double> std_errors)
    : p_grid_(std::move(p_grid)),
      norms_(std::move(norms)),
      std_errors_(std::move(std_errors)),
      provenance_(provenance) {
  if (p_grid_.empty() || p_grid_.size() != norms_.size()) {
    throw InvalidArgument("moment curve: grid and norms must be nonempty and of equal length");
  }
  if (!std_errors_.empty() && std_errors_.size() != p_grid_.size()) {
    throw InvalidArgument("moment curve: std_errors length mismatch");
  }
  for (std::size_t k = 0; k < p_grid_.size(); ++k) {
    if (!(p_grid_[k] >= 1.0) || !std::isfinite(p_grid_[k])) {
      throw InvalidArgument("moment curve: p values must be finite and >= 1");
    }
    if (k > 0 && !(p_grid_[k] > p_grid_[k - 1])) {
      throw InvalidArgument("moment curve: p grid must be strictly ascending");
    }
    if (!(norms_[k] >= 0.0) || !std::isfinite(norms_[k])) {
      throw InvalidArgument("moment curve: norms must be finite and nonnegative");
    }
  }
}

MomentCurve MomentCurve::zero(std::vector<double> p_grid) {
  std::vector<double> norms(p_grid.size(), 0.0);
  return MomentCurve(std::move(p_grid), std::move(norms));
}

MomentCurve MomentCurve::gaussian(double sigma, std::vector<double> p_grid) {
  if (!(sigma >= 0.0)) throw InvalidArgument("gaussian curve: sigma must be nonnegative");
  std::vector<double> norms;
  norms.reserve(p_grid.size());
  for (double p : p_grid) norms.push_back(sigma * gaussian_abs_norm(p));
  return MomentCurve(std::move(p_grid), std::move(norms));
}

std::optional<double> MomentCurve::at(double p) const {
  const auto it = std::lower_bound(p_grid_.begin(), p_grid_.end(), p);
  if (it == p_grid_.end() || *it != p) return std::nullopt;
  return norms_[static_cast<std::size_t>(it - p_grid_.begin())];
}

MomentCurve MomentCurve::scaled(double factor) const {
  if (!(factor >= 0.0)) throw InvalidArgument("moment curve: scale factor must be nonnegative");
  std::vector<double> norms = norms_;
  for (double& v : norms) v *= factor;
  std::vector<double> se = std_errors_;
  for (double& v : se) v *= factor;
  return MomentCurve(p_grid_, std::move(norms), provenance_, std::move(se));
}

double gaussian_abs_norm(double p) {
  // E|Z|^p = 2^{p/2} Γ((p+1)/2) / sqrt(pi)
  const double log_moment =
      0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi);
  return std::exp(log_moment / p);
}

bool lyapunov_consistent(const MomentCurve& curve, double se_multiplier) {
  const auto& v = curve.norms();
  const auto& se = curve.std_errors();
  for (std::size_t k = 1; k < v.size(); ++k) {
    double slack = 1e-12 * std::max(v[k], v[k - 1]);
    if (!se.empty()) slack += se_multiplier * std::hypot(se[k], se[k - 1]);
    if (v[k] < v[k - 1] - slack) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------------------------

double eval_psi(const PsiFunction& psi, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("eval_psi: p must be >= 1");
  return psi(p);
}

double gls_norm(const MomentCurve& curve, const PsiFunction& psi) {
  bool overlap = false;
  double sup = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double p = curve.p_grid()[k];
    if (!inside(p, psi.support_low(), psi.support_high())) continue;
    overlap = true;
    const double denom = psi(p);
    if (!std::isfinite(denom)) continue;  // C / inf = 0
    sup = std::max(sup, curve.norms()[k] / denom);
  }
  if (!overlap) {
    throw EmptySupportOverlap(fmt::format("gls_norm: no grid point inside ({}, {})",
                                          psi.support_low(), psi.support_high()));
  }
  return sup;
}

double subq_norm(const MomentCurve& curve, double q) {
  if (!(q > 0.0)) throw InvalidArgument("subq_norm: q must be positive");
  bool overlap = false;
  double sup = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double p = curve.p_grid()[k];
    if (p < 2.0) continue;
    overlap = true;
    sup = std::max(sup, curve.norms()[k] / std::pow(p, 1.0 / q));
  }
  if (!overlap) throw EmptySupportOverlap("subq_norm: curve has no grid point with p >= 2");
  return sup;
}

PsiFunction rosenthal_transform(const PsiFunction& psi) {
  // p / log p must stay positive and finite on the whole support.
  if (!(psi.support_low() >= 1.0)) {
    throw InvalidSupport("rosenthal_transform: support must exclude p <= 1");
  }
  auto node = std::make_shared<PsiFunction::Node>();
  node->form = PsiFunction::Form::Rosenthal;
  node->low = psi.support_low();
  node->high = psi.support_high();
  node->inner = psi.node_;
  return PsiFunction(std::move(node));
}

double psi_lower_star_power(double q, double x, double support_low, double support_high) {
  if (!(q > 0.0)) throw InvalidArgument("psi_lower_star_power: q must be positive");
  // f(p) = x/p + (1/q) log p is convex in 1/p with stationary point p = qx.
  const double stationary = q * x;
  if (stationary > support_low && stationary < support_high) {
    return (1.0 + std::log(stationary)) / q;
  }
  const double edge = stationary <= support_low ? support_low : support_high;
  return x / edge + std::log(edge) / q;
}

double psi_lower_star_numeric(const PsiFunction& psi, double x, const PsiOptions& options) {
  if (!(x >= 0.0)) throw InvalidArgument("psi_lower_star: x must be nonnegative");
  const auto range = psi.finite_range(options.p_max);
  if (!range) throw EmptyDomain("psi_lower_star: no y in (0,1) with 1/y inside the support");
  const auto objective = [&](double p) {
    const double v = psi(p);
    return std::isfinite(v) ? x / p + std::log(v) : kInf;
  };
  if (range->first == range->second) return objective(range->first);
  return minimize_log_grid(objective, range->first, range->second, options.grid()).value;
}

double psi_lower_star(const PsiFunction& psi, double x, const PsiOptions& options) {
  if (!(x >= 0.0)) throw InvalidArgument("psi_lower_star: x must be nonnegative");
  switch (psi.form()) {
    case PsiFunction::Form::ClosedPower:
      return psi_lower_star_power(psi.q(), x, psi.support_low(), psi.support_high());
    case PsiFunction::Form::Degenerate:
      return x / psi.r();
    case PsiFunction::Form::Scaled:
      return std::log(psi.factor()) + psi_lower_star(psi.inner(), x, options);
    default:
      return psi_lower_star_numeric(psi, x, options);
  }
}

Extremum young_fenchel(const std::function<double(double)>& g, double y, double x_max,
                       const GridOptions& options) {
  if (!(x_max >= 2.0)) throw InvalidArgument("young_fenchel: x_max must be >= 2");
  const auto objective = [&](double x) {
    const double gx = g(x);
    return std::isfinite(gx) ? x * y - gx : -kInf;
  };
  return maximize_log_grid(objective, 2.0, x_max, options);
}

double psi_bar_conjugate(const PsiFunction& psi, double y, const PsiOptions& options) {
  if (const auto point = psi.point_support()) {
    if (*point < 2.0) return -kInf;
    return *point * y - psi.bar(*point);
  }
  const auto range = psi.finite_range(options.p_max);
  if (!range) return -kInf;
  const double lo = std::max(2.0, range->first);
  const double hi = range->second;
  if (hi < lo) return -kInf;
  const auto objective = [&](double x) {
    const double b = psi.bar(x);
    return std::isfinite(b) ? x * y - b : -kInf;
  };
  return maximize_log_grid(objective, lo, hi, options.grid()).value;
}

double gls_tail_bound(const PsiFunction& psi, double gls_norm_value, double u,
                      const PsiOptions& options) {
  if (!(u > 0.0)) throw InvalidArgument("gls_tail_bound: u must be positive");
  if (!(gls_norm_value > 0.0)) throw InvalidArgument("gls_tail_bound: norm must be positive");
  if (u <= gls_norm_value) return 1.0;
  const double conj = psi_bar_conjugate(psi, std::log(u / gls_norm_value), options);
  return std::min(1.0, 2.0 * std::exp(-conj));
}

double orlicz_n_function(const PsiFunction& psi, double u, const PsiOptions& options) {
  constexpr double kKnot = 7.38905609893065;  // e^2
  const double a = std::abs(u);
  if (a > kKnot) return std::exp(psi_bar_conjugate(psi, std::log(a), options));
  const double c = std::exp(psi_bar_conjugate(psi, 2.0, options)) / (kKnot * kKnot);
  return c * a * a;
}

}  // namespace uclt
