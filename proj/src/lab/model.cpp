#include "uclt/lab/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "uclt/errors.hpp"

namespace uclt::lab {

namespace {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(acc);
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double modulation_factor(double gamma, double previous, double unit) {
  return 1.0 - gamma * 0.5 * (1.0 + std::tanh(previous / unit));
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

}  // namespace

double Kernel::operator()(const std::vector<double>& a, const std::vector<double>& b) const {
  if (a.size() != b.size()) throw InvalidArgument("kernel: coordinate dimension mismatch");
  const double r = euclidean(a, b);
  switch (kind) {
    case Kind::White:
      return r == 0.0 ? variance : 0.0;
    case Kind::Exponential:
      return variance * std::exp(-r / length);
    case Kind::SquaredExponential:
      return variance * std::exp(-r * r / (2.0 * length * length));
    case Kind::Fbm: {
      const std::vector<double> origin(a.size(), 0.0);
      const double h2 = 2.0 * hurst;
      return 0.5 * variance *
             (std::pow(euclidean(a, origin), h2) + std::pow(euclidean(b, origin), h2) - std::pow(r, h2));
    }
  }
  return 0.0;
}

std::string to_string(ModelSpec::Kind kind) {
  switch (kind) {
    case ModelSpec::Kind::IidGaussian:
      return "iid_gaussian_field";
    case ModelSpec::Kind::IidWeibull:
      return "iid_weibull_field";
    case ModelSpec::Kind::GarchLike:
      return "garch_like";
    case ModelSpec::Kind::BoundedSign:
      return "bounded_sign";
  }
  return "unknown";
}

ModelSpec::Kind model_kind_from_string(const std::string& s) {
  for (auto k : {ModelSpec::Kind::IidGaussian, ModelSpec::Kind::IidWeibull,
                 ModelSpec::Kind::GarchLike, ModelSpec::Kind::BoundedSign}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument(fmt::format("unknown model kind '{}'", s));
}

MartingaleFieldModel::MartingaleFieldModel(ModelSpec spec) : spec_(std::move(spec)) {
  const auto& s = spec_;
  require(!s.points.empty(), "model: at least one point is required");
  for (const auto& p : s.points) {
    require(p.size() == s.points.front().size() && !p.empty(),
            "model: points must share a positive dimension");
    for (double c : p) require(std::isfinite(c), "model: point coordinates must be finite");
  }
  require(s.horizon >= 1, "model: horizon must be at least 1");
  require(s.scale > 0.0 && std::isfinite(s.scale), "model: scale must be positive");
  require(std::isfinite(s.variance_growth), "model: variance_growth must be finite");
  require(std::isfinite(s.drift_bias), "model: drift_bias must be finite");
  require(s.modulation >= 0.0 && s.modulation < 1.0, "model: modulation must lie in [0, 1)");
  require(s.kernel.variance > 0.0 && s.kernel.length > 0.0, "model: kernel variance and length must be positive");
  require(s.kernel.hurst > 0.0 && s.kernel.hurst < 1.0, "model: hurst must lie in (0, 1)");
  switch (s.kind) {
    case ModelSpec::Kind::IidWeibull:
      require(s.weibull_k > 0.0 && s.weibull_q > 0.0, "model: weibull K and q must be positive");
      require(s.clip > 0.0, "model: clip must be positive");
      break;
    case ModelSpec::Kind::GarchLike:
      require(s.omega > 0.0 && s.alpha >= 0.0 && s.beta >= 0.0, "model: garch needs omega > 0, alpha, beta >= 0");
      require(s.alpha + s.beta < 1.0, "model: garch needs alpha + beta < 1 for a stationary start");
      require(s.sigma_min > 0.0 && s.sigma_max >= s.sigma_min, "model: need 0 < sigma_min <= sigma_max");
      break;
    case ModelSpec::Kind::BoundedSign:
      require(s.amplitude > 0.0 && std::isfinite(s.amplitude), "model: amplitude must be positive");
      break;
    case ModelSpec::Kind::IidGaussian:
      break;
  }
}

MartingaleFieldModel MartingaleFieldModel::scaled(double c) const {
  ModelSpec s = spec_;
  s.scale *= c;
  return MartingaleFieldModel(std::move(s));
}

std::optional<double> MartingaleFieldModel::analytic_covariance(std::size_t a, std::size_t b) const {
  if (spec_.variance_growth != 0.0 || spec_.drift_bias != 0.0) return std::nullopt;
  const double c2 = spec_.scale * spec_.scale;
  if (spec_.kind == ModelSpec::Kind::IidGaussian) {
    return c2 * spec_.kernel(spec_.points.at(a), spec_.points.at(b));
  }
  if (spec_.kind == ModelSpec::Kind::BoundedSign && spec_.modulation == 0.0) {
    const bool correlated = a == b || spec_.shared_sign;
    return correlated ? c2 * spec_.amplitude * spec_.amplitude : 0.0;
  }
  return std::nullopt;
}

bool MartingaleFieldModel::unit_conditional_variance() const {
  if (spec_.variance_growth != 0.0 || spec_.drift_bias != 0.0 || spec_.modulation != 0.0) return false;
  switch (spec_.kind) {
    case ModelSpec::Kind::IidGaussian: {
      for (const auto& p : spec_.points) {
        if (std::abs(spec_.scale * spec_.scale * spec_.kernel(p, p) - 1.0) > 1e-12) return false;
      }
      return true;
    }
    case ModelSpec::Kind::BoundedSign:
      return std::abs(spec_.scale * spec_.amplitude - 1.0) <= 1e-12;
    default:
      return false;
  }
}

bool MartingaleFieldModel::independent_in_time() const {
  if (spec_.drift_bias != 0.0) return false;
  switch (spec_.kind) {
    case ModelSpec::Kind::IidGaussian:
      return true;
    case ModelSpec::Kind::IidWeibull:
    case ModelSpec::Kind::BoundedSign:
      return spec_.modulation == 0.0;
    case ModelSpec::Kind::GarchLike:
      return false;
  }
  return false;
}

std::optional<TailFunction> MartingaleFieldModel::dominating_tail() const {
  if (spec_.variance_growth != 0.0 || spec_.drift_bias != 0.0) return std::nullopt;
  const double c = spec_.scale;
  double max_var = 0.0;
  for (const auto& p : spec_.points) max_var = std::max(max_var, spec_.kernel(p, p));
  switch (spec_.kind) {
    case ModelSpec::Kind::BoundedSign:
      return TailFunction::tabulated({c * spec_.amplitude}, {0.0});
    case ModelSpec::Kind::IidWeibull:
      return TailFunction::closed_weibull(c * spec_.weibull_k, spec_.weibull_q);
    case ModelSpec::Kind::IidGaussian:
      // P(|σZ| > t) <= exp(-t²/(2σ²))
      if (max_var == 0.0) return TailFunction::degenerate_zero();
      return TailFunction::closed_weibull(c * std::sqrt(2.0 * max_var), 2.0);
    case ModelSpec::Kind::GarchLike:
      return TailFunction::closed_weibull(c * spec_.sigma_max * std::sqrt(2.0 * max_var), 2.0);
  }
  return std::nullopt;
}

FieldSampler::FieldSampler(const MartingaleFieldModel& model, std::vector<std::size_t> points)
    : spec_(&model.spec()), points_(std::move(points)) {
  if (points_.empty()) throw InvalidArgument("sampler: no points requested");
  for (auto p : points_) {
    if (p >= model.point_count()) {
      throw InvalidArgument(fmt::format("sampler: point {} out of range", p));
    }
  }
  const auto kind = spec_->kind;
  if (kind != ModelSpec::Kind::IidGaussian && kind != ModelSpec::Kind::GarchLike) return;
  const auto m = static_cast<Eigen::Index>(points_.size());
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      cov(a, b) = spec_->kernel(spec_->points[points_[static_cast<std::size_t>(a)]],
                                spec_->points[points_[static_cast<std::size_t>(b)]]);
    }
  }
  if (cov.isDiagonal(0.0)) {
    diagonal_factor_ = true;
    factor_ = cov.diagonal().cwiseSqrt().asDiagonal();
    return;
  }
  // eigen-factor so that positive semidefinite kernels (e.g. Brownian through 0) work
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw InvalidArgument("sampler: kernel factorization failed");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  factor_ = eig.eigenvectors() * root.asDiagonal();
}

FieldSampler::Path::Path(const FieldSampler& owner, Engine engine)
    : owner_(&owner),
      engine_(std::move(engine)),
      previous_(owner.width(), 0.0),
      sigma2_(owner.width(), 0.0),
      z_(owner.width(), 0.0),
      innovation_(owner.width(), 0.0) {
  const auto& s = *owner.spec_;
  if (s.kind == ModelSpec::Kind::GarchLike) {
    const double persistence = s.alpha + s.beta;
    const double start = persistence < 1.0 ? s.omega / (1.0 - persistence) : 1.0;
    std::fill(sigma2_.begin(), sigma2_.end(), start);
  }
}

FieldSampler::Path FieldSampler::path(Stream stream, std::uint64_t replication) const {
  return Path(*this, make_engine(spec_->seed, stream, replication));
}

void FieldSampler::innovations(Path& path) const {
  const std::size_t m = width();
  for (std::size_t k = 0; k < m; ++k) path.z_[k] = path.normal_(path.engine_);
  if (diagonal_factor_) {
    for (std::size_t k = 0; k < m; ++k) {
      path.innovation_[k] = factor_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) * path.z_[k];
    }
    return;
  }
  const Eigen::Map<const Eigen::VectorXd> z(path.z_.data(), static_cast<Eigen::Index>(m));
  Eigen::Map<Eigen::VectorXd>(path.innovation_.data(), static_cast<Eigen::Index>(m)) = factor_ * z;
}

void FieldSampler::Path::next(double* out) {
  const FieldSampler& o = *owner_;
  const ModelSpec& s = *o.spec_;
  if (step_ >= s.horizon) {
    throw HorizonExceeded(fmt::format("index {} exceeds the model horizon {}", step_ + 1, s.horizon));
  }
  const std::size_t m = o.width();
  switch (s.kind) {
    case ModelSpec::Kind::IidGaussian:
      o.innovations(*this);
      for (std::size_t k = 0; k < m; ++k) out[k] = innovation_[k];
      break;
    case ModelSpec::Kind::GarchLike:
      o.innovations(*this);
      for (std::size_t k = 0; k < m; ++k) {
        if (step_ > 0) {
          const double base = previous_[k] / s.scale;  // recursion runs on the unscaled field
          sigma2_[k] = s.omega + s.alpha * base * base + s.beta * sigma2_[k];
        }
        const double sigma = std::clamp(std::sqrt(sigma2_[k]), s.sigma_min, s.sigma_max);
        sigma2_[k] = sigma * sigma;
        out[k] = sigma * innovation_[k];
      }
      break;
    case ModelSpec::Kind::IidWeibull: {
      std::exponential_distribution<double> exponential(1.0);
      for (std::size_t k = 0; k < m; ++k) {
        const double sign = (engine_() >> 63) ? 1.0 : -1.0;
        double magnitude = std::min(s.weibull_k * std::pow(exponential(engine_), 1.0 / s.weibull_q), s.clip);
        if (s.modulation > 0.0) magnitude *= modulation_factor(s.modulation, previous_[k] / s.scale, s.weibull_k);
        out[k] = sign * magnitude;
      }
      break;
    }
    case ModelSpec::Kind::BoundedSign: {
      const double shared = (engine_() >> 63) ? 1.0 : -1.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double sign = s.shared_sign ? shared : ((engine_() >> 63) ? 1.0 : -1.0);
        double magnitude = s.amplitude;
        if (s.modulation > 0.0) magnitude *= modulation_factor(s.modulation, previous_[k] / s.scale, s.amplitude);
        out[k] = sign * magnitude;
      }
      break;
    }
  }
  const double growth = s.variance_growth == 0.0 ? 1.0 : std::pow(static_cast<double>(step_ + 1), s.variance_growth);
  for (std::size_t k = 0; k < m; ++k) {
    out[k] *= s.scale * growth;
    if (s.drift_bias != 0.0) out[k] += s.drift_bias * sign_of(previous_[k]);
    previous_[k] = out[k];
  }
  ++step_;
}

}  // namespace uclt::lab
