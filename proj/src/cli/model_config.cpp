#include <cmath>

#include <fmt/format.h>

#include "uclt/cli/commands.hpp"
#include "uclt/errors.hpp"

namespace uclt::cli {

namespace {

std::vector<std::vector<double>> grid_points(const Section& g) {
  g.allow_only({"count", "low", "high", "dim"});
  const auto count = static_cast<std::size_t>(g.integer("count", std::nullopt, 1));
  const auto dim = static_cast<std::size_t>(g.integer("dim", 1, 1));
  const double low = g.number("low", 0.0);
  const double high = g.number("high", 1.0);
  if (!(high >= low)) g.fail("high", "must be at least 'low'");
  if (dim > 3) g.fail("dim", "at most 3 dimensions are supported");
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) total *= count;
  if (total > 4096) g.fail("count", fmt::format("grid of {} points exceeds the 4096 limit", total));
  std::vector<std::vector<double>> pts;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<double> p(dim);
    std::size_t rest = idx;
    for (std::size_t d = 0; d < dim; ++d) {
      const std::size_t k = rest % count;
      rest /= count;
      p[d] = count == 1 ? low : low + (high - low) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace

CoordinateMetric parse_metric(const Section& m) {
  m.allow_only({"kind", "alpha"});
  CoordinateMetric metric;
  const auto kind = m.choice("kind", {"euclidean", "sup", "holder"}, std::string("euclidean"));
  if (kind == "sup") {
    metric.kind = CoordinateMetric::Kind::Sup;
  } else if (kind == "holder") {
    metric.kind = CoordinateMetric::Kind::Holder;
    metric.alpha = m.positive("alpha");
    if (metric.alpha > 1.0) m.fail("alpha", "must lie in (0, 1]");
  }
  return metric;
}

lab::ModelSpec parse_model(const Section& s, std::uint64_t seed) {
  s.allow_only({"name", "kind", "grid", "points", "metric", "horizon", "kernel", "weibull", "garch",
                "amplitude", "shared_sign", "modulation", "scale", "variance_growth", "drift_bias"});
  lab::ModelSpec spec;
  spec.seed = seed;
  spec.kind = lab::model_kind_from_string(
      s.choice("kind", {"iid_gaussian_field", "iid_weibull_field", "garch_like", "bounded_sign"}));
  spec.name = s.string("name", lab::to_string(spec.kind));

  if (s.has("grid") == s.has("points")) s.fail("grid", "exactly one of 'grid' or 'points' is required");
  if (s.has("grid")) {
    spec.points = grid_points(s.child("grid"));
  } else {
    const Json& pts = s.raw("points");
    if (!pts.is_array() || pts.empty()) s.fail("points", "expected a nonempty array of coordinate arrays");
    for (const auto& p : pts) {
      if (!p.is_array() || p.empty() || p.size() != pts.front().size()) {
        s.fail("points", "every point must be a coordinate array of the same positive length");
      }
      std::vector<double> c;
      for (const auto& v : p) {
        if (!v.is_number()) s.fail("points", "coordinates must be numbers");
        c.push_back(v.get<double>());
      }
      spec.points.push_back(std::move(c));
    }
  }
  if (s.has("metric")) spec.base_metric = parse_metric(s.child("metric"));
  spec.horizon = static_cast<std::size_t>(s.integer("horizon", 2048, 1));

  if (s.has("kernel")) {
    const Section k = s.child("kernel");
    k.allow_only({"kind", "variance", "length", "hurst"});
    const auto kind = k.choice("kind", {"white", "exponential", "squared_exponential", "fbm", "brownian"});
    spec.kernel.kind = kind == "white"                ? lab::Kernel::Kind::White
                       : kind == "exponential"        ? lab::Kernel::Kind::Exponential
                       : kind == "squared_exponential" ? lab::Kernel::Kind::SquaredExponential
                                                       : lab::Kernel::Kind::Fbm;
    spec.kernel.variance = k.positive("variance", 1.0);
    spec.kernel.length = k.positive("length", 1.0);
    spec.kernel.hurst = k.positive("hurst", 0.5);
    if (kind == "brownian" && k.has("hurst")) k.fail("hurst", "the brownian kernel has hurst 0.5");
    if (spec.kernel.hurst >= 1.0) k.fail("hurst", "must lie in (0, 1)");
  }
  if (s.has("weibull")) {
    const Section w = s.child("weibull");
    w.allow_only({"K", "q", "clip"});
    spec.weibull_k = w.positive("K", 1.0);
    spec.weibull_q = w.positive("q", 2.0);
    spec.clip = w.number_or_inf("clip", spec.clip);
    if (!(spec.clip > 0.0)) w.fail("clip", "must be positive or null");
  }
  if (s.has("garch")) {
    const Section g = s.child("garch");
    g.allow_only({"omega", "alpha", "beta", "sigma_min", "sigma_max"});
    spec.omega = g.positive("omega", spec.omega);
    spec.alpha = g.number("alpha", spec.alpha);
    spec.beta = g.number("beta", spec.beta);
    if (spec.alpha < 0.0) g.fail("alpha", "must be nonnegative");
    if (spec.beta < 0.0) g.fail("beta", "must be nonnegative");
    spec.sigma_min = g.positive("sigma_min", spec.sigma_min);
    spec.sigma_max = g.positive("sigma_max", spec.sigma_max);
    if (spec.sigma_max < spec.sigma_min) g.fail("sigma_max", "must be at least sigma_min");
  }
  spec.amplitude = s.positive("amplitude", 1.0);
  spec.shared_sign = s.boolean("shared_sign", false);
  spec.modulation = s.number("modulation", 0.0);
  if (spec.modulation < 0.0 || spec.modulation >= 1.0) s.fail("modulation", "must lie in [0, 1)");
  spec.scale = s.positive("scale", 1.0);
  spec.variance_growth = s.number("variance_growth", 0.0);
  spec.drift_bias = s.number("drift_bias", 0.0);
  return spec;
}

lab::MartingaleFieldModel build_model(const Section& section, std::uint64_t seed) {
  lab::ModelSpec spec = parse_model(section, seed);
  try {
    return lab::MartingaleFieldModel(std::move(spec));
  } catch (const InvalidArgument& e) {
    section.fail("kind", e.what());
  }
}

std::vector<lab::ModelSpec> shipped_model_suite(std::uint64_t seed) {
  const std::vector<std::vector<double>> pts{{0.0}, {0.5}, {1.0}};
  std::vector<lab::ModelSpec> suite;

  lab::ModelSpec gaussian;
  gaussian.name = "iid-gaussian";
  gaussian.kind = lab::ModelSpec::Kind::IidGaussian;
  gaussian.kernel = {lab::Kernel::Kind::Exponential, 1.0, 0.5, 0.5};
  suite.push_back(gaussian);

  lab::ModelSpec sign;
  sign.name = "bounded-sign";
  sign.kind = lab::ModelSpec::Kind::BoundedSign;
  sign.modulation = 0.3;
  suite.push_back(sign);

  lab::ModelSpec garch;
  garch.name = "garch-like";
  garch.kind = lab::ModelSpec::Kind::GarchLike;
  garch.kernel = {lab::Kernel::Kind::Exponential, 1.0, 0.5, 0.5};
  suite.push_back(garch);

  lab::ModelSpec weibull;
  weibull.name = "truncated-weibull";
  weibull.kind = lab::ModelSpec::Kind::IidWeibull;
  weibull.weibull_k = 1.0;
  weibull.weibull_q = 1.0;
  weibull.clip = 8.0;
  suite.push_back(weibull);

  for (auto& m : suite) {
    m.points = pts;
    m.seed = seed;
  }
  return suite;
}

}  // namespace uclt::cli
