#include "uclt/lab/reports.hpp"

namespace uclt::lab {

namespace {

std::string kernel_name(Kernel::Kind k) {
  switch (k) {
    case Kernel::Kind::White:
      return "white";
    case Kernel::Kind::Exponential:
      return "exponential";
    case Kernel::Kind::SquaredExponential:
      return "squared_exponential";
    case Kernel::Kind::Fbm:
      return "fbm";
  }
  return "unknown";
}

}  // namespace

Json to_json(const ModelSpec& s) {
  Json j;
  j["name"] = s.name;
  j["kind"] = to_string(s.kind);
  j["points"] = s.points;
  j["horizon"] = s.horizon;
  j["seed"] = s.seed;
  switch (s.kind) {
    case ModelSpec::Kind::IidGaussian:
    case ModelSpec::Kind::GarchLike:
      j["kernel"] = {{"kind", kernel_name(s.kernel.kind)},
                     {"variance", s.kernel.variance},
                     {"length", s.kernel.length},
                     {"hurst", s.kernel.hurst}};
      if (s.kind == ModelSpec::Kind::GarchLike) {
        j["garch"] = {{"omega", s.omega}, {"alpha", s.alpha}, {"beta", s.beta},
                      {"sigma_min", s.sigma_min}, {"sigma_max", s.sigma_max}};
      }
      break;
    case ModelSpec::Kind::IidWeibull:
      j["weibull"] = {{"K", s.weibull_k}, {"q", s.weibull_q}, {"clip", finite_or_null(s.clip)}};
      j["modulation"] = s.modulation;
      break;
    case ModelSpec::Kind::BoundedSign:
      j["amplitude"] = s.amplitude;
      j["shared_sign"] = s.shared_sign;
      j["modulation"] = s.modulation;
      break;
  }
  j["scale"] = s.scale;
  j["variance_growth"] = s.variance_growth;
  j["drift_bias"] = s.drift_bias;
  return j;
}

Json to_json(const Estimate& e) {
  return {{"value", finite_or_null(e.value)}, {"plain", finite_or_null(e.plain)},
          {"std_error", finite_or_null(e.std_error)}};
}

Json to_json(const OsekowskiReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"p", row.p},
                    {"n", row.n},
                    {"lhs", finite_or_null(row.lhs)},
                    {"rms_norm", finite_or_null(row.rms_norm)},
                    {"ratio", to_json(row.ratio)},
                    {"within_constant", row.within_constant},
                    {"within_rosenthal", row.within_rosenthal}});
  }
  return {{"model", r.model},
          {"target", r.target},
          {"constant", kOsekowskiConstant},
          {"independent_model", r.independent},
          {"orthogonality_reproduced", r.orthogonality_reproduced},
          {"passed", r.passed()},
          {"rows", rows}};
}

Json to_json(const TailDominationReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"x", row.x},
                    {"weights", row.weights},
                    {"upper", row.upper},
                    {"lower", row.lower},
                    {"empirical", row.empirical},
                    {"std_error", row.std_error},
                    {"bound", row.bound},
                    {"dominated", row.dominated}});
  }
  return {{"model", r.model}, {"tail", uclt::to_json(r.tail)}, {"passed", r.passed()}, {"rows", rows}};
}

Json to_json(const MartingalePropertyReport& r) {
  Json conds = Json::array();
  for (const auto& c : r.conditions) {
    conds.push_back({{"feature", c.feature},
                     {"mean", finite_or_null(c.mean)},
                     {"std_error", finite_or_null(c.std_error)},
                     {"t_stat", finite_or_null(c.t_stat)}});
  }
  return {{"model", r.model},
          {"index_count", r.index_count},
          {"t_threshold", r.t_threshold},
          {"max_cell_t", finite_or_null(r.max_cell_t)},
          {"passed", r.passed()},
          {"conditions", conds}};
}

Json to_json(const CovarianceReport& r) {
  Json j{{"model", r.model}, {"n", r.n}, {"points", r.points}, {"estimate", r.estimate},
         {"std_error", r.std_error}};
  j["analytic"] = r.analytic ? Json(*r.analytic) : Json(nullptr);
  j["max_z"] = r.max_z ? finite_or_null(*r.max_z) : Json(nullptr);
  return j;
}

Json to_json(const CltReport& r) {
  Json j{{"model", r.model},
         {"n_small", r.n_small},
         {"n_large", r.n_large},
         {"replications", r.replications},
         {"ks_supnorm", r.ks_supnorm},
         {"ks_critical_0_05", r.ks_critical}};
  j["per_point_ks_small"] = r.per_point_ks_small ? Json(*r.per_point_ks_small) : Json(nullptr);
  j["per_point_ks_large"] = r.per_point_ks_large ? Json(*r.per_point_ks_large) : Json(nullptr);
  j["note"] = r.note;
  return j;
}

Json to_json(const EquicontinuityReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"x1", row.x1},
                    {"x2", row.x2},
                    {"lhs", finite_or_null(row.lhs)},
                    {"lhs_std_error", finite_or_null(row.lhs_std_error)},
                    {"dbar", finite_or_null(row.dbar)},
                    {"bound", finite_or_null(row.bound)},
                    {"dominated", row.dominated}});
  }
  return {{"model", r.model}, {"constant", kOsekowskiConstant}, {"passed", r.passed()}, {"rows", rows}};
}

}  // namespace uclt::lab
