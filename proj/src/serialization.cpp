#include "uclt/serialization.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "uclt/errors.hpp"

namespace uclt {

namespace {

Json bound_to_json(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double bound_from_json(const Json& j) { return j.is_null() ? kInf : j.get<double>(); }

std::pair<double, double> support_from(const Json& j) {
  if (!j.contains("support")) return {2.0, kInf};
  const Json& s = j.at("support");
  if (!s.is_array() || s.size() != 2) throw InvalidArgument("support must be a two-element array");
  return {bound_from_json(s[0]), bound_from_json(s[1])};
}

}  // namespace

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

Json to_json(const PsiFunction& psi) {
  Json j;
  switch (psi.form()) {
    case PsiFunction::Form::ClosedPower:
      j["form"] = "closed_power";
      j["q"] = psi.q();
      break;
    case PsiFunction::Form::Tabulated:
      j["form"] = "tabulated";
      j["grid"] = psi.grid();
      j["values"] = psi.values();
      break;
    case PsiFunction::Form::Degenerate:
      j["form"] = "degenerate";
      j["r"] = psi.r();
      break;
    case PsiFunction::Form::Scaled:
      j["form"] = "scaled";
      j["factor"] = psi.factor();
      j["inner"] = to_json(psi.inner());
      return j;
    case PsiFunction::Form::Rosenthal:
      j["form"] = "rosenthal";
      j["inner"] = to_json(psi.inner());
      return j;
  }
  j["support"] = Json::array({bound_to_json(psi.support_low()), bound_to_json(psi.support_high())});
  return j;
}

PsiFunction psi_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("form")) throw InvalidArgument("psi: expected an object with 'form'");
  const auto form = j.at("form").get<std::string>();
  if (form == "closed_power") {
    const auto [lo, hi] = support_from(j);
    return PsiFunction::closed_power(j.at("q").get<double>(), lo, hi);
  }
  if (form == "tabulated") {
    const auto [lo, hi] = support_from(j);
    return PsiFunction::tabulated(j.at("grid").get<std::vector<double>>(),
                                  j.at("values").get<std::vector<double>>(), lo, hi);
  }
  if (form == "degenerate") {
    const auto [lo, hi] = support_from(j);
    return PsiFunction::degenerate(j.at("r").get<double>(), lo, hi);
  }
  if (form == "scaled") {
    return PsiFunction::scaled(j.at("factor").get<double>(), psi_from_json(j.at("inner")));
  }
  if (form == "rosenthal") return rosenthal_transform(psi_from_json(j.at("inner")));
  throw InvalidArgument(fmt::format("psi: unknown form '{}'", form));
}

Json to_json(const MomentCurve& curve) {
  Json j;
  j["p_grid"] = curve.p_grid();
  j["norms"] = curve.norms();
  if (!curve.std_errors().empty()) j["std_errors"] = curve.std_errors();
  const auto& prov = curve.provenance();
  Json pj;
  pj["kind"] = prov.kind == MomentCurve::Provenance::Kind::Analytic ? "analytic" : "monte_carlo";
  if (prov.kind == MomentCurve::Provenance::Kind::MonteCarlo) {
    pj["seed"] = prov.seed;
    pj["replications"] = prov.replications;
  }
  j["provenance"] = pj;
  return j;
}

MomentCurve moment_curve_from_json(const Json& j) {
  MomentCurve::Provenance prov;
  if (j.contains("provenance")) {
    const Json& pj = j.at("provenance");
    const auto kind = pj.at("kind").get<std::string>();
    if (kind == "monte_carlo") {
      prov = MomentCurve::Provenance::monte_carlo(pj.at("seed").get<std::uint64_t>(),
                                                  pj.at("replications").get<std::int64_t>());
    } else if (kind != "analytic") {
      throw InvalidArgument(fmt::format("moment curve: unknown provenance kind '{}'", kind));
    }
  }
  std::vector<double> se;
  if (j.contains("std_errors")) se = j.at("std_errors").get<std::vector<double>>();
  return MomentCurve(j.at("p_grid").get<std::vector<double>>(),
                     j.at("norms").get<std::vector<double>>(), prov, std::move(se));
}

Json to_json(const TailFunction& tail) {
  Json j;
  switch (tail.form()) {
    case TailFunction::Form::ClosedWeibull:
      j["form"] = "closed_weibull";
      j["K"] = tail.K();
      j["q"] = tail.q();
      break;
    case TailFunction::Form::Tabulated:
      j["form"] = "tabulated";
      j["x"] = tail.x_grid();
      j["values"] = tail.values();
      break;
    case TailFunction::Form::DegenerateZero:
      j["form"] = "degenerate_zero";
      break;
  }
  return j;
}

TailFunction tail_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("form")) throw InvalidArgument("tail: expected an object with 'form'");
  const auto form = j.at("form").get<std::string>();
  if (form == "closed_weibull") {
    return TailFunction::closed_weibull(j.at("K").get<double>(), j.at("q").get<double>());
  }
  if (form == "tabulated") {
    return TailFunction::tabulated(j.at("x").get<std::vector<double>>(),
                                   j.at("values").get<std::vector<double>>());
  }
  if (form == "degenerate_zero") return TailFunction::degenerate_zero();
  throw InvalidArgument(fmt::format("tail: unknown form '{}'", form));
}

Json to_json(const IntegralReport& report, bool include_trace) {
  Json j;
  j["value"] = finite_or_null(report.value);
  j["truncated_value"] = finite_or_null(report.truncated_value);
  j["finiteness"] = to_string(report.finiteness);
  j["eps_min"] = report.eps_min;
  j["diameter"] = report.diameter;
  j["tail_slope"] = report.tail_slope ? finite_or_null(*report.tail_slope) : Json(nullptr);
  if (include_trace) {
    Json rows = Json::array();
    for (const auto& r : report.trace) rows.push_back({r.eps, r.h, finite_or_null(r.integrand)});
    j["trace"] = rows;
  }
  return j;
}

Json to_json(const VerdictRecord& record) {
  Json j;
  j["condition"] = record.condition;
  j["value"] = finite_or_null(record.value);
  j["verdict"] = record.verdict;
  j["resolution"] = record.resolution;
  j["notes"] = record.notes;
  j["conclusion"] = record.conclusion;
  j["sigma2"] = record.sigma2 ? finite_or_null(*record.sigma2) : Json(nullptr);
  j["integral"] = to_json(record.integral);
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
    out << text;
    if (!out) throw Error(fmt::format("short write to {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

void write_trace_csv(const IntegralReport& report, const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::string>>& provenance) {
  std::string text;
  for (const auto& [k, v] : provenance) text += fmt::format("# {}={}\n", k, v);
  text += "eps,H,integrand\n";
  for (const auto& r : report.trace) {
    text += fmt::format("{},{},{}\n", format_double(r.eps), format_double(r.h),
                        format_double(r.integrand));
  }
  write_text_file(path, text);
}

}  // namespace uclt
