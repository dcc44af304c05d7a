#include <cmath>

#include <fmt/format.h>

#include "run_context.hpp"
#include "uclt/entropy_integrals.hpp"
#include "uclt/errors.hpp"
#include "uclt/lab/checks.hpp"
#include "uclt/lab/reports.hpp"
#include "uclt/natural_distances.hpp"

namespace uclt::cli {

namespace {

struct ProfileChoice {
  std::string mode;
  int dim = 1;
  double alpha = 1.0;
  double c2 = 1.0;
  std::size_t nodes = 40;
};

ProfileChoice parse_profile_choice(const Section& root) {
  ProfileChoice c;
  if (!root.has("entropy")) {
    c.mode = "fit";
    return c;
  }
  const Section e = root.child("entropy");
  e.allow_only({"mode", "dim", "alpha", "c2", "nodes"});
  c.mode = e.choice("mode", {"fit", "greedy", "exact", "holder"}, std::string("fit"));
  c.nodes = static_cast<std::size_t>(e.integer("nodes", 40, 2));
  if (c.mode == "holder") {
    c.dim = static_cast<int>(e.integer("dim", std::nullopt, 1));
    c.alpha = e.positive("alpha");
    c.c2 = e.positive("c2", 1.0);
  } else {
    for (const char* k : {"dim", "alpha", "c2"}) {
      if (e.has(k)) e.fail(k, "only used with mode 'holder'");
    }
  }
  return c;
}

struct BuiltProfile {
  EntropyProfile profile;
  Json description;
};

BuiltProfile build_profile(const FiniteMetricSpace& space, const ProfileChoice& choice) {
  const double d = diameter(space);
  if (!(d > 0.0)) {
    return {EntropyProfile::measured({}, {}, 0.0, CoveringMode::Greedy),
            {{"kind", "degenerate"}, {"diameter", 0.0}}};
  }
  if (choice.mode == "holder") {
    const auto model = EntropyModel::holder(choice.dim, choice.alpha, choice.c2);
    return {EntropyProfile::model(model, d),
            {{"kind", "holder-model"},
             {"diameter", d},
             {"dim", choice.dim},
             {"alpha", choice.alpha},
             {"c2", choice.c2},
             {"log_c2", model.log_c2},
             {"rate", model.rate}}};
  }
  const CoveringMode mode = choice.mode == "exact" ? CoveringMode::Exact : CoveringMode::Greedy;
  EntropyProfile measured = measure_profile(space, mode, choice.nodes);
  Json desc{{"kind", choice.mode == "exact" ? "measured-exact" : "measured-greedy"},
            {"diameter", d},
            {"eps", measured.eps_grid()},
            {"H", measured.h_values()}};
  if (choice.mode == "fit") {
    if (const auto fit = fit_entropy_model(measured)) {
      desc["kind"] = "fitted-model";
      desc["log_c2"] = fit->log_c2;
      desc["rate"] = fit->rate;
      return {EntropyProfile::model(*fit, d), desc};
    }
    desc["note"] = "too few informative radii for a fit; using the measured profile";
  }
  return {std::move(measured), desc};
}

std::vector<std::string> trace_rows(const IntegralReport& report) {
  std::vector<std::string> rows;
  for (const auto& r : report.trace) {
    rows.push_back(fmt::format("{},{},{}", csv_number(r.eps), csv_number(r.h), csv_number(r.integrand)));
  }
  return rows;
}

}  // namespace

int run_check_theorem(const RunRequest& request, std::ostream& log) {
  RunContext ctx = open_run("check-theorem", request, 2000);
  const Section root = ctx.root();
  root.allow_only({"seed", "replications", "out", "model", "p_grid", "index_count", "n_grid",
                   "entropy", "quadrature", "exponential_level", "clt", "tail_x"});
  const auto model = build_model(root.child("model"), ctx.seed);
  const auto p_grid = root.numbers("p_grid", std::vector<double>{2, 3, 4, 6, 8});
  for (std::size_t k = 0; k < p_grid.size(); ++k) {
    if (!(p_grid[k] > 1.0) || (k > 0 && !(p_grid[k] > p_grid[k - 1]))) {
      root.fail("p_grid", "must be strictly ascending with every p > 1");
    }
  }
  const auto index_count = static_cast<std::size_t>(root.integer("index_count", 64, 1));
  if (index_count > model.horizon()) root.fail("index_count", "exceeds the model horizon");
  const auto n_grid = root.counts("n_grid", dyadic_grid(index_count));
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] > index_count || (k > 0 && n_grid[k] <= n_grid[k - 1])) {
      root.fail("n_grid", "must be strictly ascending and at most index_count");
    }
  }
  const ProfileChoice profile_choice = parse_profile_choice(root);
  QuadratureOptions quad;
  if (root.has("quadrature")) {
    const Section q = root.child("quadrature");
    q.allow_only({"nodes"});
    quad.nodes = static_cast<std::size_t>(q.integer("nodes", 400, 16));
  }
  std::optional<double> q_level;
  if (root.has("exponential_level")) {
    const Section e = root.child("exponential_level");
    e.allow_only({"q"});
    q_level = e.positive("q");
  }
  std::size_t n_small = std::max<std::size_t>(1, index_count / 4);
  std::size_t n_large = index_count;
  if (root.has("clt")) {
    const Section c = root.child("clt");
    c.allow_only({"n_small", "n_large"});
    n_small = static_cast<std::size_t>(c.integer("n_small", static_cast<std::int64_t>(n_small), 1));
    n_large = static_cast<std::size_t>(c.integer("n_large", static_cast<std::int64_t>(n_large), 1));
    if (n_small > n_large) c.fail("n_small", "must not exceed n_large");
    if (n_large > model.horizon()) c.fail("n_large", "exceeds the model horizon");
  }
  const auto tail_x = root.numbers("tail_x", std::vector<double>{1.5, 2, 3, 4, 5});
  for (double x : tail_x) {
    if (!(x > 1.0)) root.fail("tail_x", "every x must exceed 1");
  }

  log << fmt::format("check-theorem: model '{}' with {} points, R = {}, seed = {}\n", model.name(),
                     model.point_count(), ctx.replications, ctx.seed);
  const auto field = lab::estimate_moment_curves(model, p_grid, ctx.replications, index_count, ctx.lab);
  const PsiFunction psi = natural_function(field);
  const SigmaSquared sigma = sigma_squared(field, n_grid);
  const double sigma2 = sigma.unbounded_on_grid ? kInf : sigma.value;

  const auto coords = model.spec().points;
  const unsigned threads = lab::resolve_threads(ctx.lab.threads);
  const FiniteMetricSpace dbar_space = assemble_distance_space(
      model.point_count(),
      [&](std::size_t a, std::size_t b) { return distance_bar(field, a, b, psi, n_grid); }, threads,
      coords);
  const BuiltProfile dbar_profile = build_profile(dbar_space, profile_choice);
  std::vector<VerdictRecord> verdicts{power_level_check(sigma2, dbar_profile.profile, psi, quad)};
  Json profiles = Json::object();
  profiles["power-level"] = dbar_profile.description;
  profiles["power-level"]["triangle_violations"] = dbar_space.triangle_violations();

  std::optional<IntegralReport> exp_integral;
  if (q_level) {
    const FiniteMetricSpace rho_space = assemble_distance_space(
        model.point_count(),
        [&](std::size_t a, std::size_t b) { return rho_q_distance(field, a, b, *q_level); }, threads,
        coords);
    const BuiltProfile rho_profile = build_profile(rho_space, profile_choice);
    verdicts.push_back(exponential_level_check(rho_profile.profile, *q_level, sigma2, quad));
    profiles["exponential-level"] = rho_profile.description;
    exp_integral = verdicts.back().integral;
  }

  const auto clt = lab::clt_diagnostic(model, n_small, n_large, ctx.replications, ctx.lab);

  Json tail_rows = Json::array();
  std::vector<std::string> tail_csv;
  const auto tail = model.dominating_tail();
  if (tail) {
    for (double x : tail_x) {
      const double bound = weighted_sum_tail_bound(*tail, x);
      tail_rows.push_back({{"x", x}, {"tail", (*tail)(x)}, {"bound", bound}});
      tail_csv.push_back(fmt::format("{},{},{},{}", csv_field(model.name()), csv_number(x),
                                     csv_number((*tail)(x)), csv_number(bound)));
    }
  }

  bool satisfied = true;
  std::string conclusion = kSatisfied;
  Json verdict_json = Json::array();
  for (const auto& v : verdicts) {
    verdict_json.push_back(to_json(v));
    if (!v.satisfied() && satisfied) {
      satisfied = false;
      conclusion = v.conclusion;
    }
  }

  Json body;
  body["model"] = lab::to_json(model.spec());
  body["p_grid"] = p_grid;
  body["index_count"] = index_count;
  body["n_grid"] = n_grid;
  body["natural_function"] = to_json(psi);
  body["sigma2"] = {{"value", finite_or_null(sigma.value)},
                    {"truncated_value", finite_or_null(sigma.truncated_value)},
                    {"unbounded_on_grid", sigma.unbounded_on_grid},
                    {"flagged_points", sigma.flagged_points}};
  body["dbar_matrix"] = dbar_space.matrix();
  body["profiles"] = profiles;
  body["verdicts"] = verdict_json;
  body["clt"] = lab::to_json(clt);
  body["tail"] = {{"dominating_tail", tail ? to_json(*tail) : Json(nullptr)}, {"rows", tail_rows}};
  body["conclusion"] = conclusion;
  body["exit_code"] = satisfied ? kExitOk : kExitCheckFailed;

  ctx.write_json("check-theorem.json", body);
  ctx.write_csv("power_level_trace.csv", "eps,H,integrand", trace_rows(verdicts.front().integral));
  if (exp_integral) ctx.write_csv("exponential_level_trace.csv", "eps,H,integrand", trace_rows(*exp_integral));
  ctx.write_csv("tail_bounds.csv", "model,x,tail,bound", tail_csv);
  ctx.write_csv("ks.csv", "model,n,reference_n,ks",
                {fmt::format("{},{},{},{}", csv_field(model.name()), clt.n_large, clt.n_small,
                             csv_number(clt.ks_supnorm))});
  save_moment_field(field, ctx.out / "moment_field");

  log << fmt::format("conclusion: {}\n", conclusion);
  for (const auto& v : verdicts) {
    log << fmt::format("  {}: value {} ({}) -> {}\n", v.condition, format_double(v.value), v.verdict,
                       v.conclusion);
  }
  log << fmt::format("reports written to {}\n", ctx.out.string());
  return satisfied ? kExitOk : kExitCheckFailed;
}

}  // namespace uclt::cli
