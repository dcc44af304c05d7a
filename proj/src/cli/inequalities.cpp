#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "run_context.hpp"
#include "uclt/errors.hpp"
#include "uclt/lab/checks.hpp"
#include "uclt/lab/reports.hpp"
#include "uclt/tail.hpp"

namespace uclt::cli {

namespace {

struct SuiteSettings {
  std::set<std::string> checks{"osekowski", "tail", "martingale_property", "weibull_slope"};
  std::vector<double> p_grid{2, 3, 4, 6, 8};
  std::vector<std::size_t> osekowski_n{8, 64, 512};
  std::vector<std::string> targets{"point", "pair"};
  std::optional<std::size_t> osekowski_reps;
  std::vector<double> tail_x{1.5, 2, 3};
  std::vector<std::size_t> tail_n{16, 256};
  std::optional<std::size_t> tail_reps;
  std::size_t md_index_count = 32;
  std::optional<std::size_t> md_reps;
  std::vector<double> slope_q{1, 2};
  double slope_lo = 10.0;
  double slope_hi = 100.0;
  double slope_tolerance = 0.05;
};

std::optional<std::size_t> optional_reps(const Section& s) {
  if (!s.has("replications")) return std::nullopt;
  return static_cast<std::size_t>(s.integer("replications", std::nullopt, 2));
}

SuiteSettings parse_settings(const Section& root) {
  SuiteSettings st;
  if (root.has("checks")) {
    const Json& c = root.raw("checks");
    if (!c.is_array() || c.empty()) root.fail("checks", "expected a nonempty array of check names");
    st.checks.clear();
    for (const auto& e : c) {
      const std::string name = e.is_string() ? e.get<std::string>() : "";
      if (name != "osekowski" && name != "tail" && name != "martingale_property" && name != "weibull_slope") {
        root.fail("checks", "names must be among osekowski, tail, martingale_property, weibull_slope");
      }
      st.checks.insert(name);
    }
  }
  if (root.has("osekowski")) {
    const Section s = root.child("osekowski");
    s.allow_only({"p_grid", "n_grid", "targets", "replications"});
    st.p_grid = s.numbers("p_grid", st.p_grid);
    for (double p : st.p_grid) {
      if (!(p >= 2.0)) s.fail("p_grid", "every p must be at least 2");
    }
    std::sort(st.p_grid.begin(), st.p_grid.end());
    st.osekowski_n = s.counts("n_grid", st.osekowski_n);
    if (s.has("targets")) {
      st.targets.clear();
      for (const auto& t : s.raw("targets")) {
        if (!t.is_string() || (t != "point" && t != "pair")) s.fail("targets", "entries must be 'point' or 'pair'");
        st.targets.push_back(t.get<std::string>());
      }
      if (st.targets.empty()) s.fail("targets", "expected at least one target");
    }
    st.osekowski_reps = optional_reps(s);
  }
  if (root.has("tail")) {
    const Section s = root.child("tail");
    s.allow_only({"x", "n", "replications"});
    st.tail_x = s.numbers("x", st.tail_x);
    for (double x : st.tail_x) {
      if (!(x > 1.0)) s.fail("x", "every x must exceed 1");
    }
    st.tail_n = s.counts("n", st.tail_n);
    st.tail_reps = optional_reps(s);
  }
  if (root.has("martingale_property")) {
    const Section s = root.child("martingale_property");
    s.allow_only({"index_count", "replications"});
    st.md_index_count = static_cast<std::size_t>(s.integer("index_count", 32, 2));
    st.md_reps = optional_reps(s);
  }
  if (root.has("weibull_slope")) {
    const Section s = root.child("weibull_slope");
    s.allow_only({"q", "x_low", "x_high", "tolerance"});
    st.slope_q = s.numbers("q", st.slope_q);
    for (double q : st.slope_q) {
      if (!(q > 0.0)) s.fail("q", "every q must be positive");
    }
    st.slope_lo = s.positive("x_low", st.slope_lo);
    st.slope_hi = s.positive("x_high", st.slope_hi);
    if (!(st.slope_hi > st.slope_lo)) s.fail("x_high", "must exceed x_low");
    st.slope_tolerance = s.positive("tolerance", st.slope_tolerance);
  }
  return st;
}

void check_n_values(const Section& root, const std::vector<std::size_t>& n, const char* what) {
  for (std::size_t k = 1; k < n.size(); ++k) {
    if (n[k] <= n[k - 1]) root.fail(what, "n values must be strictly ascending");
  }
}

}  // namespace

int run_inequalities(const RunRequest& request, std::ostream& log) {
  RunContext ctx = open_run("inequalities", request, 10000);
  const Section root = ctx.root();
  root.allow_only({"seed", "replications", "out", "models", "checks", "osekowski", "tail",
                   "martingale_property", "weibull_slope"});
  const SuiteSettings st = parse_settings(root);
  check_n_values(root, st.osekowski_n, "osekowski");
  check_n_values(root, st.tail_n, "tail");

  std::vector<lab::MartingaleFieldModel> models;
  if (root.has("models")) {
    for (const auto& s : root.objects("models")) models.push_back(build_model(s, ctx.seed));
  } else {
    for (auto& spec : shipped_model_suite(ctx.seed)) models.emplace_back(std::move(spec));
  }
  std::set<std::string> names;
  for (const auto& m : models) {
    if (!names.insert(m.name()).second) root.fail("models", fmt::format("duplicate model name '{}'", m.name()));
  }

  bool all_passed = true;
  Json model_reports = Json::array();
  std::vector<std::string> osek_csv;
  std::vector<std::string> tail_csv;
  std::vector<std::string> bound_csv;
  std::vector<std::string> md_csv;

  for (const auto& model : models) {
    Json mj;
    mj["model"] = lab::to_json(model.spec());
    log << fmt::format("model '{}'\n", model.name());

    if (st.checks.count("osekowski")) {
      Json reports = Json::array();
      for (const auto& t : st.targets) {
        if (t == "pair" && model.point_count() < 2) continue;
        const lab::Target target = t == "point" ? lab::Target{0, std::nullopt}
                                                : lab::Target{0, model.point_count() - 1};
        const auto rep = lab::osekowski_check(model, target, st.p_grid, st.osekowski_n,
                                              st.osekowski_reps.value_or(ctx.replications), ctx.lab);
        all_passed = all_passed && rep.passed();
        log << fmt::format("  osekowski {}: {}\n", rep.target, rep.passed() ? "pass" : "FAIL");
        for (const auto& row : rep.rows) {
          osek_csv.push_back(fmt::format("{},{},{},{},{},{},{}", csv_field(model.name()), rep.target,
                                         csv_number(row.p), row.n, csv_number(row.ratio.value),
                                         csv_number(row.ratio.std_error),
                                         row.within_constant ? "true" : "false"));
        }
        reports.push_back(lab::to_json(rep));
      }
      mj["osekowski"] = reports;
    }

    if (st.checks.count("tail")) {
      if (const auto tail = model.dominating_tail()) {
        const auto rep = lab::tail_domination_check(model, *tail, st.tail_x, st.tail_n,
                                                    st.tail_reps.value_or(ctx.replications), 0, ctx.lab);
        all_passed = all_passed && rep.passed();
        log << fmt::format("  tail domination: {}\n", rep.passed() ? "pass" : "FAIL");
        for (const auto& row : rep.rows) {
          tail_csv.push_back(fmt::format("{},{},{},{},{},{},{},{}", csv_field(model.name()), row.n,
                                         csv_number(row.x), row.weights, csv_number(row.empirical),
                                         csv_number(row.std_error), csv_number(row.bound),
                                         row.dominated ? "true" : "false"));
        }
        for (double x : st.tail_x) {
          bound_csv.push_back(fmt::format("{},{},{},{}", csv_field(model.name()), csv_number(x),
                                          csv_number((*tail)(x)), csv_number(weighted_sum_tail_bound(*tail, x))));
        }
        mj["tail"] = lab::to_json(rep);
      } else {
        mj["tail"] = {{"skipped", "no uniform dominating tail for this model"}};
        log << "  tail domination: skipped (no uniform dominating tail)\n";
      }
    }

    if (st.checks.count("martingale_property")) {
      const std::size_t count = std::min(st.md_index_count, model.horizon());
      const auto rep = lab::martingale_property_check(model, count, st.md_reps.value_or(ctx.replications), ctx.lab);
      all_passed = all_passed && rep.passed();
      log << fmt::format("  martingale property: {}\n", rep.passed() ? "pass" : "FAIL");
      for (const auto& c : rep.conditions) {
        md_csv.push_back(fmt::format("{},{},{},{},{}", csv_field(model.name()), c.feature,
                                     csv_number(c.mean), csv_number(c.std_error), csv_number(c.t_stat)));
      }
      mj["martingale_property"] = lab::to_json(rep);
    }
    model_reports.push_back(mj);
  }

  Json slopes = Json::array();
  std::vector<std::string> slope_csv;
  if (st.checks.count("weibull_slope")) {
    for (double q : st.slope_q) {
      const auto tail = TailFunction::closed_weibull(1.0, q);
      const double slope = w_decay_slope(tail, st.slope_lo, st.slope_hi);
      const double target = weibull_sum_exponent(q);
      const bool ok = slope >= target - st.slope_tolerance;
      all_passed = all_passed && ok;
      log << fmt::format("weibull slope q = {}: {:.4f} vs {:.4f}: {}\n", q, slope, target, ok ? "pass" : "FAIL");
      slopes.push_back({{"q", q}, {"slope", slope}, {"exponent", target}, {"tolerance", st.slope_tolerance},
                        {"x_low", st.slope_lo}, {"x_high", st.slope_hi}, {"passed", ok}});
      slope_csv.push_back(fmt::format("{},{},{},{}", csv_number(q), csv_number(slope), csv_number(target),
                                      ok ? "true" : "false"));
    }
  }

  Json body;
  body["models"] = model_reports;
  body["weibull_slope"] = slopes;
  body["passed"] = all_passed;
  body["exit_code"] = all_passed ? kExitOk : kExitCheckFailed;
  ctx.write_json("inequalities.json", body);
  ctx.write_csv("osekowski.csv", "model,target,p,n,osekowski_ratio,std_error,within_constant", osek_csv);
  ctx.write_csv("tail_domination.csv", "model,n,x,weights,empirical,std_error,bound,dominated", tail_csv);
  ctx.write_csv("tail_bounds.csv", "model,x,tail,bound", bound_csv);
  ctx.write_csv("martingale_property.csv", "model,feature,mean,std_error,t_stat", md_csv);
  ctx.write_csv("weibull_slope.csv", "q,slope,exponent,passed", slope_csv);
  log << fmt::format("{}; reports written to {}\n", all_passed ? "all checks passed" : "some checks FAILED",
                     ctx.out.string());
  return all_passed ? kExitOk : kExitCheckFailed;
}

}  // namespace uclt::cli
