#include <cmath>

#include <fmt/format.h>

#include "run_context.hpp"
#include "uclt/entropy_integrals.hpp"
#include "uclt/errors.hpp"
#include "uclt/metric_space.hpp"

namespace uclt::cli {

namespace {

FiniteMetricSpace load_space(const RunContext& ctx, const Section& s) {
  s.allow_only({"distance_csv", "coordinates_csv", "grid", "metric"});
  const int sources = static_cast<int>(s.has("distance_csv")) + static_cast<int>(s.has("coordinates_csv")) +
                      static_cast<int>(s.has("grid"));
  if (sources != 1) s.fail("distance_csv", "exactly one of distance_csv, coordinates_csv, grid is required");
  const CoordinateMetric metric = s.has("metric") ? parse_metric(s.child("metric")) : CoordinateMetric{};
  try {
    if (s.has("distance_csv")) {
      if (s.has("metric")) s.fail("metric", "not used with distance_csv");
      return load_distance_csv(ctx.resolve(s.string("distance_csv")));
    }
    if (s.has("coordinates_csv")) return load_coordinate_csv(ctx.resolve(s.string("coordinates_csv")), metric);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    s.fail(s.has("distance_csv") ? "distance_csv" : "coordinates_csv", e.what());
  }
  const Section g = s.child("grid");
  g.allow_only({"count", "low", "high"});
  const auto n = static_cast<std::size_t>(g.integer("count", std::nullopt, 1));
  const double low = g.number("low", 0.0);
  const double high = g.number("high", 1.0);
  if (!(high >= low)) g.fail("high", "must be at least 'low'");
  return uniform_grid(n, low, high, metric);
}

}  // namespace

int run_covering(const RunRequest& request, std::ostream& log) {
  RunContext ctx = open_run("covering", request, 2);
  const Section root = ctx.root();
  root.allow_only({"seed", "replications", "out", "space", "mode", "nodes", "eps", "psi", "quadrature"});
  const FiniteMetricSpace space = load_space(ctx, root.child("space"));
  const std::string mode_name = root.choice("mode", {"greedy", "exact"}, std::string("greedy"));
  const CoveringMode mode = mode_name == "exact" ? CoveringMode::Exact : CoveringMode::Greedy;
  const auto nodes = static_cast<std::size_t>(root.integer("nodes", 40, 2));
  std::optional<PsiFunction> psi;
  if (root.has("psi")) {
    try {
      psi = psi_from_json(root.raw("psi"));
    } catch (const Error& e) {
      root.fail("psi", e.what());
    } catch (const nlohmann::json::exception& e) {
      root.fail("psi", e.what());
    }
  }
  QuadratureOptions quad;
  if (root.has("quadrature")) {
    const Section q = root.child("quadrature");
    q.allow_only({"nodes"});
    quad.nodes = static_cast<std::size_t>(q.integer("nodes", 400, 16));
  }

  const double d = diameter(space);
  std::vector<double> eps_list;
  if (root.has("eps")) {
    eps_list = root.numbers("eps");
    for (double e : eps_list) {
      if (!(e > 0.0)) root.fail("eps", "every radius must be positive");
    }
  } else if (d > 0.0) {
    eps_list = measure_profile(space, CoveringMode::Greedy, nodes).eps_grid();
  }

  std::vector<std::string> rows;
  Json table = Json::array();
  for (double e : eps_list) {
    std::size_t n = 0;
    try {
      n = mode == CoveringMode::Exact ? covering_number_exact(space, e) : covering_number_greedy(space, e);
    } catch (const TooLarge& ex) {
      root.fail("mode", ex.what());
    }
    const double h = std::log(static_cast<double>(n));
    rows.push_back(fmt::format("{},{},{}", csv_number(e), n, csv_number(h)));
    table.push_back({{"eps", e}, {"N", n}, {"H", h}});
  }

  Json body;
  body["points"] = space.size();
  body["diameter"] = d;
  body["triangle_violations"] = space.triangle_violations();
  body["mode"] = mode_name;
  body["covering"] = table;
  int exit_code = kExitOk;
  if (psi) {
    if (d > 0.0) {
      const EntropyProfile profile = measure_profile(space, mode, nodes);
      const IntegralReport integral = entropy_integral(profile, *psi, quad);
      body["psi"] = to_json(*psi);
      body["entropy_integral"] = to_json(integral);
      std::vector<std::string> trace;
      for (const auto& r : integral.trace) {
        trace.push_back(fmt::format("{},{},{}", csv_number(r.eps), csv_number(r.h), csv_number(r.integrand)));
      }
      ctx.write_csv("entropy_integral_trace.csv", "eps,H,integrand", trace);
    } else {
      body["entropy_integral"] = {{"value", 0.0}, {"finiteness", to_string(Finiteness::Finite)}};
    }
  }
  body["exit_code"] = exit_code;
  ctx.write_json("covering.json", body);
  ctx.write_csv("covering.csv", "eps,N,H", rows);
  log << fmt::format("covering: {} points, diameter {}, {} radii; reports written to {}\n", space.size(),
                     format_double(d), eps_list.size(), ctx.out.string());
  return exit_code;
}

}  // namespace uclt::cli
