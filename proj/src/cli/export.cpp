#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "run_context.hpp"
#include "uclt/errors.hpp"
#include "uclt/tail.hpp"

namespace uclt::cli {

namespace {

std::optional<Json> read_report(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw MissingRun(fmt::format("{} is not a readable report: {}", path.string(), e.what()));
  }
}

std::string number_or_empty(const Json& j) { return j.is_number() ? csv_number(j.get<double>()) : ""; }

/// Data lines of a trace CSV (comments and header skipped), prefixed by `source`.
void append_trace(const std::filesystem::path& path, const std::string& source, std::vector<std::string>& rows) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(source + "," + line);
  }
}

void write_export(const std::filesystem::path& path, const std::string& preamble, const std::string& header,
                  const std::vector<std::string>& rows) {
  std::string text = preamble + header + "\n";
  for (const auto& r : rows) text += r + "\n";
  write_text_file(path, text);
}

}  // namespace

int run_export(const std::filesystem::path& run_dir, const std::optional<std::filesystem::path>& out,
               std::ostream& log) {
  if (!std::filesystem::is_directory(run_dir)) {
    throw MissingRun(fmt::format("run directory {} does not exist", run_dir.string()));
  }
  const auto theorem = read_report(run_dir / "check-theorem.json");
  const auto inequalities = read_report(run_dir / "inequalities.json");
  const auto covering = read_report(run_dir / "covering.json");
  if (!theorem && !inequalities && !covering) {
    throw MissingRun(fmt::format("{} holds no completed run report", run_dir.string()));
  }

  std::string preamble;
  for (const auto* r : {&theorem, &inequalities, &covering}) {
    if (!*r) continue;
    const Json& p = (**r).at("provenance");
    preamble += fmt::format("# source={} config_hash={} seed={} replications={}\n",
                            p.at("command").get<std::string>(), p.at("config_hash").get<std::string>(),
                            p.at("seed").get<std::uint64_t>(), p.at("replications").get<std::uint64_t>());
  }

  std::vector<std::string> entropy_rows;
  std::vector<std::string> tail_rows;
  std::vector<std::string> ks_rows;
  std::vector<std::string> osek_rows;

  if (theorem) {
    append_trace(run_dir / "power_level_trace.csv", "power-level", entropy_rows);
    append_trace(run_dir / "exponential_level_trace.csv", "exponential-level", entropy_rows);
    const std::string model = theorem->at("model").at("name").get<std::string>();
    for (const auto& r : theorem->at("tail").at("rows")) {
      tail_rows.push_back(fmt::format("{},{},{},{}", csv_field(model), number_or_empty(r.at("x")),
                                      number_or_empty(r.at("tail")), number_or_empty(r.at("bound"))));
    }
    const Json& clt = theorem->at("clt");
    ks_rows.push_back(fmt::format("{},{},{},{}", csv_field(model), clt.at("n_large").get<std::size_t>(),
                                  clt.at("n_small").get<std::size_t>(), number_or_empty(clt.at("ks_supnorm"))));
  }
  if (covering) append_trace(run_dir / "entropy_integral_trace.csv", "covering", entropy_rows);
  if (inequalities) {
    for (const auto& m : inequalities->at("models")) {
      const std::string model = m.at("model").at("name").get<std::string>();
      if (m.contains("osekowski")) {
        for (const auto& rep : m.at("osekowski")) {
          for (const auto& row : rep.at("rows")) {
            osek_rows.push_back(fmt::format("{},{},{},{},{},{}", csv_field(model), rep.at("target").get<std::string>(),
                                            number_or_empty(row.at("p")), row.at("n").get<std::size_t>(),
                                            number_or_empty(row.at("ratio").at("value")),
                                            number_or_empty(row.at("ratio").at("std_error"))));
          }
        }
      }
      if (m.contains("tail") && m.at("tail").contains("rows")) {
        const Json& tail = m.at("tail");
        std::set<double> seen;
        for (const auto& row : tail.at("rows")) {
          const double x = row.at("x").get<double>();
          if (!seen.insert(x).second) continue;
          const TailFunction t = tail_from_json(tail.at("tail"));
          tail_rows.push_back(fmt::format("{},{},{},{}", csv_field(model), csv_number(x), csv_number(t(x)),
                                          number_or_empty(row.at("bound"))));
        }
      }
    }
  }

  const std::filesystem::path dest = out ? *out : run_dir / "export";
  write_export(dest / "entropy_integrand.csv", preamble, "source,eps,H,integrand", entropy_rows);
  write_export(dest / "tail_bounds.csv", preamble, "model,x,tail,bound", tail_rows);
  write_export(dest / "ks.csv", preamble, "model,n,reference_n,ks", ks_rows);
  write_export(dest / "osekowski.csv", preamble, "model,target,p,n,osekowski_ratio,std_error", osek_rows);
  log << fmt::format("exported {} entropy, {} tail, {} KS and {} Osekowski rows to {}\n", entropy_rows.size(),
                     tail_rows.size(), ks_rows.size(), osek_rows.size(), dest.string());
  return kExitOk;
}

}  // namespace uclt::cli
