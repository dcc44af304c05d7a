#include "run_context.hpp"

#include <fmt/format.h>

#include "uclt/errors.hpp"

namespace uclt::cli {

Json RunContext::provenance() const {
  Json p;
  p["command"] = command;
  p["config_hash"] = hash;
  p["seed"] = seed;
  p["replications"] = replications;
  p["blocks"] = lab.blocks;
  return p;
}

std::string RunContext::csv_preamble() const {
  return fmt::format("# config_hash={} seed={} replications={} command={}\n", hash, seed,
                     replications, command);
}

void RunContext::write_json(const std::string& file, const Json& body) const {
  Json doc;
  doc["provenance"] = provenance();
  for (const auto& [k, v] : body.items()) doc[k] = v;
  write_text_file(out / file, doc.dump(2) + "\n");
}

void RunContext::write_csv(const std::string& file, const std::string& header,
                           const std::vector<std::string>& rows) const {
  std::string text = csv_preamble() + header + "\n";
  for (const auto& r : rows) text += r + "\n";
  write_text_file(out / file, text);
}

std::filesystem::path RunContext::resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  return p.is_absolute() ? p : config_dir / p;
}

RunContext open_run(const std::string& command, const RunRequest& request,
                    std::size_t default_replications) {
  RunContext ctx{command, ConfigDocument::load(request.config_path), {}, {}, 0, 0, {}, {}, {}};
  ctx.config_dir = request.config_path.parent_path();
  const Section root = ctx.root();
  ctx.seed = request.seed ? *request.seed : root.unsigned_integer("seed", 1);
  ctx.replications = request.replications
                         ? *request.replications
                         : static_cast<std::size_t>(root.integer("replications",
                                                                 static_cast<std::int64_t>(default_replications), 2));
  if (ctx.replications < 2) throw ConfigError("replications must be at least 2", 0);
  if (request.out) {
    ctx.out = *request.out;
  } else if (root.has("out")) {
    ctx.out = ctx.resolve(root.string("out"));
  } else {
    ctx.out = std::filesystem::path("runs") / command;
  }
  ctx.effective = ctx.doc.root();
  ctx.effective.erase("out");
  ctx.effective["seed"] = ctx.seed;
  ctx.effective["replications"] = ctx.replications;
  ctx.hash = config_hash(ctx.effective);
  ctx.lab.threads = request.threads;
  return ctx;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double x) { return format_double(x); }

}  // namespace uclt::cli
