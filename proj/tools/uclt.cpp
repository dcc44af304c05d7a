// Command-line front end: uclt {check-theorem|inequalities|covering|export}.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "uclt/cli/commands.hpp"
#include "uclt/errors.hpp"

namespace {

unsigned threads_from_env() {
  const char* env = std::getenv("UCLT_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0 || v > 1024) {
    throw uclt::ConfigError(std::string("UCLT_THREADS must be an integer in [1, 1024], got '") + env + "'");
  }
  return static_cast<unsigned>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy and moment checks for martingale-difference random fields"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "uclt 1.0.0");

  uclt::cli::RunRequest request;
  std::string config;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::string out;
  unsigned threads = 0;

  const auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--reps", reps, "override the replication count")->check(CLI::Range(2ul, 1000000000ul));
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker cap (falls back to UCLT_THREADS); never changes results")
        ->check(CLI::Range(1u, 1024u));
  };
  auto* check = app.add_subcommand("check-theorem", "check the weak-compactness hypotheses for a model");
  auto* ineq = app.add_subcommand("inequalities", "Monte Carlo inequality suite");
  auto* cover = app.add_subcommand("covering", "covering numbers and entropy of a finite metric space");
  for (auto* sub : {check, ineq, cover}) add_run_options(sub);

  auto* exp = app.add_subcommand("export", "consolidated CSVs from a completed run directory");
  std::string run_dir;
  exp->add_option("--run", run_dir, "run directory")->required();
  exp->add_option("--out", out, "export directory (default RUN/export)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : uclt::cli::kExitUsage;
  }

  try {
    if (exp->parsed()) {
      return uclt::cli::run_export(run_dir, out.empty() ? std::nullopt : std::optional<std::filesystem::path>(out),
                                   std::cout);
    }
    CLI::App* sub = check->parsed() ? check : (ineq->parsed() ? ineq : cover);
    request.config_path = config;
    if (sub->count("--seed") > 0) request.seed = seed;
    if (sub->count("--reps") > 0) request.replications = reps;
    if (!out.empty()) request.out = out;
    request.threads = sub->count("--threads") > 0 ? threads : threads_from_env();
    if (sub == check) return uclt::cli::run_check_theorem(request, std::cout);
    if (sub == ineq) return uclt::cli::run_inequalities(request, std::cout);
    return uclt::cli::run_covering(request, std::cout);
  } catch (const uclt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return uclt::cli::kExitUsage;
  } catch (const uclt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return uclt::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return uclt::cli::kExitUsage;
  }
}
