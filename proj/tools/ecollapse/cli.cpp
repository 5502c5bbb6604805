#include "cli.hpp"

#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ecollapse/errors.hpp"

namespace ecollapse::cli {

namespace {

unsigned default_threads(std::ostream& err) {
  const char* env = std::getenv("ECOLLAPSE_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(env, &used);
    if (used == std::string(env).size()) return static_cast<unsigned>(v);
  } catch (const std::exception&) {
  }
  err << "warning: ignoring malformed ECOLLAPSE_THREADS='" << env << "'\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete energy-conserving collapse: ensembles, exact oracle, case studies", "ecollapse"};
  app.require_subcommand(1);
  app.fallthrough();

  CliConfig cli;
  cli.threads = default_threads(err);
  std::string config, out_dir = ".", format = "csv", input;
  std::uint64_t seed = 0;

  app.add_option("--config", config, "Configuration file (key = value with [sections])");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Override the configured base seed");
  app.add_option("--threads", cli.threads, "Worker threads, 0 for all cores (default from ECOLLAPSE_THREADS)");
  app.add_option("--format", format, "Data file format")
      ->check(CLI::IsMember({"csv", "structured-text"}))
      ->capture_default_str();
  app.add_flag("--force", cli.force, "Overwrite existing output files");

  app.add_subcommand("simulate", "Run a Monte Carlo ensemble and write moment statistics");
  app.add_subcommand("verify", "Run the statistical property battery");
  app.add_subcommand("oracle", "Enumerate the exact event tree of a small instance");
  app.add_subcommand("scenarios", "Evaluate the physical case-study table");
  auto* report = app.add_subcommand("report", "Summarize a previously written ensemble CSV");
  report->add_option("input", input, "Ensemble CSV or the directory holding it (default: --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  cli.command = app.get_subcommands().front()->get_name();
  if (!config.empty()) cli.config = config;
  cli.out_dir = out_dir;
  if (*seed_opt) cli.seed = seed;
  cli.format = format == "csv" ? Format::Csv : Format::StructuredText;
  if (!input.empty()) cli.input = input;

  try {
    if (cli.command == "simulate") return cmd_simulate(cli, out);
    if (cli.command == "verify") return cmd_verify(cli, out);
    if (cli.command == "oracle") return cmd_oracle(cli, out);
    if (cli.command == "scenarios") return cmd_scenarios(cli, out);
    return cmd_report(cli, out);
  } catch (const ResourceError& e) {
    err << "error: resource budget exceeded: " << e.what() << '\n';
    return kExitBudgetError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace ecollapse::cli
