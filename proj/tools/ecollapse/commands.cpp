#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "ecollapse/analysis.hpp"
#include "ecollapse/ensemble.hpp"
#include "ecollapse/mutation.hpp"
#include "ecollapse/oracle.hpp"
#include "ecollapse/scenarios.hpp"
#include "ecollapse/stats_io.hpp"

namespace ecollapse::cli {

namespace fs = std::filesystem;

namespace {

Ini require_config(const CliConfig& cli) {
  if (!cli.config) throw ConfigError("--config", "this command needs a config file");
  return load_ini(*cli.config);
}

/// Opens every output file up front so an existing file is reported before
/// any work is done.
class OutputSet {
 public:
  OutputSet(const fs::path& dir, bool force) : dir_(dir), force_(force) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw ConfigError("--out", "cannot create directory " + dir_.string());
  }

  void claim(const std::string& name) {
    const fs::path path = dir_ / name;
    if (fs::exists(path) && !force_) {
      throw ConfigError("--out", path.string() + " exists; pass --force to overwrite");
    }
    names_.push_back(name);
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) const {
    const fs::path path = dir_ / name;
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError("--out", "cannot write " + path.string());
    body(file);
    if (!file) throw ConfigError("--out", "write failed for " + path.string());
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
  bool force_;
  std::vector<std::string> names_;
};

RunConfig run_config(const CliConfig& cli) {
  RunConfig cfg = parse_run_config(require_config(cli));
  if (cli.seed) cfg.base_seed = *cli.seed;
  return cfg;
}

using AnyStep = std::variant<DefaultStepRule, mutation::BiasedStep, mutation::FlippedSignStep>;

AnyStep step_rule(Mutation m) {
  switch (m) {
    case Mutation::BiasedStep: return mutation::BiasedStep{};
    case Mutation::FlippedSign: return mutation::FlippedSignStep{};
    case Mutation::None: break;
  }
  return DefaultStepRule{};
}

EnsembleStats run_with(const RunConfig& cfg, unsigned threads, const AnyStep& step) {
  return std::visit([&](const auto& rule) { return run_ensemble_with(cfg, threads, rule); }, step);
}

struct BatteryLine {
  std::string name;
  Verdict verdict;
  std::string detail;
  std::string record;
};

}  // namespace

int cmd_simulate(const CliConfig& cli, std::ostream& out) {
  const RunConfig cfg = run_config(cli);
  cfg.check_budget();
  OutputSet files(cli.out_dir, cli.force);
  const std::string data = cli.format == Format::Csv ? "ensemble.csv" : "ensemble.jsonl";
  files.claim(data);
  files.claim("summary.jsonl");

  const auto stats = run_ensemble(cfg, cli.threads);
  files.write(data, [&](std::ostream& f) {
    if (cli.format == Format::Csv) {
      write_stats_csv(f, stats);
    } else {
      write_stats_jsonl(f, stats);
    }
  });
  files.write("summary.jsonl", [&](std::ostream& f) {
    f << summary_record(stats) << '\n';
    const auto mart = martingale_test(stats);
    f << summary_record("martingale", mart) << '\n';
  });
  out << fmt::format("simulated {} trajectories x {} steps ({} branches observed)\n", cfg.trajectories, cfg.steps,
                     stats.branches);
  out << fmt::format("wrote {}\n", files.path(data).string());
  out << fmt::format("wrote {}\n", files.path("summary.jsonl").string());
  return kExitOk;
}

int cmd_oracle(const CliConfig& cli, std::ostream& out) {
  const RunConfig cfg = run_config(cli);
  OutputSet files(cli.out_dir, cli.force);
  const std::string data = cli.format == Format::Csv ? "oracle.csv" : "oracle.jsonl";
  files.claim(data);

  const auto exact = enumerate_exact(cfg.initial, cfg.steps, cfg.mode, cfg.spectrum, cfg.constants);
  const auto stats = to_stats(exact);
  files.write(data, [&](std::ostream& f) {
    if (cli.format == Format::Csv) {
      write_stats_csv(f, stats);
    } else {
      write_stats_jsonl(f, stats);
    }
  });
  out << fmt::format("enumerated {} nodes to depth {}\n", exact.nodes, exact.steps());
  out << fmt::format("wrote {}\n", files.path(data).string());
  return kExitOk;
}

int cmd_verify(const CliConfig& cli, std::ostream& out) {
  VerifyConfig vc = cli.config ? parse_verify_config(load_ini(*cli.config)) : VerifyConfig{};
  if (cli.seed) vc.seed = *cli.seed;
  const AnyStep step = step_rule(vc.mutation);
  const double zt = vc.z_threshold;
  std::vector<BatteryLine> lines;
  std::uint64_t seed = vc.seed;

  auto base = [&](std::vector<double> p, EvolveMode mode, std::uint64_t steps, std::uint64_t trajectories) {
    RunConfig cfg;
    cfg.initial = BranchDistribution(std::move(p));
    cfg.mode = mode;
    cfg.steps = steps;
    cfg.trajectories = trajectories;
    cfg.record_stride = std::max<std::uint64_t>(1, steps / 10);
    cfg.base_seed = seed++;
    return cfg;
  };

  // Exact enumeration against the closed forms, then Monte Carlo against
  // the enumeration.
  for (const auto& p : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.2, 0.3, 0.5}}) {
    for (double k : {0.1, 0.3}) {
      const std::string tag = fmt::format("{}level_k{}", p.size(), k);
      const BranchDistribution d(p);
      const auto exact = enumerate_exact(d, vc.oracle_steps, FixedK{k});
      double worst = 0.0;
      for (std::size_t n = 0; n <= exact.steps(); ++n) {
        const double decay = std::pow(1.0 - k * k, static_cast<double>(n));
        for (std::size_t i = 0; i < d.size(); ++i) {
          worst = std::max(worst, std::abs(exact.diagonal[n][i] - d[i]));
          for (std::size_t j = i + 1; j < d.size(); ++j) {
            worst = std::max(worst, std::abs(exact.cross_at(n, i, j) - d[i] * d[j] * decay));
          }
        }
      }
      const Verdict closed = worst <= 1e-12 ? Verdict::Pass : Verdict::Fail;
      lines.push_back({"oracle_closed_form_" + tag, closed, fmt::format("max_abs_err={:.3g}", worst),
                       nlohmann::json{{"record", "closed_form"},
                                      {"name", "oracle_closed_form_" + tag},
                                      {"verdict", to_string(closed)},
                                      {"max_abs_err", worst}}
                           .dump()});

      auto cfg = base(p, FixedK{k}, vc.oracle_steps, vc.trajectories);
      cfg.record_stride = 1;
      const auto cmp = oracle_compare(exact, run_with(cfg, cli.threads, step), zt);
      lines.push_back({"mc_vs_oracle_" + tag, cmp.verdict, fmt::format("max_z={:.3f}", cmp.max_z),
                       summary_record("mc_vs_oracle_" + tag, cmp)});
    }
  }

  {
    const auto stats = run_with(base({1.0 / 3, 1.0 / 3, 1.0 / 3}, FixedK{0.05}, vc.steps, vc.trajectories),
                                cli.threads, step);
    const auto r = martingale_test(stats, zt);
    lines.push_back({"martingale_fixed_k", r.verdict, fmt::format("max_z={:.3f} at step {}", r.max_z, r.worst_step),
                     summary_record("martingale_fixed_k", r)});
  }
  {
    auto cfg = base({1.0 / 3, 1.0 / 3, 1.0 / 3}, ModelK{}, vc.steps, vc.trajectories);
    cfg.spectrum = EnergySpectrum::from_planck({0.0, 0.02, 0.04});
    const auto r = martingale_test(run_with(cfg, cli.threads, step), zt);
    lines.push_back({"martingale_model_k", r.verdict, fmt::format("max_z={:.3f} at step {}", r.max_z, r.worst_step),
                     summary_record("martingale_model_k", r)});
  }
  {
    const double k = 0.1;
    const auto stats = run_with(base({0.5, 0.5}, FixedK{k}, vc.steps, vc.trajectories), cli.threads, step);
    const auto r = decay_fit_test(stats, 0, 1, k, 0.02, zt);
    lines.push_back({"cross_decay_fit", r.verdict,
                     fmt::format("rate={:.5f} expected={:.5f} intercept_z={:.3f}", r.fitted_rate, r.expected_rate,
                                 r.intercept_z),
                     summary_record("cross_decay_fit", r)});
  }
  {
    auto fine = base({0.1, 0.2, 0.3, 0.4}, FixedK{0.2}, vc.steps, vc.trajectories);
    fine.observe_groups = Partition{{0, 2}, {1, 3}};
    const auto coarse = base({0.4, 0.6}, FixedK{0.2}, vc.steps, vc.trajectories);
    const auto r = compare_ensembles(run_with(fine, cli.threads, step), run_with(coarse, cli.threads, step), zt);
    lines.push_back({"scale_invariance", r.verdict, fmt::format("max_z={:.3f}", r.max_z),
                     summary_record("scale_invariance", r)});
  }
  {
    auto cfg = base({0.3, 0.7}, FixedK{0.1}, 20000, vc.born_trajectories);
    cfg.record_stride = cfg.steps;
    const auto stats = run_with(cfg, cli.threads, step);
    auto r = born_statistics_test(stats, 0, 0.3);
    if (stats.unabsorbed > 0 && r.verdict == Verdict::Pass) r.verdict = Verdict::Insufficient;
    lines.push_back({"born_statistics", r.verdict,
                     fmt::format("fraction={:.4f} z={:.3f} unabsorbed={}", r.fraction, r.z, stats.unabsorbed),
                     summary_record("born_statistics", r)});
  }

  bool all_pass = true;
  for (const auto& line : lines) {
    out << fmt::format("{:<13} {:<28} {}\n", to_string(line.verdict), line.name, line.detail);
    all_pass = all_pass && line.verdict == Verdict::Pass;
  }
  out << (all_pass ? "verification passed\n" : "verification FAILED\n");

  if (cli.config || cli.out_dir != ".") {
    OutputSet files(cli.out_dir, cli.force);
    files.claim("verify.jsonl");
    files.write("verify.jsonl", [&](std::ostream& f) {
      for (const auto& line : lines) f << line.record << '\n';
    });
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_scenarios(const CliConfig& cli, std::ostream& out) {
  const PhysicalConstants pc = cli.config ? parse_constants(load_ini(*cli.config)) : PhysicalConstants{};
  const auto rows = reproduction_table(pc);
  OutputSet files(cli.out_dir, cli.force);
  const std::string data = cli.format == Format::Csv ? "scenarios.csv" : "scenarios.jsonl";
  files.claim(data);
  files.claim("scenarios.txt");
  files.write(data, [&](std::ostream& f) {
    if (cli.format == Format::Csv) {
      write_scenarios_csv(f, rows);
    } else {
      write_scenarios_jsonl(f, rows);
    }
  });
  files.write("scenarios.txt", [&](std::ostream& f) { write_scenarios_text(f, rows); });
  write_scenarios_text(out, rows);

  bool ok = true;
  for (const auto& row : rows) {
    if (!row.within_tolerance) {
      ok = false;
      out << fmt::format("out of tolerance: {}\n", row.name);
    }
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_report(const CliConfig& cli, std::ostream& out) {
  fs::path csv = cli.input.value_or(cli.out_dir);
  if (fs::is_directory(csv)) csv /= "ensemble.csv";
  std::ifstream in(csv);
  if (!in) throw ConfigError("input", "cannot open " + csv.string());
  EnsembleStats stats = read_stats_csv(in);

  const fs::path summary_path = csv.parent_path() / "summary.jsonl";
  if (std::ifstream summary(summary_path); summary) {
    std::string line;
    while (std::getline(summary, line)) {
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || j.value("record", "") != "ensemble") continue;
      stats.trajectories = j.value("trajectories", std::uint64_t{0});
      stats.absorbed = j.value("absorbed", std::vector<std::uint64_t>(stats.branches, 0));
      stats.unabsorbed = j.value("unabsorbed", std::uint64_t{0});
      if (stats.absorbed.size() != stats.branches) throw ConfigError("summary", "absorption counts do not match");
    }
  }

  out << fmt::format("{}: {} branches, {} recorded steps (last {}), {} trajectories\n", csv.string(),
                     stats.branches, stats.records(), stats.records() ? stats.steps.back() : 0,
                     stats.trajectories);
  if (stats.records() == 0) return kExitOk;
  for (std::size_t i = 0; i < stats.branches; ++i) {
    const auto& first = stats.diagonal.front()[i];
    const auto& last = stats.diagonal.back()[i];
    out << fmt::format("  E[P{}]  {:.6f} -> {:.6f} +- {:.2g}", i, first.mean, last.mean, last.std_error);
    if (stats.trajectories > 0) {
      out << fmt::format("   absorbed {}/{}", stats.absorbed[i], stats.trajectories);
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < stats.branches; ++i) {
    for (std::size_t j = i + 1; j < stats.branches; ++j) {
      if (!(stats.cross_at(0, i, j).mean > 0.0)) continue;
      const auto half = estimate_half_decay(stats, i, j);
      out << fmt::format("  E[P{}P{}] half-decay: {}\n", i, j,
                         half ? fmt::format("{:.2f} steps", *half) : std::string("not yet collapsed"));
    }
  }
  const auto mart = martingale_test(stats);
  out << fmt::format("  martingale: {} (max_z={:.3f})\n", to_string(mart.verdict), mart.max_z);
  return mart.verdict == Verdict::Fail ? kExitCheckFailed : kExitOk;
}

}  // namespace ecollapse::cli
