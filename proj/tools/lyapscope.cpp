// lyapscope: config-driven experiment runner for the surface-dynamics
// toolkit. One subcommand per experiment; artifacts are CSV/JSON (plus SVG
// summaries) written to the output directory together with a run manifest.
//
// Exit codes: 0 success, 2 config error, 3 numeric failure.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "lyapscope/runner.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::int64_t seed = -1;
  int workers = 0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "override the config RNG seed");
  cmd->add_option("--workers", flags.workers, "cap sweep-cell concurrency");
  cmd->add_option("--out", flags.out, "override the output directory");
}

int run_experiment(const std::string& expected, const CommonFlags& flags) {
  lyap::ExperimentConfig cfg = lyap::ExperimentConfig::load(flags.config_path);
  if (cfg.experiment != expected)
    throw lyap::ConfigError("config declares experiment '" + cfg.experiment +
                            "' but the subcommand is '" + expected + "'");
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.workers > 0) cfg.workers = flags.workers;
  if (!flags.out.empty()) cfg.out_dir = flags.out;
  const lyap::RunManifest manifest = lyap::run(cfg);
  std::cout << "wrote " << cfg.out_dir.string() << " (config " << manifest.config_hash << ", "
            << lyap::fmt_double(manifest.wall_ms) << " ms)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lyapscope: exponents, entropy brackets, neutral blocks, and curve growth for "
               "surface diffeomorphisms and shifts"};
  app.require_subcommand(1);

  const std::vector<std::string> experiments = {
      "exponents", "entropy", "neutral", "shift-example1", "curve-growth",
      "sweep-identity-check"};
  std::map<std::string, CommonFlags> flags;
  for (const auto& name : experiments) {
    auto* cmd = app.add_subcommand(name, "run the '" + name + "' experiment");
    add_common(cmd, flags[name]);
  }

  std::string report_dir;
  auto* rep = app.add_subcommand("report", "summarize a finished run");
  rep->add_option("--run", report_dir, "run directory containing manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& name : experiments)
      if (app.got_subcommand(name)) return run_experiment(name, flags[name]);
    if (app.got_subcommand("report")) {
      const auto result = lyap::report(report_dir);
      std::cout << result.text;
      return 0;
    }
  } catch (const lyap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lyap::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lyap::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
