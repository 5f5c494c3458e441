#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "degenwave/harness.hpp"

namespace dh = degenwave::harness;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::size_t workers = 0;
  std::string snapshot_times;
};

dh::ExperimentConfig prepare(const Options& opt) {
  dh::ExperimentConfig cfg = dh::load_config(opt.config);
  if (!opt.out.empty()) cfg.out_dir = opt.out;
  if (const char* env = std::getenv("DEGENWAVE_OUT"); env && *env) cfg.out_dir = env;
  if (opt.workers > 0) cfg.workers = opt.workers;
  if (!opt.snapshot_times.empty()) cfg.snapshot_times = dh::parse_double_list(opt.snapshot_times, "--snapshot-times");
  dh::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous solver and verification harness for v_tt = c (v^s)_xx"};
  app.require_subcommand(1, 1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment config (key = value with [sections])")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (DEGENWAVE_OUT overrides)");
    sub->add_option("--workers", opt.workers, "concurrent sweep members")->check(CLI::PositiveNumber);
    sub->add_option("--snapshot-times", opt.snapshot_times, "comma-separated snapshot times");
  };
  auto* run = app.add_subcommand("run", "single simulation with monitors");
  auto* threshold = app.add_subcommand("threshold", "existence/nonexistence classification sweep");
  auto* converge = app.add_subcommand("converge", "delta -> 0 convergence sweep");
  auto* entropy = app.add_subcommand("entropy", "entropy pair residuals and d0 oracle");
  for (auto* sub : {run, threshold, converge, entropy}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dh::kExitUsage;
  }

  try {
    const dh::ExperimentConfig cfg = prepare(opt);
    int code = dh::kExitOk;
    if (run->parsed()) code = dh::cmd_run(cfg);
    else if (threshold->parsed()) code = dh::cmd_threshold(cfg);
    else if (converge->parsed()) code = dh::cmd_converge(cfg);
    else code = dh::cmd_entropy(cfg);
    if (code == dh::kExitMonitor) std::cerr << "degenwave: a hard check failed; see " << cfg.out_dir << "/summary.txt\n";
    return code;
  } catch (const degenwave::ParameterError& e) {
    std::cerr << "degenwave: " << e.what() << "\n";
    return dh::kExitUsage;
  } catch (const degenwave::IoError& e) {
    std::cerr << "degenwave: " << e.what() << "\n";
    return dh::kExitUsage;
  } catch (const degenwave::DomainError& e) {
    std::cerr << "degenwave: " << e.what() << "\n";
    return dh::kExitUsage;
  } catch (const degenwave::BlowUpError& e) {
    std::cerr << "degenwave: numerical blow-up: " << e.what() << "\n";
    return dh::kExitMonitor;
  } catch (const std::exception& e) {
    std::cerr << "degenwave: " << e.what() << "\n";
    return dh::kExitUsage;
  }
}
