// Experiment runner for the quantum-Darwinism laboratory: parameter scans,
// the verification suite, and plot-script generation.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "qdarwin/errors.hpp"
#include "qdarwin/sweep.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON experiment config");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "random seed override");
  cmd->add_option("--threads", flags.threads, "worker thread count");
}

qdarwin::sweep::ExperimentConfig resolve(const CommonFlags& flags) {
  qdarwin::sweep::ExperimentConfig config =
      flags.config_path.empty() ? qdarwin::sweep::default_config()
                                : qdarwin::sweep::load_config(flags.config_path);
  if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
  if (flags.threads > 0) config.threads = flags.threads;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-Darwinism numerical laboratory"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* scan_decoherence = app.add_subcommand(
      "scan-decoherence", "decoherence-factor decay across (N, t)");
  auto* scan_partial = app.add_subcommand(
      "scan-partial-info", "fragment information and pointer-angle selectivity");
  auto* scan_redundancy =
      app.add_subcommand("scan-redundancy", "redundancy across (N, t, delta)");
  auto* verify_cmd =
      app.add_subcommand("verify", "run the verification suite");
  auto* plot_cmd =
      app.add_subcommand("plot", "emit gnuplot scripts for existing tables");
  for (auto* cmd :
       {scan_decoherence, scan_partial, scan_redundancy, verify_cmd, plot_cmd})
    add_common(cmd, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const qdarwin::sweep::ExperimentConfig config = resolve(flags);

    if (scan_decoherence->parsed() || scan_partial->parsed() ||
        scan_redundancy->parsed()) {
      qdarwin::sweep::ScanOutput output;
      if (scan_decoherence->parsed())
        output = qdarwin::sweep::run_decoherence_scan(config);
      else if (scan_partial->parsed())
        output = qdarwin::sweep::run_partial_info_scan(config);
      else
        output = qdarwin::sweep::run_redundancy_scan(config);
      qdarwin::sweep::write_output(config.output_dir, output);
      for (const auto& warning : output.warnings)
        std::cerr << "warning: " << warning << '\n';
      for (const auto& [name, content] : output.files)
        std::cout << config.output_dir << '/' << name << '\n';
      return 0;
    }

    if (verify_cmd->parsed()) {
      const qdarwin::sweep::VerifyOutput verdict =
          qdarwin::sweep::run_verify(config);
      qdarwin::sweep::write_output(config.output_dir, verdict.output);
      for (const auto& [name, content] : verdict.output.files)
        std::cout << config.output_dir << '/' << name << '\n';
      if (!verdict.all_passed) {
        std::cerr << "verification suite reported failures\n";
        return 1;
      }
      return 0;
    }

    // plot: scripts for whichever tables already exist in the directory.
    std::vector<std::string> present;
    for (const char* name : {"decoherence.csv", "partial_info.csv",
                             "pointer_angles.csv", "redundancy.csv"})
      if (std::filesystem::exists(
              std::filesystem::path(config.output_dir) / name))
        present.push_back(name);
    const qdarwin::sweep::ScanOutput scripts = qdarwin::sweep::emit_plots(present);
    qdarwin::sweep::write_output(config.output_dir, scripts);
    for (const auto& [name, content] : scripts.files)
      std::cout << config.output_dir << '/' << name << '\n';
    return 0;
  } catch (const qdarwin::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
