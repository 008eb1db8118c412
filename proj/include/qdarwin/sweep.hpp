#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qdarwin/redundancy.hpp"
#include "qdarwin/verify.hpp"

namespace qdarwin::sweep {

/// Experiment description, loaded from a JSON config file. Unknown keys are
/// rejected. Identical (config, seed) pairs produce byte-identical outputs.
struct ExperimentConfig {
  // Model template.
  int env_count = 6;
  double coupling = 1.0;
  double time = 0.7853981633974483;  // pi/4
  std::string env_kind = "plus";     // "plus" or "random"

  // Sweep axes.
  std::vector<double> times;
  std::vector<int> env_counts;
  std::vector<int> fragment_sizes;
  std::vector<double> deltas{0.1};
  int samples = 100;
  double angle_step_deg = 10.0;

  MeasurementSearchConfig search;
  verify::SuiteConfig suite;

  std::uint64_t seed = 7;
  std::string output_dir = "out";
  int threads = 1;
};

ExperimentConfig default_config();
ExperimentConfig load_config(const std::string& path);

/// Files produced by one scan, as (filename, content) pairs, plus soft-check
/// warnings. Callers write the files; content is already final.
struct ScanOutput {
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::string> warnings;
};

/// Decoherence-factor magnitudes across (N, t, sample) with linear and
/// Gaussian fit statistics.
ScanOutput run_decoherence_scan(const ExperimentConfig& config);

/// Fragment information versus fragment size, and pointer-angle selectivity
/// (Ihat_E(B), I(B:A), R_delta(B) against the angle to the pointer).
ScanOutput run_partial_info_scan(const ExperimentConfig& config);

/// R_delta across (N, t, delta); warns (soft check) if R is not monotone
/// non-decreasing in t over the first quarter period of the default model.
ScanOutput run_redundancy_scan(const ExperimentConfig& config);

/// Verification suite rendered as line-delimited JSON records plus a
/// human-readable summary. all_passed reflects non-skipped checks.
struct VerifyOutput {
  ScanOutput output;
  bool all_passed = true;
};

VerifyOutput run_verify(const ExperimentConfig& config);

/// Gnuplot scripts for every known table present in the directory.
ScanOutput emit_plots(const std::vector<std::string>& csv_names);

/// Writes scan files under the output directory, creating it if needed.
void write_output(const std::string& output_dir, const ScanOutput& output);

}  // namespace qdarwin::sweep
