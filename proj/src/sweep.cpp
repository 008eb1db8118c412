#include "qdarwin/sweep.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "qdarwin/errors.hpp"
#include "qdarwin/tolerances.hpp"
#include "qdarwin/util.hpp"

namespace qdarwin::sweep {

namespace {

using json = nlohmann::json;

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ += ',';
      out_ += header[i];
    }
    out_ += '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ += ',';
      out_ += format_number(values[i]);
    }
    out_ += '\n';
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& context) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + context);
}

ModelConfig build_model(const ExperimentConfig& config, int env_count,
                        double time, std::uint64_t sample_seed) {
  ModelConfig model =
      ModelConfig::dephasing_default(env_count, config.coupling, time);
  if (config.env_kind == "random") {
    // Draw order: environment states for subsystems 1..N.
    Rng rng(sample_seed);
    for (int k = 0; k < env_count; ++k)
      model.env_initial_states[k] = rng.unit_vector(2);
  }
  return model;
}

Observable pointer_for(const BranchDecomposition& branches) {
  const int d_s = branches.system_dimension();
  std::vector<Eigen::MatrixXcd> projectors;
  for (int i = 0; i < d_s; ++i) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d_s, d_s);
    p(i, i) = 1.0;
    projectors.push_back(std::move(p));
  }
  return Observable(branches.system_space(), {0}, std::move(projectors),
                    branches.eigenvalues());
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& err) {
    throw ConfigError(std::string("malformed config: ") + err.what());
  }

  ExperimentConfig config;
  require_keys(j, {"model", "sweep", "search", "suite", "seed", "output_dir",
                   "threads"},
               "top level");

  if (j.contains("model")) {
    const json& m = j["model"];
    require_keys(m, {"env_count", "coupling", "time", "env"}, "model");
    if (m.contains("env_count")) config.env_count = m["env_count"].get<int>();
    if (m.contains("coupling")) config.coupling = m["coupling"].get<double>();
    if (m.contains("time")) config.time = m["time"].get<double>();
    if (m.contains("env")) {
      config.env_kind = m["env"].get<std::string>();
      if (config.env_kind != "plus" && config.env_kind != "random")
        throw ConfigError("model.env must be 'plus' or 'random'");
    }
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    require_keys(s,
                 {"times", "env_counts", "fragment_sizes", "deltas", "samples",
                  "angle_step_deg"},
                 "sweep");
    if (s.contains("times")) config.times = s["times"].get<std::vector<double>>();
    if (s.contains("env_counts"))
      config.env_counts = s["env_counts"].get<std::vector<int>>();
    if (s.contains("fragment_sizes"))
      config.fragment_sizes = s["fragment_sizes"].get<std::vector<int>>();
    if (s.contains("deltas")) config.deltas = s["deltas"].get<std::vector<double>>();
    if (s.contains("samples")) config.samples = s["samples"].get<int>();
    if (s.contains("angle_step_deg"))
      config.angle_step_deg = s["angle_step_deg"].get<double>();
    if (config.deltas.empty() || config.samples < 1)
      throw ConfigError("sweep lists must be nonempty");
  }
  if (j.contains("search")) {
    const json& s = j["search"];
    require_keys(s, {"strategy", "restarts", "tolerance", "max_iterations"},
                 "search");
    if (s.contains("strategy")) {
      const std::string name = s["strategy"].get<std::string>();
      if (name == "branch-optimal")
        config.search.strategy = SearchStrategy::kBranchOptimal;
      else if (name == "parametrized-search")
        config.search.strategy = SearchStrategy::kParametrizedSearch;
      else if (name == "exhaustive-small")
        config.search.strategy = SearchStrategy::kExhaustiveSmall;
      else
        throw ConfigError("unknown search strategy: " + name);
    }
    if (s.contains("restarts")) config.search.restarts = s["restarts"].get<int>();
    if (s.contains("tolerance"))
      config.search.tolerance = s["tolerance"].get<double>();
    if (s.contains("max_iterations"))
      config.search.max_iterations = s["max_iterations"].get<int>();
    if (config.search.restarts < 1 || config.search.tolerance <= 0.0)
      throw ConfigError("search requires restarts >= 1 and tolerance > 0");
  }
  if (j.contains("suite")) {
    const json& s = j["suite"];
    require_keys(s, {"env_counts", "times", "random_draws"}, "suite");
    if (s.contains("env_counts"))
      config.suite.env_counts = s["env_counts"].get<std::vector<int>>();
    if (s.contains("times"))
      config.suite.times = s["times"].get<std::vector<double>>();
    if (s.contains("random_draws"))
      config.suite.random_draws = s["random_draws"].get<int>();
  }
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir"))
    config.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("threads")) config.threads = j["threads"].get<int>();
  return config;
}

ScanOutput run_decoherence_scan(const ExperimentConfig& config) {
  const std::vector<int> env_counts =
      config.env_counts.empty() ? std::vector<int>{config.env_count}
                                : config.env_counts;
  const std::vector<double> times =
      config.times.empty() ? std::vector<double>{config.time} : config.times;
  const int samples = config.env_kind == "random" ? config.samples : 1;

  struct Point {
    int n;
    double t;
    int sample;
  };
  std::vector<Point> points;
  for (int n : env_counts)
    for (double t : times)
      for (int sample = 0; sample < samples; ++sample)
        points.push_back({n, t, sample});

  std::vector<double> magnitudes(points.size());
  parallel_for(static_cast<std::int64_t>(points.size()), config.threads,
               [&](std::int64_t i) {
                 const Point& p = points[i];
                 const ModelConfig model = build_model(
                     config, p.n, p.t,
                     derive_seed(config.seed, static_cast<std::uint64_t>(
                                                  p.sample * 1009 + p.n)));
                 const BranchDecomposition branches = evolve(model);
                 const DecoherenceFactors whole = decoherence_factors(
                     branches, branches.whole_environment());
                 magnitudes[i] = std::abs(whole.gamma(0, 1));
               });

  CsvBuilder table({"env_count", "time", "sample", "abs_gamma_01",
                    "log_abs_gamma_01"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double magnitude = magnitudes[i];
    const double log_mag =
        magnitude > 0.0 ? std::log(magnitude) : -std::numeric_limits<double>::infinity();
    table.row({static_cast<double>(points[i].n), points[i].t,
               static_cast<double>(points[i].sample), magnitude, log_mag});
  }

  // Fit statistics: mean log-magnitude linear in N (at each time) and linear
  // in t^2 (Gaussian short-time decay, at each N).
  CsvBuilder fits({"kind", "fixed_value", "slope", "intercept", "r_squared",
                   "points"});
  auto mean_log = [&](auto&& predicate) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (predicate(points[i]) && std::isfinite(std::log(magnitudes[i]))) {
        sum += std::log(magnitudes[i]);
        ++count;
      }
    return count ? sum / count : 0.0;
  };
  for (double t : times) {
    if (t <= 0.0) continue;
    std::vector<double> xs, ys;
    for (int n : env_counts) {
      xs.push_back(n);
      ys.push_back(mean_log([&](const Point& p) { return p.n == n && p.t == t; }));
    }
    if (xs.size() >= 2) {
      const LinearFit fit = linear_fit(xs, ys);
      fits.row({0.0, t, fit.slope, fit.intercept, fit.r_squared,
                static_cast<double>(xs.size())});
    }
  }
  for (int n : env_counts) {
    std::vector<double> xs, ys;
    for (double t : times) {
      if (t <= 0.0) continue;
      xs.push_back(t * t);
      ys.push_back(mean_log([&](const Point& p) { return p.n == n && p.t == t; }));
    }
    if (xs.size() >= 2) {
      const LinearFit fit = linear_fit(xs, ys);
      fits.row({1.0, static_cast<double>(n), fit.slope, fit.intercept,
                fit.r_squared, static_cast<double>(xs.size())});
    }
  }

  ScanOutput out;
  out.files.emplace_back("decoherence.csv", table.take());
  out.files.emplace_back("decoherence_fits.csv", fits.take());
  return out;
}

ScanOutput run_partial_info_scan(const ExperimentConfig& config) {
  const ModelConfig model = build_model(config, config.env_count, config.time,
                                        derive_seed(config.seed, 0));
  const BranchDecomposition branches = evolve(model);
  const Observable pointer = pointer_for(branches);
  const DensityOperator rho_s = reduced_state_s(branches);
  const double h_pointer = shannon_entropy(born_probabilities(rho_s, pointer));

  std::vector<int> sizes = config.fragment_sizes;
  if (sizes.empty())
    for (int m = 1; m <= config.env_count; ++m) sizes.push_back(m);

  CsvBuilder info_table(
      {"env_count", "time", "fragment_size", "i_hat_fragment", "h_pointer"});
  for (int m : sizes) {
    std::vector<int> members;
    for (int k = 1; k <= m; ++k) members.push_back(k);
    const double value =
        branch_info_value(branches, pointer, FragmentSpec::of(members));
    info_table.row({static_cast<double>(config.env_count), config.time,
                    static_cast<double>(m), value, h_pointer});
  }

  const int angle_count =
      static_cast<int>(std::floor(180.0 / config.angle_step_deg)) + 1;
  std::vector<std::array<double, 4>> angle_rows(angle_count);
  parallel_for(angle_count, config.threads, [&](std::int64_t i) {
    const double theta_deg = static_cast<double>(i) * config.angle_step_deg;
    const double theta = theta_deg * M_PI / 180.0;
    const Observable candidate =
        Observable::bloch(branches.system_space(), 0, theta, 0.0);
    const double i_hat_env = branch_info_value(
        branches, candidate, branches.whole_environment());
    const double info_via_pointer =
        mutual_information(rho_s, candidate, pointer).mutual;
    const RedundancyReport report =
        redundancy(branches, candidate, config.deltas.front(), config.search);
    angle_rows[i] = {theta_deg, i_hat_env, info_via_pointer,
                     static_cast<double>(report.r_delta)};
  });

  CsvBuilder angle_table(
      {"theta_deg", "i_hat_env", "info_via_pointer", "r_delta"});
  for (const auto& row : angle_rows)
    angle_table.row({row[0], row[1], row[2], row[3]});

  ScanOutput out;
  out.files.emplace_back("partial_info.csv", info_table.take());
  out.files.emplace_back("pointer_angles.csv", angle_table.take());
  return out;
}

ScanOutput run_redundancy_scan(const ExperimentConfig& config) {
  const std::vector<int> env_counts =
      config.env_counts.empty() ? std::vector<int>{config.env_count}
                                : config.env_counts;
  const std::vector<double> times =
      config.times.empty() ? std::vector<double>{config.time} : config.times;

  struct Point {
    int n;
    double t;
    double delta;
  };
  std::vector<Point> points;
  for (int n : env_counts)
    for (double t : times)
      for (double delta : config.deltas) points.push_back({n, t, delta});

  struct Row {
    double r_delta;
    double i_hat_full;
  };
  std::vector<Row> rows(points.size());
  parallel_for(static_cast<std::int64_t>(points.size()), config.threads,
               [&](std::int64_t i) {
                 const Point& p = points[i];
                 const ModelConfig model = build_model(
                     config, p.n, p.t, derive_seed(config.seed, p.n));
                 const BranchDecomposition branches = evolve(model);
                 const RedundancyReport report = redundancy(
                     branches, pointer_for(branches), p.delta, config.search);
                 rows[i] = {static_cast<double>(report.r_delta),
                            report.i_hat_full};
               });

  CsvBuilder table({"env_count", "time", "delta", "r_delta", "i_hat_full"});
  for (std::size_t i = 0; i < points.size(); ++i)
    table.row({static_cast<double>(points[i].n), points[i].t, points[i].delta,
               rows[i].r_delta, rows[i].i_hat_full});

  ScanOutput out;
  out.files.emplace_back("redundancy.csv", table.take());

  // Soft check: in the default model R_delta should not decrease with time
  // over the first quarter period.
  if (config.env_kind == "plus") {
    const double quarter = M_PI / (4.0 * config.coupling);
    for (int n : env_counts)
      for (double delta : config.deltas) {
        double previous = -1.0;
        double previous_t = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
          const Point& p = points[i];
          if (p.n != n || p.delta != delta || p.t > quarter + 1e-12) continue;
          if (previous >= 0.0 && rows[i].r_delta < previous)
            out.warnings.push_back(
                "redundancy not monotone for N=" + std::to_string(n) +
                " delta=" + format_number(delta) + " between t=" +
                format_number(previous_t) + " and t=" + format_number(p.t));
          previous = rows[i].r_delta;
          previous_t = p.t;
        }
      }
  }
  return out;
}

VerifyOutput run_verify(const ExperimentConfig& config) {
  verify::SuiteConfig suite = config.suite;
  suite.seed = config.seed;
  suite.threads = config.threads;
  const std::vector<verify::CheckResult> results = verify::run_suite(suite);

  std::string report;
  std::map<std::string, std::array<int, 3>> tally;  // passed, skipped, failed
  bool all_passed = true;
  for (const auto& r : results) {
    json line;
    line["name"] = r.name;
    line["passed"] = r.passed;
    line["skipped"] = r.skipped;
    line["margin"] = r.margin;
    line["hypothesis_margin"] = r.hypothesis_margin;
    if (!r.note.empty()) line["note"] = r.note;
    line["witness"] = json::parse(r.witness);
    report += line.dump();
    report += '\n';

    auto& counts = tally[r.name];
    if (r.skipped)
      ++counts[1];
    else if (r.passed)
      ++counts[0];
    else
      ++counts[2];
    if (!r.passed) all_passed = false;
  }

  std::ostringstream summary;
  summary << "verification suite: " << results.size() << " checks\n";
  for (const auto& [name, counts] : tally)
    summary << "  " << name << ": " << counts[0] << " passed, " << counts[1]
            << " skipped, " << counts[2] << " failed\n";
  summary << (all_passed ? "RESULT: PASS\n" : "RESULT: FAIL\n");

  VerifyOutput out;
  out.output.files.emplace_back("verify_report.jsonl", std::move(report));
  out.output.files.emplace_back("verify_summary.txt", summary.str());
  out.all_passed = all_passed;
  return out;
}

ScanOutput emit_plots(const std::vector<std::string>& csv_names) {
  struct PlotSpec {
    const char* csv;
    const char* script;
    const char* body;
  };
  static const PlotSpec specs[] = {
      {"decoherence.csv", "decoherence.gp",
       "set datafile separator ','\n"
       "set terminal pngcairo size 900,600\n"
       "set output 'decoherence.png'\n"
       "set xlabel 'time'\n"
       "set ylabel '|gamma_01|'\n"
       "plot 'decoherence.csv' using 2:4 with points title 'decoherence factor'\n"},
      {"partial_info.csv", "partial_info.gp",
       "set datafile separator ','\n"
       "set terminal pngcairo size 900,600\n"
       "set output 'partial_info.png'\n"
       "set xlabel 'fragment size'\n"
       "set ylabel 'information (nats)'\n"
       "plot 'partial_info.csv' using 3:4 with linespoints title 'I_F', \\\n"
       "     'partial_info.csv' using 3:5 with lines title 'H(A)'\n"},
      {"pointer_angles.csv", "pointer_angles.gp",
       "set datafile separator ','\n"
       "set terminal pngcairo size 900,600\n"
       "set output 'pointer_angles.png'\n"
       "set xlabel 'angle to pointer (deg)'\n"
       "set ylabel 'nats / count'\n"
       "plot 'pointer_angles.csv' using 1:2 with linespoints title 'I_E(B)', \\\n"
       "     'pointer_angles.csv' using 1:3 with linespoints title 'I(B:A)', \\\n"
       "     'pointer_angles.csv' using 1:4 with linespoints title 'R_delta'\n"},
      {"redundancy.csv", "redundancy.gp",
       "set datafile separator ','\n"
       "set terminal pngcairo size 900,600\n"
       "set output 'redundancy.png'\n"
       "set xlabel 'time'\n"
       "set ylabel 'R_delta'\n"
       "plot 'redundancy.csv' using 2:4 with linespoints title 'redundancy'\n"},
  };

  ScanOutput out;
  for (const auto& spec : specs)
    for (const auto& name : csv_names)
      if (name == spec.csv) out.files.emplace_back(spec.script, spec.body);
  return out;
}

void write_output(const std::string& output_dir, const ScanOutput& output) {
  std::filesystem::create_directories(output_dir);
  for (const auto& [name, content] : output.files) {
    std::ofstream file(std::filesystem::path(output_dir) / name,
                       std::ios::binary);
    if (!file) throw ConfigError("cannot write output file: " + name);
    file << content;
  }
}

}  // namespace qdarwin::sweep
