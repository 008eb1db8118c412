#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdarwin/errors.hpp"
#include "qdarwin/sweep.hpp"

using namespace qdarwin;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("qdarwin_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  return path.string();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const std::string& file_content(const sweep::ScanOutput& output,
                                const std::string& name) {
  for (const auto& [file, content] : output.files)
    if (file == name) return content;
  throw std::runtime_error("missing file " + name);
}

int run_cli(const std::string& args) {
  const std::string command =
      std::string(QDARWIN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config loading accepts the documented schema") {
  const fs::path dir = temp_dir("config");
  const std::string path = write_file(dir / "config.json", R"({
    "model": {"env_count": 4, "coupling": 1.0, "time": 0.5, "env": "plus"},
    "sweep": {"times": [0.0, 0.5], "env_counts": [2, 4], "deltas": [0.1],
              "samples": 5},
    "search": {"strategy": "branch-optimal", "restarts": 4,
               "tolerance": 1e-9, "max_iterations": 100},
    "seed": 11,
    "output_dir": "out",
    "threads": 1
  })");
  const sweep::ExperimentConfig config = sweep::load_config(path);
  CHECK(config.env_count == 4);
  CHECK(config.times.size() == 2);
  CHECK(config.seed == 11);
  CHECK(config.search.restarts == 4);
}

TEST_CASE("unknown config keys fail fast") {
  const fs::path dir = temp_dir("badconfig");
  const std::string path = write_file(
      dir / "config.json", R"({"model": {"env_count": 4, "tims": [1]}})");
  CHECK_THROWS_AS(sweep::load_config(path), ConfigError);

  const std::string top = write_file(
      dir / "top.json", R"({"seeed": 3})");
  CHECK_THROWS_AS(sweep::load_config(top), ConfigError);

  const std::string malformed = write_file(dir / "broken.json", "{nope");
  CHECK_THROWS_AS(sweep::load_config(malformed), ConfigError);
}

TEST_CASE("decoherence scan reports the analytic default-model factor") {
  sweep::ExperimentConfig config;
  config.env_kind = "plus";
  config.env_counts = {4};
  config.times = {0.0, kPi / 8.0};
  const sweep::ScanOutput output = sweep::run_decoherence_scan(config);
  const std::string& csv = file_content(output, "decoherence.csv");

  std::istringstream lines(csv);
  std::string header, row_t0, row_t1;
  std::getline(lines, header);
  std::getline(lines, row_t0);
  std::getline(lines, row_t1);
  CHECK(header ==
        "env_count,time,sample,abs_gamma_01,log_abs_gamma_01");

  auto column = [](const std::string& row, int index) {
    std::istringstream fields(row);
    std::string field;
    for (int k = 0; k <= index; ++k) std::getline(fields, field, ',');
    return std::stod(field);
  };
  CHECK(column(row_t0, 3) == doctest::Approx(1.0).epsilon(1e-12));
  // cos^4(pi/4) = 0.25 at t = pi/8.
  CHECK(column(row_t1, 3) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("scan output is byte-identical for identical config and seed") {
  sweep::ExperimentConfig config;
  config.env_kind = "random";
  config.env_counts = {4, 6};
  config.times = {0.1, 0.3};
  config.samples = 10;
  config.seed = 1234;

  const sweep::ScanOutput first = sweep::run_decoherence_scan(config);
  const sweep::ScanOutput second = sweep::run_decoherence_scan(config);
  REQUIRE(first.files.size() == second.files.size());
  for (std::size_t i = 0; i < first.files.size(); ++i) {
    CHECK(first.files[i].first == second.files[i].first);
    CHECK(first.files[i].second == second.files[i].second);
  }

  // Thread count must not change the bytes either.
  sweep::ExperimentConfig threaded = config;
  threaded.threads = 2;
  const sweep::ScanOutput parallel = sweep::run_decoherence_scan(threaded);
  CHECK(file_content(parallel, "decoherence.csv") ==
        file_content(first, "decoherence.csv"));

  // A different seed changes the random-environment rows.
  sweep::ExperimentConfig reseeded = config;
  reseeded.seed = 4321;
  const sweep::ScanOutput other = sweep::run_decoherence_scan(reseeded);
  CHECK(file_content(other, "decoherence.csv") !=
        file_content(first, "decoherence.csv"));
}

TEST_CASE("partial info scan columns are monotone and capped") {
  sweep::ExperimentConfig config;
  config.env_count = 5;
  config.time = kPi / 4.0;
  config.angle_step_deg = 30.0;
  const sweep::ScanOutput output = sweep::run_partial_info_scan(config);

  const std::string& csv = file_content(output, "partial_info.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  double previous = -1.0;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string field;
    for (int k = 0; k < 4; ++k) std::getline(fields, field, ',');
    const double value = std::stod(field);
    CHECK(value >= previous - 1e-9);
    CHECK(value <= 0.6931471805599453 + 1e-9);
    previous = value;
  }
  CHECK(previous == doctest::Approx(0.6931471805599453).epsilon(1e-9));

  const std::string& angles = file_content(output, "pointer_angles.csv");
  CHECK(angles.find("theta_deg,i_hat_env,info_via_pointer,r_delta") == 0);
}

TEST_CASE("redundancy scan grows monotonically toward perfect correlation") {
  sweep::ExperimentConfig config;
  config.env_counts = {4};
  config.times = {0.0, kPi / 16.0, kPi / 8.0, kPi / 4.0};
  config.deltas = {0.1};
  const sweep::ScanOutput output = sweep::run_redundancy_scan(config);
  CHECK(output.warnings.empty());

  const std::string& csv = file_content(output, "redundancy.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::vector<double> r_values;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string field;
    for (int k = 0; k < 4; ++k) std::getline(fields, field, ',');
    r_values.push_back(std::stod(field));
  }
  REQUIRE(r_values.size() == 4);
  CHECK(r_values.front() == 1.0);  // no information at t = 0
  CHECK(r_values.back() == 4.0);   // every qubit a perfect record at t = pi/4
  for (std::size_t i = 1; i < r_values.size(); ++i)
    CHECK(r_values[i] >= r_values[i - 1]);
}

TEST_CASE("verify produces a machine-readable report and a summary") {
  sweep::ExperimentConfig config;
  config.suite.env_counts = {2};
  config.suite.times = {kPi / 4.0};
  config.suite.random_draws = 1;
  config.seed = 5;
  const sweep::VerifyOutput verdict = sweep::run_verify(config);
  CHECK(verdict.all_passed);

  const std::string& report = file_content(verdict.output, "verify_report.jsonl");
  CHECK(report.find("\"name\":") != std::string::npos);
  CHECK(report.find("\"witness\":") != std::string::npos);
  const std::string& summary = file_content(verdict.output, "verify_summary.txt");
  CHECK(summary.find("RESULT: PASS") != std::string::npos);
}

TEST_CASE("plot scripts are emitted for present tables only") {
  const sweep::ScanOutput scripts =
      sweep::emit_plots({"decoherence.csv", "redundancy.csv"});
  REQUIRE(scripts.files.size() == 2);
  CHECK(scripts.files[0].first == "decoherence.gp");
  CHECK(scripts.files[1].first == "redundancy.gp");
  CHECK(scripts.files[0].second.find("plot 'decoherence.csv'") !=
        std::string::npos);
}

TEST_CASE("cli runs end to end with deterministic outputs") {
  const fs::path dir = temp_dir("cli");
  const std::string config_path = write_file(dir / "config.json", R"({
    "model": {"env": "random"},
    "sweep": {"times": [0.1, 0.3], "env_counts": [4], "samples": 5},
    "seed": 77
  })");

  const fs::path out1 = dir / "out1";
  const fs::path out2 = dir / "out2";
  CHECK(run_cli("scan-decoherence --config " + config_path + " --out " +
                out1.string()) == 0);
  CHECK(run_cli("scan-decoherence --config " + config_path + " --out " +
                out2.string()) == 0);
  const std::string csv1 = read_file(out1 / "decoherence.csv");
  CHECK(!csv1.empty());
  CHECK(csv1 == read_file(out2 / "decoherence.csv"));
  CHECK(read_file(out1 / "decoherence_fits.csv") ==
        read_file(out2 / "decoherence_fits.csv"));

  // Plot scripts for the produced tables.
  CHECK(run_cli("plot --out " + out1.string()) == 0);
  CHECK(fs::exists(out1 / "decoherence.gp"));

  // 17-significant-digit numbers round-trip.
  CHECK(csv1.find('.') != std::string::npos);
}

TEST_CASE("cli exit codes distinguish config errors") {
  const fs::path dir = temp_dir("cli_err");
  const std::string bad = write_file(dir / "bad.json", R"({"unknown_key": 1})");
  CHECK(run_cli("scan-decoherence --config " + bad + " --out " +
                (dir / "out").string()) == 2);
  CHECK(run_cli("scan-decoherence --config " + (dir / "missing.json").string() +
                " --out " + (dir / "out").string()) == 2);
}

TEST_CASE("cli verify succeeds on a small grid") {
  const fs::path dir = temp_dir("cli_verify");
  const std::string config_path = write_file(dir / "config.json", R"({
    "suite": {"env_counts": [2], "times": [0.7853981633974483],
              "random_draws": 1},
    "seed": 3
  })");
  CHECK(run_cli("verify --config " + config_path + " --out " +
                (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "verify_report.jsonl"));
  CHECK(fs::exists(dir / "out" / "verify_summary.txt"));
}
