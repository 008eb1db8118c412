#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace qdarwin {

/// Deterministic seed derivation (splitmix64 step). Independent tasks get
/// their own generator seeded from (master, task index), so results do not
/// depend on thread count or scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi);
  double normal();
  int uniform_int(int lo, int hi);  // inclusive bounds

  /// Haar-like random unit vector (normalized complex normal entries).
  Eigen::VectorXcd unit_vector(int dimension);
  /// Unitary from the QR decomposition of a complex Gaussian matrix.
  Eigen::MatrixXcd unitary(int dimension);
  Eigen::MatrixXcd gaussian_matrix(int rows, int cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Runs fn(i) for i in [0, count) across up to thread_count threads, each
/// index exactly once. Callers write results into preallocated slots, so the
/// outcome is identical to the sequential run.
void parallel_for(std::int64_t count, int thread_count,
                  const std::function<void(std::int64_t)>& fn);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qdarwin
