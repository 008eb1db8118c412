#pragma once

#include <vector>

namespace qdarwin {

/// Classical probability distribution. Construction clamps rounding-level
/// negatives to zero, rejects anything more negative, and requires the total
/// to be 1 within tolerance.
class ProbabilityDistribution {
 public:
  explicit ProbabilityDistribution(std::vector<double> probabilities);

  int size() const { return static_cast<int>(probabilities_.size()); }
  double operator[](int i) const { return probabilities_[i]; }
  const std::vector<double>& values() const { return probabilities_; }

 private:
  std::vector<double> probabilities_;
};

}  // namespace qdarwin
