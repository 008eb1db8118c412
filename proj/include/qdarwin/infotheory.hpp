#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qdarwin/observable.hpp"
#include "qdarwin/probability.hpp"
#include "qdarwin/state.hpp"

namespace qdarwin {

/// Shannon entropy in nats, with the 0 ln 0 = 0 convention.
double shannon_entropy(const ProbabilityDistribution& p);
double shannon_entropy(const std::vector<double>& p);

/// Joint outcome statistics p(A_i, X_j) of two observables with disjoint
/// supports. Rows index A outcomes, columns X outcomes.
class JointDistribution {
 public:
  explicit JointDistribution(Eigen::MatrixXd table);

  const Eigen::MatrixXd& table() const { return table_; }
  std::vector<double> row_marginal() const;     // p(A_i)
  std::vector<double> column_marginal() const;  // p(X_j)
  double entropy() const;                       // H(A, X)

 private:
  Eigen::MatrixXd table_;
};

/// Entropies around one (A, X) pair, all in nats. For observables on disjoint
/// subsystems the asymmetric and symmetric mutual-information forms coincide;
/// for same-subsystem pairs the sequential definition (X measured first) is
/// canonical and mutual may be negative.
struct InfoReport {
  double h_a = 0.0;
  double h_x = 0.0;
  double h_joint = 0.0;
  double h_a_given_x = 0.0;
  double h_x_given_a = 0.0;
  double mutual = 0.0;
  bool disjoint_supports = false;
  std::vector<int> null_x_outcomes;  // outcomes excluded as measure-zero
};

/// p(A_i | X_j) table (columns indexed by j). Columns for null outcomes
/// (p(X_j) <= 1e-14) are zero-filled and reported via the null list of
/// mutual_information; a column whose negative entries exceed rounding level
/// raises InvariantViolation. Throws DegenerateObservableError when every
/// outcome of x is null.
Eigen::MatrixXd conditional_probability(const DensityOperator& rho,
                                        const Observable& a,
                                        const Observable& x);

/// H(A|X) = sum_j p(X_j) H(A|X_j).
double conditional_entropy(const DensityOperator& rho, const Observable& a,
                           const Observable& x);

/// I(A:X) = H(A) - H(A|X), with the full entropy breakdown.
InfoReport mutual_information(const DensityOperator& rho, const Observable& a,
                              const Observable& x);

/// Classical mutual information of a joint table.
InfoReport mutual_information(const JointDistribution& joint);

/// p(A_i, X_j) = Tr{A_i X_j rho X_j}; requires disjoint supports.
JointDistribution joint_distribution(const DensityOperator& rho,
                                     const Observable& a, const Observable& x);

/// Joint statistics of a sequence of measurements applied in order via the
/// projection postulate. Axis k of the table indexes the outcomes of
/// chain[k].
class ChainJoint {
 public:
  ChainJoint(std::vector<int> shape, std::vector<double> probabilities);

  int variable_count() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  double probability(const std::vector<int>& outcomes) const;
  const std::vector<double>& flat() const { return flat_; }

  std::vector<double> marginal(int axis) const;
  JointDistribution pair_marginal(int axis_a, int axis_b) const;

 private:
  std::vector<int> shape_;
  std::vector<double> flat_;
  std::vector<std::int64_t> strides_;
};

ChainJoint sequential_joint(const DensityOperator& rho,
                            const std::vector<Observable>& chain);

/// Largest absolute deviation between the sequential joint probability of the
/// chain and its Markov factorization from consecutive pair marginals.
double markov_check(const DensityOperator& rho,
                    const std::vector<Observable>& chain);

}  // namespace qdarwin
