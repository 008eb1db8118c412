#include "qdarwin/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdarwin/errors.hpp"
#include "qdarwin/qstate.hpp"
#include "qdarwin/tolerances.hpp"

namespace qdarwin {

namespace {

double plogp(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) h += plogp(v);
  return h;
}

double clamp_probability(double p, const char* what) {
  if (p >= 0.0) return p;
  if (p >= -tol::probability_clamp) return 0.0;
  throw InvariantViolation(std::string(what) + ": probability " +
                           std::to_string(p) + " below clamp range");
}

}  // namespace

ProbabilityDistribution::ProbabilityDistribution(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
  double sum = 0.0;
  for (double& p : probabilities_) {
    p = clamp_probability(p, "distribution entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::distribution_sum)
    throw InvariantViolation("distribution sums to " + std::to_string(sum));
}

double shannon_entropy(const ProbabilityDistribution& p) {
  return entropy_of(p.values());
}

double shannon_entropy(const std::vector<double>& p) { return entropy_of(p); }

JointDistribution::JointDistribution(Eigen::MatrixXd table)
    : table_(std::move(table)) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < table_.rows(); ++i)
    for (Eigen::Index j = 0; j < table_.cols(); ++j) {
      table_(i, j) = clamp_probability(table_(i, j), "joint entry");
      sum += table_(i, j);
    }
  if (std::abs(sum - 1.0) > tol::distribution_sum)
    throw InvariantViolation("joint table sums to " + std::to_string(sum));
}

std::vector<double> JointDistribution::row_marginal() const {
  std::vector<double> p(table_.rows());
  for (Eigen::Index i = 0; i < table_.rows(); ++i) p[i] = table_.row(i).sum();
  return p;
}

std::vector<double> JointDistribution::column_marginal() const {
  std::vector<double> p(table_.cols());
  for (Eigen::Index j = 0; j < table_.cols(); ++j) p[j] = table_.col(j).sum();
  return p;
}

double JointDistribution::entropy() const {
  double h = 0.0;
  for (Eigen::Index i = 0; i < table_.rows(); ++i)
    for (Eigen::Index j = 0; j < table_.cols(); ++j) h += plogp(table_(i, j));
  return h;
}

namespace {

// Unnormalized post-measurement statistics: for each x outcome j, the
// probability p(X_j) and the conditional Born distribution of a.
struct SequentialStats {
  std::vector<double> p_x;
  Eigen::MatrixXd conditional;  // (i, j) -> p(A_i | X_j); null columns zero
  std::vector<int> null_outcomes;
};

SequentialStats sequential_stats(const DensityOperator& rho,
                                 const Observable& a, const Observable& x) {
  SequentialStats stats;
  stats.p_x.resize(x.outcome_count());
  stats.conditional =
      Eigen::MatrixXd::Zero(a.outcome_count(), x.outcome_count());

  for (int j = 0; j < x.outcome_count(); ++j) {
    const Eigen::MatrixXcd proj = x.embedded_projector(j);
    Eigen::MatrixXcd updated = proj * rho.matrix() * proj;
    const double p = clamp_probability(updated.trace().real(), "p(X_j)");
    stats.p_x[j] = p;
    if (p <= tol::null_outcome) {
      stats.null_outcomes.push_back(j);
      continue;
    }
    updated /= p;
    const DensityOperator conditioned(rho.space(),
                                      (updated + updated.adjoint().eval()) / 2.0);
    const ProbabilityDistribution pa = born_probabilities(conditioned, a);
    for (int i = 0; i < a.outcome_count(); ++i) stats.conditional(i, j) = pa[i];
  }
  if (static_cast<int>(stats.null_outcomes.size()) == x.outcome_count())
    throw DegenerateObservableError("every outcome of x has zero probability");
  return stats;
}

}  // namespace

Eigen::MatrixXd conditional_probability(const DensityOperator& rho,
                                        const Observable& a,
                                        const Observable& x) {
  return sequential_stats(rho, a, x).conditional;
}

double conditional_entropy(const DensityOperator& rho, const Observable& a,
                           const Observable& x) {
  const SequentialStats stats = sequential_stats(rho, a, x);
  double h = 0.0;
  for (int j = 0; j < x.outcome_count(); ++j) {
    if (stats.p_x[j] <= tol::null_outcome) continue;
    double hj = 0.0;
    for (int i = 0; i < a.outcome_count(); ++i)
      hj += plogp(stats.conditional(i, j));
    h += stats.p_x[j] * hj;
  }
  return h;
}

JointDistribution joint_distribution(const DensityOperator& rho,
                                     const Observable& a, const Observable& x) {
  if (!a.disjoint_from(x))
    throw SpaceMismatchError(
        "joint distribution requires observables on disjoint subsystems");

  const SequentialStats stats = sequential_stats(rho, a, x);
  Eigen::MatrixXd table(a.outcome_count(), x.outcome_count());
  for (int i = 0; i < a.outcome_count(); ++i)
    for (int j = 0; j < x.outcome_count(); ++j)
      table(i, j) = stats.p_x[j] * stats.conditional(i, j);
  return JointDistribution(std::move(table));
}

InfoReport mutual_information(const JointDistribution& joint) {
  InfoReport report;
  report.disjoint_supports = true;
  const std::vector<double> pa = joint.row_marginal();
  const std::vector<double> px = joint.column_marginal();
  report.h_a = entropy_of(pa);
  report.h_x = entropy_of(px);
  report.h_joint = joint.entropy();
  report.h_a_given_x = report.h_joint - report.h_x;
  report.h_x_given_a = report.h_joint - report.h_a;
  report.mutual = report.h_a - report.h_a_given_x;
  for (std::size_t j = 0; j < px.size(); ++j)
    if (px[j] <= tol::null_outcome)
      report.null_x_outcomes.push_back(static_cast<int>(j));
  return report;
}

InfoReport mutual_information(const DensityOperator& rho, const Observable& a,
                              const Observable& x) {
  if (a.disjoint_from(x)) return mutual_information(joint_distribution(rho, a, x));

  // Same-subsystem pair: sequential semantics, x measured first. The joint
  // table q(i, j) = p(X_j) p(A_i | X_j) need not have row marginal equal to
  // the pre-measurement Born statistics of a, so H(A) comes from rho itself.
  const SequentialStats stats = sequential_stats(rho, a, x);
  InfoReport report;
  report.disjoint_supports = false;
  report.null_x_outcomes = stats.null_outcomes;
  report.h_a = shannon_entropy(born_probabilities(rho, a));
  report.h_x = entropy_of(stats.p_x);

  std::vector<double> posterior_a(a.outcome_count(), 0.0);
  for (int j = 0; j < x.outcome_count(); ++j) {
    if (stats.p_x[j] <= tol::null_outcome) continue;
    double hj = 0.0;
    for (int i = 0; i < a.outcome_count(); ++i) {
      const double q = stats.p_x[j] * stats.conditional(i, j);
      report.h_joint += plogp(q);
      posterior_a[i] += q;
      hj += plogp(stats.conditional(i, j));
    }
    report.h_a_given_x += stats.p_x[j] * hj;
  }
  report.h_x_given_a = report.h_joint - entropy_of(posterior_a);
  report.mutual = report.h_a - report.h_a_given_x;
  return report;
}

ChainJoint::ChainJoint(std::vector<int> shape, std::vector<double> probabilities)
    : shape_(std::move(shape)), flat_(std::move(probabilities)) {
  strides_.assign(shape_.size(), 1);
  for (int k = static_cast<int>(shape_.size()) - 2; k >= 0; --k)
    strides_[k] = strides_[k + 1] * shape_[k + 1];
  std::int64_t expected = shape_.empty() ? 0 : strides_[0] * shape_[0];
  if (static_cast<std::int64_t>(flat_.size()) != expected)
    throw InvariantViolation("chain joint shape mismatch");
  double sum = 0.0;
  for (double& p : flat_) {
    p = clamp_probability(p, "chain entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::distribution_sum)
    throw InvariantViolation("chain joint sums to " + std::to_string(sum));
}

double ChainJoint::probability(const std::vector<int>& outcomes) const {
  std::int64_t idx = 0;
  for (std::size_t k = 0; k < shape_.size(); ++k) idx += outcomes[k] * strides_[k];
  return flat_[idx];
}

std::vector<double> ChainJoint::marginal(int axis) const {
  std::vector<double> p(shape_[axis], 0.0);
  for (std::size_t flat_idx = 0; flat_idx < flat_.size(); ++flat_idx) {
    const int digit =
        static_cast<int>((static_cast<std::int64_t>(flat_idx) / strides_[axis]) %
                         shape_[axis]);
    p[digit] += flat_[flat_idx];
  }
  return p;
}

JointDistribution ChainJoint::pair_marginal(int axis_a, int axis_b) const {
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(shape_[axis_a], shape_[axis_b]);
  for (std::size_t flat_idx = 0; flat_idx < flat_.size(); ++flat_idx) {
    const auto idx = static_cast<std::int64_t>(flat_idx);
    const int da = static_cast<int>((idx / strides_[axis_a]) % shape_[axis_a]);
    const int db = static_cast<int>((idx / strides_[axis_b]) % shape_[axis_b]);
    table(da, db) += flat_[flat_idx];
  }
  return JointDistribution(std::move(table));
}

namespace {

void accumulate_chain(const TensorSpace& space, const Eigen::MatrixXcd& state,
                      double weight, const std::vector<Observable>& chain,
                      std::size_t depth, std::vector<int>& outcome_path,
                      const std::vector<std::int64_t>& strides,
                      std::vector<double>& flat) {
  if (depth == chain.size()) {
    std::int64_t idx = 0;
    for (std::size_t k = 0; k < outcome_path.size(); ++k)
      idx += outcome_path[k] * strides[k];
    flat[idx] += weight;
    return;
  }
  const Observable& obs = chain[depth];
  for (int outcome = 0; outcome < obs.outcome_count(); ++outcome) {
    const Eigen::MatrixXcd proj = obs.embedded_projector(outcome);
    Eigen::MatrixXcd updated = proj * state * proj;
    const double p = updated.trace().real();
    if (p <= tol::null_outcome) continue;  // measure-zero path
    updated /= p;
    outcome_path[depth] = outcome;
    accumulate_chain(space, updated, weight * p, chain, depth + 1, outcome_path,
                     strides, flat);
  }
  outcome_path[depth] = 0;
}

}  // namespace

ChainJoint sequential_joint(const DensityOperator& rho,
                            const std::vector<Observable>& chain) {
  if (chain.size() < 2)
    throw std::domain_error("measurement chain needs at least two observables");

  std::vector<int> shape;
  for (const Observable& obs : chain) shape.push_back(obs.outcome_count());
  std::vector<std::int64_t> strides(shape.size(), 1);
  for (int k = static_cast<int>(shape.size()) - 2; k >= 0; --k)
    strides[k] = strides[k + 1] * shape[k + 1];

  std::vector<double> flat(strides[0] * shape[0], 0.0);
  std::vector<int> path(chain.size(), 0);
  accumulate_chain(rho.space(), rho.matrix(), 1.0, chain, 0, path, strides, flat);
  return ChainJoint(std::move(shape), std::move(flat));
}

double markov_check(const DensityOperator& rho,
                    const std::vector<Observable>& chain) {
  const ChainJoint joint = sequential_joint(rho, chain);
  const int n = joint.variable_count();

  // Conditional tables between consecutive variables, from pair marginals.
  std::vector<Eigen::MatrixXd> step;  // step[k](next, prev) = p(k+1 | k)
  for (int k = 0; k + 1 < n; ++k) {
    const JointDistribution pair = joint.pair_marginal(k, k + 1);
    const std::vector<double> prev = pair.row_marginal();
    Eigen::MatrixXd cond =
        Eigen::MatrixXd::Zero(joint.shape()[k + 1], joint.shape()[k]);
    for (int i = 0; i < cond.cols(); ++i) {
      if (prev[i] <= tol::null_outcome) continue;
      for (int j = 0; j < cond.rows(); ++j)
        cond(j, i) = pair.table()(i, j) / prev[i];
    }
    step.push_back(std::move(cond));
  }

  const std::vector<double> first = joint.marginal(0);
  double max_violation = 0.0;
  std::vector<int> outcomes(n, 0);
  const std::size_t total = joint.flat().size();
  for (std::size_t flat_idx = 0; flat_idx < total; ++flat_idx) {
    std::size_t rest = flat_idx;
    for (int k = n - 1; k >= 0; --k) {
      outcomes[k] = static_cast<int>(rest % joint.shape()[k]);
      rest /= joint.shape()[k];
    }
    double factorized = first[outcomes[0]];
    for (int k = 0; k + 1 < n; ++k)
      factorized *= step[k](outcomes[k + 1], outcomes[k]);
    max_violation =
        std::max(max_violation, std::abs(joint.flat()[flat_idx] - factorized));
  }
  return max_violation;
}

}  // namespace qdarwin
