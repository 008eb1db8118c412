#include "qdarwin/observable.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "qdarwin/errors.hpp"
#include "qdarwin/tolerances.hpp"

namespace qdarwin {

namespace {

std::vector<int> sorted_by_position(const TensorSpace& space,
                                    std::vector<int> labels) {
  std::sort(labels.begin(), labels.end(), [&space](int a, int b) {
    return space.position_of(a) < space.position_of(b);
  });
  return labels;
}

std::int64_t combined_dimension(const TensorSpace& space,
                                const std::vector<int>& labels) {
  std::int64_t dim = 1;
  for (int label : labels) dim *= space.dimension_of(label);
  return dim;
}

}  // namespace

Observable::Observable(TensorSpace space, std::vector<int> acts_on,
                       std::vector<Eigen::MatrixXcd> local_projectors,
                       std::vector<double> eigenvalues)
    : space_(std::move(space)),
      acts_on_(sorted_by_position(space_, std::move(acts_on))),
      projectors_(std::move(local_projectors)),
      eigenvalues_(std::move(eigenvalues)) {
  if (acts_on_.empty()) throw InvariantViolation("observable acts on no subsystem");
  if (projectors_.empty()) throw InvariantViolation("observable has no projectors");
  if (projectors_.size() != eigenvalues_.size())
    throw InvariantViolation("projector/eigenvalue count mismatch");

  local_dim_ = combined_dimension(space_, acts_on_);
  for (const auto& p : projectors_) {
    if (p.rows() != local_dim_ || p.cols() != local_dim_)
      throw InvariantViolation("projector shape does not match acts_on subspace");
    if ((p - p.adjoint()).cwiseAbs().maxCoeff() > tol::projector)
      throw InvariantViolation("projector not Hermitian");
    if ((p * p - p).cwiseAbs().maxCoeff() > tol::projector)
      throw InvariantViolation("projector not idempotent");
  }
  for (std::size_t i = 0; i < projectors_.size(); ++i)
    for (std::size_t j = i + 1; j < projectors_.size(); ++j) {
      if ((projectors_[i] * projectors_[j]).cwiseAbs().maxCoeff() > tol::projector)
        throw InvariantViolation("projectors not mutually orthogonal");
      if (std::abs(eigenvalues_[i] - eigenvalues_[j]) <= tol::state)
        throw InvariantViolation("eigenvalue labels not pairwise distinct");
    }

  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(local_dim_, local_dim_);
  for (const auto& p : projectors_) sum += p;
  if ((sum - Eigen::MatrixXcd::Identity(local_dim_, local_dim_))
          .cwiseAbs()
          .maxCoeff() > tol::projector)
    throw InvariantViolation("projectors do not sum to identity");
}

Observable Observable::from_hermitian(TensorSpace space,
                                      std::vector<int> acts_on,
                                      const Eigen::MatrixXcd& local_matrix,
                                      double degeneracy_tol) {
  if ((local_matrix - local_matrix.adjoint()).cwiseAbs().maxCoeff() >
      tol::projector)
    throw InvariantViolation("observable matrix not Hermitian");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(local_matrix);
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::MatrixXcd evecs = solver.eigenvectors();

  // Cluster near-degenerate eigenvalues into higher-rank projectors.
  std::vector<Eigen::MatrixXcd> projectors;
  std::vector<double> labels;
  const std::int64_t dim = local_matrix.rows();
  std::int64_t start = 0;
  while (start < dim) {
    std::int64_t end = start + 1;
    while (end < dim && std::abs(evals[end] - evals[end - 1]) <= degeneracy_tol)
      ++end;
    Eigen::MatrixXcd block = evecs.middleCols(start, end - start);
    projectors.push_back(block * block.adjoint());
    labels.push_back(evals.segment(start, end - start).mean());
    start = end;
  }
  return Observable(std::move(space), std::move(acts_on), std::move(projectors),
                    std::move(labels));
}

Observable Observable::from_basis(TensorSpace space, std::vector<int> acts_on,
                                  const Eigen::MatrixXcd& orthonormal_columns) {
  std::vector<Eigen::MatrixXcd> projectors;
  std::vector<double> labels;
  for (int c = 0; c < orthonormal_columns.cols(); ++c) {
    const Eigen::VectorXcd v = orthonormal_columns.col(c);
    projectors.push_back(v * v.adjoint());
    labels.push_back(static_cast<double>(c));
  }
  return Observable(std::move(space), std::move(acts_on), std::move(projectors),
                    std::move(labels));
}

Observable Observable::computational(TensorSpace space,
                                     std::vector<int> acts_on) {
  std::int64_t dim = combined_dimension(space, acts_on);
  return from_basis(std::move(space), std::move(acts_on),
                    Eigen::MatrixXcd::Identity(dim, dim));
}

Observable Observable::identity(TensorSpace space) {
  std::vector<int> all;
  for (const auto& sub : space.subsystems()) all.push_back(sub.index);
  const std::int64_t dim = space.total_dimension();
  std::vector<Eigen::MatrixXcd> projectors{Eigen::MatrixXcd::Identity(dim, dim)};
  return Observable(std::move(space), std::move(all), std::move(projectors),
                    {0.0});
}

Observable Observable::pauli_z(TensorSpace space, int qubit_label) {
  Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(2, 2);
  Eigen::MatrixXcd p1 = Eigen::MatrixXcd::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return Observable(std::move(space), {qubit_label}, {p0, p1}, {1.0, -1.0});
}

Observable Observable::pauli_x(TensorSpace space, int qubit_label) {
  Eigen::MatrixXcd plus(2, 2), minus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  minus << 0.5, -0.5, -0.5, 0.5;
  return Observable(std::move(space), {qubit_label}, {plus, minus},
                    {1.0, -1.0});
}

Observable Observable::bloch(TensorSpace space, int qubit_label, double theta,
                             double phi) {
  using std::complex;
  const double ct = std::cos(theta), st = std::sin(theta);
  Eigen::MatrixXcd m(2, 2);
  m(0, 0) = ct;
  m(1, 1) = -ct;
  m(0, 1) = complex<double>(st * std::cos(phi), -st * std::sin(phi));
  m(1, 0) = std::conj(m(0, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  Eigen::MatrixXcd evecs = solver.eigenvectors();
  const Eigen::VectorXcd minus = evecs.col(0), plus = evecs.col(1);
  std::vector<Eigen::MatrixXcd> projectors{plus * plus.adjoint(),
                                           minus * minus.adjoint()};
  return Observable(std::move(space), {qubit_label}, std::move(projectors),
                    {1.0, -1.0});
}

Eigen::MatrixXcd Observable::embedded_projector(int outcome) const {
  return embed_on(space_, acts_on_, projectors_[outcome]);
}

Eigen::MatrixXcd Observable::local_matrix() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(local_dim_, local_dim_);
  for (int i = 0; i < outcome_count(); ++i) m += eigenvalues_[i] * projectors_[i];
  return m;
}

bool Observable::disjoint_from(const Observable& other) const {
  for (int label : acts_on_)
    if (std::find(other.acts_on_.begin(), other.acts_on_.end(), label) !=
        other.acts_on_.end())
      return false;
  return true;
}

Observable Observable::embedded_into(const TensorSpace& target,
                                     const std::vector<int>& target_labels) const {
  if (target_labels.size() != acts_on_.size())
    throw SpaceMismatchError("target label count does not match acts_on");
  for (std::size_t k = 0; k < acts_on_.size(); ++k)
    if (target.dimension_of(target_labels[k]) !=
        space_.dimension_of(acts_on_[k]))
      throw SpaceMismatchError("target subsystem dimension mismatch");
  return Observable(target, target_labels, projectors_, eigenvalues_);
}

Eigen::MatrixXcd embed_on(const TensorSpace& space,
                          const std::vector<int>& acts_on_labels,
                          const Eigen::MatrixXcd& local) {
  std::vector<int> acts_positions;
  for (int label : acts_on_labels) acts_positions.push_back(space.position_of(label));
  std::sort(acts_positions.begin(), acts_positions.end());

  std::vector<int> rest_positions;
  for (int pos = 0; pos < space.subsystem_count(); ++pos)
    if (std::find(acts_positions.begin(), acts_positions.end(), pos) ==
        acts_positions.end())
      rest_positions.push_back(pos);

  const SubsetIndexer acts(space, acts_positions);
  const SubsetIndexer rest(space, rest_positions);
  if (local.rows() != acts.combined_dimension())
    throw SpaceMismatchError("local matrix does not match acts_on dimensions");

  Eigen::MatrixXcd full =
      Eigen::MatrixXcd::Zero(space.total_dimension(), space.total_dimension());
  for (std::int64_t a = 0; a < acts.combined_dimension(); ++a)
    for (std::int64_t b = 0; b < acts.combined_dimension(); ++b) {
      const std::complex<double> value = local(a, b);
      if (value == std::complex<double>(0.0)) continue;
      for (std::int64_t e = 0; e < rest.combined_dimension(); ++e)
        full(acts.offset(a) + rest.offset(e), acts.offset(b) + rest.offset(e)) =
            value;
    }
  return full;
}

}  // namespace qdarwin
