#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qdarwin/space.hpp"

namespace qdarwin {

/// Complete set of mutually orthogonal spectral projectors with distinct real
/// eigenvalue labels. Projectors are stored on the acts_on subspace (labels
/// in ascending position order); on the rest of the space the observable acts
/// as identity, and embedded_projector() materializes that embedding.
class Observable {
 public:
  Observable(TensorSpace space, std::vector<int> acts_on,
             std::vector<Eigen::MatrixXcd> local_projectors,
             std::vector<double> eigenvalues);

  /// Spectral decomposition of a Hermitian matrix on the acts_on subspace.
  /// Eigenvalues within degeneracy_tol are merged into one projector.
  static Observable from_hermitian(TensorSpace space, std::vector<int> acts_on,
                                   const Eigen::MatrixXcd& local_matrix,
                                   double degeneracy_tol = 1e-10);

  /// Rank-1 projectors onto the columns of an orthonormal basis.
  static Observable from_basis(TensorSpace space, std::vector<int> acts_on,
                               const Eigen::MatrixXcd& orthonormal_columns);

  static Observable computational(TensorSpace space, std::vector<int> acts_on);
  static Observable identity(TensorSpace space);
  static Observable pauli_z(TensorSpace space, int qubit_label);
  static Observable pauli_x(TensorSpace space, int qubit_label);
  /// Qubit observable along the Bloch direction (theta, phi).
  static Observable bloch(TensorSpace space, int qubit_label, double theta,
                          double phi);

  const TensorSpace& space() const { return space_; }
  const std::vector<int>& acts_on() const { return acts_on_; }
  int outcome_count() const { return static_cast<int>(projectors_.size()); }
  std::int64_t local_dimension() const { return local_dim_; }

  const Eigen::MatrixXcd& local_projector(int outcome) const {
    return projectors_[outcome];
  }
  Eigen::MatrixXcd embedded_projector(int outcome) const;
  /// Sum of label-weighted local projectors.
  Eigen::MatrixXcd local_matrix() const;
  double eigenvalue(int outcome) const { return eigenvalues_[outcome]; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

  bool disjoint_from(const Observable& other) const;

  /// Same observable transplanted onto another space: acts_on label i maps to
  /// target_labels[i]. Target subsystem dimensions must match.
  Observable embedded_into(const TensorSpace& target,
                           const std::vector<int>& target_labels) const;

 private:
  TensorSpace space_;
  std::vector<int> acts_on_;
  std::vector<Eigen::MatrixXcd> projectors_;
  std::vector<double> eigenvalues_;
  std::int64_t local_dim_ = 0;
};

/// Embed a matrix acting on the given labels into the full space (identity on
/// the other factors).
Eigen::MatrixXcd embed_on(const TensorSpace& space,
                          const std::vector<int>& acts_on_labels,
                          const Eigen::MatrixXcd& local);

}  // namespace qdarwin
