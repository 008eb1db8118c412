#pragma once

#include <Eigen/Dense>

#include "qdarwin/space.hpp"

namespace qdarwin {

class DensityOperator;

/// Pure state on a tensor space; unit norm enforced at construction.
class StateVector {
 public:
  StateVector(TensorSpace space, Eigen::VectorXcd amplitudes);

  static StateVector basis_state(TensorSpace space, std::int64_t index);

  const TensorSpace& space() const { return space_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

  DensityOperator to_density() const;

 private:
  TensorSpace space_;
  Eigen::VectorXcd amplitudes_;
};

/// Mixed state. Construction enforces Hermiticity and unit trace; positivity
/// (eigenvalues >= -1e-10) is an O(d^3) spectral check exposed separately and
/// exercised where states enter from untrusted arithmetic.
class DensityOperator {
 public:
  DensityOperator(TensorSpace space, Eigen::MatrixXcd matrix);

  const TensorSpace& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::int64_t dimension() const { return matrix_.rows(); }

  double min_eigenvalue() const;
  void require_positive(double floor = -1e-10) const;

 private:
  TensorSpace space_;
  Eigen::MatrixXcd matrix_;
};

}  // namespace qdarwin
