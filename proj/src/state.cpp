#include "qdarwin/state.hpp"

#include <cmath>
#include <string>

#include "qdarwin/errors.hpp"
#include "qdarwin/tolerances.hpp"

namespace qdarwin {

StateVector::StateVector(TensorSpace space, Eigen::VectorXcd amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.total_dimension())
    throw InvariantViolation("amplitude length does not match space dimension");
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > tol::state)
    throw InvariantViolation("state vector norm " + std::to_string(norm) +
                             " deviates from 1 beyond tolerance");
}

StateVector StateVector::basis_state(TensorSpace space, std::int64_t index) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(space.total_dimension());
  amps[index] = 1.0;
  return StateVector(std::move(space), std::move(amps));
}

DensityOperator StateVector::to_density() const {
  return DensityOperator(space_, amplitudes_ * amplitudes_.adjoint());
}

DensityOperator::DensityOperator(TensorSpace space, Eigen::MatrixXcd matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() ||
      matrix_.rows() != space_.total_dimension())
    throw InvariantViolation("density matrix shape does not match space");
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol::state)
    throw InvariantViolation("density matrix not Hermitian: deviation " +
                             std::to_string(herm));
  const double trace_err = std::abs(matrix_.trace() - std::complex<double>(1.0));
  if (trace_err > tol::state)
    throw InvariantViolation("density matrix trace deviates from 1 by " +
                             std::to_string(trace_err));
}

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_,
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityOperator::require_positive(double floor) const {
  const double min_eig = min_eigenvalue();
  if (min_eig < floor)
    throw InvariantViolation("density matrix has eigenvalue " +
                             std::to_string(min_eig) + " below " +
                             std::to_string(floor));
}

}  // namespace qdarwin
