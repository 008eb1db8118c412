#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qdarwin/observable.hpp"
#include "qdarwin/space.hpp"
#include "qdarwin/state.hpp"

namespace qdarwin {

/// Pure-dephasing spin model: a d_S-level system coupled to N independent
/// subsystems through H = sum_k A (x) g_k Z_k, starting from a pure product
/// state. The joint space carries label 0 for the system and 1..N for the
/// environment.
struct ModelConfig {
  Eigen::VectorXcd system_amplitudes;             // alpha_i in the A eigenbasis
  std::vector<double> system_eigenvalues;         // a_i
  std::vector<double> couplings;                  // g_k, one per subsystem
  std::vector<Eigen::VectorXcd> env_initial_states;
  std::vector<Eigen::MatrixXcd> env_generators;   // Z_k, Hermitian
  double time = 0.0;

  int system_dimension() const {
    return static_cast<int>(system_amplitudes.size());
  }
  int env_count() const { return static_cast<int>(couplings.size()); }
  TensorSpace joint_space() const;
  void validate() const;

  /// Qubit system with A = sigma_z, a = (+1, -1), uniform amplitudes; qubit
  /// environments with Z_k = sigma_z, initial |+>, common coupling g. Branch
  /// overlaps are cos(2 g t) per subsystem.
  static ModelConfig dephasing_default(int env_count, double coupling,
                                       double time);
};

/// The evolved joint state in branch form: sum_j alpha_j |j> (x)_k
/// |phi_j^{E_k}>, with each branch state obtained from one exact single
/// subsystem exponential. The full state is never materialized here.
class BranchDecomposition {
 public:
  BranchDecomposition(Eigen::VectorXcd amplitudes,
                      std::vector<double> eigenvalues,
                      std::vector<std::vector<Eigen::VectorXcd>> branch_states,
                      bool symmetric_environment);

  int branch_count() const { return static_cast<int>(amplitudes_.size()); }
  int env_count() const {
    return static_cast<int>(branch_states_.front().size());
  }
  int system_dimension() const { return branch_count(); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

  /// All environment couplings, generators and initial states identical;
  /// fragment quantities then depend on fragment size only.
  bool symmetric_environment() const { return symmetric_environment_; }

  const Eigen::VectorXcd& branch_state(int branch, int env_label) const {
    return branch_states_[branch][env_label - 1];
  }
  /// <phi_j^{E_k} | phi_i^{E_k}>.
  std::complex<double> subsystem_overlap(int env_label, int ket_branch,
                                         int bra_branch) const;

  TensorSpace joint_space() const;
  TensorSpace system_space() const;
  /// Reduced space holding the system (label 0) and the fragment members
  /// (ascending, relabeled 1..|F|).
  TensorSpace sf_space(const FragmentSpec& fragment) const;

  FragmentSpec whole_environment() const;
  FragmentSpec complement(const FragmentSpec& fragment) const;

  /// |Phi_j^F>: Kronecker product of the branch states over the fragment,
  /// ascending label order. Throws BudgetError past the dense budget.
  Eigen::VectorXcd fragment_branch_state(const FragmentSpec& fragment,
                                         int branch) const;

  /// Materialized joint state (dense budget applies).
  StateVector full_state() const;

 private:
  Eigen::VectorXcd amplitudes_;
  std::vector<double> eigenvalues_;
  std::vector<std::vector<Eigen::VectorXcd>> branch_states_;  // [branch][k-1]
  bool symmetric_environment_ = false;
};

BranchDecomposition evolve(const ModelConfig& config);

/// gamma_{ij} = prod_{k in F} <phi_j^{E_k} | phi_i^{E_k}>; the empty fragment
/// gives the all-ones matrix. gamma_max is the largest off-diagonal modulus.
struct DecoherenceFactors {
  FragmentSpec fragment;
  Eigen::MatrixXcd gamma;
  double gamma_max = 0.0;
};

DecoherenceFactors decoherence_factors(const BranchDecomposition& branches,
                                       const FragmentSpec& fragment);

/// rho^{SF} = sum_ij alpha_i alpha_j^* |i><j| (x) |Phi_i^F><Phi_j^F|
/// gamma^{Fbar}_ij on the space sf_space(fragment).
DensityOperator reduced_state_sf(const BranchDecomposition& branches,
                                 const FragmentSpec& fragment);

/// rho^S with entries alpha_i alpha_j^* gamma^E_ij.
DensityOperator reduced_state_s(const BranchDecomposition& branches);

/// Block-diagonal reference state built from Gram-Schmidt orthonormalized
/// branch states: sigma = sum_i |alpha_i|^2 |i><i| (x) |Psi_i><Psi_i|.
/// branch_overlaps(j, i) = <Phi_j^F | Psi_i^F>.
struct IdealState {
  DensityOperator sigma;
  std::vector<Eigen::VectorXcd> ortho_branches;
  Eigen::MatrixXcd branch_overlaps;
};

IdealState gram_schmidt_ideal(const BranchDecomposition& branches,
                              const FragmentSpec& fragment);

/// Mutual-information discrepancy budget -3 f ln(f / d_S) with
/// f = sqrt(d_S (2 (d_S - 1) gamma_f^2 + gamma_fbar^2)); zero at f = 0.
double perturbation_budget(int system_dimension, double gamma_f,
                           double gamma_fbar);

}  // namespace qdarwin
