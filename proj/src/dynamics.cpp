#include "qdarwin/dynamics.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "qdarwin/errors.hpp"
#include "qdarwin/tolerances.hpp"

namespace qdarwin {

namespace {

using complexd = std::complex<double>;

Eigen::VectorXcd kron_accumulate(const std::vector<const Eigen::VectorXcd*>& factors) {
  Eigen::VectorXcd out = *factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    const Eigen::VectorXcd& right = *factors[k];
    Eigen::VectorXcd next(out.size() * right.size());
    for (Eigen::Index i = 0; i < out.size(); ++i)
      next.segment(i * right.size(), right.size()) = out[i] * right;
    out = std::move(next);
  }
  return out;
}

}  // namespace

TensorSpace ModelConfig::joint_space() const {
  std::vector<SubsystemLabel> subs;
  subs.push_back({0, system_dimension()});
  for (int k = 0; k < env_count(); ++k)
    subs.push_back({k + 1, static_cast<int>(env_initial_states[k].size())});
  return TensorSpace(std::move(subs));
}

void ModelConfig::validate() const {
  const int d_s = system_dimension();
  if (d_s < 2) throw InvariantViolation("system dimension must be >= 2");
  if (static_cast<int>(system_eigenvalues.size()) != d_s)
    throw InvariantViolation("one eigenvalue per system amplitude required");
  if (std::abs(system_amplitudes.squaredNorm() - 1.0) > tol::state)
    throw InvariantViolation("system amplitudes not normalized");

  for (int i = 0; i < d_s; ++i)
    for (int j = i + 1; j < d_s; ++j)
      if (std::abs(system_amplitudes[i]) > tol::state &&
          std::abs(system_amplitudes[j]) > tol::state &&
          std::abs(system_eigenvalues[i] - system_eigenvalues[j]) <= tol::state)
        throw InvariantViolation(
            "eigenvalues on occupied branches must be pairwise distinct");

  const int n = env_count();
  if (n < 1) throw InvariantViolation("at least one environment subsystem");
  if (static_cast<int>(env_initial_states.size()) != n ||
      static_cast<int>(env_generators.size()) != n)
    throw InvariantViolation("environment field lengths disagree");

  for (int k = 0; k < n; ++k) {
    const auto& phi = env_initial_states[k];
    if (phi.size() < 2) throw InvariantViolation("environment dimension must be >= 2");
    if (std::abs(phi.norm() - 1.0) > tol::state)
      throw InvariantViolation("environment initial state not normalized");
    const auto& z = env_generators[k];
    if (z.rows() != phi.size() || z.cols() != phi.size())
      throw GeneratorError("generator shape does not match subsystem " +
                           std::to_string(k + 1));
    if ((z - z.adjoint()).cwiseAbs().maxCoeff() > tol::projector)
      throw GeneratorError("generator for subsystem " + std::to_string(k + 1) +
                           " is not Hermitian");
  }
}

ModelConfig ModelConfig::dephasing_default(int env_count, double coupling,
                                           double time) {
  ModelConfig config;
  config.system_amplitudes = Eigen::VectorXcd::Constant(2, 1.0 / std::sqrt(2.0));
  config.system_eigenvalues = {1.0, -1.0};
  config.time = time;

  Eigen::MatrixXcd sigma_z(2, 2);
  sigma_z << 1, 0, 0, -1;
  Eigen::VectorXcd plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);

  config.couplings.assign(env_count, coupling);
  config.env_initial_states.assign(env_count, plus);
  config.env_generators.assign(env_count, sigma_z);
  return config;
}

BranchDecomposition::BranchDecomposition(
    Eigen::VectorXcd amplitudes, std::vector<double> eigenvalues,
    std::vector<std::vector<Eigen::VectorXcd>> branch_states,
    bool symmetric_environment)
    : amplitudes_(std::move(amplitudes)),
      eigenvalues_(std::move(eigenvalues)),
      branch_states_(std::move(branch_states)),
      symmetric_environment_(symmetric_environment) {
  for (const auto& per_branch : branch_states_)
    for (const auto& state : per_branch)
      if (std::abs(state.norm() - 1.0) > tol::state)
        throw InvariantViolation("branch state lost unit norm");
}

std::complex<double> BranchDecomposition::subsystem_overlap(int env_label,
                                                            int ket_branch,
                                                            int bra_branch) const {
  // Eigen's dot conjugates its left argument: <bra | ket>.
  return branch_states_[bra_branch][env_label - 1].dot(
      branch_states_[ket_branch][env_label - 1]);
}

TensorSpace BranchDecomposition::joint_space() const {
  std::vector<SubsystemLabel> subs;
  subs.push_back({0, system_dimension()});
  for (int k = 1; k <= env_count(); ++k)
    subs.push_back({k, static_cast<int>(branch_states_.front()[k - 1].size())});
  return TensorSpace(std::move(subs));
}

TensorSpace BranchDecomposition::system_space() const {
  return TensorSpace::single(0, system_dimension());
}

TensorSpace BranchDecomposition::sf_space(const FragmentSpec& fragment) const {
  std::vector<SubsystemLabel> subs;
  subs.push_back({0, system_dimension()});
  int next = 1;
  for (int label : fragment.members) {
    if (label < 1 || label > env_count())
      throw SpaceMismatchError("fragment label " + std::to_string(label) +
                               " outside environment");
    subs.push_back({next++, static_cast<int>(branch_states_.front()[label - 1].size())});
  }
  return TensorSpace(std::move(subs));
}

FragmentSpec BranchDecomposition::whole_environment() const {
  std::vector<int> members(env_count());
  for (int k = 0; k < env_count(); ++k) members[k] = k + 1;
  return FragmentSpec{std::move(members)};
}

FragmentSpec BranchDecomposition::complement(const FragmentSpec& fragment) const {
  std::vector<int> members;
  for (int k = 1; k <= env_count(); ++k)
    if (!fragment.contains(k)) members.push_back(k);
  return FragmentSpec{std::move(members)};
}

Eigen::VectorXcd BranchDecomposition::fragment_branch_state(
    const FragmentSpec& fragment, int branch) const {
  std::int64_t dim = 1;
  std::vector<const Eigen::VectorXcd*> factors;
  for (int label : fragment.members) {
    if (label < 1 || label > env_count())
      throw SpaceMismatchError("fragment label " + std::to_string(label) +
                               " outside environment");
    factors.push_back(&branch_states_[branch][label - 1]);
    dim *= factors.back()->size();
    if (dim > tol::dense_budget)
      throw BudgetError("fragment dimension exceeds the dense budget");
  }
  if (factors.empty()) throw BudgetError("empty fragment has no state");
  return kron_accumulate(factors);
}

StateVector BranchDecomposition::full_state() const {
  const TensorSpace space = joint_space();
  if (space.total_dimension() > tol::dense_budget)
    throw BudgetError("joint space exceeds the dense budget");

  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(space.total_dimension());
  const std::int64_t env_dim = space.total_dimension() / system_dimension();
  for (int j = 0; j < branch_count(); ++j) {
    std::vector<const Eigen::VectorXcd*> factors;
    for (int k = 1; k <= env_count(); ++k) factors.push_back(&branch_states_[j][k - 1]);
    amps.segment(j * env_dim, env_dim) = amplitudes_[j] * kron_accumulate(factors);
  }
  return StateVector(space, std::move(amps));
}

BranchDecomposition evolve(const ModelConfig& config) {
  config.validate();

  const int d_s = config.system_dimension();
  const int n = config.env_count();

  // Diagonalize each generator once; every branch reuses the same frame.
  std::vector<Eigen::MatrixXcd> frames(n);
  std::vector<Eigen::VectorXd> spectra(n);
  for (int k = 0; k < n; ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(config.env_generators[k]);
    frames[k] = solver.eigenvectors();
    spectra[k] = solver.eigenvalues();
  }

  std::vector<std::vector<Eigen::VectorXcd>> branch_states(
      d_s, std::vector<Eigen::VectorXcd>(n));
  for (int j = 0; j < d_s; ++j)
    for (int k = 0; k < n; ++k) {
      const double angle = config.time * config.system_eigenvalues[j] *
                           config.couplings[k];
      Eigen::VectorXcd phases(spectra[k].size());
      for (Eigen::Index m = 0; m < spectra[k].size(); ++m)
        phases[m] = std::exp(complexd(0.0, -angle * spectra[k][m]));
      branch_states[j][k] =
          frames[k] *
          (phases.asDiagonal() * (frames[k].adjoint() * config.env_initial_states[k]));
    }

  bool symmetric = true;
  for (int k = 1; k < n && symmetric; ++k) {
    symmetric = std::abs(config.couplings[k] - config.couplings[0]) <= tol::state &&
                config.env_initial_states[k].size() ==
                    config.env_initial_states[0].size() &&
                (config.env_initial_states[k] - config.env_initial_states[0])
                        .cwiseAbs()
                        .maxCoeff() <= tol::state &&
                config.env_generators[k].rows() == config.env_generators[0].rows() &&
                (config.env_generators[k] - config.env_generators[0])
                        .cwiseAbs()
                        .maxCoeff() <= tol::state;
  }

  return BranchDecomposition(config.system_amplitudes, config.system_eigenvalues,
                             std::move(branch_states), symmetric);
}

DecoherenceFactors decoherence_factors(const BranchDecomposition& branches,
                                       const FragmentSpec& fragment) {
  const int d_s = branches.branch_count();
  Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Ones(d_s, d_s);
  for (int label : fragment.members) {
    if (label < 1 || label > branches.env_count())
      throw SpaceMismatchError("fragment label " + std::to_string(label) +
                               " outside environment");
    for (int i = 0; i < d_s; ++i)
      for (int j = 0; j < d_s; ++j)
        gamma(i, j) *= branches.subsystem_overlap(label, i, j);
  }
  double gamma_max = 0.0;
  for (int i = 0; i < d_s; ++i)
    for (int j = 0; j < d_s; ++j)
      if (i != j) gamma_max = std::max(gamma_max, std::abs(gamma(i, j)));
  return DecoherenceFactors{fragment, std::move(gamma), gamma_max};
}

DensityOperator reduced_state_sf(const BranchDecomposition& branches,
                                 const FragmentSpec& fragment) {
  const TensorSpace space = branches.sf_space(fragment);
  if (space.total_dimension() > tol::dense_budget)
    throw BudgetError("system+fragment dimension exceeds the dense budget");

  const DecoherenceFactors rest =
      decoherence_factors(branches, branches.complement(fragment));

  const int d_s = branches.branch_count();
  const std::int64_t frag_dim = space.total_dimension() / d_s;

  std::vector<Eigen::VectorXcd> frag_states(d_s);
  for (int j = 0; j < d_s; ++j) {
    frag_states[j] = fragment.members.empty()
                         ? Eigen::VectorXcd::Ones(1)
                         : branches.fragment_branch_state(fragment, j);
  }

  Eigen::MatrixXcd out =
      Eigen::MatrixXcd::Zero(space.total_dimension(), space.total_dimension());
  const Eigen::VectorXcd& alpha = branches.amplitudes();
  for (int i = 0; i < d_s; ++i)
    for (int j = 0; j < d_s; ++j) {
      const complexd coeff = alpha[i] * std::conj(alpha[j]) * rest.gamma(i, j);
      if (coeff == complexd(0.0)) continue;
      out.block(i * frag_dim, j * frag_dim, frag_dim, frag_dim) =
          coeff * (frag_states[i] * frag_states[j].adjoint());
    }
  return DensityOperator(space, std::move(out));
}

DensityOperator reduced_state_s(const BranchDecomposition& branches) {
  const DecoherenceFactors whole =
      decoherence_factors(branches, branches.whole_environment());
  const int d_s = branches.branch_count();
  const Eigen::VectorXcd& alpha = branches.amplitudes();
  Eigen::MatrixXcd out(d_s, d_s);
  for (int i = 0; i < d_s; ++i)
    for (int j = 0; j < d_s; ++j)
      out(i, j) = alpha[i] * std::conj(alpha[j]) * whole.gamma(i, j);
  return DensityOperator(branches.system_space(), std::move(out));
}

IdealState gram_schmidt_ideal(const BranchDecomposition& branches,
                              const FragmentSpec& fragment) {
  const int d_s = branches.branch_count();
  if (fragment.members.empty())
    throw DegenerateBranchError("empty fragment cannot hold distinct branches");

  std::vector<Eigen::VectorXcd> phi(d_s);
  for (int j = 0; j < d_s; ++j)
    phi[j] = branches.fragment_branch_state(fragment, j);

  Eigen::MatrixXcd gram(d_s, d_s);
  for (int i = 0; i < d_s; ++i)
    for (int j = 0; j < d_s; ++j) gram(i, j) = phi[i].dot(phi[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> gram_eigs(gram,
                                                            Eigen::EigenvaluesOnly);
  if (gram_eigs.eigenvalues().minCoeff() <= tol::gram_rank)
    throw DegenerateBranchError(
        "branch states linearly dependent: min Gram eigenvalue " +
        std::to_string(gram_eigs.eigenvalues().minCoeff()));

  // Gram-Schmidt in branch-index order.
  std::vector<Eigen::VectorXcd> psi(d_s);
  for (int i = 0; i < d_s; ++i) {
    Eigen::VectorXcd v = phi[i];
    for (int j = 0; j < i; ++j) v -= psi[j].dot(phi[i]) * psi[j];
    psi[i] = v / v.norm();
  }

  Eigen::MatrixXcd overlaps(d_s, d_s);
  for (int j = 0; j < d_s; ++j)
    for (int i = 0; i < d_s; ++i) overlaps(j, i) = phi[j].dot(psi[i]);

  const TensorSpace space = branches.sf_space(fragment);
  const std::int64_t frag_dim = space.total_dimension() / d_s;
  Eigen::MatrixXcd sigma =
      Eigen::MatrixXcd::Zero(space.total_dimension(), space.total_dimension());
  const Eigen::VectorXcd& alpha = branches.amplitudes();
  for (int i = 0; i < d_s; ++i)
    sigma.block(i * frag_dim, i * frag_dim, frag_dim, frag_dim) =
        std::norm(alpha[i]) * (psi[i] * psi[i].adjoint());

  return IdealState{DensityOperator(space, std::move(sigma)), std::move(psi),
                    std::move(overlaps)};
}

double perturbation_budget(int system_dimension, double gamma_f,
                           double gamma_fbar) {
  const double d_s = static_cast<double>(system_dimension);
  const double f = std::sqrt(
      d_s * (2.0 * (d_s - 1.0) * gamma_f * gamma_f + gamma_fbar * gamma_fbar));
  if (f == 0.0) return 0.0;
  return -3.0 * f * std::log(f / d_s);
}

}  // namespace qdarwin
