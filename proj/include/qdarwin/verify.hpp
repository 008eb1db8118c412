#pragma once

#include <string>
#include <vector>

#include "qdarwin/dynamics.hpp"
#include "qdarwin/infotheory.hpp"
#include "qdarwin/qstate.hpp"

namespace qdarwin::verify {

/// Outcome of one numerical check. margin measures how far inside the bound
/// the instance sits (>= 0 when passed); hypothesis_margin does the same for
/// the check's certified premise. skipped marks instances whose premise is
/// not met, which is not a failure. Witnesses emitted by run_suite are JSON
/// recipes that replay() re-executes bit-identically.
struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  double margin = 0.0;
  double hypothesis_margin = 0.0;
  std::string witness;
  std::string note;
};

/// Record duality: if some fragment measurement x reveals everything about a
/// (H(A|X) < tol), a coarse-graining x' of x satisfies both H(A|X') < tol and
/// H(X'|A) < tol.
CheckResult check_duality(const DensityOperator& rho, const Observable& a,
                          const Observable& x, double tol = 1e-8);

/// The coarse-grained record acts on the state exactly like the direct
/// measurement: ||X'_j rho X'_j - A_j rho A_j||_2 < tol for the paired
/// outcomes.
CheckResult check_same_effect(const DensityOperator& rho, const Observable& a,
                              const Observable& x, double duality_tol = 1e-8,
                              double tol = 1e-9);

/// Einselection: a fully recorded observable commutes with the reduced state.
/// info_deficit = H(A) - Ihat(A) is certified by the caller. The default
/// tolerances respect the perturbative scaling: the deficit is quadratic in
/// the decoherence factor while the commutator is linear, so a 1e-8 deficit
/// bounds the commutator only to about 2e-4.
CheckResult check_rho_commutes(const DensityOperator& rho_s, const Observable& a,
                               double info_deficit, double deficit_tol = 1e-8,
                               double commutator_tol = 1e-3);

enum class SupportKind { kSystem, kJoint };

/// Observables recorded in disjoint fragments commute on the support of the
/// reduced (or joint) state.
CheckResult check_commuting_records(const BranchDecomposition& branches,
                                    const Observable& b, const Observable& c,
                                    const FragmentSpec& fragment,
                                    SupportKind support,
                                    double record_tol = 1e-8,
                                    double commutator_tol = 1e-8);

/// The refined observable built from two redundantly recorded observables is
/// itself fully and redundantly recorded, and determines both factors.
CheckResult check_refined_record(const BranchDecomposition& branches,
                           const Observable& b, const Observable& c,
                           const std::vector<FragmentSpec>& partition,
                           double record_tol = 1e-8, double claim_tol = 1e-8);

/// Highly redundant observables commute on the support of rho^S. The
/// premise R_0(B) R_0(C) > N uses delta = 1e-6 as the zero-delta proxy.
CheckResult check_redundant_commute(const BranchDecomposition& branches,
                           const Observable& b, const Observable& c,
                           double commutator_tol = 1e-8);

/// Tr|rho - sigma| <= sqrt(d) ||rho - sigma||_2.
CheckResult check_cauchy_schwarz(const DensityOperator& rho,
                                 const DensityOperator& sigma);

/// Outcome statistics contract the trace distance: D(p, q) <= D(rho, sigma).
CheckResult check_measurement_distance(const DensityOperator& rho,
                                       const DensityOperator& sigma,
                                       const Observable& obs);

/// |H(p) - H(q)| <= D ln d + eta(D) for D = D(p, q) <= 1/e.
CheckResult check_fannes(const ProbabilityDistribution& p,
                         const ProbabilityDistribution& q);

/// Mixing conditional distributions never decreases entropy.
/// conditional_table columns are distributions of X given Y_j.
CheckResult check_convexity(const Eigen::MatrixXd& conditional_table,
                            const std::vector<double>& weights);

/// H(X) >= I(X:Y) >= I(X:Z) >= ... along a measured Markov chain.
CheckResult check_dpi(const ChainJoint& chain_joint);

/// Euclidean distance between the dynamical state and its Gram-Schmidt ideal
/// obeys sqrt(2 (d_S - 1) gf^2 + gfbar^2) plus the documented higher-order
/// allowance 5 (gf^{3/2} + gfbar^2).
CheckResult check_gs_bound(const BranchDecomposition& branches,
                           const FragmentSpec& fragment);

/// Sequential measurement chains factorize: max Markov violation below tol.
CheckResult check_markov(const DensityOperator& rho,
                         const std::vector<Observable>& chain,
                         double tol = 1e-9);

struct SuiteConfig {
  std::vector<int> env_counts{2, 4, 6, 8};
  std::vector<double> times{0.0, 0.19634954084936207, 0.39269908169872414,
                            0.7853981633974483};  // 0, pi/16, pi/8, pi/4
  int random_draws = 20;
  double coupling = 1.0;
  std::uint64_t seed = 7;
  int threads = 1;
};

/// Every check across the configured grid; deterministic for a fixed seed.
/// Failures carry witnesses that reproduce them via replay().
std::vector<CheckResult> run_suite(const SuiteConfig& config);

/// Re-executes a witness emitted by run_suite and returns the fresh result.
CheckResult replay(const std::string& witness_json);

}  // namespace qdarwin::verify
