#pragma once

#include <stdexcept>
#include <string>

namespace qdarwin {

// Two states or an observable/state pair do not live on the same space.
struct SpaceMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Tensor product of states whose subsystem labels overlap.
struct LabelCollisionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Conditioning on a measurement outcome of (numerically) zero probability.
struct NullConditioningError : std::domain_error {
  using std::domain_error::domain_error;
};

// Coarse-graining map does not cover every outcome.
struct IncompleteMapError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Refining two observables whose projectors do not commute.
struct CommutatorViolationError : std::invalid_argument {
  CommutatorViolationError(const std::string& what, double max_norm)
      : std::invalid_argument(what), max_commutator_norm(max_norm) {}
  double max_commutator_norm;
};

// Evolution generator is not Hermitian.
struct GeneratorError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested materialization exceeds the dense-representation budget.
struct BudgetError : std::length_error {
  using std::length_error::length_error;
};

// Branch states are linearly dependent; Gram-Schmidt construction undefined.
struct DegenerateBranchError : std::domain_error {
  using std::domain_error::domain_error;
};

// All outcomes of the conditioning observable have zero probability.
struct DegenerateObservableError : std::domain_error {
  using std::domain_error::domain_error;
};

// Perfect-correlation shortcut invoked outside its regime of validity.
struct RegimeError : std::domain_error {
  RegimeError(const std::string& what, double gf, double gfbar)
      : std::domain_error(what), gamma_f(gf), gamma_fbar(gfbar) {}
  double gamma_f;
  double gamma_fbar;
};

// A constructed object violates one of its type invariants.
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Malformed or unknown experiment configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qdarwin
