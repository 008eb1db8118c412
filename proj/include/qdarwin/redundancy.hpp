#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qdarwin/dynamics.hpp"
#include "qdarwin/infotheory.hpp"
#include "qdarwin/observable.hpp"

namespace qdarwin {

enum class SearchStrategy {
  /// Measurement built from the Gram-Schmidt orthonormalized fragment branch
  /// states (plus, for non-degenerate observables, a rotation of that frame
  /// steered toward the observable's eigenstates). Optimal in the
  /// perfect-correlation regime; a lower bound otherwise.
  kBranchOptimal,
  /// Multi-restart stochastic ascent over complete rank-1 projective
  /// measurements of the fragment.
  kParametrizedSearch,
  /// Fragment dimension <= 4: every rank profile, dense start grid, refined
  /// ascent. Serves as the search oracle.
  kExhaustiveSmall,
};

struct MeasurementSearchConfig {
  SearchStrategy strategy = SearchStrategy::kBranchOptimal;
  int restarts = 8;
  double tolerance = 1e-9;
  int max_iterations = 1500;
  std::uint64_t seed = 1;
};

struct MaxInfoResult {
  double info = 0.0;
  Observable measurement;  // on sf_space(fragment), acting on labels 1..|F|
  SearchStrategy strategy = SearchStrategy::kBranchOptimal;
};

/// Ihat_F(A): the largest I(A:X) over projective measurements X on the fragment,
/// per the configured strategy, and the achieving measurement. The system
/// observable lives on the system-only space (label 0).
MaxInfoResult max_info_fragment(const BranchDecomposition& branches,
                                const Observable& system_obs,
                                const FragmentSpec& fragment,
                                const MeasurementSearchConfig& cfg);

/// Value-only branch-optimal information; no measurement materialization, so
/// it runs on fragments of any size.
double branch_info_value(const BranchDecomposition& branches,
                         const Observable& system_obs,
                         const FragmentSpec& fragment);

struct RedundancyReport {
  RedundancyReport(Observable obs, double d)
      : observable(std::move(obs)), delta(d) {}

  Observable observable;
  double delta = 0.0;
  double i_hat_full = 0.0;  // Ihat_E over the whole environment
  std::vector<FragmentSpec> partition;  // the counted (qualifying) fragments
  std::vector<double> fragment_infos;
  std::vector<std::optional<Observable>> optimizing_measurements;
  int r_delta = 1;
  bool no_information = false;  // i_hat_full at numerical zero
  // Subsystems outside every counted fragment; leaving them uncounted is
  // allowed and can only increase the count.
  FragmentSpec leftovers;
};

/// R_delta: the largest number of disjoint fragments each carrying at least
/// (1 - delta) of the whole-environment information. Exhaustive over set
/// partitions for N <= 8; equal-size-fragment shortcut for symmetric
/// environments; greedy growth with a shrink pass otherwise.
RedundancyReport redundancy(const BranchDecomposition& branches,
                            const Observable& system_obs, double delta,
                            const MeasurementSearchConfig& cfg);

/// Ihat_F(B) evaluated through the pointer observable as I(B:A) on rho^S
/// (sequential, A first). Requires the perfect-correlation regime: both
/// gamma maxima at or below gamma_threshold, else RegimeError.
double max_info_via_pointer(const BranchDecomposition& branches,
                            const Observable& b, const Observable& a_pointer,
                            const FragmentSpec& fragment,
                            double gamma_threshold = 0.1);

struct PointerDetection {
  int grid_index = -1;
  Observable observable;
  int r_delta = 1;
  double i_hat_full = 0.0;
  bool no_redundancy = false;
};

/// The candidate maximizing R_delta, ties broken by larger Ihat_E then lowest
/// grid index. Flags no_redundancy when every candidate has R_delta <= 1.
PointerDetection pointer_detect(const BranchDecomposition& branches,
                                const std::vector<Observable>& candidates,
                                double delta,
                                const MeasurementSearchConfig& cfg);

}  // namespace qdarwin
