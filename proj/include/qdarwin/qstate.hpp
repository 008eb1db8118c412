#pragma once

#include <utility>
#include <vector>

#include "qdarwin/observable.hpp"
#include "qdarwin/probability.hpp"
#include "qdarwin/state.hpp"

namespace qdarwin {

/// Kronecker product of pure states in argument order. Subsystem labels must
/// be pairwise disjoint and jointly contiguous from 0.
StateVector tensor_product(const std::vector<StateVector>& states);

/// Trace out every subsystem not in keep_labels. The result keeps the
/// surviving subsystems in their original position order, relabeled 0..K-1.
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& keep_labels);

/// Born-rule outcome statistics: p_i = Tr{P_i rho}.
ProbabilityDistribution born_probabilities(const DensityOperator& rho,
                                           const Observable& obs);

/// Projection-postulate update P rho P / Tr{P rho P} for one outcome.
DensityOperator conditional_state(const DensityOperator& rho,
                                  const Observable& obs, int outcome);

/// Group outcomes: projector of group g is the sum of the projectors mapped
/// to g. outcome_to_group must be total on the outcomes; groups are relabeled
/// 0..G-1 in order of first appearance.
Observable coarse_grain(const Observable& obs,
                        const std::vector<int>& outcome_to_group);

/// Product observable from two commuting observables. Outcome (i, j) carries
/// projector B_i C_j (zero products dropped); outcome_pairs records the (i, j)
/// origin of each surviving outcome so either factor can be recovered by
/// coarse_grain.
struct Refinement {
  Observable observable;
  std::vector<std::pair<int, int>> outcome_pairs;

  std::vector<int> first_factor_map() const;
  std::vector<int> second_factor_map() const;
};

Refinement refine(const Observable& b, const Observable& c);

}  // namespace qdarwin
