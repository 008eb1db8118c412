#include "qdarwin/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdarwin/errors.hpp"
#include "qdarwin/tolerances.hpp"

namespace qdarwin {

StateVector tensor_product(const std::vector<StateVector>& states) {
  if (states.empty()) throw InvariantViolation("tensor product of nothing");

  TensorSpace space = states.front().space();
  Eigen::VectorXcd amps = states.front().amplitudes();
  for (std::size_t k = 1; k < states.size(); ++k) {
    space = merge(space, states[k].space());  // throws on label collision
    const Eigen::VectorXcd& right = states[k].amplitudes();
    Eigen::VectorXcd next(amps.size() * right.size());
    for (std::int64_t i = 0; i < amps.size(); ++i)
      next.segment(i * right.size(), right.size()) = amps[i] * right;
    amps = std::move(next);
  }
  // The assembled space must cover labels 0..M-1.
  for (int label = 0; label < space.subsystem_count(); ++label)
    if (!space.has_label(label))
      throw InvariantViolation("product space labels not contiguous from 0");
  return StateVector(std::move(space), std::move(amps));
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& keep_labels) {
  if (keep_labels.empty())
    throw std::domain_error("partial trace must keep at least one subsystem");

  const TensorSpace& space = rho.space();
  std::vector<int> keep_positions;
  for (int label : keep_labels) keep_positions.push_back(space.position_of(label));
  std::sort(keep_positions.begin(), keep_positions.end());
  if (std::adjacent_find(keep_positions.begin(), keep_positions.end()) !=
      keep_positions.end())
    throw std::domain_error("duplicate label in keep set");

  std::vector<int> traced_positions;
  for (int pos = 0; pos < space.subsystem_count(); ++pos)
    if (!std::binary_search(keep_positions.begin(), keep_positions.end(), pos))
      traced_positions.push_back(pos);

  TensorSpace reduced = space.keep_only(keep_labels);
  if (traced_positions.empty())
    return DensityOperator(std::move(reduced), rho.matrix());

  const SubsetIndexer kept(space, keep_positions);
  const SubsetIndexer traced(space, traced_positions);
  const std::int64_t dim_keep = kept.combined_dimension();

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_keep, dim_keep);
  const Eigen::MatrixXcd& m = rho.matrix();
  for (std::int64_t a = 0; a < dim_keep; ++a)
    for (std::int64_t b = 0; b < dim_keep; ++b) {
      std::complex<double> sum = 0.0;
      for (std::int64_t e = 0; e < traced.combined_dimension(); ++e)
        sum += m(kept.offset(a) + traced.offset(e),
                 kept.offset(b) + traced.offset(e));
      out(a, b) = sum;
    }
  return DensityOperator(std::move(reduced), std::move(out));
}

ProbabilityDistribution born_probabilities(const DensityOperator& rho,
                                           const Observable& obs) {
  if (!(rho.space() == obs.space()))
    throw SpaceMismatchError("observable and state live on different spaces");

  // Tr{(P (x) I) rho} = Tr{P Tr_rest(rho)}: reduce once, then use the local
  // projectors.
  const DensityOperator local = partial_trace(rho, obs.acts_on());
  std::vector<double> p(obs.outcome_count());
  for (int i = 0; i < obs.outcome_count(); ++i)
    p[i] = (obs.local_projector(i) * local.matrix()).trace().real();
  return ProbabilityDistribution(std::move(p));
}

DensityOperator conditional_state(const DensityOperator& rho,
                                  const Observable& obs, int outcome) {
  if (!(rho.space() == obs.space()))
    throw SpaceMismatchError("observable and state live on different spaces");

  const Eigen::MatrixXcd projector = obs.embedded_projector(outcome);
  Eigen::MatrixXcd updated = projector * rho.matrix() * projector;
  const double probability = updated.trace().real();
  if (probability <= tol::null_outcome)
    throw NullConditioningError("conditioning on outcome " +
                                std::to_string(outcome) + " of probability " +
                                std::to_string(probability));
  updated /= probability;
  return DensityOperator(rho.space(), std::move(updated));
}

Observable coarse_grain(const Observable& obs,
                        const std::vector<int>& outcome_to_group) {
  if (static_cast<int>(outcome_to_group.size()) != obs.outcome_count())
    throw IncompleteMapError("outcome map must cover every outcome");

  // Groups keep the order of first appearance and are relabeled 0..G-1.
  std::vector<int> group_ids;
  std::vector<Eigen::MatrixXcd> projectors;
  for (int outcome = 0; outcome < obs.outcome_count(); ++outcome) {
    const int group = outcome_to_group[outcome];
    auto it = std::find(group_ids.begin(), group_ids.end(), group);
    if (it == group_ids.end()) {
      group_ids.push_back(group);
      projectors.push_back(obs.local_projector(outcome));
    } else {
      projectors[it - group_ids.begin()] += obs.local_projector(outcome);
    }
  }
  std::vector<double> labels(group_ids.size());
  for (std::size_t g = 0; g < group_ids.size(); ++g)
    labels[g] = static_cast<double>(g);
  return Observable(obs.space(), obs.acts_on(), std::move(projectors),
                    std::move(labels));
}

std::vector<int> Refinement::first_factor_map() const {
  std::vector<int> map(outcome_pairs.size());
  for (std::size_t k = 0; k < outcome_pairs.size(); ++k)
    map[k] = outcome_pairs[k].first;
  return map;
}

std::vector<int> Refinement::second_factor_map() const {
  std::vector<int> map(outcome_pairs.size());
  for (std::size_t k = 0; k < outcome_pairs.size(); ++k)
    map[k] = outcome_pairs[k].second;
  return map;
}

Refinement refine(const Observable& b, const Observable& c) {
  if (!(b.space() == c.space()))
    throw SpaceMismatchError("refine requires observables on one space");

  // Lift both to the union of their supports.
  std::vector<int> support = b.acts_on();
  for (int label : c.acts_on())
    if (std::find(support.begin(), support.end(), label) == support.end())
      support.push_back(label);
  std::sort(support.begin(), support.end(), [&b](int x, int y) {
    return b.space().position_of(x) < b.space().position_of(y);
  });

  auto lift = [&support, &b](const Observable& obs, int outcome) {
    TensorSpace sub = b.space().keep_only(support);
    std::vector<int> relabeled;
    for (int label : obs.acts_on()) {
      const auto it = std::find(support.begin(), support.end(), label);
      relabeled.push_back(static_cast<int>(it - support.begin()));
    }
    return embed_on(sub, relabeled, obs.local_projector(outcome));
  };

  double max_commutator = 0.0;
  std::vector<Eigen::MatrixXcd> lifted_b, lifted_c;
  for (int i = 0; i < b.outcome_count(); ++i) lifted_b.push_back(lift(b, i));
  for (int j = 0; j < c.outcome_count(); ++j) lifted_c.push_back(lift(c, j));
  for (const auto& pb : lifted_b)
    for (const auto& pc : lifted_c)
      max_commutator =
          std::max(max_commutator, (pb * pc - pc * pb).norm());
  if (max_commutator > tol::projector)
    throw CommutatorViolationError(
        "refine requires commuting projectors; max commutator norm " +
            std::to_string(max_commutator),
        max_commutator);

  std::vector<Eigen::MatrixXcd> products;
  std::vector<double> labels;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < b.outcome_count(); ++i)
    for (int j = 0; j < c.outcome_count(); ++j) {
      Eigen::MatrixXcd p = lifted_b[i] * lifted_c[j];
      p = (p + p.adjoint().eval()) / 2.0;  // remove rounding skew
      if (p.cwiseAbs().maxCoeff() <= tol::projector) continue;
      products.push_back(std::move(p));
      labels.push_back(static_cast<double>(i * c.outcome_count() + j));
      pairs.emplace_back(i, j);
    }

  Observable refined(b.space(), support, std::move(products), std::move(labels));
  return Refinement{std::move(refined), std::move(pairs)};
}

}  // namespace qdarwin
