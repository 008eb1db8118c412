#include "qdarwin/redundancy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "qdarwin/errors.hpp"
#include "qdarwin/qstate.hpp"
#include "qdarwin/tolerances.hpp"
#include "qdarwin/util.hpp"

namespace qdarwin {

namespace {

using complexd = std::complex<double>;

constexpr double kNoInformationThreshold = 1e-9;
// Residual-norm cutoff for the rank-revealing orthonormalization of branch
// states; below it a branch adds no further outcome.
constexpr double kFrameRankTol = 1e-6;
// Observable construction validates projector algebra at O(d^3), so
// measurement materialization gets tighter caps than the state-vector
// budget: explicit requests up to joint dimension 2048, report convenience
// copies up to 1024 (omitted above that).
constexpr std::int64_t kMeasurementBudget = 2048;
constexpr std::int64_t kReportMeasurementBudget = 1024;

void require_system_observable(const BranchDecomposition& branches,
                               const Observable& obs) {
  if (!(obs.space() == branches.system_space()))
    throw SpaceMismatchError(
        "system observable must live on the system-only space (label 0)");
}

// <Phi_i^F | Phi_j^F> from per-subsystem overlaps.
Eigen::MatrixXcd fragment_gram(const BranchDecomposition& branches,
                               const FragmentSpec& fragment) {
  const int d_s = branches.branch_count();
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Ones(d_s, d_s);
  for (int label : fragment.members)
    for (int i = 0; i < d_s; ++i)
      for (int j = 0; j < d_s; ++j)
        gram(i, j) *= branches.subsystem_overlap(label, j, i);
  return gram;
}

// Orthonormal frame spanning the fragment branch states, expressed in branch
// coordinates: Psi_m = sum_i coeffs(m, i) Phi_i. Rank-revealing Gram-Schmidt
// in branch-index order; overlaps(m, i) = <Psi_m | Phi_i>.
struct GramFrame {
  Eigen::MatrixXcd coeffs;
  Eigen::MatrixXcd overlaps;
  std::vector<int> kept;
};

GramFrame gram_frame(const Eigen::MatrixXcd& gram, double rank_tol) {
  const int d_s = static_cast<int>(gram.rows());
  std::vector<Eigen::RowVectorXcd> rows;
  std::vector<int> kept;

  for (int i = 0; i < d_s; ++i) {
    Eigen::VectorXcd projections(static_cast<int>(rows.size()));
    for (std::size_t m = 0; m < rows.size(); ++m)
      projections[static_cast<int>(m)] = (rows[m].conjugate() * gram.col(i))(0);
    double residual_sq = gram(i, i).real() - projections.squaredNorm();
    if (residual_sq < rank_tol * rank_tol) continue;
    Eigen::RowVectorXcd coeff = Eigen::RowVectorXcd::Zero(d_s);
    coeff[i] = 1.0;
    for (std::size_t m = 0; m < rows.size(); ++m)
      coeff -= projections[static_cast<int>(m)] * rows[m];
    coeff /= std::sqrt(residual_sq);
    rows.push_back(std::move(coeff));
    kept.push_back(i);
  }

  GramFrame frame;
  frame.kept = std::move(kept);
  frame.coeffs.resize(static_cast<int>(rows.size()), d_s);
  for (std::size_t m = 0; m < rows.size(); ++m) frame.coeffs.row(static_cast<int>(m)) = rows[m];
  frame.overlaps = frame.coeffs.conjugate() * gram;
  return frame;
}

// Joint table p(B_l, X_m) for measurement vectors x_m in the branch span,
// given their branch overlaps M(m, i) = <x_m | Phi_i>:
//   p(l, m) = Re sum_ij alpha_i alpha_j^* gammabar(i, j) <j|B_l|i>
//             M(m, i) M(m, j)^*
// A final column collects the remainder outcome (the projector completing
// the frame to a full fragment measurement).
Eigen::MatrixXd span_joint_table(const BranchDecomposition& branches,
                                 const Observable& system_obs,
                                 const Eigen::MatrixXcd& gamma_fbar,
                                 const Eigen::MatrixXcd& gram,
                                 const Eigen::MatrixXcd& measurement_overlaps) {
  const int d_s = branches.branch_count();
  const int n_b = system_obs.outcome_count();
  const int n_x = static_cast<int>(measurement_overlaps.rows());
  const Eigen::VectorXcd& alpha = branches.amplitudes();

  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(n_b, n_x + 1);
  for (int l = 0; l < n_b; ++l) {
    const Eigen::MatrixXcd& proj = system_obs.local_projector(l);
    complexd total = 0.0;
    for (int i = 0; i < d_s; ++i)
      for (int j = 0; j < d_s; ++j) {
        const complexd weight =
            alpha[i] * std::conj(alpha[j]) * gamma_fbar(i, j) * proj(j, i);
        if (weight == complexd(0.0)) continue;
        total += weight * gram(j, i);
        for (int m = 0; m < n_x; ++m)
          table(l, m) += (weight * measurement_overlaps(m, i) *
                          std::conj(measurement_overlaps(m, j)))
                             .real();
      }
    table(l, n_x) = total.real() - table.row(l).head(n_x).sum();
  }
  return table;
}

double info_from_table(Eigen::MatrixXd table) {
  for (Eigen::Index i = 0; i < table.rows(); ++i)
    for (Eigen::Index j = 0; j < table.cols(); ++j)
      if (table(i, j) < 0.0 && table(i, j) >= -tol::probability_clamp)
        table(i, j) = 0.0;
  return mutual_information(JointDistribution(std::move(table))).mutual;
}

// Rotation of the orthonormal branch frame whose outcomes steer the system
// toward the observable's eigenstates. Requires every branch amplitude
// nonzero, a full-rank frame, and rank-1 projectors; returns empty otherwise.
std::optional<Eigen::MatrixXcd> steered_overlaps(
    const BranchDecomposition& branches, const Observable& system_obs,
    const GramFrame& frame) {
  const int d_s = branches.branch_count();
  if (static_cast<int>(frame.kept.size()) != d_s) return std::nullopt;
  if (system_obs.outcome_count() != d_s) return std::nullopt;
  const Eigen::VectorXcd& alpha = branches.amplitudes();
  for (int i = 0; i < d_s; ++i)
    if (std::abs(alpha[i]) <= tol::state) return std::nullopt;

  Eigen::MatrixXcd targets(d_s, d_s);  // T(l, i) = <i|b_l> / alpha_i
  for (int l = 0; l < d_s; ++l) {
    const Eigen::MatrixXcd& proj = system_obs.local_projector(l);
    if (std::abs(proj.trace().real() - 1.0) > 1e-9) return std::nullopt;
    // Unit vector of the rank-1 projector: its largest column, normalized.
    Eigen::Index best = 0;
    proj.colwise().norm().maxCoeff(&best);
    const Eigen::VectorXcd b = proj.col(best) / proj.col(best).norm();
    for (int i = 0; i < d_s; ++i) targets(l, i) = b[i] / alpha[i];
  }

  const Eigen::MatrixXcd raw =
      targets * frame.overlaps.inverse();  // rows: bra coefficients over Psi
  const Eigen::MatrixXcd gram_rows = raw * raw.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram_rows);
  if (solver.eigenvalues().minCoeff() < 1e-12) return std::nullopt;
  const Eigen::MatrixXcd inv_sqrt =
      solver.eigenvectors() *
      solver.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      solver.eigenvectors().adjoint();
  return Eigen::MatrixXcd((inv_sqrt * raw) * frame.overlaps);
}

struct BranchRouteResult {
  double info = 0.0;
  // Coefficients of the chosen measurement vectors over the Phi basis
  // (x_m = sum_i K(m, i) Phi_i), for materialization.
  Eigen::MatrixXcd phi_coefficients;
};

BranchRouteResult branch_route(const BranchDecomposition& branches,
                               const Observable& system_obs,
                               const FragmentSpec& fragment) {
  const Eigen::MatrixXcd gram = fragment_gram(branches, fragment);
  const Eigen::MatrixXcd gamma_fbar =
      decoherence_factors(branches, branches.complement(fragment)).gamma;
  const GramFrame frame = gram_frame(gram, kFrameRankTol);

  BranchRouteResult result;
  result.info = info_from_table(
      span_joint_table(branches, system_obs, gamma_fbar, gram, frame.overlaps));
  result.phi_coefficients = frame.coeffs;

  if (const auto steered = steered_overlaps(branches, system_obs, frame)) {
    const double steered_info = info_from_table(
        span_joint_table(branches, system_obs, gamma_fbar, gram, *steered));
    if (steered_info > result.info) {
      result.info = steered_info;
      // M = A S with S = frame.overlaps and bra rows A; the ket coefficients
      // over Phi are conj(A) * frame.coeffs.
      const Eigen::MatrixXcd bra_rows =
          *steered * frame.overlaps.inverse();
      result.phi_coefficients = bra_rows.conjugate() * frame.coeffs;
    }
  }
  return result;
}

// Materialize measurement vectors x_m = sum_i K(m, i) Phi_i^F as a fragment
// observable on sf_space(fragment), remainder projector appended when the
// frame does not span the fragment.
Observable materialize_frame(const BranchDecomposition& branches,
                             const FragmentSpec& fragment,
                             const Eigen::MatrixXcd& phi_coefficients) {
  const TensorSpace space = branches.sf_space(fragment);
  const std::int64_t frag_dim =
      space.total_dimension() / branches.system_dimension();

  std::vector<Eigen::VectorXcd> phi(branches.branch_count());
  for (int i = 0; i < branches.branch_count(); ++i)
    phi[i] = branches.fragment_branch_state(fragment, i);

  std::vector<Eigen::MatrixXcd> projectors;
  Eigen::MatrixXcd span_sum = Eigen::MatrixXcd::Zero(frag_dim, frag_dim);
  for (int m = 0; m < phi_coefficients.rows(); ++m) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(frag_dim);
    for (int i = 0; i < branches.branch_count(); ++i)
      x += phi_coefficients(m, i) * phi[i];
    x /= x.norm();
    projectors.push_back(x * x.adjoint());
    span_sum += projectors.back();
  }
  Eigen::MatrixXcd remainder =
      Eigen::MatrixXcd::Identity(frag_dim, frag_dim) - span_sum;
  if (remainder.trace().real() > 0.5) projectors.push_back(remainder);

  std::vector<double> labels(projectors.size());
  for (std::size_t m = 0; m < projectors.size(); ++m)
    labels[m] = static_cast<double>(m);

  std::vector<int> acts_on(fragment.members.size());
  for (std::size_t k = 0; k < acts_on.size(); ++k)
    acts_on[k] = static_cast<int>(k) + 1;
  return Observable(space, std::move(acts_on), std::move(projectors),
                    std::move(labels));
}

// ---- Dense search over materialized fragment measurements ----------------

// Per-column statistics E_v(s', s) = <v| rho_{s' s} |v|> with rho_{s' s} the
// (s', s) fragment block of rho^{SF}; the joint table for a grouped frame is
// p(l, g) = Re Tr{B_l sum_{v in g} E_v}.
struct DenseEvaluator {
  const Observable* system_obs;
  Eigen::MatrixXcd rho;  // on sf space, system index most significant
  int d_s;
  std::int64_t frag_dim;

  double objective(const Eigen::MatrixXcd& frame,
                   const std::vector<int>& grouping, int group_count) const {
    std::vector<Eigen::MatrixXcd> blocks(
        group_count, Eigen::MatrixXcd::Zero(d_s, d_s));
    for (int c = 0; c < frame.cols(); ++c) {
      const Eigen::VectorXcd v = frame.col(c);
      Eigen::MatrixXcd e(d_s, d_s);
      for (int sp = 0; sp < d_s; ++sp)
        for (int s = 0; s < d_s; ++s)
          e(sp, s) =
              v.dot(rho.block(sp * frag_dim, s * frag_dim, frag_dim, frag_dim) * v);
      blocks[grouping[c]] += e;
    }
    Eigen::MatrixXd table(system_obs->outcome_count(), group_count);
    for (int l = 0; l < system_obs->outcome_count(); ++l)
      for (int g = 0; g < group_count; ++g)
        table(l, g) =
            (system_obs->local_projector(l) * blocks[g]).trace().real();
    return info_from_table(std::move(table));
  }
};

Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ() *
         Eigen::MatrixXcd::Identity(m.rows(), m.cols());
}

// Adaptive random ascent over unitary frames with a fixed outcome grouping:
// the step grows on acceptance and halves after a run of rejections, down to
// a floor fine enough for 1e-6-level convergence of the objective.
double ascend(const DenseEvaluator& eval, Eigen::MatrixXcd frame,
              const std::vector<int>& grouping, int group_count,
              const MeasurementSearchConfig& cfg, Rng& rng,
              Eigen::MatrixXcd* best_frame) {
  double best = eval.objective(frame, grouping, group_count);
  double step = 0.25;
  int rejects = 0;
  const double floor = std::max(cfg.tolerance * 1e-3, 1e-10);
  for (int iter = 0; iter < cfg.max_iterations && step >= floor; ++iter) {
    const Eigen::MatrixXcd candidate = orthonormalize(
        frame + step * rng.gaussian_matrix(static_cast<int>(frame.rows()),
                                           static_cast<int>(frame.cols())));
    const double value = eval.objective(candidate, grouping, group_count);
    if (value > best) {
      best = value;
      frame = candidate;
      rejects = 0;
      step = std::min(step * 1.4, 0.5);
    } else if (++rejects >= 10) {
      rejects = 0;
      step *= 0.5;
    }
  }
  if (best_frame) *best_frame = frame;
  return best;
}

// Warm starts for the dense search: the branch frame and, when defined, the
// steered frame, each completed to a full orthonormal fragment basis.
std::vector<Eigen::MatrixXcd> warm_frames(const BranchDecomposition& branches,
                                          const Observable& system_obs,
                                          const FragmentSpec& fragment,
                                          std::int64_t frag_dim) {
  const GramFrame frame =
      gram_frame(fragment_gram(branches, fragment), kFrameRankTol);
  std::vector<Eigen::VectorXcd> phi(branches.branch_count());
  for (int i = 0; i < branches.branch_count(); ++i)
    phi[i] = branches.fragment_branch_state(fragment, i);

  auto completed = [&](const Eigen::MatrixXcd& coeff_rows) {
    Eigen::MatrixXcd seed = Eigen::MatrixXcd::Zero(frag_dim, frag_dim);
    for (int m = 0; m < coeff_rows.rows(); ++m) {
      Eigen::VectorXcd x = Eigen::VectorXcd::Zero(frag_dim);
      for (int i = 0; i < branches.branch_count(); ++i)
        x += coeff_rows(m, i) * phi[i];
      seed.col(m) = x / x.norm();
    }
    // Fill the rest with identity columns; QR keeps the leading span.
    for (std::int64_t c = coeff_rows.rows(); c < frag_dim; ++c)
      seed(c - coeff_rows.rows(), c) = 1.0;
    return orthonormalize(seed);
  };

  std::vector<Eigen::MatrixXcd> frames{completed(frame.coeffs)};
  if (const auto steered = steered_overlaps(branches, system_obs, frame)) {
    const Eigen::MatrixXcd bra_rows = *steered * frame.overlaps.inverse();
    frames.push_back(completed(bra_rows.conjugate() * frame.coeffs));
  }
  return frames;
}

std::vector<std::vector<int>> integer_partitions(int n) {
  std::vector<std::vector<int>> result;
  std::vector<int> current;
  auto recurse = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      result.push_back(current);
      return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
      current.push_back(part);
      self(self, remaining - part, part);
      current.pop_back();
    }
  };
  recurse(recurse, n, n);
  return result;
}

MaxInfoResult dense_search(const BranchDecomposition& branches,
                           const Observable& system_obs,
                           const FragmentSpec& fragment,
                           const MeasurementSearchConfig& cfg) {
  const TensorSpace space = branches.sf_space(fragment);
  const std::int64_t frag_dim =
      space.total_dimension() / branches.system_dimension();

  DenseEvaluator eval{&system_obs,
                      reduced_state_sf(branches, fragment).matrix(),
                      branches.system_dimension(), frag_dim};

  const bool exhaustive = cfg.strategy == SearchStrategy::kExhaustiveSmall;
  if (exhaustive && frag_dim > 4)
    throw BudgetError("exhaustive search limited to fragment dimension <= 4");

  // Outcome groupings to scan: every rank profile for the exhaustive search.
  // The parametrized search uses the complete rank-1 profile: a coarser
  // remainder lump caps the effective outcome count on the branch span below
  // what the optimum can need, losing a few micronats on some instances.
  std::vector<std::vector<int>> groupings;
  if (exhaustive) {
    for (const auto& profile : integer_partitions(static_cast<int>(frag_dim))) {
      std::vector<int> grouping;
      for (std::size_t g = 0; g < profile.size(); ++g)
        grouping.insert(grouping.end(), profile[g], static_cast<int>(g));
      groupings.push_back(std::move(grouping));
    }
  } else {
    std::vector<int> grouping(frag_dim);
    for (std::int64_t c = 0; c < frag_dim; ++c) grouping[c] = static_cast<int>(c);
    groupings.push_back(std::move(grouping));
  }

  const std::vector<Eigen::MatrixXcd> warm =
      warm_frames(branches, system_obs, fragment, frag_dim);

  double best = -1.0;
  Eigen::MatrixXcd best_frame;
  std::vector<int> best_grouping;
  int best_groups = 0;

  for (const auto& grouping : groupings) {
    const int group_count = *std::max_element(grouping.begin(), grouping.end()) + 1;
    const int warm_count = static_cast<int>(warm.size());
    const int restarts =
        warm_count + (exhaustive ? 4 * cfg.restarts : cfg.restarts);
    for (int restart = 0; restart < restarts; ++restart) {
      Rng rng(derive_seed(cfg.seed, restart * 131 + group_count));
      Eigen::MatrixXcd start =
          restart < warm_count
              ? warm[restart]
              : Rng(derive_seed(cfg.seed, restart * 977 + group_count))
                    .unitary(static_cast<int>(frag_dim));
      Eigen::MatrixXcd frame;
      const double value = ascend(eval, start, grouping, group_count, cfg, rng, &frame);
      if (value > best) {
        best = value;
        best_frame = frame;
        best_grouping = grouping;
        best_groups = group_count;
      }
    }
  }

  // Qubit fragments additionally sweep the Bloch sphere as coarse global
  // coverage before refinement.
  if (exhaustive && frag_dim == 2) {
    std::vector<int> grouping{0, 1};
    for (int it = 0; it < 36; ++it)
      for (int ip = 0; ip < 18; ++ip) {
        const double theta = it * (M_PI / 36.0), phi = ip * (M_PI / 9.0);
        Eigen::MatrixXcd frame(2, 2);
        frame(0, 0) = std::cos(theta / 2.0);
        frame(1, 0) = complexd(std::sin(theta / 2.0) * std::cos(phi),
                               std::sin(theta / 2.0) * std::sin(phi));
        frame(0, 1) = -std::conj(frame(1, 0));
        frame(1, 1) = frame(0, 0);
        const double value = eval.objective(frame, grouping, 2);
        if (value > best) {
          best = value;
          best_frame = frame;
          best_grouping = grouping;
          best_groups = 2;
        }
      }
    Rng rng(derive_seed(cfg.seed, 0xb10c));
    Eigen::MatrixXcd frame;
    const double refined =
        ascend(eval, best_frame, grouping, 2, cfg, rng, &frame);
    if (refined > best) {
      best = refined;
      best_frame = frame;
      best_grouping = grouping;
      best_groups = 2;
    }
  }

  // Build the observable from the winning grouped frame.
  std::vector<Eigen::MatrixXcd> projectors(best_groups);
  for (auto& p : projectors) p = Eigen::MatrixXcd::Zero(frag_dim, frag_dim);
  for (int c = 0; c < best_frame.cols(); ++c)
    projectors[best_grouping[c]] +=
        best_frame.col(c) * best_frame.col(c).adjoint();
  std::vector<double> labels(best_groups);
  for (int g = 0; g < best_groups; ++g) labels[g] = static_cast<double>(g);
  std::vector<int> acts_on(fragment.members.size());
  for (std::size_t k = 0; k < acts_on.size(); ++k)
    acts_on[k] = static_cast<int>(k) + 1;

  return MaxInfoResult{best,
                       Observable(space, std::move(acts_on), std::move(projectors),
                                  std::move(labels)),
                       cfg.strategy};
}

}  // namespace

double branch_info_value(const BranchDecomposition& branches,
                         const Observable& system_obs,
                         const FragmentSpec& fragment) {
  require_system_observable(branches, system_obs);
  if (fragment.members.empty()) return 0.0;
  return branch_route(branches, system_obs, fragment).info;
}

MaxInfoResult max_info_fragment(const BranchDecomposition& branches,
                                const Observable& system_obs,
                                const FragmentSpec& fragment,
                                const MeasurementSearchConfig& cfg) {
  require_system_observable(branches, system_obs);
  if (fragment.members.empty())
    throw BudgetError("fragment must contain at least one subsystem");
  if (branches.sf_space(fragment).total_dimension() > kMeasurementBudget)
    throw BudgetError("fragment too large to materialize a measurement");

  switch (cfg.strategy) {
    case SearchStrategy::kBranchOptimal: {
      const BranchRouteResult route = branch_route(branches, system_obs, fragment);
      return MaxInfoResult{
          route.info,
          materialize_frame(branches, fragment, route.phi_coefficients),
          SearchStrategy::kBranchOptimal};
    }
    case SearchStrategy::kParametrizedSearch:
    case SearchStrategy::kExhaustiveSmall:
      return dense_search(branches, system_obs, fragment, cfg);
  }
  throw std::logic_error("unknown search strategy");
}

namespace {

// Enumerates set partitions of {0..n-1} as restricted growth strings.
template <typename Fn>
void for_each_partition(int n, Fn&& fn) {
  std::vector<int> assignment(n, 0);
  std::vector<int> prefix_max(n, 0);
  while (true) {
    fn(assignment);
    int i = n - 1;
    while (i > 0) {
      if (assignment[i] <= prefix_max[i - 1]) break;
      --i;
    }
    if (i == 0) return;
    ++assignment[i];
    prefix_max[i] = std::max(prefix_max[i - 1], assignment[i]);
    for (int k = i + 1; k < n; ++k) {
      assignment[k] = 0;
      prefix_max[k] = prefix_max[k - 1];
    }
  }
}

struct FragmentValueCache {
  const BranchDecomposition* branches;
  const Observable* system_obs;
  std::map<std::uint32_t, double> values;

  double value(const std::vector<int>& members) {
    std::uint32_t mask = 0;
    for (int label : members) mask |= 1u << label;
    auto it = values.find(mask);
    if (it != values.end()) return it->second;
    const double v =
        branch_info_value(*branches, *system_obs, FragmentSpec::of(members));
    values.emplace(mask, v);
    return v;
  }
};

}  // namespace

RedundancyReport redundancy(const BranchDecomposition& branches,
                            const Observable& system_obs, double delta,
                            const MeasurementSearchConfig& cfg) {
  require_system_observable(branches, system_obs);
  if (delta < 0.0 || delta >= 1.0)
    throw std::domain_error("delta must lie in [0, 1)");

  const int n = branches.env_count();
  RedundancyReport report(system_obs, delta);
  report.i_hat_full =
      branch_info_value(branches, system_obs, branches.whole_environment());

  if (report.i_hat_full <= kNoInformationThreshold) {
    report.no_information = true;
    report.r_delta = 1;
    report.partition = {branches.whole_environment()};
    report.fragment_infos = {report.i_hat_full};
    report.optimizing_measurements.emplace_back(std::nullopt);
    report.leftovers = FragmentSpec{};
    return report;
  }

  const double threshold =
      (1.0 - delta) * report.i_hat_full - tol::counting_slack;
  FragmentValueCache cache{&branches, &system_obs, {}};

  std::vector<std::vector<int>> counted;
  if (n <= 8) {
    // Exhaustive over set partitions of the environment.
    int best_count = -1;
    for_each_partition(n, [&](const std::vector<int>& assignment) {
      const int block_count =
          *std::max_element(assignment.begin(), assignment.end()) + 1;
      std::vector<std::vector<int>> blocks(block_count);
      for (int idx = 0; idx < n; ++idx)
        blocks[assignment[idx]].push_back(idx + 1);
      std::vector<std::vector<int>> qualifying;
      for (auto& block : blocks)
        if (cache.value(block) >= threshold) qualifying.push_back(block);
      if (static_cast<int>(qualifying.size()) > best_count) {
        best_count = static_cast<int>(qualifying.size());
        counted = std::move(qualifying);
      }
    });
  } else if (branches.symmetric_environment()) {
    // Symmetric model: information depends on fragment size only, so scan
    // the minimal qualifying size and tile the environment with it.
    int minimal = n;
    for (int m = 1; m <= n; ++m) {
      std::vector<int> prefix(m);
      for (int k = 0; k < m; ++k) prefix[k] = k + 1;
      if (cache.value(prefix) >= threshold) {
        minimal = m;
        break;
      }
    }
    const int count = n / minimal;
    for (int b = 0; b < count; ++b) {
      std::vector<int> block(minimal);
      for (int k = 0; k < minimal; ++k) block[k] = b * minimal + k + 1;
      counted.push_back(std::move(block));
    }
  } else {
    // Greedy growth, then a shrink pass that removes members while the
    // fragment keeps qualifying.
    std::vector<int> remaining(n);
    for (int k = 0; k < n; ++k) remaining[k] = k + 1;
    while (!remaining.empty()) {
      std::vector<int> fragment;
      bool qualified = false;
      while (!remaining.empty()) {
        int best_label = -1;
        double best_value = -1.0;
        for (int label : remaining) {
          std::vector<int> candidate = fragment;
          candidate.push_back(label);
          std::sort(candidate.begin(), candidate.end());
          const double v = cache.value(candidate);
          if (v > best_value) {
            best_value = v;
            best_label = label;
          }
        }
        fragment.push_back(best_label);
        std::sort(fragment.begin(), fragment.end());
        remaining.erase(
            std::find(remaining.begin(), remaining.end(), best_label));
        if (best_value >= threshold) {
          qualified = true;
          break;
        }
      }
      if (!qualified) {
        // Return the leftovers: they never reached the threshold.
        for (int label : fragment) remaining.push_back(label);
        break;
      }
      for (std::size_t k = 0; k < fragment.size();) {
        std::vector<int> without = fragment;
        without.erase(without.begin() + static_cast<std::ptrdiff_t>(k));
        if (!without.empty() && cache.value(without) >= threshold) {
          remaining.push_back(fragment[k]);
          fragment = std::move(without);
        } else {
          ++k;
        }
      }
      counted.push_back(fragment);
    }
    if (counted.empty()) counted.push_back(branches.whole_environment().members);
  }

  std::vector<bool> used(n + 1, false);
  for (const auto& members : counted) {
    const FragmentSpec fragment = FragmentSpec::of(members);
    for (int label : members) used[label] = true;
    report.partition.push_back(fragment);
    report.fragment_infos.push_back(cache.value(members));
    if (branches.sf_space(fragment).total_dimension() <=
        kReportMeasurementBudget) {
      MeasurementSearchConfig branch_cfg = cfg;
      branch_cfg.strategy = SearchStrategy::kBranchOptimal;
      report.optimizing_measurements.emplace_back(
          max_info_fragment(branches, system_obs, fragment, branch_cfg)
              .measurement);
    } else {
      report.optimizing_measurements.emplace_back(std::nullopt);
    }
  }
  std::vector<int> leftovers;
  for (int label = 1; label <= n; ++label)
    if (!used[label]) leftovers.push_back(label);
  report.leftovers = FragmentSpec{std::move(leftovers)};
  report.r_delta = static_cast<int>(report.partition.size());
  return report;
}

double max_info_via_pointer(const BranchDecomposition& branches,
                            const Observable& b, const Observable& a_pointer,
                            const FragmentSpec& fragment,
                            double gamma_threshold) {
  require_system_observable(branches, b);
  require_system_observable(branches, a_pointer);

  const double gamma_f = decoherence_factors(branches, fragment).gamma_max;
  const double gamma_fbar =
      decoherence_factors(branches, branches.complement(fragment)).gamma_max;
  if (gamma_f > gamma_threshold || gamma_fbar > gamma_threshold)
    throw RegimeError("decoherence factors outside the perfect-correlation regime",
                      gamma_f, gamma_fbar);

  // I(B:A) by sequential measurement on rho^S: A first, then B.
  return mutual_information(reduced_state_s(branches), b, a_pointer).mutual;
}

PointerDetection pointer_detect(const BranchDecomposition& branches,
                                const std::vector<Observable>& candidates,
                                double delta,
                                const MeasurementSearchConfig& cfg) {
  if (candidates.empty())
    throw std::domain_error("pointer detection needs at least one candidate");

  int best_idx = -1;
  int best_r = 0;
  double best_info = 0.0;
  for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
    const RedundancyReport report =
        redundancy(branches, candidates[idx], delta, cfg);
    const bool better =
        best_idx < 0 || report.r_delta > best_r ||
        (report.r_delta == best_r && report.i_hat_full > best_info);
    if (better) {
      best_idx = static_cast<int>(idx);
      best_r = report.r_delta;
      best_info = report.i_hat_full;
    }
  }
  return PointerDetection{best_idx, candidates[best_idx], best_r, best_info,
                          best_r <= 1};
}

}  // namespace qdarwin
