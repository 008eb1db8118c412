#include "qdarwin/verify.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <string>

#include "qdarwin/errors.hpp"
#include "qdarwin/redundancy.hpp"
#include "qdarwin/tolerances.hpp"
#include "qdarwin/util.hpp"

namespace qdarwin::verify {

namespace {

using json = nlohmann::json;
using complexd = std::complex<double>;

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho - sigma,
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

double l1_distance(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d;
}

Eigen::MatrixXcd support_projector(const Eigen::MatrixXcd& rho, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
  Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k)
    if (solver.eigenvalues()[k] > floor)
      proj += solver.eigenvectors().col(k) * solver.eigenvectors().col(k).adjoint();
  return proj;
}

// Deterministic outcome map f(X_j) = argmax_i p(A_i | X_j); null outcomes of
// x fold into group 0, where their vanishing weight is inert.
std::vector<int> duality_map(const DensityOperator& rho, const Observable& a,
                             const Observable& x) {
  const Eigen::MatrixXd cond = conditional_probability(rho, a, x);
  std::vector<int> map(x.outcome_count(), 0);
  for (int j = 0; j < x.outcome_count(); ++j) {
    Eigen::Index best = 0;
    cond.col(j).maxCoeff(&best);
    map[j] = static_cast<int>(best);
  }
  return map;
}

// Groups of coarse_grain appear in order of first appearance, so the paired
// A-outcome of group g is the g-th distinct map value.
std::vector<int> group_partners(const std::vector<int>& outcome_map) {
  std::vector<int> partners;
  for (int value : outcome_map)
    if (std::find(partners.begin(), partners.end(), value) == partners.end())
      partners.push_back(value);
  return partners;
}

}  // namespace

CheckResult check_duality(const DensityOperator& rho, const Observable& a,
                          const Observable& x, double tol) {
  CheckResult result;
  result.name = "record_duality";
  const double h_ax = conditional_entropy(rho, a, x);
  result.hypothesis_margin = tol - h_ax;
  if (h_ax >= tol) {
    result.skipped = true;
    result.passed = true;
    result.note = "no full record: H(A|X) = " + std::to_string(h_ax);
    return result;
  }
  const std::vector<int> map = duality_map(rho, a, x);
  const Observable x_prime = coarse_grain(x, map);
  const double h_axp = conditional_entropy(rho, a, x_prime);
  const double h_xpa = conditional_entropy(rho, x_prime, a);
  const double worst = std::max(h_axp, h_xpa);
  result.margin = tol - worst;
  result.passed = worst < tol;
  return result;
}

CheckResult check_same_effect(const DensityOperator& rho, const Observable& a,
                              const Observable& x, double duality_tol,
                              double tol) {
  CheckResult result;
  result.name = "record_same_effect";
  const double h_ax = conditional_entropy(rho, a, x);
  result.hypothesis_margin = duality_tol - h_ax;
  if (h_ax >= duality_tol) {
    result.skipped = true;
    result.passed = true;
    result.note = "no full record: H(A|X) = " + std::to_string(h_ax);
    return result;
  }
  const std::vector<int> map = duality_map(rho, a, x);
  const Observable x_prime = coarse_grain(x, map);
  const std::vector<int> partners = group_partners(map);

  double worst = 0.0;
  for (int g = 0; g < x_prime.outcome_count(); ++g) {
    const Eigen::MatrixXcd xp = x_prime.embedded_projector(g);
    const Eigen::MatrixXcd ap = a.embedded_projector(partners[g]);
    worst = std::max(
        worst, (xp * rho.matrix() * xp - ap * rho.matrix() * ap).norm());
  }
  result.margin = tol - worst;
  result.passed = worst < tol;
  return result;
}

CheckResult check_rho_commutes(const DensityOperator& rho_s, const Observable& a,
                               double info_deficit, double deficit_tol,
                               double commutator_tol) {
  CheckResult result;
  result.name = "einselection_commutator";
  result.hypothesis_margin = deficit_tol - info_deficit;
  if (info_deficit >= deficit_tol) {
    result.skipped = true;
    result.passed = true;
    result.note = "record deficit " + std::to_string(info_deficit);
    return result;
  }
  const Eigen::MatrixXcd a_matrix =
      embed_on(rho_s.space(), a.acts_on(), a.local_matrix());
  const double comm =
      (rho_s.matrix() * a_matrix - a_matrix * rho_s.matrix()).norm();
  result.margin = commutator_tol - comm;
  result.passed = comm < commutator_tol;
  return result;
}

CheckResult check_commuting_records(const BranchDecomposition& branches,
                                    const Observable& b, const Observable& c,
                                    const FragmentSpec& fragment,
                                    SupportKind support, double record_tol,
                                    double commutator_tol) {
  CheckResult result;
  result.name = support == SupportKind::kSystem
                    ? "disjoint_records_commute_system_support"
                    : "disjoint_records_commute_joint_support";

  const DensityOperator rho_s = reduced_state_s(branches);
  const double deficit_b =
      shannon_entropy(born_probabilities(rho_s, b)) -
      branch_info_value(branches, b, fragment);
  const double deficit_c =
      shannon_entropy(born_probabilities(rho_s, c)) -
      branch_info_value(branches, c, branches.complement(fragment));
  const double deficit = std::max(deficit_b, deficit_c);
  result.hypothesis_margin = record_tol - deficit;
  if (deficit >= record_tol) {
    result.skipped = true;
    result.passed = true;
    result.note = "records not certified: deficit " + std::to_string(deficit);
    return result;
  }

  const Eigen::MatrixXcd bm = b.local_matrix();
  const Eigen::MatrixXcd cm = c.local_matrix();
  const Eigen::MatrixXcd commutator = bm * cm - cm * bm;

  double value = 0.0;
  if (support == SupportKind::kSystem) {
    const Eigen::MatrixXcd proj = support_projector(rho_s.matrix(), 1e-10);
    value = (proj * commutator * proj).norm();
  } else {
    // The joint state is pure, so its support projector is rank one and the
    // projected norm reduces to |<Phi| ([B,C] (x) I) |Phi>|, computable from
    // branch overlaps.
    const Eigen::MatrixXcd gram_env =
        decoherence_factors(branches, branches.whole_environment()).gamma;
    const Eigen::VectorXcd& alpha = branches.amplitudes();
    complexd expectation = 0.0;
    for (int i = 0; i < branches.branch_count(); ++i)
      for (int j = 0; j < branches.branch_count(); ++j)
        expectation += std::conj(alpha[i]) * alpha[j] * commutator(i, j) *
                       gram_env(j, i);
    value = std::abs(expectation);
  }
  result.margin = commutator_tol - value;
  result.passed = value < commutator_tol;
  return result;
}

CheckResult check_refined_record(const BranchDecomposition& branches,
                           const Observable& b, const Observable& c,
                           const std::vector<FragmentSpec>& partition,
                           double record_tol, double claim_tol) {
  CheckResult result;
  result.name = "refined_record";

  const DensityOperator rho_s = reduced_state_s(branches);
  const double h_b = shannon_entropy(born_probabilities(rho_s, b));
  const double h_c = shannon_entropy(born_probabilities(rho_s, c));
  double deficit = 0.0;
  for (const FragmentSpec& fragment : partition) {
    deficit = std::max(deficit, h_b - branch_info_value(branches, b, fragment));
    deficit = std::max(deficit, h_c - branch_info_value(branches, c, fragment));
  }
  result.hypothesis_margin = record_tol - deficit;
  if (deficit >= record_tol) {
    result.skipped = true;
    result.passed = true;
    result.note = "records not certified: deficit " + std::to_string(deficit);
    return result;
  }

  const Refinement refined = refine(b, c);
  const Observable& a = refined.observable;

  // Claim 1: the refined observable is fully recorded in the environment.
  const double h_a = shannon_entropy(born_probabilities(rho_s, a));
  const double claim1 =
      h_a - branch_info_value(branches, a, branches.whole_environment());

  // Claim 2: it is redundant on the same partition (delta -> 0 proxy).
  const double i_hat_full =
      branch_info_value(branches, a, branches.whole_environment());
  const double threshold =
      (1.0 - 1e-6) * i_hat_full - tol::counting_slack;
  int qualifying = 0;
  for (const FragmentSpec& fragment : partition)
    if (branch_info_value(branches, a, fragment) >= threshold) ++qualifying;

  // Claim 3: measuring the refined observable determines both factors.
  const double h_b_given_a = conditional_entropy(rho_s, b, a);
  const double h_c_given_a = conditional_entropy(rho_s, c, a);

  const double worst = std::max({claim1, h_b_given_a, h_c_given_a});
  result.passed = worst < claim_tol &&
                  qualifying >= static_cast<int>(partition.size());
  result.margin = claim_tol - worst;
  if (qualifying < static_cast<int>(partition.size()))
    result.note = "redundancy dropped: " + std::to_string(qualifying) + "/" +
                  std::to_string(partition.size()) + " fragments qualify";
  return result;
}

CheckResult check_redundant_commute(const BranchDecomposition& branches,
                           const Observable& b, const Observable& c,
                           double commutator_tol) {
  CheckResult result;
  result.name = "redundant_observables_commute";

  MeasurementSearchConfig cfg;
  cfg.strategy = SearchStrategy::kBranchOptimal;
  const int r_b = redundancy(branches, b, 1e-6, cfg).r_delta;
  const int r_c = redundancy(branches, c, 1e-6, cfg).r_delta;
  const int n = branches.env_count();
  result.hypothesis_margin =
      static_cast<double>(r_b) * static_cast<double>(r_c) - n;
  if (r_b * r_c <= n) {
    result.skipped = true;
    result.passed = true;
    result.note = "premise R0(B) R0(C) > N not met: " + std::to_string(r_b) +
                  " * " + std::to_string(r_c);
    return result;
  }

  const Eigen::MatrixXcd bm = b.local_matrix();
  const Eigen::MatrixXcd cm = c.local_matrix();
  const Eigen::MatrixXcd proj =
      support_projector(reduced_state_s(branches).matrix(), 1e-10);
  const double value = (proj * (bm * cm - cm * bm) * proj).norm();
  result.margin = commutator_tol - value;
  result.passed = value < commutator_tol;
  return result;
}

CheckResult check_cauchy_schwarz(const DensityOperator& rho,
                                 const DensityOperator& sigma) {
  CheckResult result;
  result.name = "cauchy_schwarz_distance";
  const double lhs = trace_distance(rho.matrix(), sigma.matrix());
  const double rhs = std::sqrt(static_cast<double>(rho.dimension())) *
                     (rho.matrix() - sigma.matrix()).norm();
  result.margin = rhs - lhs;
  result.passed = lhs <= rhs + 1e-12;
  if (result.passed && rhs > 0.0 && lhs <= 0.01 * rhs)
    result.note = "near-vacuous: bound far from tight";
  return result;
}

CheckResult check_measurement_distance(const DensityOperator& rho,
                                       const DensityOperator& sigma,
                                       const Observable& obs) {
  CheckResult result;
  result.name = "measurement_distance_contraction";
  const double lhs = l1_distance(born_probabilities(rho, obs).values(),
                                 born_probabilities(sigma, obs).values());
  const double rhs = trace_distance(rho.matrix(), sigma.matrix());
  result.margin = rhs - lhs;
  result.passed = lhs <= rhs + 1e-12;
  if (result.passed && rhs > 0.0 && lhs <= 0.01 * rhs)
    result.note = "near-vacuous: bound far from tight";
  return result;
}

CheckResult check_fannes(const ProbabilityDistribution& p,
                         const ProbabilityDistribution& q) {
  CheckResult result;
  result.name = "fannes_entropy_continuity";
  const double distance = l1_distance(p.values(), q.values());
  result.hypothesis_margin = 1.0 / std::exp(1.0) - distance;
  if (distance > 1.0 / std::exp(1.0)) {
    result.skipped = true;
    result.passed = true;
    result.note = "hypothesis D <= 1/e not met";
    return result;
  }
  const double eta = distance > 0.0 ? -distance * std::log(distance) : 0.0;
  const double bound =
      distance * std::log(static_cast<double>(p.size())) + eta;
  const double lhs = std::abs(shannon_entropy(p) - shannon_entropy(q));
  result.margin = bound - lhs;
  result.passed = lhs <= bound + 1e-12;
  if (result.passed && bound > 0.0 && lhs <= 0.01 * bound)
    result.note = "near-vacuous: bound far from tight";
  return result;
}

CheckResult check_convexity(const Eigen::MatrixXd& conditional_table,
                            const std::vector<double>& weights) {
  CheckResult result;
  result.name = "entropy_mixing_concavity";
  double averaged = 0.0;
  std::vector<double> mixture(conditional_table.rows(), 0.0);
  for (Eigen::Index j = 0; j < conditional_table.cols(); ++j) {
    std::vector<double> column(conditional_table.rows());
    for (Eigen::Index i = 0; i < conditional_table.rows(); ++i) {
      column[i] = conditional_table(i, j);
      mixture[i] += weights[j] * column[i];
    }
    averaged += weights[j] * shannon_entropy(column);
  }
  const double mixed = shannon_entropy(mixture);
  result.margin = mixed - averaged;
  result.passed = averaged <= mixed + 1e-10;
  return result;
}

CheckResult check_dpi(const ChainJoint& chain_joint) {
  CheckResult result;
  result.name = "data_processing_inequality";
  const double h_first = shannon_entropy(chain_joint.marginal(0));
  double previous = h_first;
  double min_gap = h_first;
  for (int k = 1; k < chain_joint.variable_count(); ++k) {
    const double info =
        mutual_information(chain_joint.pair_marginal(0, k)).mutual;
    min_gap = std::min(min_gap, previous - info);
    previous = info;
  }
  result.margin = min_gap + 1e-9;
  result.passed = min_gap >= -1e-9;
  return result;
}

CheckResult check_gs_bound(const BranchDecomposition& branches,
                           const FragmentSpec& fragment) {
  CheckResult result;
  result.name = "ideal_state_distance_bound";
  const double gamma_f = decoherence_factors(branches, fragment).gamma_max;
  const double gamma_fbar =
      decoherence_factors(branches, branches.complement(fragment)).gamma_max;
  result.hypothesis_margin = 0.2 - std::max(gamma_f, gamma_fbar);
  if (gamma_f > 0.2 || gamma_fbar > 0.2) {
    result.skipped = true;
    result.passed = true;
    result.note = "outside sampled regime: gamma_f " + std::to_string(gamma_f) +
                  ", gamma_fbar " + std::to_string(gamma_fbar);
    return result;
  }
  const IdealState ideal = gram_schmidt_ideal(branches, fragment);
  const double lhs =
      (reduced_state_sf(branches, fragment).matrix() - ideal.sigma.matrix())
          .norm();
  const double d_s = branches.system_dimension();
  const double bound =
      std::sqrt(2.0 * (d_s - 1.0) * gamma_f * gamma_f + gamma_fbar * gamma_fbar) +
      5.0 * (std::pow(gamma_f, 1.5) + gamma_fbar * gamma_fbar);
  result.margin = bound - lhs;
  result.passed = lhs <= bound + 1e-12;
  if (result.passed && bound > 0.0 && lhs <= 0.01 * bound)
    result.note = "near-vacuous: bound far from tight";
  return result;
}

CheckResult check_markov(const DensityOperator& rho,
                         const std::vector<Observable>& chain, double tol) {
  CheckResult result;
  result.name = "markov_factorization";
  const double violation = markov_check(rho, chain);
  result.margin = tol - violation;
  result.passed = violation < tol;
  return result;
}

// ---- Witness serialization -------------------------------------------------

namespace {

json to_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back({v[i].real(), v[i].imag()});
  return out;
}

Eigen::VectorXcd cvec_from(const json& j) {
  Eigen::VectorXcd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] =
        complexd(j[i][0].get<double>(), j[i][1].get<double>());
  return v;
}

json to_json(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXcd cmat_from(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complexd(j[r][c][0].get<double>(), j[r][c][1].get<double>());
  return m;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd rmat_from(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

json model_to_json(const ModelConfig& model) {
  json j;
  j["alpha"] = to_json(model.system_amplitudes);
  j["eigenvalues"] = model.system_eigenvalues;
  j["couplings"] = model.couplings;
  j["time"] = model.time;
  j["env_states"] = json::array();
  for (const auto& s : model.env_initial_states) j["env_states"].push_back(to_json(s));
  j["generators"] = json::array();
  for (const auto& g : model.env_generators) j["generators"].push_back(to_json(g));
  return j;
}

ModelConfig model_from_json(const json& j) {
  ModelConfig model;
  model.system_amplitudes = cvec_from(j["alpha"]);
  model.system_eigenvalues = j["eigenvalues"].get<std::vector<double>>();
  model.couplings = j["couplings"].get<std::vector<double>>();
  model.time = j["time"].get<double>();
  for (const auto& s : j["env_states"]) model.env_initial_states.push_back(cvec_from(s));
  for (const auto& g : j["generators"]) model.env_generators.push_back(cmat_from(g));
  return model;
}

Observable pointer_observable(const BranchDecomposition& branches) {
  const TensorSpace space = branches.system_space();
  const int d_s = branches.system_dimension();
  std::vector<Eigen::MatrixXcd> projectors;
  for (int i = 0; i < d_s; ++i) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d_s, d_s);
    p(i, i) = 1.0;
    projectors.push_back(std::move(p));
  }
  return Observable(space, {0}, std::move(projectors), branches.eigenvalues());
}

FragmentSpec fragment_from(const json& j) {
  return FragmentSpec::of(j.get<std::vector<int>>());
}

Observable system_observable_from(const json& j,
                                  const BranchDecomposition& branches) {
  const Observable pointer = pointer_observable(branches);
  if (j.is_string() && j.get<std::string>() == "pointer") return pointer;
  if (j.contains("coarse"))
    return coarse_grain(pointer, j["coarse"].get<std::vector<int>>());
  if (j.contains("bloch"))
    return Observable::bloch(branches.system_space(), 0,
                             j["bloch"][0].get<double>(),
                             j["bloch"][1].get<double>());
  throw ConfigError("unknown system observable recipe");
}

Observable branch_measurement(const BranchDecomposition& branches,
                              const FragmentSpec& fragment) {
  MeasurementSearchConfig cfg;
  cfg.strategy = SearchStrategy::kBranchOptimal;
  return max_info_fragment(branches, pointer_observable(branches), fragment, cfg)
      .measurement;
}

CheckResult skipped_result(const std::string& name, const std::string& note) {
  CheckResult result;
  result.name = name;
  result.skipped = true;
  result.passed = true;
  result.note = note;
  return result;
}

CheckResult run_recipe(const json& recipe) {
  const std::string check = recipe.at("check").get<std::string>();

  if (check == "cauchy_schwarz" || check == "measurement_distance") {
    const Eigen::MatrixXcd rho_m = cmat_from(recipe["rho"]);
    const TensorSpace space = TensorSpace::single(0, static_cast<int>(rho_m.rows()));
    const DensityOperator rho(space, rho_m);
    const DensityOperator sigma(space, cmat_from(recipe["sigma"]));
    if (check == "cauchy_schwarz") return check_cauchy_schwarz(rho, sigma);
    const Observable obs =
        Observable::from_basis(space, {0}, cmat_from(recipe["basis"]));
    return check_measurement_distance(rho, sigma, obs);
  }
  if (check == "fannes")
    return check_fannes(
        ProbabilityDistribution(recipe["p"].get<std::vector<double>>()),
        ProbabilityDistribution(recipe["q"].get<std::vector<double>>()));
  if (check == "convexity")
    return check_convexity(rmat_from(recipe["table"]),
                           recipe["weights"].get<std::vector<double>>());
  if (check == "dpi")
    return check_dpi(ChainJoint(recipe["shape"].get<std::vector<int>>(),
                                recipe["flat"].get<std::vector<double>>()));

  // Model-generated checks.
  const ModelConfig model = model_from_json(recipe.at("model"));
  const BranchDecomposition branches = evolve(model);

  if (check == "duality" || check == "same_effect") {
    const FragmentSpec fragment = fragment_from(recipe["fragment"]);
    const DensityOperator rho_sf = reduced_state_sf(branches, fragment);
    const Observable a =
        pointer_observable(branches).embedded_into(rho_sf.space(), {0});
    const Observable x = branch_measurement(branches, fragment);
    return check == "duality" ? check_duality(rho_sf, a, x)
                              : check_same_effect(rho_sf, a, x);
  }
  if (check == "rho_commutes") {
    const DensityOperator rho_s = reduced_state_s(branches);
    const Observable a = pointer_observable(branches);
    const double deficit =
        shannon_entropy(born_probabilities(rho_s, a)) -
        branch_info_value(branches, a, branches.whole_environment());
    return check_rho_commutes(rho_s, a, deficit);
  }
  if (check == "gs_bound") {
    const FragmentSpec fragment = fragment_from(recipe["fragment"]);
    try {
      return check_gs_bound(branches, fragment);
    } catch (const DegenerateBranchError& err) {
      return skipped_result("ideal_state_distance_bound",
                            std::string("degenerate branches: ") + err.what());
    }
  }
  if (check == "markov") {
    const FragmentSpec fragment = fragment_from(recipe["fragment"]);
    const FragmentSpec rest = branches.complement(fragment);
    const double gamma_f = decoherence_factors(branches, fragment).gamma_max;
    const double gamma_fbar = decoherence_factors(branches, rest).gamma_max;
    if (std::max(gamma_f, gamma_fbar) > 1e-10)
      return skipped_result("markov_factorization",
                            "outside perfect-correlation regime");
    const DensityOperator full = branches.full_state().to_density();
    const TensorSpace joint = full.space();
    const Observable b =
        system_observable_from(recipe["b"], branches).embedded_into(joint, {0});
    const Observable a = pointer_observable(branches).embedded_into(joint, {0});
    const Observable x =
        branch_measurement(branches, fragment).embedded_into(joint, fragment.members);
    std::int64_t rest_dim = 1;
    for (int label : rest.members) rest_dim *= joint.dimension_of(label);
    const Observable y = Observable::from_basis(
        joint, rest.members,
        Rng(recipe["y_seed"].get<std::uint64_t>()).unitary(static_cast<int>(rest_dim)));
    // Measured outward-in (far fragment first, arbitrary system observable
    // last) so each outcome screens everything earlier.
    return check_markov(full, {y, x, a, b});
  }
  if (check == "commuting_records") {
    const FragmentSpec fragment = fragment_from(recipe["fragment"]);
    const Observable b = system_observable_from(recipe["b"], branches);
    const Observable c = system_observable_from(recipe["c"], branches);
    const SupportKind support = recipe["support"].get<std::string>() == "joint"
                                    ? SupportKind::kJoint
                                    : SupportKind::kSystem;
    return check_commuting_records(branches, b, c, fragment, support);
  }
  if (check == "refined_record") {
    const Observable b = system_observable_from(recipe["b"], branches);
    const Observable c = system_observable_from(recipe["c"], branches);
    std::vector<FragmentSpec> partition;
    for (const auto& members : recipe["partition"])
      partition.push_back(fragment_from(members));
    return check_refined_record(branches, b, c, partition);
  }
  if (check == "redundant_commute") {
    const Observable b = system_observable_from(recipe["b"], branches);
    const Observable c = system_observable_from(recipe["c"], branches);
    return check_redundant_commute(branches, b, c);
  }
  throw ConfigError("unknown check kind: " + check);
}

// Random inputs for the distance/entropy bound checks, drawn once and frozen into the
// witness so a replay sees identical numbers.
json random_density_json(Rng& rng, int dim) {
  const Eigen::MatrixXcd g = rng.gaussian_matrix(dim, dim);
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint().eval()) / 2.0;
  return to_json(rho);
}

json random_distribution_json(Rng& rng, int dim) {
  std::vector<double> p(dim);
  double sum = 0.0;
  for (double& v : p) {
    v = -std::log(rng.uniform(1e-12, 1.0));
    sum += v;
  }
  for (double& v : p) v /= sum;
  return json(p);
}

ModelConfig standard_instance(int n, double t, double coupling, int draw,
                              Rng& rng) {
  ModelConfig model = ModelConfig::dephasing_default(n, coupling, t);
  if (draw > 0) {
    // Draw order: system amplitudes first, then each environment state.
    model.system_amplitudes = rng.unit_vector(2);
    for (int k = 0; k < n; ++k) model.env_initial_states[k] = rng.unit_vector(2);
  }
  return model;
}

// GHZ-like qudit instance: a four-level system with a = (0, 1, 2, 3) against
// dimension-4 subsystems with Z = diag(0, 1, 2, 3), uniform initial states,
// t = pi/2. Every single subsystem then holds four exactly orthogonal branch
// states, giving perfect records of the refined observable.
ModelConfig qudit_instance(int n) {
  ModelConfig model;
  model.system_amplitudes = Eigen::VectorXcd::Constant(4, 0.5);
  model.system_eigenvalues = {0.0, 1.0, 2.0, 3.0};
  model.time = M_PI / 2.0;
  model.couplings.assign(n, 1.0);
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(4, 4);
  for (int m = 0; m < 4; ++m) z(m, m) = static_cast<double>(m);
  model.env_generators.assign(n, z);
  model.env_initial_states.assign(n, Eigen::VectorXcd::Constant(4, 0.5));
  return model;
}

}  // namespace

std::vector<CheckResult> run_suite(const SuiteConfig& config) {
  std::vector<json> recipes;
  Rng rng(config.seed);

  for (int n : config.env_counts)
    for (double t : config.times)
      for (int draw = 0; draw <= config.random_draws; ++draw) {
        const ModelConfig model =
            standard_instance(n, t, config.coupling, draw, rng);
        const json j_model = model_to_json(model);
        std::vector<int> half;
        for (int k = 1; k <= (n + 1) / 2; ++k) half.push_back(k);

        recipes.push_back(
            {{"check", "duality"}, {"model", j_model}, {"fragment", half}});
        recipes.push_back(
            {{"check", "same_effect"}, {"model", j_model}, {"fragment", half}});
        recipes.push_back({{"check", "rho_commutes"}, {"model", j_model}});
        recipes.push_back(
            {{"check", "gs_bound"}, {"model", j_model}, {"fragment", half}});
        if (n <= 6) {
          recipes.push_back({{"check", "markov"},
                             {"model", j_model},
                             {"fragment", half},
                             {"b",
                              {{"bloch",
                                {rng.uniform(0.0, M_PI),
                                 rng.uniform(0.0, 2.0 * M_PI)}}}},
                             {"y_seed", derive_seed(config.seed,
                                                    recipes.size())}});
        }

        // Distance and entropy bounds on fresh random inputs.
        const int dim = 2 + (draw % 7);
        recipes.push_back({{"check", "cauchy_schwarz"},
                           {"rho", random_density_json(rng, dim)},
                           {"sigma", random_density_json(rng, dim)}});
        recipes.push_back({{"check", "measurement_distance"},
                           {"rho", random_density_json(rng, dim)},
                           {"sigma", random_density_json(rng, dim)},
                           {"basis", to_json(rng.unitary(dim))}});
        {
          // Second distribution mixed toward the first so the hypothesis
          // D <= 1/e is usually met and the bound actually gets exercised.
          const json p = random_distribution_json(rng, dim);
          const json r = random_distribution_json(rng, dim);
          const double lambda = rng.uniform(0.0, 0.2);
          json q = json::array();
          for (int i = 0; i < dim; ++i)
            q.push_back((1.0 - lambda) * p[i].get<double>() +
                        lambda * r[i].get<double>());
          recipes.push_back({{"check", "fannes"}, {"p", p}, {"q", q}});
        }
        {
          const int rows = 2 + (draw % 3);
          const int cols = 2 + ((draw + 1) % 3);
          Eigen::MatrixXd table(rows, cols);
          for (int c = 0; c < cols; ++c) {
            double sum = 0.0;
            for (int r = 0; r < rows; ++r) {
              table(r, c) = -std::log(rng.uniform(1e-12, 1.0));
              sum += table(r, c);
            }
            table.col(c) /= sum;
          }
          std::vector<double> weights(cols);
          double wsum = 0.0;
          for (double& w : weights) {
            w = -std::log(rng.uniform(1e-12, 1.0));
            wsum += w;
          }
          for (double& w : weights) w /= wsum;
          recipes.push_back({{"check", "convexity"},
                             {"table", to_json(table)},
                             {"weights", weights}});
        }
        {
          // Synthetic three-step Markov chain: exact factorization by
          // construction, so the data-processing ordering must hold.
          const std::vector<int> shape{2 + (draw % 2), 2, 2 + ((draw + 1) % 2)};
          std::vector<double> px(shape[0]);
          double sum = 0.0;
          for (double& v : px) {
            v = -std::log(rng.uniform(1e-12, 1.0));
            sum += v;
          }
          for (double& v : px) v /= sum;
          Eigen::MatrixXd t1(shape[1], shape[0]), t2(shape[2], shape[1]);
          for (Eigen::MatrixXd* t : {&t1, &t2})
            for (int c = 0; c < t->cols(); ++c) {
              double csum = 0.0;
              for (int r = 0; r < t->rows(); ++r) {
                (*t)(r, c) = -std::log(rng.uniform(1e-12, 1.0));
                csum += (*t)(r, c);
              }
              t->col(c) /= csum;
            }
          std::vector<double> flat;
          for (int x = 0; x < shape[0]; ++x)
            for (int y = 0; y < shape[1]; ++y)
              for (int z = 0; z < shape[2]; ++z)
                flat.push_back(px[x] * t1(y, x) * t2(z, y));
          recipes.push_back(
              {{"check", "dpi"}, {"shape", shape}, {"flat", flat}});
        }
      }

  // Four-level instances with exact per-subsystem records, exercising the
  // multi-observable statements.
  for (int n : {2, 4}) {
    const json j_model = model_to_json(qudit_instance(n));
    std::vector<int> front;
    for (int k = 1; k <= n / 2; ++k) front.push_back(k);
    json partition = json::array();
    for (int k = 1; k <= n; ++k) partition.push_back(std::vector<int>{k});

    for (const char* support : {"system", "joint"})
      recipes.push_back({{"check", "commuting_records"},
                         {"model", j_model},
                         {"fragment", front},
                         {"b", {{"coarse", {0, 0, 1, 1}}}},
                         {"c", {{"coarse", {0, 1, 0, 1}}}},
                         {"support", support}});
    recipes.push_back({{"check", "refined_record"},
                       {"model", j_model},
                       {"partition", partition},
                       {"b", {{"coarse", {0, 0, 1, 1}}}},
                       {"c", {{"coarse", {0, 1, 0, 1}}}}});
    recipes.push_back({{"check", "redundant_commute"},
                       {"model", j_model},
                       {"b", {{"coarse", {0, 0, 1, 1}}}},
                       {"c", {{"coarse", {0, 1, 0, 1}}}}});
  }

  std::vector<CheckResult> results(recipes.size());
  parallel_for(static_cast<std::int64_t>(recipes.size()), config.threads,
               [&](std::int64_t i) {
                 results[i] = run_recipe(recipes[i]);
                 results[i].witness = recipes[i].dump();
               });
  return results;
}

CheckResult replay(const std::string& witness_json) {
  const json recipe = json::parse(witness_json);
  CheckResult result = run_recipe(recipe);
  result.witness = witness_json;
  return result;
}

}  // namespace qdarwin::verify
