#include "qaixi/induction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qaixi/errors.hpp"

namespace qaixi {

namespace {

void check_shared_interface(const std::vector<ModelPtr>& models) {
  const EnvironmentModel& ref = *models.front();
  for (size_t q = 1; q < models.size(); ++q) {
    const EnvironmentModel& other = *models[q];
    if (other.dim() != ref.dim()) {
      throw std::invalid_argument("mixture_init: mixed register dimensions (" +
                                  ref.name() + " vs " + other.name() + ")");
    }
    if (other.action_ids() != ref.action_ids()) {
      throw std::invalid_argument("mixture_init: hypotheses " + ref.name() +
                                  " and " + other.name() +
                                  " expose different action sets");
    }
    for (const auto& id : ref.action_ids()) {
      const ActionSpec& a = ref.action(id);
      const ActionSpec& b = other.action(id);
      if (a.is_instrument() != b.is_instrument()) {
        throw std::invalid_argument("mixture_init: action '" + id +
                                    "' changes kind across hypotheses");
      }
      if (a.is_instrument() &&
          a.instrument().outcome_labels() != b.instrument().outcome_labels()) {
        throw std::invalid_argument("mixture_init: action '" + id +
                                    "' changes outcome alphabet");
      }
    }
  }
}

}  // namespace

MixtureState mixture_init(std::vector<ModelPtr> models) {
  if (models.empty()) {
    throw std::invalid_argument("mixture_init: empty hypothesis class");
  }
  for (const auto& m : models) {
    if (!m) throw std::invalid_argument("mixture_init: null model");
  }
  check_shared_interface(models);

  MixtureState mix;
  mix.weights.reserve(models.size());
  double total = 0.0;
  for (const auto& m : models) {
    double w = std::exp2(-double(m->description_length()));
    mix.weights.push_back(w);
    total += w;
    mix.cond_states.push_back(m->initial_state());
    mix.log_likelihoods.push_back(0.0);
  }
  for (double& w : mix.weights) w /= total;
  mix.hypotheses = std::move(models);
  return mix;
}

DensityOperator mixture_operator(const MixtureState& mix) {
  if (mix.hypotheses.empty()) {
    throw std::invalid_argument("mixture_operator: empty mixture");
  }
  const int d = mix.dim();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (size_t q = 0; q < mix.hypotheses.size(); ++q) {
    if (mix.weights[q] > 0.0) {
      sum += mix.weights[q] * mix.cond_states[q].matrix();
    }
  }
  return DensityOperator(std::move(sum), mix.cond_states.front().dims());
}

std::vector<double> predictive_distribution(const MixtureState& mix,
                                            const std::string& action) {
  const ActionSpec& ref = mix.hypotheses.front()->action(action);
  if (!ref.is_instrument()) {
    throw std::invalid_argument("predictive_distribution: action '" + action +
                                "' is unitary and has no outcome distribution");
  }
  std::vector<double> dist(ref.instrument().outcome_labels().size(), 0.0);
  for (size_t q = 0; q < mix.hypotheses.size(); ++q) {
    if (mix.weights[q] <= 0.0) continue;
    std::vector<double> probs = instrument_distribution(
        mix.hypotheses[q]->action(action).instrument(), mix.cond_states[q]);
    for (size_t k = 0; k < dist.size(); ++k) {
      dist[k] += mix.weights[q] * probs[k];
    }
  }
  return dist;
}

MixtureState mixture_update(const MixtureState& mix, const std::string& action,
                            const std::optional<std::string>& outcome) {
  MixtureState next = mix;
  const ActionSpec& ref = mix.hypotheses.front()->action(action);

  if (!ref.is_instrument()) {
    if (outcome.has_value()) {
      throw std::invalid_argument("mixture_update: unitary action '" + action +
                                  "' cannot have an outcome");
    }
    for (size_t q = 0; q < next.hypotheses.size(); ++q) {
      if (next.weights[q] <= 0.0) continue;
      const UnitaryAction& u = next.hypotheses[q]->action(action).unitary();
      next.cond_states[q] =
          apply_channel(KrausChannel::from_unitary(u.matrix()),
                        next.cond_states[q]);
    }
    return next;
  }

  if (!outcome.has_value()) {
    throw std::invalid_argument("mixture_update: instrument action '" + action +
                                "' requires an observed outcome");
  }

  double total = 0.0;
  for (size_t q = 0; q < next.hypotheses.size(); ++q) {
    if (next.weights[q] <= 0.0) continue;
    const EnvironmentModel& model = *next.hypotheses[q];
    BranchResult branch = branch_apply(model.action(action).instrument(),
                                       *outcome, next.cond_states[q]);
    if (branch.prob <= tol::branch_cutoff) {
      // Eliminated: this hypothesis cannot have produced the outcome.
      next.weights[q] = 0.0;
      next.log_likelihoods[q] = -std::numeric_limits<double>::infinity();
      continue;
    }
    next.weights[q] *= branch.prob;
    next.log_likelihoods[q] += std::log(branch.prob);
    next.cond_states[q] = model.mode() == StateMode::Episodic
                              ? model.initial_state()
                              : std::move(*branch.post);
    total += next.weights[q];
  }

  if (total <= tol::branch_cutoff) {
    throw ImpossibleObservationError(
        "mixture_update: outcome '" + *outcome + "' of action '" + action +
        "' has zero probability under every hypothesis (model class "
        "misspecified)");
  }
  for (double& w : next.weights) w /= total;
  return next;
}

double posterior_divergence(const MixtureState& mix,
                            const DensityOperator& truth_state) {
  return relative_entropy(truth_state, mixture_operator(mix));
}

GapStatistics gap_statistics(const std::vector<ModelPtr>& models,
                             size_t true_index) {
  if (true_index >= models.size()) {
    throw std::invalid_argument("gap_statistics: true_index out of range");
  }
  GapStatistics stats;
  const double true_len = models[true_index]->description_length();
  for (size_t q = 0; q < models.size(); ++q) {
    if (q == true_index) continue;
    stats.g += std::exp2(-(double(models[q]->description_length()) - true_len));
  }
  stats.dilution_bound = std::log1p(stats.g);
  stats.mdl_bound = true_len * std::log(2.0) + stats.dilution_bound;
  return stats;
}

FisherDiagnostic fisher_information_rank(const Instrument& instr,
                                         const DensityOperator& rho0) {
  const int d = rho0.dim();
  if (instr.dim() != d) {
    throw std::invalid_argument("fisher_information_rank: dimension mismatch");
  }

  // Traceless Hermitian basis: off-diagonal real/imaginary pairs plus
  // diagonal differences. d^2 - 1 directions.
  std::vector<ComplexMatrix> basis;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      ComplexMatrix sym = ComplexMatrix::Zero(d, d);
      sym(i, j) = 1.0;
      sym(j, i) = 1.0;
      basis.push_back(sym);
      ComplexMatrix asym = ComplexMatrix::Zero(d, d);
      asym(i, j) = Complex(0, -1);
      asym(j, i) = Complex(0, 1);
      basis.push_back(asym);
    }
  }
  for (int i = 1; i < d; ++i) {
    ComplexMatrix diag = ComplexMatrix::Zero(d, d);
    diag(0, 0) = 1.0;
    diag(i, i) = -1.0;
    basis.push_back(diag);
  }
  const int n = static_cast<int>(basis.size());

  // Outcome probabilities are linear in the state, so the derivative of
  // p_k along direction B is exactly Tr[E_k B] with E_k the POVM element.
  std::vector<double> probs = instrument_distribution(instr, rho0);
  Eigen::MatrixXd jacobian(static_cast<int>(probs.size()), n);
  for (size_t k = 0; k < probs.size(); ++k) {
    ComplexMatrix povm = instr.branches()[k].kraus_sum();
    for (int b = 0; b < n; ++b) {
      jacobian(static_cast<int>(k), b) = (povm * basis[b]).trace().real();
    }
  }

  Eigen::MatrixXd fisher = Eigen::MatrixXd::Zero(n, n);
  for (size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= tol::branch_cutoff) continue;
    fisher += jacobian.row(static_cast<int>(k)).transpose() *
              jacobian.row(static_cast<int>(k)) / probs[k];
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(fisher);
  FisherDiagnostic diag;
  diag.full_rank = n;
  diag.spectrum = solver.eigenvalues();
  double scale = std::max(diag.spectrum.cwiseAbs().maxCoeff(), 1.0);
  for (int i = 0; i < n; ++i) {
    if (diag.spectrum(i) > 1e-10 * scale) ++diag.rank;
  }
  return diag;
}

}  // namespace qaixi
