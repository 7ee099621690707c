#include "qaixi/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qaixi/errors.hpp"

namespace qaixi {

PlanningConfig::PlanningConfig(int horizon_in, double discount_in)
    : horizon(horizon_in), discount(discount_in) {
  if (horizon < 1 || horizon > 6) {
    throw std::invalid_argument("PlanningConfig: horizon must be in [1, 6]");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw std::invalid_argument("PlanningConfig: discount must be in [0, 1)");
  }
}

double planning_branching_bound(const MixtureState& mix,
                                const PlanningConfig& cfg) {
  const EnvironmentModel& ref = *mix.hypotheses.front();
  size_t max_outcomes = 1;
  for (const auto& id : ref.action_ids()) {
    const ActionSpec& spec = ref.action(id);
    if (spec.is_instrument()) {
      max_outcomes =
          std::max(max_outcomes, spec.instrument().outcome_labels().size());
    }
  }
  return std::pow(double(ref.actions().size()) * double(max_outcomes),
                  double(cfg.horizon));
}

namespace {

constexpr double kMaxTreeSize = 1e7;

void check_capacity(const MixtureState& mix, const PlanningConfig& cfg) {
  double bound = planning_branching_bound(mix, cfg);
  if (bound > kMaxTreeSize) {
    throw CapacityError("planning tree of " + std::to_string(bound) +
                        " branches exceeds the exhaustive bound of 1e7");
  }
}

// Expected reward of (action, outcome) under the already-updated posterior
// weights: equivalent to mixing per-hypothesis value recursions.
double posterior_expected_reward(const MixtureState& posterior,
                                 const std::string& action,
                                 const std::string& outcome) {
  double r = 0.0;
  for (size_t q = 0; q < posterior.hypotheses.size(); ++q) {
    if (posterior.weights[q] > 0.0) {
      r += posterior.weights[q] * posterior.hypotheses[q]->reward(action, outcome);
    }
  }
  return r;
}

double value_recursive(const MixtureState& mix, const PlanningConfig& cfg,
                       int depth) {
  if (depth <= 0) return 0.0;
  const EnvironmentModel& ref = *mix.hypotheses.front();
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& id : ref.action_ids()) {
    const ActionSpec& spec = ref.action(id);
    double v = 0.0;
    if (!spec.is_instrument()) {
      MixtureState next = mixture_update(mix, id, std::nullopt);
      v = cfg.discount * value_recursive(next, cfg, depth - 1);
    } else {
      std::vector<double> dist = predictive_distribution(mix, id);
      const auto& labels = spec.instrument().outcome_labels();
      for (size_t k = 0; k < labels.size(); ++k) {
        if (dist[k] <= tol::branch_cutoff) continue;
        MixtureState next = mixture_update(mix, id, labels[k]);
        double r = posterior_expected_reward(next, id, labels[k]);
        v += dist[k] * (r + cfg.discount * value_recursive(next, cfg, depth - 1));
      }
    }
    if (v > best) best = v;
  }
  return best;
}

}  // namespace

double planning_value(const MixtureState& mix, const PlanningConfig& cfg,
                      int depth) {
  if (depth > cfg.horizon) {
    throw std::invalid_argument("planning_value: depth exceeds horizon");
  }
  check_capacity(mix, cfg);
  return value_recursive(mix, cfg, depth);
}

std::string qaixi_policy(const MixtureState& mix, const PlanningConfig& cfg) {
  check_capacity(mix, cfg);
  const EnvironmentModel& ref = *mix.hypotheses.front();
  std::string best_id;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& id : ref.action_ids()) {
    const ActionSpec& spec = ref.action(id);
    double v = 0.0;
    if (!spec.is_instrument()) {
      MixtureState next = mixture_update(mix, id, std::nullopt);
      v = cfg.discount * value_recursive(next, cfg, cfg.horizon - 1);
    } else {
      std::vector<double> dist = predictive_distribution(mix, id);
      const auto& labels = spec.instrument().outcome_labels();
      for (size_t k = 0; k < labels.size(); ++k) {
        if (dist[k] <= tol::branch_cutoff) continue;
        MixtureState next = mixture_update(mix, id, labels[k]);
        double r = posterior_expected_reward(next, id, labels[k]);
        v += dist[k] *
             (r + cfg.discount * value_recursive(next, cfg, cfg.horizon - 1));
      }
    }
    if (v > best) {  // strict: earlier (lower) ids win ties
      best = v;
      best_id = id;
    }
  }
  return best_id;
}

AgentState make_agent(MixtureState mixture,
                      std::optional<KrausChannel> internal_update) {
  ComplexMatrix trivial = ComplexMatrix::Identity(1, 1);
  return AgentState{DensityOperator(std::move(trivial)), std::move(mixture),
                    std::move(internal_update)};
}

EpisodeResult run_episode(const EnvironmentModel& truth, AgentState agent,
                          const PlanningConfig& cfg, int cycles,
                          std::uint64_t seed, PolicyKind policy) {
  if (cycles < 0) {
    throw std::invalid_argument("run_episode: negative cycle count");
  }
  Rng rng(seed);
  MixtureState mix = std::move(agent.mixture);
  DensityOperator truth_state = truth.initial_state();

  std::vector<std::string> instrument_actions;
  for (const auto& id : truth.action_ids()) {
    if (truth.action(id).is_instrument()) instrument_actions.push_back(id);
  }
  if (policy == PolicyKind::Random && instrument_actions.empty()) {
    throw std::invalid_argument("run_episode: no instrument actions to sample");
  }

  EpisodeResult result;
  auto record = [&](int t, double reward) {
    StepRecord rec;
    rec.t = t;
    rec.divergence = posterior_divergence(mix, truth_state);
    rec.trace_distance = trace_distance(truth_state, mixture_operator(mix));
    rec.reward = reward;
    rec.weights = mix.weights;
    result.steps.push_back(std::move(rec));
  };
  record(0, 0.0);

  for (int t = 1; t <= cycles; ++t) {
    std::string action_id;
    if (policy == PolicyKind::Qaixi) {
      action_id = qaixi_policy(mix, cfg);
    } else {
      action_id = instrument_actions[static_cast<size_t>(
          rng.next_double() * double(instrument_actions.size()))];
    }
    auto [percept, next_state] = env_step(truth, std::move(truth_state),
                                          action_id, rng);
    truth_state = std::move(next_state);
    mix = mixture_update(mix, action_id, percept.outcome);
    if (agent.internal_update) {
      agent.internal_state =
          apply_channel(*agent.internal_update, agent.internal_state);
    }
    result.history.cycles.push_back(
        HistoryEntry{action_id, context_descriptor(truth.action(action_id)),
                     percept.outcome, percept.reward});
    result.total_reward += percept.reward;
    record(t, percept.reward);
  }
  return result;
}

std::pair<Percept, JointState> entangled_step(
    const JointState& joint, const ActionSpec& action, Rng& rng,
    const std::map<std::string, double>* rewards) {
  if (joint.state.dims().size() != 2) {
    throw std::invalid_argument("entangled_step: state must have two factors");
  }
  const int dim_agent = joint.state.dims()[0];
  const int dim_env = joint.state.dims()[1];
  int payload_dim =
      action.is_instrument() ? action.instrument().dim() : action.unitary().dim();
  if (payload_dim != dim_env) {
    throw std::invalid_argument("entangled_step: action dimension mismatch");
  }

  if (!action.is_instrument()) {
    KrausChannel lifted = lift_to_second_factor(
        dim_agent, KrausChannel::from_unitary(action.unitary().matrix()));
    JointState next{apply_channel(lifted, joint.state), joint.separable_hint};
    return {Percept{std::nullopt, 0.0}, std::move(next)};
  }

  Instrument lifted = lift_to_second_factor(dim_agent, action.instrument());
  std::vector<double> probs = instrument_distribution(lifted, joint.state);
  for (double& p : probs) {
    if (p <= tol::branch_cutoff) p = 0.0;
  }
  int k = rng.sample_index(probs);
  const std::string& outcome = lifted.outcome_labels()[k];
  BranchResult branch = branch_apply(lifted, outcome, joint.state);
  double reward = 0.0;
  if (rewards) {
    auto it = rewards->find(outcome);
    if (it != rewards->end()) reward = it->second;
  }
  JointState next{std::move(*branch.post), joint.separable_hint};
  return {Percept{outcome, reward}, std::move(next)};
}

}  // namespace qaixi
