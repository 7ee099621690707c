#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qaixi/environments.hpp"
#include "qaixi/induction.hpp"
#include "qaixi/sampling.hpp"

namespace qaixi {

struct PlanningConfig {
  int horizon;      // finite lookahead, 1..6
  double discount;  // gamma in [0, 1)

  PlanningConfig(int horizon, double discount);
};

// Tree size (|actions| * max |outcomes|)^horizon above which planning
// refuses to run (CapacityError).
double planning_branching_bound(const MixtureState& mix,
                                const PlanningConfig& cfg);

// Exact finite-horizon expectimax over the mixture:
//   V(mix, depth) = max_a sum_k p(k|a) [ r(a,k) + gamma V(update(mix,a,k),
//   depth-1) ],  V(mix, 0) = 0,
// where p is the mixture predictive distribution and r(a,k) the
// posterior-weighted expected reward given that outcome. Unitary actions
// contribute a single branch with probability 1 and reward 0.
double planning_value(const MixtureState& mix, const PlanningConfig& cfg,
                      int depth);

// Argmax of the one-step objective over root actions; ties resolve to the
// lexicographically lowest action id so runs are reproducible.
std::string qaixi_policy(const MixtureState& mix, const PlanningConfig& cfg);

// The decision maker: private register, posterior over environments, and
// an optional internal refresh channel applied once per cycle.
struct AgentState {
  DensityOperator internal_state;
  MixtureState mixture;
  std::optional<KrausChannel> internal_update;
};

AgentState make_agent(MixtureState mixture,
                      std::optional<KrausChannel> internal_update = {});

enum class PolicyKind { Random, Qaixi };

struct StepRecord {
  int t = 0;  // 0 is the pre-interaction snapshot
  double divergence = 0.0;      // truth state vs mixture operator
  double trace_distance = 0.0;
  double reward = 0.0;
  std::vector<double> weights;  // posterior after this cycle
};

struct EpisodeResult {
  History history;
  std::vector<StepRecord> steps;  // steps[0] is t = 0
  double total_reward = 0.0;
};

// Full interaction loop against a true environment: choose an action
// (planner or uniform-random instrument choice), sample the percept from
// the truth, update the posterior, refresh the internal register. The
// returned series tracks divergence and trace distance between the
// truth's conditional state and the mixture. Bit-reproducible per seed.
EpisodeResult run_episode(const EnvironmentModel& truth, AgentState agent,
                          const PlanningConfig& cfg, int cycles,
                          std::uint64_t seed,
                          PolicyKind policy = PolicyKind::Qaixi);

// Agent/environment register pair that need not be a product state.
struct JointState {
  DensityOperator state;  // dims = [dim_agent, dim_env]
  bool separable_hint = false;
};

// General-form interaction step: the action acts on the environment
// factor, outcomes are drawn from Tr[(id (x) branch)(rho_joint)], and the
// post-measurement joint state keeps any agent-environment correlations.
// Rewards come from the optional (outcome -> reward) table, else 0.
std::pair<Percept, JointState> entangled_step(
    const JointState& joint, const ActionSpec& action, Rng& rng,
    const std::map<std::string, double>* rewards = nullptr);

}  // namespace qaixi
