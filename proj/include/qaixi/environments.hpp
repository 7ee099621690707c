#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qaixi/channels.hpp"
#include "qaixi/linalg.hpp"
#include "qaixi/sampling.hpp"

namespace qaixi {

// Whether the environment re-prepares its per-round state after each
// measurement (i.i.d. rounds: coins, nonlocal games) or evolves one
// register across the whole interaction (chains, contextuality demos).
enum class StateMode { Episodic, Persistent };

struct ActionSpec {
  std::string id;
  std::variant<UnitaryAction, Instrument> payload;

  bool is_instrument() const {
    return std::holds_alternative<Instrument>(payload);
  }
  const Instrument& instrument() const { return std::get<Instrument>(payload); }
  const UnitaryAction& unitary() const {
    return std::get<UnitaryAction>(payload);
  }
};

// Identifies the full measurement applied in a cycle (outcome alphabet for
// instruments, "unitary" otherwise). Recorded in histories because outcome
// statistics can depend on which co-measured projectors accompanied an
// outcome, not just on the outcome itself.
std::string context_descriptor(const ActionSpec& spec);

struct Percept {
  std::optional<std::string> outcome;  // empty for unitary (coherent) actions
  double reward = 0.0;
};

struct HistoryEntry {
  std::string action;
  std::string context;
  std::optional<std::string> outcome;
  double reward = 0.0;
};

struct History {
  std::vector<HistoryEntry> cycles;
};

// One hypothesis: an initial state, per-action dynamics on a fixed
// register, a reward table over (action, outcome), and a description
// length in bits that sets its prior weight 2^-bits. Immutable.
class EnvironmentModel {
public:
  EnvironmentModel(std::string name, StateMode mode, DensityOperator initial,
                   std::vector<ActionSpec> actions,
                   std::map<std::string, std::map<std::string, double>> rewards,
                   int description_length);

  const std::string& name() const { return name_; }
  StateMode mode() const { return mode_; }
  int dim() const { return initial_.dim(); }
  const DensityOperator& initial_state() const { return initial_; }
  const std::map<std::string, ActionSpec>& actions() const { return actions_; }
  const ActionSpec& action(const std::string& id) const;
  std::vector<std::string> action_ids() const;
  double reward(const std::string& action, const std::string& outcome) const;
  int description_length() const { return description_length_; }

private:
  std::string name_;
  StateMode mode_;
  DensityOperator initial_;
  std::map<std::string, ActionSpec> actions_;
  std::map<std::string, std::map<std::string, double>> rewards_;
  int description_length_;
};

using ModelPtr = std::shared_ptr<const EnvironmentModel>;

// One interaction cycle. The input state is consumed: measured state
// instances cannot be replayed, so there is deliberately no API that hands
// back a pre-measurement state.
std::pair<Percept, DensityOperator> env_step(const EnvironmentModel& env,
                                             DensityOperator state,
                                             const std::string& action_id,
                                             Rng& rng);

// ---------------------------------------------------------------------------
// Classical (diagonal) environments

// Per-action outcome distribution, in declaration order.
using OutcomeDistribution = std::vector<std::pair<std::string, double>>;

// i.i.d. environment from per-action conditional outcome tables. The
// hidden-variable configuration (one coordinate per action) is embedded as
// a diagonal state over the product alphabet; each action measures the
// basis projector that reads off its own coordinate, so all reachable
// states stay diagonal. Product alphabet size is capped at 16.
EnvironmentModel make_classical_env(
    std::string name, const std::map<std::string, OutcomeDistribution>& cond_probs,
    const std::map<std::string, std::map<std::string, double>>& rewards,
    int description_length);

// Observed-state Markov chain: outcome = next state. transitions[a](s', s)
// is the probability of jumping to s' from s under action a. Branch maps
// are diagonal classical-channel Kraus operators, so states stay diagonal.
EnvironmentModel make_classical_chain_env(
    std::string name, int num_states,
    const std::map<std::string, Eigen::MatrixXd>& transitions,
    const std::vector<double>& initial_dist,
    const std::map<std::string, std::map<std::string, double>>& rewards,
    int description_length);

// ---------------------------------------------------------------------------
// CHSH game environments

enum class BellState { PsiMinus, PhiPlus };

struct ChshAngles {
  double a0, a1;  // Alice's measurement angles for settings x = 0, 1
  double b0, b1;  // Bob's, for y = 0, 1
};

ChshAngles chsh_optimal_angles(BellState bell);

// Win predicate: o_a * o_b == (-1)^{x y}, outcomes in {+1, -1}.
bool chsh_win(int x, int y, int outcome_a, int outcome_b);

// Two-qubit game environment: re-prepares the Bell state each round;
// actions "s00".."s11" pick the setting pair (x, y); each action measures
// both qubits with product projectors at the given real-plane angles;
// reward 1 on a win.
EnvironmentModel make_chsh_env(std::string name, const ChshAngles& angles,
                               BellState bell, int description_length);

// Local alternatives over the same action/outcome interface.
EnvironmentModel make_chsh_lhv_uniform(std::string name, int description_length);
// strategy = (a(0), a(1), b(0), b(1)), entries in {+1, -1}.
EnvironmentModel make_chsh_lhv_deterministic(std::string name,
                                             const std::array<int, 4>& strategy,
                                             int description_length);

// Exact per-round win probability of the game environment under uniform
// setting choice, evaluated from its instruments.
double chsh_exact_win_probability(const EnvironmentModel& env);

struct LhvSearchResult {
  double best_win_rate = 0.0;
  std::array<int, 4> best_strategy{1, 1, 1, 1};
  std::vector<double> all_rates;  // all 16 deterministic strategies
};

// Exhaustive search over the 16 deterministic local strategies.
LhvSearchResult chsh_lhv_brute_force();

// ---------------------------------------------------------------------------
// Kochen-Specker contextuality

struct KsSet {
  std::vector<ComplexMatrix> projectors;
  std::vector<std::vector<int>> contexts;  // each context resolves identity
};

// The 18-projector, 9-context set in dimension 4 (each projector appears
// in exactly two contexts).
KsSet ks_eighteen_vector_set();
// {|0><0|, |1><1|} as a single qubit context; colourable.
KsSet ks_trivial_qubit_set();

struct KsColouringResult {
  bool colourable = false;
  std::uint64_t valid_assignments = 0;
  // One valid assignment, as a bitmask over projector indices, when any
  // exists.
  std::optional<std::uint32_t> witness;
};

// Exhaustively tests every {0,1} assignment for "exactly one 1 per
// context". Throws CapacityError when the set has more than 24 projectors.
KsColouringResult ks_uncolourability_check(const KsSet& set);

// Persistent environment whose actions measure one context each; outcomes
// are labelled by global projector index so shared projectors keep their
// identity across contexts. Rewards are all zero.
EnvironmentModel make_ks_env(std::string name, const KsSet& set,
                             int description_length,
                             std::optional<DensityOperator> initial = {});

// ---------------------------------------------------------------------------
// Serialization (JSON environment-definition format)

std::string environment_to_json_string(const EnvironmentModel& env);
EnvironmentModel environment_from_json_string(const std::string& text);
void save_environment_file(const EnvironmentModel& env, const std::string& path);
EnvironmentModel load_environment_file(const std::string& path);
// Loads every *.json in the directory, sorted by filename.
std::vector<ModelPtr> load_class_directory(const std::string& dir);

}  // namespace qaixi
