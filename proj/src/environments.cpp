#include "qaixi/environments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qaixi/errors.hpp"

namespace qaixi {

using nlohmann::json;

std::string context_descriptor(const ActionSpec& spec) {
  if (!spec.is_instrument()) return "unitary";
  std::string out;
  for (const auto& label : spec.instrument().outcome_labels()) {
    if (!out.empty()) out += ",";
    out += label;
  }
  return out;
}

EnvironmentModel::EnvironmentModel(
    std::string name, StateMode mode, DensityOperator initial,
    std::vector<ActionSpec> actions,
    std::map<std::string, std::map<std::string, double>> rewards,
    int description_length)
    : name_(std::move(name)),
      mode_(mode),
      initial_(std::move(initial)),
      rewards_(std::move(rewards)),
      description_length_(description_length) {
  if (name_.empty()) {
    throw std::invalid_argument("EnvironmentModel: empty name");
  }
  if (description_length_ < 0) {
    throw std::invalid_argument("EnvironmentModel: negative description length");
  }
  if (actions.empty()) {
    throw std::invalid_argument("EnvironmentModel: no actions");
  }
  for (auto& spec : actions) {
    if (spec.id.empty()) {
      throw std::invalid_argument("EnvironmentModel: empty action id");
    }
    int payload_dim = spec.is_instrument() ? spec.instrument().dim()
                                           : spec.unitary().dim();
    if (payload_dim != initial_.dim()) {
      throw std::invalid_argument("EnvironmentModel: action '" + spec.id +
                                  "' acts on dimension " +
                                  std::to_string(payload_dim) +
                                  ", environment has " +
                                  std::to_string(initial_.dim()));
    }
    ValidationReport report = spec.is_instrument()
                                  ? validate(spec.instrument())
                                  : validate(spec.unitary());
    if (!report.ok()) {
      throw std::invalid_argument(
          "EnvironmentModel: action '" + spec.id + "' failed validation: " +
          report.failures.front().invariant + " (residual " +
          std::to_string(report.failures.front().residual) + ")");
    }
    std::string id = spec.id;
    if (!actions_.emplace(id, std::move(spec)).second) {
      throw std::invalid_argument("EnvironmentModel: duplicate action id '" +
                                  id + "'");
    }
  }
  // Every instrument outcome must carry a reward in [0, 1].
  for (const auto& [id, spec] : actions_) {
    if (!spec.is_instrument()) continue;
    auto it = rewards_.find(id);
    for (const auto& label : spec.instrument().outcome_labels()) {
      if (it == rewards_.end() || !it->second.count(label)) {
        throw std::invalid_argument("EnvironmentModel: no reward for action '" +
                                    id + "' outcome '" + label + "'");
      }
      double r = it->second.at(label);
      if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument("EnvironmentModel: reward " +
                                    std::to_string(r) + " outside [0, 1]");
      }
    }
  }
}

const ActionSpec& EnvironmentModel::action(const std::string& id) const {
  auto it = actions_.find(id);
  if (it == actions_.end()) {
    throw std::invalid_argument("EnvironmentModel '" + name_ +
                                "': unknown action '" + id + "'");
  }
  return it->second;
}

std::vector<std::string> EnvironmentModel::action_ids() const {
  std::vector<std::string> ids;
  ids.reserve(actions_.size());
  for (const auto& [id, spec] : actions_) ids.push_back(id);
  return ids;
}

double EnvironmentModel::reward(const std::string& action,
                                const std::string& outcome) const {
  auto it = rewards_.find(action);
  if (it == rewards_.end() || !it->second.count(outcome)) {
    throw std::invalid_argument("EnvironmentModel '" + name_ +
                                "': no reward entry for (" + action + ", " +
                                outcome + ")");
  }
  return it->second.at(outcome);
}

std::pair<Percept, DensityOperator> env_step(const EnvironmentModel& env,
                                             DensityOperator state,
                                             const std::string& action_id,
                                             Rng& rng) {
  if (state.dim() != env.dim()) {
    throw std::invalid_argument("env_step: state dimension mismatch");
  }
  const ActionSpec& spec = env.action(action_id);
  if (!spec.is_instrument()) {
    DensityOperator next = apply_channel(
        KrausChannel::from_unitary(spec.unitary().matrix()), state);
    return {Percept{std::nullopt, 0.0}, std::move(next)};
  }
  const Instrument& instr = spec.instrument();
  std::vector<double> probs = instrument_distribution(instr, state);
  for (double& p : probs) {
    if (p <= tol::branch_cutoff) p = 0.0;
  }
  int k = rng.sample_index(probs);
  const std::string& outcome = instr.outcome_labels()[k];
  BranchResult branch = branch_apply(instr, outcome, state);
  Percept percept{outcome, env.reward(action_id, outcome)};
  DensityOperator next = env.mode() == StateMode::Episodic
                             ? env.initial_state()
                             : std::move(*branch.post);
  return {std::move(percept), std::move(next)};
}

// ---------------------------------------------------------------------------
// Classical environments

EnvironmentModel make_classical_env(
    std::string name, const std::map<std::string, OutcomeDistribution>& cond_probs,
    const std::map<std::string, std::map<std::string, double>>& rewards,
    int description_length) {
  if (cond_probs.empty()) {
    throw std::invalid_argument("make_classical_env: no actions");
  }
  long long latent_dim = 1;
  for (const auto& [action, dist] : cond_probs) {
    if (dist.empty()) {
      throw std::invalid_argument("make_classical_env: empty distribution for '" +
                                  action + "'");
    }
    double total = 0.0;
    for (const auto& [label, p] : dist) {
      if (p < 0.0) {
        throw std::invalid_argument("make_classical_env: negative probability");
      }
      total += p;
      if (std::count_if(dist.begin(), dist.end(), [&](const auto& e) {
            return e.first == label;
          }) != 1) {
        throw std::invalid_argument("make_classical_env: duplicate outcome '" +
                                    label + "'");
      }
    }
    if (std::abs(total - 1.0) > tol::trace) {
      throw std::invalid_argument("make_classical_env: distribution for '" +
                                  action + "' sums to " + std::to_string(total));
    }
    latent_dim *= static_cast<long long>(dist.size());
  }
  if (latent_dim > 16) {
    throw std::invalid_argument(
        "make_classical_env: product alphabet dimension " +
        std::to_string(latent_dim) + " exceeds 16");
  }

  // Hidden configuration = one outcome coordinate per action (actions in
  // sorted id order), embedded on the diagonal with the product measure.
  const int d = static_cast<int>(latent_dim);
  std::vector<const OutcomeDistribution*> coords;
  std::vector<std::string> action_order;
  for (const auto& [action, dist] : cond_probs) {
    action_order.push_back(action);
    coords.push_back(&dist);
  }

  auto coordinate_of = [&](int config, size_t axis) {
    int rest = config;
    for (size_t a = coords.size(); a-- > 0;) {
      int size = static_cast<int>(coords[a]->size());
      int digit = rest % size;
      rest /= size;
      if (a == axis) return digit;
    }
    return 0;
  };

  ComplexMatrix initial = ComplexMatrix::Zero(d, d);
  for (int config = 0; config < d; ++config) {
    double q = 1.0;
    for (size_t a = 0; a < coords.size(); ++a) {
      q *= (*coords[a])[coordinate_of(config, a)].second;
    }
    initial(config, config) = q;
  }

  std::vector<ActionSpec> actions;
  std::map<std::string, std::map<std::string, double>> full_rewards = rewards;
  for (size_t a = 0; a < coords.size(); ++a) {
    std::vector<std::pair<std::string, ComplexMatrix>> projectors;
    for (size_t k = 0; k < coords[a]->size(); ++k) {
      ComplexMatrix proj = ComplexMatrix::Zero(d, d);
      for (int config = 0; config < d; ++config) {
        if (coordinate_of(config, a) == static_cast<int>(k)) {
          proj(config, config) = 1.0;
        }
      }
      projectors.emplace_back((*coords[a])[k].first, std::move(proj));
    }
    actions.push_back(ActionSpec{action_order[a],
                                 Instrument::projective(std::move(projectors))});
    for (const auto& [label, p] : *coords[a]) {
      full_rewards[action_order[a]].emplace(label, 0.0);  // keeps given entries
    }
  }

  return EnvironmentModel(std::move(name), StateMode::Episodic,
                          DensityOperator(std::move(initial)),
                          std::move(actions), std::move(full_rewards),
                          description_length);
}

EnvironmentModel make_classical_chain_env(
    std::string name, int num_states,
    const std::map<std::string, Eigen::MatrixXd>& transitions,
    const std::vector<double>& initial_dist,
    const std::map<std::string, std::map<std::string, double>>& rewards,
    int description_length) {
  if (num_states < 1 || num_states > 16) {
    throw std::invalid_argument("make_classical_chain_env: bad state count");
  }
  if (static_cast<int>(initial_dist.size()) != num_states) {
    throw std::invalid_argument("make_classical_chain_env: initial length");
  }
  ComplexMatrix initial = ComplexMatrix::Zero(num_states, num_states);
  for (int s = 0; s < num_states; ++s) initial(s, s) = initial_dist[s];

  std::vector<ActionSpec> actions;
  std::map<std::string, std::map<std::string, double>> full_rewards = rewards;
  for (const auto& [action, t] : transitions) {
    if (t.rows() != num_states || t.cols() != num_states) {
      throw std::invalid_argument("make_classical_chain_env: transition shape");
    }
    for (int s = 0; s < num_states; ++s) {
      if (std::abs(t.col(s).sum() - 1.0) > tol::trace) {
        throw std::invalid_argument(
            "make_classical_chain_env: column " + std::to_string(s) +
            " of action '" + action + "' not normalised");
      }
    }
    std::vector<std::pair<std::string, KrausChannel>> branches;
    for (int next = 0; next < num_states; ++next) {
      std::vector<ComplexMatrix> kraus;
      for (int s = 0; s < num_states; ++s) {
        if (t(next, s) <= 0.0) continue;
        ComplexMatrix m = ComplexMatrix::Zero(num_states, num_states);
        m(next, s) = std::sqrt(t(next, s));
        kraus.push_back(std::move(m));
      }
      if (kraus.empty()) {
        // Unreachable outcome; keep the branch with an explicit zero map so
        // the alphabet stays rectangular.
        kraus.push_back(ComplexMatrix::Zero(num_states, num_states));
      }
      branches.emplace_back(std::to_string(next), KrausChannel(std::move(kraus)));
      full_rewards[action].emplace(std::to_string(next), 0.0);
    }
    actions.push_back(ActionSpec{action, Instrument(std::move(branches))});
  }

  return EnvironmentModel(std::move(name), StateMode::Persistent,
                          DensityOperator(std::move(initial)),
                          std::move(actions), std::move(full_rewards),
                          description_length);
}

// ---------------------------------------------------------------------------
// CHSH environments

namespace {

ComplexMatrix plane_projector(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  ComplexMatrix p(2, 2);
  p << c * c, c * s, c * s, s * s;
  return p;
}

ComplexVector bell_vector(BellState bell) {
  ComplexVector v = ComplexVector::Zero(4);
  double inv = 1.0 / std::sqrt(2.0);
  if (bell == BellState::PsiMinus) {
    v(1) = inv;
    v(2) = -inv;
  } else {
    v(0) = inv;
    v(3) = inv;
  }
  return v;
}

constexpr std::array<const char*, 4> kChshOutcomes{"pp", "pm", "mp", "mm"};

int chsh_sign(char c) { return c == 'p' ? 1 : -1; }

}  // namespace

ChshAngles chsh_optimal_angles(BellState bell) {
  const double pi = std::numbers::pi;
  if (bell == BellState::PsiMinus) {
    return ChshAngles{0.0, 3.0 * pi / 4.0, 3.0 * pi / 8.0, -3.0 * pi / 8.0};
  }
  return ChshAngles{0.0, pi / 4.0, pi / 8.0, -pi / 8.0};
}

bool chsh_win(int x, int y, int outcome_a, int outcome_b) {
  int target = (x == 1 && y == 1) ? -1 : 1;
  return outcome_a * outcome_b == target;
}

EnvironmentModel make_chsh_env(std::string name, const ChshAngles& angles,
                               BellState bell, int description_length) {
  DensityOperator initial = PureState(bell_vector(bell)).to_density({4});
  std::vector<ActionSpec> actions;
  std::map<std::string, std::map<std::string, double>> rewards;
  const double alice[2] = {angles.a0, angles.a1};
  const double bob[2] = {angles.b0, angles.b1};
  const double half_pi = std::numbers::pi / 2.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      std::string id = "s" + std::to_string(x) + std::to_string(y);
      std::vector<std::pair<std::string, ComplexMatrix>> projectors;
      for (const char* label : kChshOutcomes) {
        double ta = chsh_sign(label[0]) == 1 ? alice[x] : alice[x] + half_pi;
        double tb = chsh_sign(label[1]) == 1 ? bob[y] : bob[y] + half_pi;
        projectors.emplace_back(label,
                                tensor(plane_projector(ta), plane_projector(tb)));
        rewards[id][label] =
            chsh_win(x, y, chsh_sign(label[0]), chsh_sign(label[1])) ? 1.0 : 0.0;
      }
      actions.push_back(
          ActionSpec{id, Instrument::projective(std::move(projectors))});
    }
  }
  return EnvironmentModel(std::move(name), StateMode::Episodic,
                          std::move(initial), std::move(actions),
                          std::move(rewards), description_length);
}

EnvironmentModel make_chsh_lhv_uniform(std::string name, int description_length) {
  std::vector<ActionSpec> actions;
  std::map<std::string, std::map<std::string, double>> rewards;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      std::string id = "s" + std::to_string(x) + std::to_string(y);
      std::vector<std::pair<std::string, ComplexMatrix>> projectors;
      for (int k = 0; k < 4; ++k) {
        ComplexMatrix p = ComplexMatrix::Zero(4, 4);
        p(k, k) = 1.0;
        projectors.emplace_back(kChshOutcomes[k], std::move(p));
        rewards[id][kChshOutcomes[k]] =
            chsh_win(x, y, chsh_sign(kChshOutcomes[k][0]),
                     chsh_sign(kChshOutcomes[k][1]))
                ? 1.0
                : 0.0;
      }
      actions.push_back(
          ActionSpec{id, Instrument::projective(std::move(projectors))});
    }
  }
  return EnvironmentModel(std::move(name), StateMode::Episodic,
                          maximally_mixed(4), std::move(actions),
                          std::move(rewards), description_length);
}

EnvironmentModel make_chsh_lhv_deterministic(std::string name,
                                             const std::array<int, 4>& strategy,
                                             int description_length) {
  for (int s : strategy) {
    if (s != 1 && s != -1) {
      throw std::invalid_argument("make_chsh_lhv_deterministic: entries in {1,-1}");
    }
  }
  std::vector<ActionSpec> actions;
  std::map<std::string, std::map<std::string, double>> rewards;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      std::string id = "s" + std::to_string(x) + std::to_string(y);
      int oa = strategy[x], ob = strategy[2 + y];
      int fixed = (oa == 1 ? 0 : 2) + (ob == 1 ? 0 : 1);
      // Rotate |0> onto the strategy's outcome cell, then read the basis:
      // the instrument is projective and the environment deterministic.
      ComplexMatrix u = ComplexMatrix::Identity(4, 4);
      if (fixed != 0) {
        u(0, 0) = 0.0;
        u(fixed, fixed) = 0.0;
        u(fixed, 0) = 1.0;
        u(0, fixed) = 1.0;
      }
      std::vector<std::pair<std::string, KrausChannel>> branches;
      for (int k = 0; k < 4; ++k) {
        ComplexMatrix p = ComplexMatrix::Zero(4, 4);
        p(k, k) = 1.0;
        branches.emplace_back(kChshOutcomes[k], KrausChannel({p * u}));
        rewards[id][kChshOutcomes[k]] =
            chsh_win(x, y, chsh_sign(kChshOutcomes[k][0]),
                     chsh_sign(kChshOutcomes[k][1]))
                ? 1.0
                : 0.0;
      }
      actions.push_back(ActionSpec{id, Instrument(std::move(branches))});
    }
  }
  return EnvironmentModel(std::move(name), StateMode::Episodic, basis_state(4, 0),
                          std::move(actions), std::move(rewards),
                          description_length);
}

double chsh_exact_win_probability(const EnvironmentModel& env) {
  double total = 0.0;
  int count = 0;
  for (const auto& [id, spec] : env.actions()) {
    if (!spec.is_instrument()) continue;
    std::vector<double> probs =
        instrument_distribution(spec.instrument(), env.initial_state());
    const auto& labels = spec.instrument().outcome_labels();
    for (size_t k = 0; k < labels.size(); ++k) {
      total += env.reward(id, labels[k]) * probs[k];
    }
    ++count;
  }
  return count == 0 ? 0.0 : total / count;
}

LhvSearchResult chsh_lhv_brute_force() {
  LhvSearchResult result;
  result.best_win_rate = -1.0;
  for (int bits = 0; bits < 16; ++bits) {
    std::array<int, 4> strategy{};
    for (int i = 0; i < 4; ++i) strategy[i] = (bits >> i) & 1 ? -1 : 1;
    int wins = 0;
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        if (chsh_win(x, y, strategy[x], strategy[2 + y])) ++wins;
      }
    }
    double rate = wins / 4.0;
    result.all_rates.push_back(rate);
    if (rate > result.best_win_rate) {
      result.best_win_rate = rate;
      result.best_strategy = strategy;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Kochen-Specker

KsSet ks_eighteen_vector_set() {
  static const double raw[18][4] = {
      {0, 0, 0, 1},    {0, 0, 1, 0},   {1, 1, 0, 0},   {1, -1, 0, 0},
      {0, 1, 0, 0},    {1, 0, 1, 0},   {1, 0, -1, 0},  {1, -1, 1, -1},
      {1, -1, -1, 1},  {0, 0, 1, 1},   {1, 1, 1, 1},   {0, 1, 0, -1},
      {1, 0, 0, 1},    {1, 0, 0, -1},  {0, 1, -1, 0},  {1, 1, -1, 1},
      {1, 1, 1, -1},   {-1, 1, 1, 1}};
  KsSet set;
  for (const auto& row : raw) {
    Eigen::Vector4d v(row[0], row[1], row[2], row[3]);
    v.normalize();
    Eigen::Matrix4d p = v * v.transpose();
    set.projectors.push_back(p.cast<Complex>());
  }
  set.contexts = {{0, 1, 2, 3},   {0, 4, 5, 6},   {7, 8, 2, 9},
                  {7, 10, 6, 11}, {1, 4, 12, 13}, {8, 10, 13, 14},
                  {15, 16, 3, 9}, {15, 17, 5, 11}, {16, 17, 12, 14}};
  return set;
}

KsSet ks_trivial_qubit_set() {
  KsSet set;
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  set.projectors = {p0, p1};
  set.contexts = {{0, 1}};
  return set;
}

KsColouringResult ks_uncolourability_check(const KsSet& set) {
  const int n = static_cast<int>(set.projectors.size());
  if (n > 24) {
    throw CapacityError("ks_uncolourability_check: " + std::to_string(n) +
                        " projectors exceeds the exhaustive-search bound of 24");
  }
  std::vector<std::uint32_t> masks;
  masks.reserve(set.contexts.size());
  for (const auto& context : set.contexts) {
    std::uint32_t mask = 0;
    for (int idx : context) {
      if (idx < 0 || idx >= n) {
        throw std::invalid_argument("ks_uncolourability_check: bad index");
      }
      mask |= (1u << idx);
    }
    masks.push_back(mask);
  }
  KsColouringResult result;
  const std::uint64_t limit = 1ull << n;
  for (std::uint64_t assignment = 0; assignment < limit; ++assignment) {
    bool valid = true;
    for (std::uint32_t mask : masks) {
      if (std::popcount(static_cast<std::uint32_t>(assignment) & mask) != 1) {
        valid = false;
        break;
      }
    }
    if (valid) {
      ++result.valid_assignments;
      if (!result.witness) {
        result.witness = static_cast<std::uint32_t>(assignment);
      }
    }
  }
  result.colourable = result.valid_assignments > 0;
  return result;
}

EnvironmentModel make_ks_env(std::string name, const KsSet& set,
                             int description_length,
                             std::optional<DensityOperator> initial) {
  if (set.projectors.empty() || set.contexts.empty()) {
    throw std::invalid_argument("make_ks_env: empty set");
  }
  const int d = static_cast<int>(set.projectors.front().rows());
  for (const auto& p : set.projectors) {
    if (p.rows() != d || p.cols() != d || !is_hermitian(p) ||
        max_abs(p * p - p) > tol::hermitian) {
      throw std::invalid_argument("make_ks_env: element is not a projector");
    }
  }
  std::vector<ActionSpec> actions;
  std::map<std::string, std::map<std::string, double>> rewards;
  for (size_t c = 0; c < set.contexts.size(); ++c) {
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    std::vector<std::pair<std::string, ComplexMatrix>> projectors;
    for (size_t i = 0; i < set.contexts[c].size(); ++i) {
      int idx = set.contexts[c][i];
      for (size_t j = i + 1; j < set.contexts[c].size(); ++j) {
        int other = set.contexts[c][j];
        if (max_abs(set.projectors[idx] * set.projectors[other]) >
            tol::hermitian) {
          throw std::invalid_argument(
              "make_ks_env: context " + std::to_string(c) +
              " has non-orthogonal projectors");
        }
      }
      sum += set.projectors[idx];
      projectors.emplace_back("v" + std::to_string(idx), set.projectors[idx]);
    }
    if (max_abs(sum - ComplexMatrix::Identity(d, d)) > tol::hermitian) {
      throw std::invalid_argument("make_ks_env: context " + std::to_string(c) +
                                  " does not resolve the identity");
    }
    std::string id = "ctx" + std::to_string(c);
    for (const auto& [label, p] : projectors) rewards[id][label] = 0.0;
    actions.push_back(
        ActionSpec{id, Instrument::projective(std::move(projectors))});
  }
  DensityOperator init = initial ? std::move(*initial) : maximally_mixed(d);
  if (init.dim() != d) {
    throw std::invalid_argument("make_ks_env: initial state dimension");
  }
  return EnvironmentModel(std::move(name), StateMode::Persistent,
                          std::move(init), std::move(actions),
                          std::move(rewards), description_length);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json matrix_to_json(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out.push_back({m(i, j).real(), m(i, j).imag()});
    }
  }
  return out;
}

ComplexMatrix matrix_from_json(const json& entries, int rows, int cols) {
  if (!entries.is_array() ||
      entries.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols)) {
    throw std::invalid_argument("matrix_from_json: wrong entry count");
  }
  ComplexMatrix m(rows, cols);
  size_t idx = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j, ++idx) {
      const json& pair = entries[idx];
      if (!pair.is_array() || pair.size() != 2) {
        throw std::invalid_argument("matrix_from_json: entry is not [re, im]");
      }
      m(i, j) = Complex(pair[0].get<double>(), pair[1].get<double>());
    }
  }
  return m;
}

}  // namespace

std::string environment_to_json_string(const EnvironmentModel& env) {
  json doc;
  doc["name"] = env.name();
  doc["dim"] = env.dim();
  doc["mode"] = env.mode() == StateMode::Episodic ? "episodic" : "persistent";
  doc["initial_state"] = matrix_to_json(env.initial_state().matrix());
  doc["description_length"] = env.description_length();
  json actions = json::array();
  for (const auto& [id, spec] : env.actions()) {
    json a;
    a["id"] = id;
    if (spec.is_instrument()) {
      a["kind"] = "instrument";
      json branches = json::array();
      const Instrument& instr = spec.instrument();
      for (size_t k = 0; k < instr.outcome_labels().size(); ++k) {
        json b;
        b["outcome"] = instr.outcome_labels()[k];
        json kraus = json::array();
        for (const auto& m : instr.branches()[k].kraus_ops()) {
          kraus.push_back(matrix_to_json(m));
        }
        b["kraus"] = kraus;
        branches.push_back(b);
      }
      a["branches"] = branches;
      json rewards;
      for (const auto& label : instr.outcome_labels()) {
        rewards[label] = env.reward(id, label);
      }
      a["rewards"] = rewards;
    } else {
      a["kind"] = "unitary";
      a["unitary"] = matrix_to_json(spec.unitary().matrix());
    }
    actions.push_back(a);
  }
  doc["actions"] = actions;
  return doc.dump(2) + "\n";
}

EnvironmentModel environment_from_json_string(const std::string& text) {
  json doc = json::parse(text);
  const int dim = doc.at("dim").get<int>();
  std::string mode_str = doc.at("mode").get<std::string>();
  StateMode mode;
  if (mode_str == "episodic") {
    mode = StateMode::Episodic;
  } else if (mode_str == "persistent") {
    mode = StateMode::Persistent;
  } else {
    throw std::invalid_argument("environment_from_json: bad mode '" + mode_str +
                                "'");
  }
  DensityOperator initial(matrix_from_json(doc.at("initial_state"), dim, dim));

  std::vector<ActionSpec> actions;
  std::map<std::string, std::map<std::string, double>> rewards;
  for (const json& a : doc.at("actions")) {
    std::string id = a.at("id").get<std::string>();
    std::string kind = a.at("kind").get<std::string>();
    if (kind == "unitary") {
      actions.push_back(
          ActionSpec{id, UnitaryAction(matrix_from_json(a.at("unitary"), dim, dim))});
    } else if (kind == "instrument") {
      std::vector<std::pair<std::string, KrausChannel>> branches;
      for (const json& b : a.at("branches")) {
        std::vector<ComplexMatrix> kraus;
        for (const json& m : b.at("kraus")) {
          kraus.push_back(matrix_from_json(m, dim, dim));
        }
        branches.emplace_back(b.at("outcome").get<std::string>(),
                              KrausChannel(std::move(kraus)));
      }
      actions.push_back(ActionSpec{id, Instrument(std::move(branches))});
      for (auto it = a.at("rewards").begin(); it != a.at("rewards").end(); ++it) {
        rewards[id][it.key()] = it.value().get<double>();
      }
    } else {
      throw std::invalid_argument("environment_from_json: bad kind '" + kind +
                                  "'");
    }
  }
  return EnvironmentModel(doc.at("name").get<std::string>(), mode,
                          std::move(initial), std::move(actions),
                          std::move(rewards),
                          doc.at("description_length").get<int>());
}

void save_environment_file(const EnvironmentModel& env, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_environment_file: cannot open " + path);
  }
  out << environment_to_json_string(env);
}

EnvironmentModel load_environment_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open environment file " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return environment_from_json_string(buffer.str());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("failed to parse " + path + ": " + e.what());
  }
}

std::vector<ModelPtr> load_class_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw ConfigError("class directory not found: " + dir);
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw ConfigError("no *.json environment files in " + dir);
  }
  std::vector<ModelPtr> models;
  models.reserve(files.size());
  for (const auto& file : files) {
    models.push_back(std::make_shared<EnvironmentModel>(load_environment_file(file)));
  }
  return models;
}

}  // namespace qaixi
