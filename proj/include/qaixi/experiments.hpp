#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qaixi/agent.hpp"
#include "qaixi/environments.hpp"
#include "qaixi/induction.hpp"

namespace qaixi {

// Shared experiment configuration. Every command is a deterministic
// function of (config, seed); the seed is mandatory so no entropy is ever
// pulled from the system clock.
struct ExperimentConfig {
  std::string class_dir;   // environment JSON directory; "" = built-in class
  std::string truth_name;  // must name a model in the class
  int episodes = 200;
  int cycles = 500;
  int horizon = 1;
  double discount = 0.9;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string out_path;  // directory (converge, chsh, ks) or file (run, value)
  PolicyKind policy = PolicyKind::Random;
};

// ---------------------------------------------------------------------------

struct ConvergenceReport {
  int episodes = 0;
  int cycles = 0;
  GapStatistics gap;
  double d0_mean = 0.0;
  // Indexed by t - 1 for t = 1..cycles.
  std::vector<double> mean_divergence;
  std::vector<double> se_divergence;
  std::vector<double> mean_trace_distance;
  std::vector<double> se_trace_distance;
  std::vector<double> bound_curve;  // gap.mdl_bound / t
  // Count of t where mean divergence exceeds bound/t + 2 SE.
  int bound_violations = 0;
  // Least-squares slope of ln(mean trace distance) on ln t, t in [10, T].
  double loglog_slope = 0.0;
};

// Repeated seeded episodes against the named truth with a fixed
// measurement schedule (uniform-random instrument choice by default, the
// planner's policy on request). Writes trajectories.csv, summary.csv and
// report.json under out_path when it is non-empty.
ConvergenceReport cmd_converge(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

struct ChshReport {
  int episodes = 0;
  int rounds = 0;
  double mean_reward = 0.0;
  double exact_win_probability = 0.0;  // evaluated from the truth's instruments
  double best_lhv_win_rate = 0.0;      // exhaustive over the 16 strategies
  std::vector<std::string> hypothesis_names;
  std::vector<double> final_weights;
  // Episode-averaged posterior weight of the truth after each round.
  std::vector<double> truth_weight_trajectory;
  int first_round_weight_above_99 = -1;  // -1 if never
};

// Nonlocal-game discrimination: play the game against the named truth
// (default "chsh-quantum"), track the posterior over the class, and report
// the exhaustive local-strategy ceiling next to the achieved reward.
// Writes rounds.csv and report.json under out_path when non-empty.
ChshReport cmd_chsh(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

struct KsReport {
  int num_projectors = 0;
  int num_contexts = 0;
  double max_context_residual = 0.0;  // resolution-of-identity, max-abs
  bool colourable = true;
  std::uint64_t valid_assignments = 0;
  // Two-step contextuality demonstration: outcome distribution of a probe
  // context after first measuring either of two contexts that share a
  // projector. A value-definite (non-contextual) account would make the
  // choice of co-measured projectors irrelevant.
  std::string shared_projector;
  std::string first_context_a;
  std::string first_context_b;
  std::string probe_context;
  std::vector<double> probe_after_a;
  std::vector<double> probe_after_b;
  double max_probe_difference = 0.0;
  History demo_history;  // short sampled trajectory on the environment
};

// Colouring search plus a context-dependence demonstration on the shipped
// 18-projector set (or a user set loaded from class_dir, see
// ks_set_from_json_string). Writes report.json under out_path when
// non-empty.
KsReport cmd_ks(const ExperimentConfig& cfg);

// JSON format for user-provided projector sets:
//   {"dim": d, "vectors": [[x0, ..., x_{d-1}], ...], "contexts": [[i, ...], ...]}
KsSet ks_set_from_json_string(const std::string& text);
KsSet load_ks_set_file(const std::string& path);

// ---------------------------------------------------------------------------

struct ValueReport {
  double value = 0.0;
  std::string action;
};

// Value and chosen action of the prior mixture over the loaded class.
ValueReport cmd_value(const ExperimentConfig& cfg);

struct RunReport {
  std::string truth;
  EpisodeResult episode;
};

// One full episode; the history is written as JSON to out_path.
RunReport cmd_run(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Built-in model classes (also exportable as JSON files so the same
// experiments can be driven from --class-dir).

std::vector<ModelPtr> builtin_converge_class();
std::vector<ModelPtr> builtin_chsh_class();
std::vector<ModelPtr> builtin_commuting_class();

inline constexpr const char* kBuiltinConvergeTruth = "coin-b";
inline constexpr const char* kBuiltinChshTruth = "chsh-quantum";

// Writes converge-coins/, chsh/ and commuting/ subdirectories of
// environment files under dir.
void write_builtin_classes(const std::string& dir);

}  // namespace qaixi
