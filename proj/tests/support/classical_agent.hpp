#pragma once

// Independent classical reference agent used as an oracle by the
// commuting-limit tests. Everything here works on raw probability tables
// and full-history products; no operators, no incremental posterior. Keep
// it that way: its value comes from NOT sharing a code path with the
// library implementation it checks.

#include <map>
#include <string>
#include <vector>

namespace oracle {

// i.i.d. environment: per-action outcome distributions plus rewards.
struct ClassicalEnv {
  std::string name;
  // action -> outcome -> probability (each action's table sums to 1)
  std::map<std::string, std::map<std::string, double>> cond;
  // action -> outcome -> reward
  std::map<std::string, std::map<std::string, double>> rewards;
  int bits = 0;  // description length; prior weight 2^-bits
};

struct HistStep {
  std::string action;
  std::string outcome;
};
using ClassicalHistory = std::vector<HistStep>;

struct ClassicalClass {
  std::vector<ClassicalEnv> envs;
  std::vector<double> prior;  // normalised 2^-bits
};

ClassicalClass make_class(std::vector<ClassicalEnv> envs);

// Probability the environment assigns to the whole outcome sequence given
// the action sequence (product of i.i.d. conditionals).
double joint_probability(const ClassicalEnv& env, const ClassicalHistory& hist);

// Mixture predictive probability of `outcome` after `hist` under `action`,
// computed from full-history products.
double predictive(const ClassicalClass& cls, const ClassicalHistory& hist,
                  const std::string& action, const std::string& outcome);

// Posterior weight of hypothesis q given the history.
double posterior_weight(const ClassicalClass& cls, const ClassicalHistory& hist,
                        size_t q);

// Finite-horizon expectimax value over the mixture, nested sum/max form.
double expectimax_value(const ClassicalClass& cls, const ClassicalHistory& hist,
                        int depth, double gamma);

// Root argmax with ties resolved to the lexicographically lowest action id.
std::string expectimax_policy(const ClassicalClass& cls,
                              const ClassicalHistory& hist, int horizon,
                              double gamma);

}  // namespace oracle
