#include "support/classical_agent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

ClassicalClass make_class(std::vector<ClassicalEnv> envs) {
  if (envs.empty()) throw std::invalid_argument("make_class: no environments");
  ClassicalClass cls;
  double total = 0.0;
  for (const auto& env : envs) {
    cls.prior.push_back(std::exp2(-double(env.bits)));
    total += cls.prior.back();
  }
  for (double& w : cls.prior) w /= total;
  cls.envs = std::move(envs);
  return cls;
}

double joint_probability(const ClassicalEnv& env, const ClassicalHistory& hist) {
  double p = 1.0;
  for (const auto& step : hist) {
    p *= env.cond.at(step.action).at(step.outcome);
  }
  return p;
}

namespace {

double history_mass(const ClassicalClass& cls, const ClassicalHistory& hist) {
  double mass = 0.0;
  for (size_t q = 0; q < cls.envs.size(); ++q) {
    mass += cls.prior[q] * joint_probability(cls.envs[q], hist);
  }
  return mass;
}

}  // namespace

double predictive(const ClassicalClass& cls, const ClassicalHistory& hist,
                  const std::string& action, const std::string& outcome) {
  ClassicalHistory extended = hist;
  extended.push_back({action, outcome});
  double denom = history_mass(cls, hist);
  if (denom <= 0.0) {
    throw std::invalid_argument("predictive: history has zero mass");
  }
  return history_mass(cls, extended) / denom;
}

double posterior_weight(const ClassicalClass& cls, const ClassicalHistory& hist,
                        size_t q) {
  double denom = history_mass(cls, hist);
  if (denom <= 0.0) {
    throw std::invalid_argument("posterior_weight: history has zero mass");
  }
  return cls.prior[q] * joint_probability(cls.envs[q], hist) / denom;
}

double expectimax_value(const ClassicalClass& cls, const ClassicalHistory& hist,
                        int depth, double gamma) {
  if (depth <= 0) return 0.0;
  double denom = history_mass(cls, hist);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [action, outcomes] : cls.envs.front().cond) {
    double v = 0.0;
    for (const auto& [outcome, ignored] : outcomes) {
      ClassicalHistory extended = hist;
      extended.push_back({action, outcome});
      double mass = history_mass(cls, extended);
      if (mass <= 0.0) continue;
      double prob = mass / denom;
      // Reward averaged over the posterior given this extended history.
      double reward = 0.0;
      for (size_t q = 0; q < cls.envs.size(); ++q) {
        reward += cls.prior[q] * joint_probability(cls.envs[q], extended) *
                  cls.envs[q].rewards.at(action).at(outcome);
      }
      reward /= mass;
      v += prob * (reward + gamma * expectimax_value(cls, extended, depth - 1,
                                                     gamma));
    }
    if (v > best) best = v;
  }
  return best;
}

std::string expectimax_policy(const ClassicalClass& cls,
                              const ClassicalHistory& hist, int horizon,
                              double gamma) {
  double denom = history_mass(cls, hist);
  double best = -std::numeric_limits<double>::infinity();
  std::string best_action;
  for (const auto& [action, outcomes] : cls.envs.front().cond) {
    double v = 0.0;
    for (const auto& [outcome, ignored] : outcomes) {
      ClassicalHistory extended = hist;
      extended.push_back({action, outcome});
      double mass = history_mass(cls, extended);
      if (mass <= 0.0) continue;
      double prob = mass / denom;
      double reward = 0.0;
      for (size_t q = 0; q < cls.envs.size(); ++q) {
        reward += cls.prior[q] * joint_probability(cls.envs[q], extended) *
                  cls.envs[q].rewards.at(action).at(outcome);
      }
      reward /= mass;
      v += prob * (reward + gamma * expectimax_value(cls, extended, horizon - 1,
                                                     gamma));
    }
    if (v > best) {
      best = v;
      best_action = action;
    }
  }
  return best_action;
}

}  // namespace oracle
