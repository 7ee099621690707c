#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qaixi/environments.hpp"
#include "qaixi/linalg.hpp"

namespace qaixi {

// Posterior over a finite hypothesis class. Instead of one unnormalised
// mixture operator we track, per hypothesis, a normalised conditional
// state plus a scalar weight; the two factorizations are equivalent and
// the scalar form is numerically stable. The full mixture operator is
// reconstructed on demand.
//
// Values are immutable: updates return new MixtureStates.
struct MixtureState {
  std::vector<ModelPtr> hypotheses;
  std::vector<double> weights;            // non-negative, sums to 1
  std::vector<DensityOperator> cond_states;  // normalised, per hypothesis
  std::vector<double> log_likelihoods;    // accumulated ln Pr_Q(outcomes|actions)

  int dim() const { return cond_states.empty() ? 0 : cond_states.front().dim(); }
};

// Prior mixture: weights proportional to 2^-description_length, states at
// their initial values. All hypotheses must share the register dimension
// and the action/outcome interface (same action ids, kinds, and outcome
// alphabets); throws std::invalid_argument otherwise.
MixtureState mixture_init(std::vector<ModelPtr> models);

// sum_Q w_Q rho_Q as a single operator.
DensityOperator mixture_operator(const MixtureState& mix);

// Mixture outcome probabilities for an instrument action, in the action's
// branch order. Throws for unitary actions (they have no outcomes).
std::vector<double> predictive_distribution(const MixtureState& mix,
                                            const std::string& action);

// Bayes step. For instrument actions pass the observed outcome: every
// hypothesis advances through its own branch map and its weight picks up
// the branch probability; hypotheses that assigned (numerically) zero
// probability are eliminated (weight exactly 0, state frozen). Episodic
// hypotheses re-prepare their per-round state after the measurement.
// For unitary actions pass std::nullopt: states evolve, weights are
// untouched. Throws ImpossibleObservationError when no hypothesis can
// explain the outcome.
MixtureState mixture_update(const MixtureState& mix, const std::string& action,
                            const std::optional<std::string>& outcome);

// Relative entropy from a reference state (the true environment's
// conditional state) to the mixture operator; +infinity passes through.
double posterior_divergence(const MixtureState& mix,
                            const DensityOperator& truth_state);

struct GapStatistics {
  double g = 0.0;              // sum_{Q != Q*} 2^-(len(Q) - len(Q*))
  double mdl_bound = 0.0;      // len(Q*) ln 2 + ln(1 + g)
  double dilution_bound = 0.0; // ln(1 + g); equals -ln w0(Q*)
};

GapStatistics gap_statistics(const std::vector<ModelPtr>& models,
                             size_t true_index);

// Informational-completeness diagnostic: rank of the classical Fisher
// information of the instrument's outcome distribution with respect to a
// local trace-preserving parameterization of the state around rho0.
// full_rank (= d^2 - 1) means the instrument separates all state
// directions to first order.
struct FisherDiagnostic {
  int rank = 0;
  int full_rank = 0;
  RealVector spectrum;  // Fisher matrix eigenvalues, ascending
};

FisherDiagnostic fisher_information_rank(const Instrument& instr,
                                         const DensityOperator& rho0);

}  // namespace qaixi
