#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qaixi/linalg.hpp"

namespace qaixi {

// One failed invariant with its measured residual (max-abs entrywise,
// except PSD-order checks which report the offending eigenvalue excess).
struct ValidationIssue {
  std::string invariant;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<ValidationIssue> failures;
  bool ok() const { return failures.empty(); }
};

// A completely positive map given by its Kraus operators. Construction
// checks shapes and finiteness only; completeness properties are reported
// by validate() so that defective channels can still be inspected.
class KrausChannel {
public:
  explicit KrausChannel(std::vector<ComplexMatrix> kraus_ops);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const std::vector<ComplexMatrix>& kraus_ops() const { return kraus_ops_; }

  // sum_j M_j^dagger M_j
  ComplexMatrix kraus_sum() const;
  // True iff kraus_sum() == I within tol::hermitian (CPTP).
  bool trace_preserving() const { return trace_preserving_; }

  static KrausChannel identity(int dim);
  static KrausChannel from_unitary(const ComplexMatrix& u);
  // Mixes the identity with full computational-basis decoherence:
  // rho -> (1-p) rho + p sum_i |i><i| rho |i><i|.
  static KrausChannel dephasing(int dim, double p);
  static KrausChannel depolarizing_qubit(double p);

private:
  int in_dim_;
  int out_dim_;
  std::vector<ComplexMatrix> kraus_ops_;
  bool trace_preserving_;
};

// Unitary matrix wrapper (U^dagger U = I within tol::hermitian enforced at
// construction).
class UnitaryAction {
public:
  explicit UnitaryAction(ComplexMatrix u);
  int dim() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }

private:
  ComplexMatrix matrix_;
};

// A measurement with classical outcomes: one trace-non-increasing CP
// branch per outcome label, whose sum is trace preserving. Branch order is
// the declaration order and fixes the layout of outcome-distribution
// vectors everywhere.
class Instrument {
public:
  explicit Instrument(std::vector<std::pair<std::string, KrausChannel>> branches);

  int dim() const { return dim_; }
  const std::vector<std::string>& outcome_labels() const { return labels_; }
  const KrausChannel& branch(const std::string& outcome) const;
  const std::vector<KrausChannel>& branches() const { return branches_; }
  int outcome_index(const std::string& outcome) const;  // -1 if unknown

  // Projective measurement in the computational basis, one rank-1 branch
  // per basis vector, labelled "0", "1", ...
  static Instrument computational_basis(int dim);
  // Projective measurement given explicit projectors and labels.
  static Instrument projective(std::vector<std::pair<std::string, ComplexMatrix>>
                                   projectors);

private:
  int dim_;
  std::vector<std::string> labels_;
  std::vector<KrausChannel> branches_;
};

// sum_j M_j X M_j^dagger without any state validation; building block for
// the checked variants below.
ComplexMatrix apply_kraus(const KrausChannel& ch, const ComplexMatrix& x);

// Applies the channel to a state. Throws on dimension mismatch.
DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho);

struct BranchResult {
  double prob = 0.0;
  // Engaged only when prob > tol::branch_cutoff; a zero-probability branch
  // has no meaningful post-state and must not be consumed downstream.
  std::optional<DensityOperator> post;
};

// Probability and renormalised post-state of one measurement branch.
BranchResult branch_apply(const Instrument& instr, const std::string& outcome,
                          const DensityOperator& rho);

// Outcome probabilities in branch order; sums to trace(rho) within
// tolerance (sub-normalised input gives a sub-normalised distribution).
std::vector<double> instrument_distribution(const Instrument& instr,
                                            const DensityOperator& rho);

// (id (x) ch) applied to |Phi+><Phi+|; uniquely identifies a square
// channel. Pure exactly when the channel is unitary.
DensityOperator choi_state(const KrausChannel& ch);

ValidationReport validate(const KrausChannel& ch);
ValidationReport validate(const Instrument& instr);
ValidationReport validate(const UnitaryAction& u);

// Lifts a channel on the second factor of a bipartite system:
// Kraus ops M -> I_{dim_first} (x) M.
KrausChannel lift_to_second_factor(int dim_first, const KrausChannel& ch);
Instrument lift_to_second_factor(int dim_first, const Instrument& instr);

}  // namespace qaixi
