#include "qaixi/channels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qaixi {

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus_ops)
    : kraus_ops_(std::move(kraus_ops)) {
  if (kraus_ops_.empty()) {
    throw std::invalid_argument("KrausChannel: empty Kraus list");
  }
  out_dim_ = static_cast<int>(kraus_ops_.front().rows());
  in_dim_ = static_cast<int>(kraus_ops_.front().cols());
  for (const auto& m : kraus_ops_) {
    if (m.rows() != out_dim_ || m.cols() != in_dim_) {
      throw std::invalid_argument("KrausChannel: inconsistent Kraus shapes");
    }
    if (!is_finite(m)) {
      throw std::invalid_argument("KrausChannel: non-finite Kraus entries");
    }
  }
  ComplexMatrix s = kraus_sum();
  trace_preserving_ =
      max_abs(s - ComplexMatrix::Identity(in_dim_, in_dim_)) <= tol::hermitian;
}

ComplexMatrix KrausChannel::kraus_sum() const {
  ComplexMatrix s = ComplexMatrix::Zero(in_dim_, in_dim_);
  for (const auto& m : kraus_ops_) s += m.adjoint() * m;
  return s;
}

KrausChannel KrausChannel::identity(int dim) {
  return KrausChannel({ComplexMatrix::Identity(dim, dim)});
}

KrausChannel KrausChannel::from_unitary(const ComplexMatrix& u) {
  return KrausChannel({u});
}

KrausChannel KrausChannel::dephasing(int dim, double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("dephasing: p outside [0, 1]");
  }
  std::vector<ComplexMatrix> ops;
  ops.push_back(std::sqrt(1.0 - p) * ComplexMatrix::Identity(dim, dim));
  for (int i = 0; i < dim; ++i) {
    ComplexMatrix proj = ComplexMatrix::Zero(dim, dim);
    proj(i, i) = std::sqrt(p);
    ops.push_back(std::move(proj));
  }
  return KrausChannel(std::move(ops));
}

KrausChannel KrausChannel::depolarizing_qubit(double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("depolarizing_qubit: p outside [0, 1]");
  }
  ComplexMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  std::vector<ComplexMatrix> ops;
  ops.push_back(std::sqrt(1.0 - 3.0 * p / 4.0) * ComplexMatrix::Identity(2, 2));
  ops.push_back(std::sqrt(p / 4.0) * x);
  ops.push_back(std::sqrt(p / 4.0) * y);
  ops.push_back(std::sqrt(p / 4.0) * z);
  return KrausChannel(std::move(ops));
}

UnitaryAction::UnitaryAction(ComplexMatrix u) : matrix_(std::move(u)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw std::invalid_argument("UnitaryAction: matrix not square");
  }
  if (!is_finite(matrix_)) {
    throw std::invalid_argument("UnitaryAction: non-finite entries");
  }
  double residual = max_abs(matrix_.adjoint() * matrix_ -
                            ComplexMatrix::Identity(matrix_.rows(), matrix_.rows()));
  if (residual > tol::hermitian) {
    throw std::invalid_argument("UnitaryAction: U^dagger U != I (residual " +
                                std::to_string(residual) + ")");
  }
}

Instrument::Instrument(
    std::vector<std::pair<std::string, KrausChannel>> branches) {
  if (branches.empty()) {
    throw std::invalid_argument("Instrument: no branches");
  }
  dim_ = branches.front().second.in_dim();
  for (auto& [label, ch] : branches) {
    if (ch.in_dim() != dim_ || ch.out_dim() != dim_) {
      throw std::invalid_argument("Instrument: branch dimension mismatch");
    }
    for (const auto& existing : labels_) {
      if (existing == label) {
        throw std::invalid_argument("Instrument: duplicate outcome label '" +
                                    label + "'");
      }
    }
    labels_.push_back(label);
    branches_.push_back(std::move(ch));
  }
}

const KrausChannel& Instrument::branch(const std::string& outcome) const {
  int idx = outcome_index(outcome);
  if (idx < 0) {
    throw std::invalid_argument("Instrument: unknown outcome label '" + outcome +
                                "'");
  }
  return branches_[idx];
}

int Instrument::outcome_index(const std::string& outcome) const {
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == outcome) return static_cast<int>(i);
  }
  return -1;
}

Instrument Instrument::computational_basis(int dim) {
  std::vector<std::pair<std::string, ComplexMatrix>> projectors;
  for (int i = 0; i < dim; ++i) {
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    p(i, i) = 1.0;
    projectors.emplace_back(std::to_string(i), std::move(p));
  }
  return projective(std::move(projectors));
}

Instrument Instrument::projective(
    std::vector<std::pair<std::string, ComplexMatrix>> projectors) {
  std::vector<std::pair<std::string, KrausChannel>> branches;
  branches.reserve(projectors.size());
  for (auto& [label, p] : projectors) {
    branches.emplace_back(label, KrausChannel({std::move(p)}));
  }
  return Instrument(std::move(branches));
}

ComplexMatrix apply_kraus(const KrausChannel& ch, const ComplexMatrix& x) {
  if (x.rows() != ch.in_dim() || x.cols() != ch.in_dim()) {
    throw std::invalid_argument("apply_kraus: dimension mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(ch.out_dim(), ch.out_dim());
  for (const auto& m : ch.kraus_ops()) out += m * x * m.adjoint();
  return out;
}

DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho) {
  if (ch.in_dim() != rho.dim()) {
    throw std::invalid_argument("apply_channel: dimension mismatch");
  }
  ComplexMatrix out = apply_kraus(ch, rho.matrix());
  // Scrub the tiny anti-Hermitian residue of the Kraus sums so the result
  // passes construction checks even after long pipelines.
  out = 0.5 * (out + ComplexMatrix(out.adjoint()));
  std::vector<int> dims =
      ch.out_dim() == rho.dim() ? rho.dims() : std::vector<int>{ch.out_dim()};
  return DensityOperator(std::move(out), std::move(dims));
}

BranchResult branch_apply(const Instrument& instr, const std::string& outcome,
                          const DensityOperator& rho) {
  if (instr.dim() != rho.dim()) {
    throw std::invalid_argument("branch_apply: dimension mismatch");
  }
  const KrausChannel& ch = instr.branch(outcome);
  ComplexMatrix raw = apply_kraus(ch, rho.matrix());
  double prob = raw.trace().real();
  BranchResult result;
  result.prob = prob;
  if (prob > tol::branch_cutoff) {
    ComplexMatrix post = raw / prob;
    post = 0.5 * (post + ComplexMatrix(post.adjoint()));
    result.post = DensityOperator(std::move(post), rho.dims());
  }
  return result;
}

std::vector<double> instrument_distribution(const Instrument& instr,
                                            const DensityOperator& rho) {
  if (instr.dim() != rho.dim()) {
    throw std::invalid_argument("instrument_distribution: dimension mismatch");
  }
  std::vector<double> probs;
  probs.reserve(instr.branches().size());
  for (const auto& branch : instr.branches()) {
    probs.push_back(apply_kraus(branch, rho.matrix()).trace().real());
  }
  return probs;
}

DensityOperator choi_state(const KrausChannel& ch) {
  if (ch.in_dim() != ch.out_dim()) {
    throw std::invalid_argument("choi_state: channel not square");
  }
  const int d = ch.in_dim();
  DensityOperator phi = maximally_entangled(d).to_density({d, d});
  return apply_channel(lift_to_second_factor(d, ch), phi);
}

ValidationReport validate(const KrausChannel& ch) {
  ValidationReport report;
  ComplexMatrix defect = ch.kraus_sum() -
                         ComplexMatrix::Identity(ch.in_dim(), ch.in_dim());
  double equality_residual = max_abs(defect);
  if (equality_residual > tol::hermitian) {
    // Not CPTP; still acceptable if trace-non-increasing.
    EigenSystem es = eigendecompose_hermitian(defect);
    double excess = es.values.maxCoeff();
    if (excess > tol::psd) {
      report.failures.push_back(
          {"kraus completeness (sum M^dagger M <= I)", excess});
    }
  }
  return report;
}

ValidationReport validate(const Instrument& instr) {
  ValidationReport report;
  const int d = instr.dim();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (size_t i = 0; i < instr.branches().size(); ++i) {
    const KrausChannel& branch = instr.branches()[i];
    ComplexMatrix defect = branch.kraus_sum() - ComplexMatrix::Identity(d, d);
    EigenSystem es = eigendecompose_hermitian(defect);
    double excess = es.values.maxCoeff();
    if (excess > tol::psd) {
      report.failures.push_back(
          {"branch '" + instr.outcome_labels()[i] + "' trace-non-increasing",
           excess});
    }
    total += branch.kraus_sum();
  }
  double residual = max_abs(total - ComplexMatrix::Identity(d, d));
  if (residual > tol::hermitian) {
    report.failures.push_back({"instrument completeness (sum over branches = I)",
                               residual});
  }
  return report;
}

ValidationReport validate(const UnitaryAction& u) {
  ValidationReport report;
  double residual =
      max_abs(u.matrix().adjoint() * u.matrix() -
              ComplexMatrix::Identity(u.dim(), u.dim()));
  if (residual > tol::hermitian) {
    report.failures.push_back({"unitarity (U^dagger U = I)", residual});
  }
  return report;
}

KrausChannel lift_to_second_factor(int dim_first, const KrausChannel& ch) {
  ComplexMatrix eye = ComplexMatrix::Identity(dim_first, dim_first);
  std::vector<ComplexMatrix> lifted;
  lifted.reserve(ch.kraus_ops().size());
  for (const auto& m : ch.kraus_ops()) lifted.push_back(tensor(eye, m));
  return KrausChannel(std::move(lifted));
}

Instrument lift_to_second_factor(int dim_first, const Instrument& instr) {
  std::vector<std::pair<std::string, KrausChannel>> branches;
  for (size_t i = 0; i < instr.branches().size(); ++i) {
    branches.emplace_back(instr.outcome_labels()[i],
                          lift_to_second_factor(dim_first, instr.branches()[i]));
  }
  return Instrument(std::move(branches));
}

}  // namespace qaixi
