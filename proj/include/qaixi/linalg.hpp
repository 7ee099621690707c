#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qaixi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
// Validation tolerances. Dimensions stay small (<= 16 per register), so
// conditioning is benign and fixed absolute tolerances keep tests
// deterministic.
inline constexpr double hermitian = 1e-9;
inline constexpr double psd = 1e-9;
inline constexpr double trace = 1e-9;
// Eigenvalues below this count as zero for support / branch-probability
// purposes.
inline constexpr double support_cutoff = 1e-12;
inline constexpr double branch_cutoff = 1e-12;
}  // namespace tol

bool is_finite(const ComplexMatrix& m);
double max_abs(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::hermitian);

// Norm conventions used in this library:
//   trace_norm        sum of singular values; trace_distance is built on it.
//   hilbert_schmidt_norm   Frobenius norm; used for vector/Choi-state
//                          comparisons where a Euclidean notion is wanted.
// Validation residuals elsewhere are max-abs entrywise.
double trace_norm(const ComplexMatrix& m);
double hilbert_schmidt_norm(const ComplexMatrix& m);

struct EigenSystem {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns aligned with values
};

// Hermitian eigendecomposition; throws std::invalid_argument if the input
// fails the Hermiticity tolerance.
EigenSystem eigendecompose_hermitian(const ComplexMatrix& m);

// A (possibly sub-normalised) quantum state on a register composed of one
// or more subsystems. Invariants enforced at construction:
//   - Hermitian within tol::hermitian
//   - positive semidefinite: min eigenvalue >= -tol::psd
//   - 0 < trace <= 1 + tol::trace   (trace < 1 allowed: semi-density states)
// Values are immutable after construction and safe to copy across threads.
class DensityOperator {
public:
  DensityOperator(ComplexMatrix matrix, std::vector<int> dims);
  explicit DensityOperator(ComplexMatrix matrix);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const std::vector<int>& dims() const { return dims_; }
  const ComplexMatrix& matrix() const { return matrix_; }

  double trace() const { return matrix_.trace().real(); }
  // Returns the unit-trace version of this state.
  DensityOperator normalized() const;

private:
  ComplexMatrix matrix_;
  std::vector<int> dims_;
};

// Unit vector in a d-dimensional Hilbert space (2-norm 1 within 1e-9).
class PureState {
public:
  explicit PureState(ComplexVector amplitudes);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  DensityOperator to_density(std::vector<int> dims = {}) const;

private:
  ComplexVector amplitudes_;
};

// Kronecker products. For states the subsystem lists concatenate.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// Trace out every subsystem not listed in `keep`; kept factors stay in
// their original order. Throws on invalid indices or when the state has a
// single factor and `keep` asks for more than exists.
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& keep);

// (1/2) ||rho - sigma||_1. Throws on dimension mismatch.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

// Umegaki relative entropy Tr[rho (ln rho - ln sigma)], natural log,
// evaluated on the raw (possibly sub-normalised) operators. Returns
// +infinity when the support of rho is not contained in the support of
// sigma (support membership tested with eigenvalue cutoff
// tol::support_cutoff). Non-negativity is only guaranteed when both traces
// are equal; callers that need Klein's inequality must normalise first.
double relative_entropy(const DensityOperator& rho,
                        const DensityOperator& sigma);

double purity(const DensityOperator& rho);

// Convenience constructors.
DensityOperator maximally_mixed(int dim);
DensityOperator basis_state(int dim, int index);
// |Phi+> = d^{-1/2} sum_i |ii> on two d-dimensional factors.
PureState maximally_entangled(int dim);

}  // namespace qaixi
