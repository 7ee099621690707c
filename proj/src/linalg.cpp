#include "qaixi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qaixi {

bool is_finite(const ComplexMatrix& m) {
  return m.array().real().isFinite().all() && m.array().imag().isFinite().all();
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tolerance;
}

double trace_norm(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

double hilbert_schmidt_norm(const ComplexMatrix& m) { return m.norm(); }

EigenSystem eigendecompose_hermitian(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eigendecompose_hermitian: matrix not square");
  }
  if (!is_finite(m)) {
    throw std::invalid_argument("eigendecompose_hermitian: non-finite entries");
  }
  if (!is_hermitian(m)) {
    throw std::invalid_argument(
        "eigendecompose_hermitian: matrix not Hermitian within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecompose_hermitian: solver failed");
  }
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

void check_density_invariants(const ComplexMatrix& m,
                              const std::vector<int>& dims) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("DensityOperator: matrix not square");
  }
  if (!is_finite(m)) {
    throw std::invalid_argument("DensityOperator: non-finite entries");
  }
  if (dims.empty()) {
    throw std::invalid_argument("DensityOperator: empty subsystem list");
  }
  long long product = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("DensityOperator: dim <= 0");
    product *= d;
  }
  if (product != m.rows()) {
    throw std::invalid_argument(
        "DensityOperator: subsystem dims do not factor the matrix dimension");
  }
  if (!is_hermitian(m)) {
    throw std::invalid_argument("DensityOperator: matrix not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.eigenvalues().minCoeff() < -tol::psd) {
    throw std::invalid_argument(
        "DensityOperator: matrix not positive semidefinite (min eigenvalue " +
        std::to_string(solver.eigenvalues().minCoeff()) + ")");
  }
  double tr = m.trace().real();
  if (!(tr > 0.0) || tr > 1.0 + tol::trace) {
    throw std::invalid_argument("DensityOperator: trace " + std::to_string(tr) +
                                " outside (0, 1]");
  }
}

}  // namespace

DensityOperator::DensityOperator(ComplexMatrix matrix, std::vector<int> dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
  check_density_invariants(matrix_, dims_);
}

DensityOperator::DensityOperator(ComplexMatrix matrix)
    : matrix_(std::move(matrix)), dims_{static_cast<int>(matrix_.rows())} {
  check_density_invariants(matrix_, dims_);
}

DensityOperator DensityOperator::normalized() const {
  return DensityOperator(matrix_ / trace(), dims_);
}

PureState::PureState(ComplexVector amplitudes)
    : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) {
    throw std::invalid_argument("PureState: empty amplitude vector");
  }
  if (!amplitudes_.array().real().isFinite().all() ||
      !amplitudes_.array().imag().isFinite().all()) {
    throw std::invalid_argument("PureState: non-finite amplitudes");
  }
  double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > tol::hermitian) {
    throw std::invalid_argument("PureState: 2-norm " + std::to_string(norm) +
                                " not 1 within tolerance");
  }
}

DensityOperator PureState::to_density(std::vector<int> dims) const {
  ComplexMatrix m = amplitudes_ * amplitudes_.adjoint();
  if (dims.empty()) dims = {dim()};
  return DensityOperator(std::move(m), std::move(dims));
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityOperator(tensor(a.matrix(), b.matrix()), std::move(dims));
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& keep) {
  const auto& dims = rho.dims();
  const int n = static_cast<int>(dims.size());
  if (keep.empty()) {
    throw std::invalid_argument("partial_trace: keep set is empty");
  }
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) {
      throw std::invalid_argument("partial_trace: subsystem index " +
                                  std::to_string(k) + " out of range");
    }
    if (kept[k]) {
      throw std::invalid_argument("partial_trace: duplicate subsystem index");
    }
    kept[k] = true;
  }

  std::vector<int> kept_dims;
  for (int i = 0; i < n; ++i) {
    if (kept[i]) kept_dims.push_back(dims[i]);
  }
  int kept_total = 1, traced_total = 1;
  for (int i = 0; i < n; ++i) (kept[i] ? kept_total : traced_total) *= dims[i];

  // Map every full index to its (kept, traced) sub-index pair.
  const int d = rho.dim();
  std::vector<int> kept_index(d), traced_index(d);
  for (int idx = 0; idx < d; ++idx) {
    int rest = idx, ki = 0, ti = 0;
    for (int f = 0; f < n; ++f) {
      int stride = 1;
      for (int g = f + 1; g < n; ++g) stride *= dims[g];
      int digit = (rest / stride) % dims[f];
      rest -= digit * stride;
      if (kept[f]) {
        ki = ki * dims[f] + digit;
      } else {
        ti = ti * dims[f] + digit;
      }
    }
    kept_index[idx] = ki;
    traced_index[idx] = ti;
  }

  ComplexMatrix out = ComplexMatrix::Zero(kept_total, kept_total);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (traced_index[i] == traced_index[j]) {
        out(kept_index[i], kept_index[j]) += rho.matrix()(i, j);
      }
    }
  }
  (void)traced_total;
  return DensityOperator(std::move(out), std::move(kept_dims));
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  EigenSystem diff = eigendecompose_hermitian(rho.matrix() - sigma.matrix());
  return 0.5 * diff.values.cwiseAbs().sum();
}

double relative_entropy(const DensityOperator& rho,
                        const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  }
  EigenSystem er = eigendecompose_hermitian(rho.matrix());
  EigenSystem es = eigendecompose_hermitian(sigma.matrix());

  // Mass of rho falling in the numerical kernel of sigma.
  double kernel_mass = 0.0;
  double supported = 0.0;  // Tr[rho ln sigma], over sigma's support
  for (int j = 0; j < sigma.dim(); ++j) {
    double mu = es.values(j);
    double overlap =
        (es.vectors.col(j).adjoint() * rho.matrix() * es.vectors.col(j))(0, 0)
            .real();
    if (mu <= tol::support_cutoff) {
      kernel_mass += overlap;
    } else {
      supported += overlap * std::log(mu);
    }
  }
  if (kernel_mass > tol::support_cutoff) {
    return std::numeric_limits<double>::infinity();
  }

  double entropy_term = 0.0;  // Tr[rho ln rho]
  for (int i = 0; i < rho.dim(); ++i) {
    double lam = er.values(i);
    if (lam > tol::support_cutoff) entropy_term += lam * std::log(lam);
  }
  return entropy_term - supported;
}

double purity(const DensityOperator& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

DensityOperator maximally_mixed(int dim) {
  return DensityOperator(ComplexMatrix::Identity(dim, dim) / double(dim));
}

DensityOperator basis_state(int dim, int index) {
  if (index < 0 || index >= dim) {
    throw std::invalid_argument("basis_state: index out of range");
  }
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityOperator(std::move(m));
}

PureState maximally_entangled(int dim) {
  ComplexVector v = ComplexVector::Zero(dim * dim);
  for (int i = 0; i < dim; ++i) v(i * dim + i) = 1.0 / std::sqrt(double(dim));
  return PureState(std::move(v));
}

}  // namespace qaixi
