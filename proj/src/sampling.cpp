#include "qaixi/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qaixi {

double Rng::next_double() {
  return (next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
  if (has_spare_gaussian_) {
    has_spare_gaussian_ = false;
    return spare_gaussian_;
  }
  double u1 = 0.0;
  do {
    u1 = next_double();
  } while (u1 <= 0.0);
  double u2 = next_double();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * std::numbers::pi * u2;
  spare_gaussian_ = radius * std::sin(angle);
  has_spare_gaussian_ = true;
  return radius * std::cos(angle);
}

int Rng::sample_index(const std::vector<double>& weights) {
  if (weights.empty()) {
    throw std::invalid_argument("sample_index: empty weight vector");
  }
  double total = 0.0;
  for (double w : weights) total += (w > 0.0 ? w : 0.0);
  if (total <= 0.0) {
    throw std::invalid_argument("sample_index: no positive weight");
  }
  double u = next_double() * total;
  double acc = 0.0;
  int last_live = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_live = static_cast<int>(i);
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return last_live;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream) {
  std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::derive(std::uint64_t master_seed, std::uint64_t stream) {
  return Rng(derive_seed(master_seed, stream));
}

ComplexMatrix haar_unitary(int dim, Rng& rng) {
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      g(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    Complex diag = r(j, j);
    double mag = std::abs(diag);
    Complex phase = mag > 0.0 ? diag / mag : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

DensityOperator random_density(int dim, Rng& rng) {
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      g(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
    }
  }
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + ComplexMatrix(rho.adjoint()));
  return DensityOperator(std::move(rho));
}

PureState random_pure(int dim, Rng& rng) {
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) {
    v(i) = Complex(rng.next_gaussian(), rng.next_gaussian());
  }
  v /= v.norm();
  return PureState(std::move(v));
}

KrausChannel random_cptp_channel(int dim, int ancilla_dim, Rng& rng) {
  if (dim < 1 || ancilla_dim < 1) {
    throw std::invalid_argument("random_cptp_channel: dims must be positive");
  }
  // Dilation ordering: composite index (i_system * ancilla_dim + i_ancilla),
  // ancilla prepared in |0>. M_k(i, j) = U[(i, k), (j, 0)].
  ComplexMatrix u = haar_unitary(dim * ancilla_dim, rng);
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(ancilla_dim);
  for (int k = 0; k < ancilla_dim; ++k) {
    ComplexMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        m(i, j) = u(i * ancilla_dim + k, j * ancilla_dim);
      }
    }
    kraus.push_back(std::move(m));
  }
  return KrausChannel(std::move(kraus));
}

Instrument random_instrument(int dim, int ancilla_dim, Rng& rng) {
  KrausChannel ch = random_cptp_channel(dim, ancilla_dim, rng);
  std::vector<std::pair<std::string, KrausChannel>> branches;
  branches.reserve(ch.kraus_ops().size());
  for (size_t k = 0; k < ch.kraus_ops().size(); ++k) {
    branches.emplace_back(std::to_string(k), KrausChannel({ch.kraus_ops()[k]}));
  }
  return Instrument(std::move(branches));
}

}  // namespace qaixi
