#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qaixi/channels.hpp"
#include "qaixi/linalg.hpp"

namespace qaixi {

// Deterministic random source. All randomness flows through this type so
// that every experiment is a pure function of its seed: the generator is
// mt19937_64 (bit-identical across platforms) and the real-valued draws
// avoid the implementation-defined std::*_distribution adapters.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }
  // Uniform on [0, 1) with 53 random bits.
  double next_double();
  // Standard normal via Box-Muller.
  double next_gaussian();
  // Index sampled from (possibly sub-normalised) non-negative weights;
  // residual mass from numerical truncation goes to the last live entry.
  int sample_index(const std::vector<double>& weights);

  // Independent stream for a sub-task (episode index, worker id, ...).
  static Rng derive(std::uint64_t master_seed, std::uint64_t stream);

private:
  std::mt19937_64 gen_;
  double spare_gaussian_ = 0.0;
  bool has_spare_gaussian_ = false;
};

// splitmix64 mix of (seed, stream); used wherever one master seed has to
// fan out into decorrelated per-episode streams.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream);

// Haar-distributed unitary (Ginibre + QR with phase fix).
ComplexMatrix haar_unitary(int dim, Rng& rng);

// Full-rank state G G^dagger / Tr from a complex Ginibre matrix.
DensityOperator random_density(int dim, Rng& rng);

PureState random_pure(int dim, Rng& rng);

// CPTP channel from a Haar unitary on system (x) ancilla followed by
// tracing out the ancilla (Stinespring dilation), so completeness holds by
// construction.
KrausChannel random_cptp_channel(int dim, int ancilla_dim, Rng& rng);

// Instrument whose branches partition the Kraus operators of a random
// CPTP channel: one single-Kraus branch per ancilla outcome, labelled
// "0", "1", ...
Instrument random_instrument(int dim, int ancilla_dim, Rng& rng);

}  // namespace qaixi
