#pragma once

#include <cstdint>
#include <limits>

#include "blat/linalg.hpp"

namespace blat {

/// Counter-based 64-bit generator: the n-th output of stream s under seed k is
/// a fixed function of (k, s, n), so independent substreams can be handed to
/// workers without any shared state. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Independent generator for (seed, stream, index).
  CounterRng substream(std::uint64_t index) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Vector of iid N(0, 1) draws.
Vector standard_normal(Index n, CounterRng& rng);

/// One draw from N(mean, L·Lᵀ) given the lower Cholesky factor L.
Vector sample_gaussian(const Vector& mean, const Matrix& chol_lower, CounterRng& rng);

/// One draw from IW(psi, nu) via the Bartlett decomposition of the
/// Wishart(psi⁻¹, nu) precision. Requires psi SPD and nu > dim − 1.
Matrix sample_inverse_wishart(const Matrix& psi, double nu, CounterRng& rng);

}  // namespace blat
