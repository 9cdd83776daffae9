#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "nhlab/ring.hpp"

namespace nhlab {

using Seed = std::array<std::uint8_t, 32>;

/// Parses exactly 64 hex characters; throws ParameterError otherwise.
Seed parse_seed_hex(std::string_view hex);
std::string seed_to_hex(const Seed& seed);

/// Deterministic ChaCha20 keystream generator.
///
/// Stream layout: key = the 256-bit seed, 64-bit nonce = stream_index
/// (little-endian), 64-bit block counter starting at 0 (original DJB
/// ChaCha20, 20 rounds). Bytes are consumed in keystream order; integers
/// are assembled little-endian. Distinct stream indices give disjoint
/// keystreams under the same seed.
class SeededRng {
 public:
  SeededRng(const Seed& seed, std::uint64_t stream_index);

  const Seed& seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Fresh generator on another stream of the same seed.
  SeededRng fork(std::uint64_t stream_index) const { return SeededRng(seed_, stream_index); }

  std::uint8_t next_byte();
  std::uint16_t next_u16();
  std::uint32_t next_u32();
  std::uint64_t next_u64();
  bool next_bit();
  /// Uniform on [0, bound) by rejection from masked draws.
  std::uint32_t uniform_below(std::uint32_t bound);
  Seed next_seed();

 private:
  void refill();

  Seed seed_;
  std::uint64_t stream_index_;
  std::uint64_t block_ = 0;
  std::array<std::uint8_t, 64> buffer_{};
  std::size_t pos_ = 64;
  std::uint8_t bit_cache_ = 0;
  unsigned bits_left_ = 0;
};

/// Noise polynomial with every coefficient in [-bound, bound].
class NoisePoly {
 public:
  NoisePoly(CenteredPoly poly, std::uint32_t bound);

  const CenteredPoly& poly() const { return poly_; }
  std::uint32_t bound() const { return bound_; }
  RingElement to_ring(ParamPtr param) const { return poly_.to_ring(std::move(param)); }

  friend bool operator==(const NoisePoly&, const NoisePoly&) = default;

 private:
  CenteredPoly poly_;
  std::uint32_t bound_;
};

/// Each coefficient uniform on [0, q). Draws are 16-bit words masked to the
/// bit length of q; values >= q are rejected.
RingElement sample_uniform_ring(SeededRng& rng, ParamPtr param);

/// Centered binomial psi_k: sum over k of (b_i - b'_i) with fair bits.
NoisePoly sample_psi_k(SeededRng& rng, const ParamSet& param);
NoisePoly sample_psi_k(SeededRng& rng, std::size_t n, std::uint32_t k);

/// Exactly `weight` coefficients set to +-1 at uniformly chosen distinct
/// positions. Throws ParameterError when weight > n.
CenteredPoly sample_sparse_ternary(SeededRng& rng, std::size_t n, std::size_t weight);

/// exp(-x^2 / (2 sigma^2)). Reference pmf weight only, not used by the
/// protocol sampler.
double gaussian_weight(std::int64_t x, double sigma);

}  // namespace nhlab
