#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhlab {

/// Raised when inputs violate a parameter contract (mismatched rings,
/// non-prime moduli, out-of-range settings).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation is requested that the parameter set cannot
/// support, e.g. the NTT path without a 2n-th root of unity.
class UnsupportedParameter : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_prime(std::uint64_t x);

/// Smallest primitive root of the prime q.
std::uint32_t smallest_generator(std::uint32_t q);

std::uint32_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint32_t q);

/// Precomputed twiddles for the negacyclic NTT. Powers of psi are stored in
/// bit-reversed order (Longa-Naehrig layout).
struct NttTables {
  std::uint32_t psi = 0;       // primitive 2n-th root of unity
  std::uint32_t psi_inv = 0;
  std::uint32_t n_inv = 0;
  std::vector<std::uint32_t> psi_rev;
  std::vector<std::uint32_t> psi_inv_rev;
};

/// The lab's dial set: ring dimension, modulus, noise and trapdoor prime.
/// Build through `ParamSet::make` or `param_by_id`; instances are immutable
/// and shared between ring elements.
class ParamSet {
 public:
  static std::shared_ptr<const ParamSet> make(std::uint8_t id, std::string name,
                                              std::uint32_t n, std::uint32_t q,
                                              std::uint32_t k_noise,
                                              double sigma,
                                              std::uint32_t p_trapdoor);

  std::uint8_t id() const { return id_; }
  const std::string& name() const { return name_; }
  std::uint32_t n() const { return n_; }
  std::uint32_t q() const { return q_; }
  std::uint32_t k_noise() const { return k_noise_; }
  double sigma() const { return sigma_; }
  std::uint32_t p_trapdoor() const { return p_trapdoor_; }

  bool ntt_supported() const { return ntt_.has_value(); }
  /// Throws UnsupportedParameter unless q ≡ 1 (mod 2n).
  const NttTables& ntt() const;

  /// Same ring: dimension and modulus agree.
  bool same_ring(const ParamSet& other) const {
    return n_ == other.n_ && q_ == other.q_;
  }

 private:
  ParamSet() = default;

  std::uint8_t id_ = 0;
  std::string name_;
  std::uint32_t n_ = 0;
  std::uint32_t q_ = 0;
  std::uint32_t k_noise_ = 0;
  double sigma_ = 0.0;
  std::uint32_t p_trapdoor_ = 0;
  std::optional<NttTables> ntt_;
};

using ParamPtr = std::shared_ptr<const ParamSet>;

/// Registered parameter sets, addressable by the one-byte wire id.
///   0 newhope1024  n=1024 q=12289 k=16 p=67  (default)
///   1 newhope512   n=512  q=12289 k=16 p=67
///   2 toy2-17      n=2    q=17    k=1  p=5
///   3 toy4-17      n=4    q=17    k=1  p=5
///   4 toy8-97      n=8    q=97    k=1  p=5
///   5 toy8-257     n=8    q=257   k=2  p=11
///   6 toy16-257    n=16   q=257   k=2  p=11
ParamPtr param_by_id(std::uint8_t id);
ParamPtr param_by_name(const std::string& name);
std::vector<ParamPtr> all_params();
ParamPtr default_params();

/// Smallest prime >= lo.
std::uint32_t next_prime(std::uint32_t lo);

}  // namespace nhlab
