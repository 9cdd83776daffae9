#pragma once

// Exact arithmetic in R_q = Z_q[X]/(X^n + 1) and in the NTRU-style cyclic
// ring Z_q[X]/(X^N - 1).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nhlab/params.hpp"

namespace nhlab {

class CenteredPoly;

/// Element of the negacyclic ring, coefficients canonical in [0, q).
class RingElement {
 public:
  explicit RingElement(ParamPtr param);  // zero
  RingElement(ParamPtr param, std::vector<std::uint32_t> coeffs);

  static RingElement zero(ParamPtr param) { return RingElement(std::move(param)); }
  static RingElement one(ParamPtr param);
  static RingElement monomial(ParamPtr param, std::size_t degree, std::uint32_t c = 1);
  /// Reduces arbitrary signed integers into [0, q).
  static RingElement from_signed(ParamPtr param, std::span<const std::int64_t> values);

  const ParamSet& param() const { return *param_; }
  const ParamPtr& param_ptr() const { return param_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const std::uint32_t> coeffs() const { return coeffs_; }
  std::uint32_t operator[](std::size_t i) const { return coeffs_[i]; }

  bool is_zero() const;

  friend bool operator==(const RingElement& x, const RingElement& y) {
    return x.param_->same_ring(*y.param_) && x.coeffs_ == y.coeffs_;
  }

 private:
  ParamPtr param_;
  std::vector<std::uint32_t> coeffs_;
};

/// Integer polynomial in centered (signed) representation. Kept distinct from
/// RingElement so that which representative is in hand is always explicit.
class CenteredPoly {
 public:
  CenteredPoly() = default;
  explicit CenteredPoly(std::vector<std::int64_t> coeffs) : coeffs_(std::move(coeffs)) {}

  std::size_t size() const { return coeffs_.size(); }
  std::span<const std::int64_t> coeffs() const { return coeffs_; }
  std::int64_t operator[](std::size_t i) const { return coeffs_[i]; }
  std::int64_t max_abs() const;
  std::int64_t l1_norm() const;

  /// Reduce mod q into a RingElement.
  RingElement to_ring(ParamPtr param) const;

  friend bool operator==(const CenteredPoly&, const CenteredPoly&) = default;

 private:
  std::vector<std::int64_t> coeffs_;
};

/// Element of Z_q[X]/(X^N - 1).
class CyclicRingElement {
 public:
  CyclicRingElement(std::uint32_t q, std::vector<std::uint32_t> coeffs);
  static CyclicRingElement zero(std::size_t N, std::uint32_t q);
  static CyclicRingElement one(std::size_t N, std::uint32_t q);
  static CyclicRingElement from_signed(std::uint32_t q, std::span<const std::int64_t> values);

  std::size_t degree_bound() const { return coeffs_.size(); }  // N
  std::uint32_t q() const { return q_; }
  std::span<const std::uint32_t> coeffs() const { return coeffs_; }
  std::uint32_t operator[](std::size_t i) const { return coeffs_[i]; }

  friend bool operator==(const CyclicRingElement&, const CyclicRingElement&) = default;

 private:
  std::uint32_t q_;
  std::vector<std::uint32_t> coeffs_;
};

// --- negacyclic ring ---------------------------------------------------------

RingElement ring_add(const RingElement& x, const RingElement& y);
RingElement ring_sub(const RingElement& x, const RingElement& y);
RingElement ring_neg(const RingElement& x);
RingElement ring_scale(const RingElement& x, std::uint32_t c);

/// Multiplication; takes the NTT path when the parameter set supports it and
/// the schoolbook path otherwise.
RingElement ring_mul(const RingElement& x, const RingElement& y);
/// O(n^2) reference multiplication, always available.
RingElement schoolbook_mul(const RingElement& x, const RingElement& y);
/// Throws UnsupportedParameter if q != 1 mod 2n.
RingElement ntt_mul(const RingElement& x, const RingElement& y);

/// Forward negacyclic NTT. Component i is x evaluated at psi^(2 br(i) + 1),
/// br = bit reversal on log2(n) bits.
std::vector<std::uint32_t> forward_ntt(const RingElement& x);
RingElement inverse_ntt(ParamPtr param, std::vector<std::uint32_t> values);

/// Inverse in R_q, or nullopt when x is a zero divisor. Uses pointwise
/// inversion in the NTT domain when available, otherwise extended Euclid.
std::optional<RingElement> ring_inverse(const RingElement& x);
/// Extended Euclid over Z_q[X] against X^n + 1; works for any parameter set.
std::optional<RingElement> ring_inverse_euclid(const RingElement& x);

inline RingElement operator+(const RingElement& x, const RingElement& y) { return ring_add(x, y); }
inline RingElement operator-(const RingElement& x, const RingElement& y) { return ring_sub(x, y); }
inline RingElement operator-(const RingElement& x) { return ring_neg(x); }
inline RingElement operator*(const RingElement& x, const RingElement& y) { return ring_mul(x, y); }

/// d in [1, q) with c*d = 1 mod q. Throws ParameterError when gcd(c, q) != 1.
std::uint32_t scalar_inverse(std::int64_t c, std::uint32_t q);

/// Representatives in [-(q-1)/2, (q-1)/2].
CenteredPoly centered_lift(const RingElement& x);
std::int64_t centered(std::uint32_t c, std::uint32_t q);

/// Each coefficient reduced mod p then centered into [-(p-1)/2, (p-1)/2].
CenteredPoly reduce_mod_p_centered(const CenteredPoly& x, std::uint32_t p);

/// Sum of coefficients mod q.
std::uint32_t eval_at_one(const RingElement& x);
std::uint32_t eval_at_one(const CyclicRingElement& x);

// --- cyclic ring -------------------------------------------------------------

CyclicRingElement cyclic_add(const CyclicRingElement& x, const CyclicRingElement& y);
CyclicRingElement cyclic_sub(const CyclicRingElement& x, const CyclicRingElement& y);
CyclicRingElement cyclic_mul(const CyclicRingElement& x, const CyclicRingElement& y);

// --- wire encoding -----------------------------------------------------------

/// Coefficients as 16-bit little-endian words in index order.
void encode_ring(const RingElement& x, std::vector<std::uint8_t>& out);

}  // namespace nhlab
