#pragma once

// Plain dense polynomials over the field Z_q (q prime), no quotient.
// Coefficient i multiplies X^i; the zero polynomial is the empty vector.

#include <cstdint>
#include <optional>
#include <vector>

namespace nhlab::zq_poly {

using Poly = std::vector<std::uint32_t>;

void trim(Poly& a);
Poly sub(const Poly& a, const Poly& b, std::uint32_t q);
Poly mul(const Poly& a, const Poly& b, std::uint32_t q);
/// Returns {quotient, remainder}; b must be nonzero.
std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b, std::uint32_t q);

/// u with a*u = 1 mod m, or nullopt if gcd(a, m) is not a unit.
/// The result has degree < deg(m).
std::optional<Poly> inverse_mod(const Poly& a, const Poly& m, std::uint32_t q);

}  // namespace nhlab::zq_poly
