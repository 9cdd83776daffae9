#include "nhlab/zq_poly.hpp"

#include <stdexcept>

#include "nhlab/ring.hpp"

namespace nhlab::zq_poly {

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly sub(const Poly& a, const Poly& b, std::uint32_t q) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const std::uint32_t x = i < a.size() ? a[i] : 0;
    const std::uint32_t y = i < b.size() ? b[i] : 0;
    r[i] = (x + q - y) % q;
  }
  trim(r);
  return r;
}

Poly mul(const Poly& a, const Poly& b, std::uint32_t q) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      r[i + j] = static_cast<std::uint32_t>((r[i + j] + std::uint64_t{a[i]} * b[j]) % q);
    }
  }
  trim(r);
  return r;
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b, std::uint32_t q) {
  Poly rem = a;
  trim(rem);
  Poly den = b;
  trim(den);
  if (den.empty()) throw std::domain_error("zq_poly::divmod: division by zero");
  if (rem.size() < den.size()) return {{}, rem};
  const std::uint32_t lead_inv = scalar_inverse(den.back(), q);
  Poly quot(rem.size() - den.size() + 1, 0);
  for (std::size_t k = quot.size(); k-- > 0;) {
    const std::uint32_t c =
        static_cast<std::uint32_t>(std::uint64_t{rem[k + den.size() - 1]} * lead_inv % q);
    quot[k] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < den.size(); ++j) {
      const std::uint64_t t = std::uint64_t{c} * den[j] % q;
      rem[k + j] = static_cast<std::uint32_t>((rem[k + j] + q - t) % q);
    }
  }
  trim(rem);
  trim(quot);
  return {quot, rem};
}

std::optional<Poly> inverse_mod(const Poly& a, const Poly& m, std::uint32_t q) {
  // Invariant: s_i * a = r_i (mod m).
  Poly r0 = m, r1 = divmod(a, m, q).second;
  Poly s0 = {}, s1 = {1};
  trim(r0);
  while (!r1.empty()) {
    auto [quot, rem] = divmod(r0, r1, q);
    Poly s2 = sub(s0, mul(quot, s1, q), q);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  // r0 = gcd up to a unit.
  if (r0.size() != 1) return std::nullopt;
  const std::uint32_t c = scalar_inverse(r0[0], q);
  Poly u = mul(s0, Poly{c}, q);
  return divmod(u, m, q).second;
}

}  // namespace nhlab::zq_poly
