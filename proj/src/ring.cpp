#include "nhlab/ring.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "nhlab/zq_poly.hpp"

namespace nhlab {

namespace {

std::uint32_t mod_signed(std::int64_t v, std::uint32_t q) {
  std::int64_t r = v % static_cast<std::int64_t>(q);
  if (r < 0) r += q;
  return static_cast<std::uint32_t>(r);
}

void require_same(const RingElement& x, const RingElement& y, const char* op) {
  if (!x.param().same_ring(y.param()))
    throw ParameterError(std::string(op) + ": operands live in different rings");
}

void require_same(const CyclicRingElement& x, const CyclicRingElement& y, const char* op) {
  if (x.q() != y.q() || x.degree_bound() != y.degree_bound())
    throw ParameterError(std::string(op) + ": operands live in different cyclic rings");
}

}  // namespace

RingElement::RingElement(ParamPtr param) : param_(std::move(param)) {
  if (!param_) throw ParameterError("RingElement: null parameter set");
  coeffs_.assign(param_->n(), 0);
}

RingElement::RingElement(ParamPtr param, std::vector<std::uint32_t> coeffs)
    : param_(std::move(param)), coeffs_(std::move(coeffs)) {
  if (!param_) throw ParameterError("RingElement: null parameter set");
  if (coeffs_.size() != param_->n()) throw ParameterError("RingElement: length must equal n");
  for (auto c : coeffs_)
    if (c >= param_->q()) throw ParameterError("RingElement: coefficient out of [0, q)");
}

RingElement RingElement::one(ParamPtr param) { return monomial(std::move(param), 0, 1); }

RingElement RingElement::monomial(ParamPtr param, std::size_t degree, std::uint32_t c) {
  RingElement r(std::move(param));
  if (degree >= r.size()) throw ParameterError("monomial: degree must be < n");
  r.coeffs_[degree] = c % r.param().q();
  return r;
}

RingElement RingElement::from_signed(ParamPtr param, std::span<const std::int64_t> values) {
  RingElement r(std::move(param));
  if (values.size() != r.size()) throw ParameterError("from_signed: length must equal n");
  const auto q = r.param().q();
  for (std::size_t i = 0; i < values.size(); ++i) r.coeffs_[i] = mod_signed(values[i], q);
  return r;
}

bool RingElement::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](auto c) { return c == 0; });
}

std::int64_t CenteredPoly::max_abs() const {
  std::int64_t m = 0;
  for (auto c : coeffs_) m = std::max(m, c < 0 ? -c : c);
  return m;
}

std::int64_t CenteredPoly::l1_norm() const {
  std::int64_t s = 0;
  for (auto c : coeffs_) s += c < 0 ? -c : c;
  return s;
}

RingElement CenteredPoly::to_ring(ParamPtr param) const {
  return RingElement::from_signed(std::move(param), coeffs_);
}

CyclicRingElement::CyclicRingElement(std::uint32_t q, std::vector<std::uint32_t> coeffs)
    : q_(q), coeffs_(std::move(coeffs)) {
  if (q_ < 2) throw ParameterError("CyclicRingElement: modulus must be >= 2");
  if (coeffs_.empty()) throw ParameterError("CyclicRingElement: N must be >= 1");
  for (auto c : coeffs_)
    if (c >= q_) throw ParameterError("CyclicRingElement: coefficient out of [0, q)");
}

CyclicRingElement CyclicRingElement::zero(std::size_t N, std::uint32_t q) {
  return CyclicRingElement(q, std::vector<std::uint32_t>(N, 0));
}

CyclicRingElement CyclicRingElement::one(std::size_t N, std::uint32_t q) {
  std::vector<std::uint32_t> c(N, 0);
  c[0] = 1;
  return CyclicRingElement(q, std::move(c));
}

CyclicRingElement CyclicRingElement::from_signed(std::uint32_t q,
                                                 std::span<const std::int64_t> values) {
  std::vector<std::uint32_t> c(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) c[i] = mod_signed(values[i], q);
  return CyclicRingElement(q, std::move(c));
}

RingElement ring_add(const RingElement& x, const RingElement& y) {
  require_same(x, y, "ring_add");
  const auto q = x.param().q();
  std::vector<std::uint32_t> r(x.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (x[i] + y[i]) % q;
  return RingElement(x.param_ptr(), std::move(r));
}

RingElement ring_sub(const RingElement& x, const RingElement& y) {
  require_same(x, y, "ring_sub");
  const auto q = x.param().q();
  std::vector<std::uint32_t> r(x.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (x[i] + q - y[i]) % q;
  return RingElement(x.param_ptr(), std::move(r));
}

RingElement ring_neg(const RingElement& x) {
  const auto q = x.param().q();
  std::vector<std::uint32_t> r(x.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (q - x[i]) % q;
  return RingElement(x.param_ptr(), std::move(r));
}

RingElement ring_scale(const RingElement& x, std::uint32_t c) {
  const auto q = x.param().q();
  std::vector<std::uint32_t> r(x.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = static_cast<std::uint32_t>(std::uint64_t{x[i]} * (c % q) % q);
  return RingElement(x.param_ptr(), std::move(r));
}

RingElement schoolbook_mul(const RingElement& x, const RingElement& y) {
  require_same(x, y, "ring_mul");
  const std::size_t n = x.size();
  const std::int64_t q = x.param().q();
  // Products are < 2^32 and n <= 2^16 terms of each sign, so int64 holds the sums.
  std::vector<std::int64_t> acc(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t prod = std::int64_t{x[i]} * y[j];
      const std::size_t k = i + j;
      if (k < n)
        acc[k] += prod;
      else
        acc[k - n] -= prod;  // X^n = -1
    }
  }
  std::vector<std::uint32_t> r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = mod_signed(acc[k], static_cast<std::uint32_t>(q));
  return RingElement(x.param_ptr(), std::move(r));
}

std::vector<std::uint32_t> forward_ntt(const RingElement& x) {
  const NttTables& t = x.param().ntt();
  const std::uint64_t q = x.param().q();
  const std::size_t n = x.size();
  std::vector<std::uint32_t> a(x.coeffs().begin(), x.coeffs().end());
  std::size_t span = n;
  for (std::size_t m = 1; m < n; m <<= 1) {
    span >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j1 = 2 * i * span;
      const std::uint64_t w = t.psi_rev[m + i];
      for (std::size_t j = j1; j < j1 + span; ++j) {
        const std::uint64_t u = a[j];
        const std::uint64_t v = a[j + span] * w % q;
        a[j] = static_cast<std::uint32_t>((u + v) % q);
        a[j + span] = static_cast<std::uint32_t>((u + q - v) % q);
      }
    }
  }
  return a;
}

RingElement inverse_ntt(ParamPtr param, std::vector<std::uint32_t> a) {
  const NttTables& t = param->ntt();
  const std::uint64_t q = param->q();
  const std::size_t n = param->n();
  if (a.size() != n) throw ParameterError("inverse_ntt: length must equal n");
  std::size_t span = 1;
  for (std::size_t m = n; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    std::size_t j1 = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const std::uint64_t w = t.psi_inv_rev[h + i];
      for (std::size_t j = j1; j < j1 + span; ++j) {
        const std::uint64_t u = a[j];
        const std::uint64_t v = a[j + span];
        a[j] = static_cast<std::uint32_t>((u + v) % q);
        a[j + span] = static_cast<std::uint32_t>((u + q - v) % q * w % q);
      }
      j1 += 2 * span;
    }
    span <<= 1;
  }
  for (auto& c : a) c = static_cast<std::uint32_t>(c * std::uint64_t{t.n_inv} % q);
  return RingElement(std::move(param), std::move(a));
}

RingElement ntt_mul(const RingElement& x, const RingElement& y) {
  require_same(x, y, "ntt_mul");
  const std::uint64_t q = x.param().q();
  auto fx = forward_ntt(x);
  const auto fy = forward_ntt(y);
  for (std::size_t i = 0; i < fx.size(); ++i)
    fx[i] = static_cast<std::uint32_t>(fx[i] * std::uint64_t{fy[i]} % q);
  return inverse_ntt(x.param_ptr(), std::move(fx));
}

RingElement ring_mul(const RingElement& x, const RingElement& y) {
  require_same(x, y, "ring_mul");
  if (x.param().ntt_supported()) return ntt_mul(x, y);
  return schoolbook_mul(x, y);
}

std::optional<RingElement> ring_inverse(const RingElement& x) {
  if (!x.param().ntt_supported()) return ring_inverse_euclid(x);
  auto fx = forward_ntt(x);
  const auto q = x.param().q();
  for (auto& c : fx) {
    if (c == 0) return std::nullopt;
    c = scalar_inverse(c, q);
  }
  return inverse_ntt(x.param_ptr(), std::move(fx));
}

std::optional<RingElement> ring_inverse_euclid(const RingElement& x) {
  const auto q = x.param().q();
  const std::size_t n = x.size();
  zq_poly::Poly modulus(n + 1, 0);
  modulus[0] = 1;
  modulus[n] = 1;
  zq_poly::Poly a(x.coeffs().begin(), x.coeffs().end());
  zq_poly::trim(a);
  auto inv = zq_poly::inverse_mod(a, modulus, q);
  if (!inv) return std::nullopt;
  inv->resize(n, 0);
  return RingElement(x.param_ptr(), std::move(*inv));
}

std::uint32_t scalar_inverse(std::int64_t c, std::uint32_t q) {
  std::int64_t r0 = q, r1 = mod_signed(c, q);
  std::int64_t t0 = 0, t1 = 1;
  while (r1 != 0) {
    const std::int64_t quot = r0 / r1;
    std::tie(r0, r1) = std::pair{r1, r0 - quot * r1};
    std::tie(t0, t1) = std::pair{t1, t0 - quot * t1};
  }
  if (r0 != 1) throw ParameterError("scalar_inverse: value not coprime to modulus");
  return mod_signed(t0, q);
}

std::int64_t centered(std::uint32_t c, std::uint32_t q) {
  const std::int64_t v = c % q;
  return v > static_cast<std::int64_t>(q / 2) ? v - q : v;
}

CenteredPoly centered_lift(const RingElement& x) {
  std::vector<std::int64_t> r(x.size());
  const auto q = x.param().q();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = centered(x[i], q);
  return CenteredPoly(std::move(r));
}

CenteredPoly reduce_mod_p_centered(const CenteredPoly& x, std::uint32_t p) {
  if (p < 3 || p % 2 == 0) throw ParameterError("reduce_mod_p_centered: p must be odd");
  std::vector<std::int64_t> r(x.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = centered(mod_signed(x[i], p), p);
  return CenteredPoly(std::move(r));
}

std::uint32_t eval_at_one(const RingElement& x) {
  std::uint64_t s = 0;
  for (auto c : x.coeffs()) s += c;
  return static_cast<std::uint32_t>(s % x.param().q());
}

std::uint32_t eval_at_one(const CyclicRingElement& x) {
  std::uint64_t s = 0;
  for (auto c : x.coeffs()) s += c;
  return static_cast<std::uint32_t>(s % x.q());
}

CyclicRingElement cyclic_add(const CyclicRingElement& x, const CyclicRingElement& y) {
  require_same(x, y, "cyclic_add");
  std::vector<std::uint32_t> r(x.degree_bound());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (x[i] + y[i]) % x.q();
  return CyclicRingElement(x.q(), std::move(r));
}

CyclicRingElement cyclic_sub(const CyclicRingElement& x, const CyclicRingElement& y) {
  require_same(x, y, "cyclic_sub");
  std::vector<std::uint32_t> r(x.degree_bound());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (x[i] + x.q() - y[i]) % x.q();
  return CyclicRingElement(x.q(), std::move(r));
}

CyclicRingElement cyclic_mul(const CyclicRingElement& x, const CyclicRingElement& y) {
  require_same(x, y, "cyclic_mul");
  const std::size_t N = x.degree_bound();
  const std::uint64_t q = x.q();
  std::vector<std::uint64_t> acc(N, 0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) acc[(i + j) % N] = (acc[(i + j) % N] + std::uint64_t{x[i]} * y[j]) % q;
  std::vector<std::uint32_t> r(acc.begin(), acc.end());
  return CyclicRingElement(x.q(), std::move(r));
}

void encode_ring(const RingElement& x, std::vector<std::uint8_t>& out) {
  for (auto c : x.coeffs()) {
    out.push_back(static_cast<std::uint8_t>(c & 0xff));
    out.push_back(static_cast<std::uint8_t>(c >> 8));
  }
}

}  // namespace nhlab
