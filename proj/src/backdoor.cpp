#include "nhlab/backdoor.hpp"

#include <numeric>

#include "nhlab/zq_poly.hpp"

namespace nhlab {

namespace {

nlohmann::json sparse_to_json(const CenteredPoly& x) {
  nlohmann::json positions = nlohmann::json::array(), signs = nlohmann::json::array();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    positions.push_back(i);
    signs.push_back(x[i]);
  }
  return {{"positions", positions}, {"signs", signs}};
}

CenteredPoly sparse_from_json(const nlohmann::json& j, std::size_t n) {
  std::vector<std::int64_t> c(n, 0);
  const auto& pos = j.at("positions");
  const auto& sg = j.at("signs");
  if (pos.size() != sg.size()) throw ParameterError("trapdoor JSON: positions/signs length mismatch");
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const auto idx = pos[i].get<std::size_t>();
    const auto s = sg[i].get<std::int64_t>();
    if (idx >= n || (s != 1 && s != -1)) throw ParameterError("trapdoor JSON: bad sparse entry");
    c[idx] = s;
  }
  return CenteredPoly(std::move(c));
}

// 1 + p * hat, reduced mod q.
RingElement one_plus_p_times(const CenteredPoly& hat, std::uint32_t p, const ParamPtr& param) {
  std::vector<std::int64_t> c(hat.coeffs().begin(), hat.coeffs().end());
  for (auto& x : c) x *= p;
  c[0] += 1;
  return RingElement::from_signed(param, c);
}

}  // namespace

nlohmann::json TrapdoorKey::to_json() const {
  std::vector<std::uint8_t> a_bytes;
  encode_ring(a, a_bytes);
  return {{"p", p},
          {"weight", weight},
          {"f_hat", sparse_to_json(f_hat)},
          {"g_hat", sparse_to_json(g_hat)},
          {"a_hex", to_hex(a_bytes)}};
}

TrapdoorKey TrapdoorKey::from_json(const nlohmann::json& j, ParamPtr param) {
  const auto p = j.at("p").get<std::uint32_t>();
  const auto weight = j.at("weight").get<std::size_t>();
  CenteredPoly f_hat = sparse_from_json(j.at("f_hat"), param->n());
  CenteredPoly g_hat = sparse_from_json(j.at("g_hat"), param->n());
  RingElement f = one_plus_p_times(f_hat, p, param);
  RingElement g = one_plus_p_times(g_hat, p, param);
  auto finv = ring_inverse(f);
  if (!finv) throw ParameterError("trapdoor JSON: f is not invertible");
  RingElement a = g * *finv;
  std::vector<std::uint8_t> a_bytes;
  encode_ring(a, a_bytes);
  if (j.contains("a_hex") && j.at("a_hex").get<std::string>() != to_hex(a_bytes))
    throw ParameterError("trapdoor JSON: a_hex does not match g f^-1");
  return {p, weight, std::move(f_hat), std::move(g_hat), std::move(f), std::move(g), std::move(a)};
}

TrapdoorKey gen_trapdoor(ParamPtr param, std::uint32_t p, std::size_t weight, SeededRng& rng,
                         int max_attempts) {
  if (!is_prime(p) || p < 4 * param->k_noise() + 1)
    throw ParameterError("gen_trapdoor: p must be a prime >= 4k + 1");
  if (weight == 0)
    throw ParameterError("gen_trapdoor: weight 0 gives f = g = 1 and a - 1 = 0");
  if (weight > param->n()) throw ParameterError("gen_trapdoor: weight exceeds n");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    CenteredPoly f_hat = sample_sparse_ternary(rng, param->n(), weight);
    CenteredPoly g_hat = sample_sparse_ternary(rng, param->n(), weight);
    if (f_hat == g_hat) continue;
    // f inside a subring Z_q[X^d] has a sparse inverse and a visibly sparse a
    std::size_t d = param->n();
    for (std::size_t i = 0; i < f_hat.size(); ++i)
      if (f_hat[i] != 0) d = std::gcd(d, i);
    if (d > 1) continue;
    RingElement f = one_plus_p_times(f_hat, p, param);
    RingElement g = one_plus_p_times(g_hat, p, param);
    auto finv = ring_inverse(f);
    if (!finv) continue;
    if (!ring_inverse(g - f)) continue;
    RingElement a = g * *finv;
    return {p, weight, std::move(f_hat), std::move(g_hat), std::move(f), std::move(g), std::move(a)};
  }
  throw GenerationError("gen_trapdoor: retry budget exhausted");
}

std::int64_t worst_case_bound(const ParamSet& param, std::uint32_t p, std::size_t weight) {
  const std::int64_t k = param.k_noise();
  return 2 * k + static_cast<std::int64_t>(p) * 2 * static_cast<std::int64_t>(weight) * k;
}

bool recovery_guaranteed(const ParamSet& param, std::uint32_t p, std::size_t weight) {
  return 2 * worst_case_bound(param, p, weight) < static_cast<std::int64_t>(param.q());
}

TRecovery recover_t(const RingElement& b, const TrapdoorKey& key) {
  const CenteredPoly lifted = centered_lift(b * key.f);
  return {reduce_mod_p_centered(lifted, key.p), lifted.max_abs()};
}

std::optional<RingElement> recover_s(const RingElement& b, const CenteredPoly& t,
                                     const RingElement& a) {
  auto inv = ring_inverse(a - RingElement::one(a.param_ptr()));
  if (!inv) return std::nullopt;
  return (b - t.to_ring(b.param_ptr())) * *inv;
}

std::optional<RecoveryOutcome> recover_full(const Transcript& transcript, const TrapdoorKey& key) {
  const ParamPtr& P = transcript.config.param;
  const RingElement& a = transcript.msg1.a;
  const RingElement& b = transcript.msg1.b;
  TRecovery tr = recover_t(b, key);
  auto s_rec = recover_s(b, tr.t, a);
  if (!s_rec) return std::nullopt;
  RingElement e_rec = b - a * *s_rec;
  const bool matched =
      *s_rec == transcript.alice.s.to_ring(P) && e_rec == transcript.alice.e.to_ring(P);
  const bool guaranteed = recovery_guaranteed(*P, key.p, key.weight);
  return RecoveryOutcome{std::move(tr.t), std::move(*s_rec), std::move(e_rec), guaranteed,
                         !matched && !guaranteed, matched};
}

KeyBits attacker_key(const Transcript& transcript, const RingElement& s_rec) {
  return reconcile_alice(transcript.msg2.u * s_rec, transcript.msg2.r);
}

std::optional<PseudoInverseWitness> pseudo_inverse_find(const CyclicRingElement& p_poly) {
  const std::size_t N = p_poly.degree_bound();
  const std::uint32_t q = p_poly.q();
  if (!is_prime(q)) throw ParameterError("pseudo_inverse_find: q must be prime");
  // (X^N - 1)/(X - 1) = 1 + X + ... + X^(N-1)
  zq_poly::Poly phi(N, 1);
  zq_poly::Poly a(p_poly.coeffs().begin(), p_poly.coeffs().end());
  zq_poly::trim(a);
  auto inv = zq_poly::inverse_mod(a, phi, q);
  if (!inv) return std::nullopt;
  inv->resize(N, 0);
  return PseudoInverseWitness{CyclicRingElement(q, std::move(*inv)), p_poly};
}

bool pseudo_inverse_check(const PseudoInverseWitness& w, int trials, SeededRng& rng) {
  const std::size_t N = w.p_poly.degree_bound();
  const std::uint32_t q = w.p_poly.q();
  const CyclicRingElement Pp = cyclic_mul(w.P, w.p_poly);
  const bool n_invertible = N % q != 0;
  const std::uint32_t n_inv = n_invertible ? scalar_inverse(static_cast<std::int64_t>(N), q) : 0;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<std::uint32_t> c(N);
    for (auto& x : c) x = rng.uniform_below(q);
    const std::uint32_t total = eval_at_one(CyclicRingElement(q, c));
    if (n_invertible) {
      // subtract the mean from every coefficient
      const std::uint32_t mean = static_cast<std::uint32_t>(std::uint64_t{total} * n_inv % q);
      for (auto& x : c) x = (x + q - mean) % q;
    } else {
      c[0] = (c[0] + q - total) % q;
    }
    const CyclicRingElement s(q, std::move(c));
    if (!(cyclic_mul(Pp, s) == s)) return false;
  }
  return true;
}

bool molyung_decomposition_check(const MolYungInstance& inst) {
  for (const auto* x : {&inst.v, &inst.w})
    for (auto c : x->coeffs())
      if (c > 1) throw ParameterError("molyung_decomposition_check: v and w must be binary");
  return inst.t == cyclic_add(cyclic_mul(inst.h, inst.v), inst.w);
}

}  // namespace nhlab
