#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "nhlab/backdoor.hpp"
#include "nhlab/params.hpp"
#include "nhlab/protocol.hpp"
#include "oracles.hpp"

using namespace nhlab;

namespace {
Transcript trapdoored_session(const TrapdoorKey& key, SeededRng& rng, bool zero_errors = false) {
  ProtocolConfig cfg;
  cfg.param = key.a.param_ptr();
  cfg.policy = GeneratorPolicy::external();
  cfg.zero_errors = zero_errors;
  GeneratorSource gen = GeneratorSource::external(key.a);
  return run_session(cfg, gen, rng);
}
}  // namespace

TEST_CASE("p = 67 is the smallest prime at least 4k + 1") {
  CHECK_FALSE(is_prime(65));
  CHECK_FALSE(is_prime(66));
  CHECK(is_prime(67));
  CHECK(next_prime(4 * 16 + 1) == 67);
}

TEST_CASE("gen_trapdoor structure") {
  const auto p = default_params();
  SeededRng rng(testutil::seed_of(60), 0);
  const auto key = gen_trapdoor(p, 67, 2, rng);
  const auto f = centered_lift(key.f), g = centered_lift(key.g);
  for (std::size_t i = 0; i < 1024; ++i) {
    CHECK(oracle::mod(f[i], 67) == (i == 0 ? 1 : 0));
    CHECK(oracle::mod(g[i], 67) == (i == 0 ? 1 : 0));
  }
  CHECK(key.f_hat.l1_norm() == 2);
  CHECK(key.g_hat.l1_norm() == 2);
  CHECK_FALSE(key.f_hat == key.g_hat);
  CHECK(key.a * key.f == key.g);
  CHECK(ring_inverse(key.f).has_value());
  CHECK(ring_inverse(key.g - key.f).has_value());
  CHECK(ring_inverse(key.a - RingElement::one(p)).has_value());

  CHECK_THROWS_AS(gen_trapdoor(p, 67, 0, rng), ParameterError);
  CHECK_THROWS_AS(gen_trapdoor(p, 65, 2, rng), ParameterError);
  CHECK_THROWS_AS(gen_trapdoor(p, 61, 2, rng), ParameterError);
  CHECK_THROWS_AS(gen_trapdoor(p, 67, 2, rng, 0), GenerationError);
  // on n = 2, weight 1 only X^1 generates Z_2
  for (int i = 0; i < 20; ++i) CHECK(gen_trapdoor(param_by_name("toy2-17"), 5, 1, rng).f_hat[0] == 0);
}

TEST_CASE("f_hat support is never confined to a subring") {
  const auto p = default_params();
  SeededRng rng(testutil::seed_of(69), 0);
  for (int i = 0; i < 50; ++i) {
    const auto key = gen_trapdoor(p, 67, 2, rng);
    std::size_t d = 1024;
    for (std::size_t j = 0; j < 1024; ++j)
      if (key.f_hat[j] != 0) d = std::gcd(d, j);
    CHECK(d == 1);
    std::size_t zeros = 0;
    for (auto c : key.a.coeffs()) zeros += c == 0;
    CHECK(zeros < 10);
  }
}

TEST_CASE("trapdoored generator looks uniform coefficientwise") {
  const auto p = default_params();
  SeededRng rng(testutil::seed_of(61), 0);
  constexpr int bins = 16;
  std::array<double, bins> counts{};
  std::size_t total = 0;
  for (int i = 0; i < 20; ++i) {
    const auto key = gen_trapdoor(p, 67, 2, rng);
    for (auto c : key.a.coeffs()) {
      counts[static_cast<std::size_t>(c) * bins / 12289] += 1;
      ++total;
    }
  }
  double chi2 = 0;
  for (int b = 0; b < bins; ++b) {
    // exact share of [0, q) landing in bin b
    std::int64_t lo = (12289 * b + bins - 1) / bins, hi = (12289 * (b + 1) + bins - 1) / bins;
    const double ex = static_cast<double>(hi - lo) / 12289 * total;
    chi2 += (counts[b] - ex) * (counts[b] - ex) / ex;
  }
  CHECK(chi2 < oracle::chi2_critical(bins - 1));
}

TEST_CASE("worst_case_bound") {
  const auto p = default_params();
  CHECK(worst_case_bound(*p, 67, 2) == 32 + 67 * 4 * 16);
  CHECK(worst_case_bound(*p, 67, 2) == 4320);
  CHECK(worst_case_bound(*p, 67, 0) == 32);
  CHECK(worst_case_bound(*p, 67, 4) == 8608);
  CHECK(recovery_guaranteed(*p, 67, 2));
  CHECK_FALSE(recovery_guaranteed(*p, 67, 4));
  CHECK(12289 / 2 == 6144);

  // the bound dominates |g s + f e| computed in the clear
  SeededRng rng(testutil::seed_of(62), 0);
  const auto key = gen_trapdoor(p, 67, 2, rng);
  const auto s = sample_psi_k(rng, *p).to_ring(p), e = sample_psi_k(rng, *p).to_ring(p);
  CHECK(centered_lift(key.g * s + key.f * e).max_abs() <= 4320);
  CHECK(2 * 16 * centered_lift(key.f).l1_norm() == 4320);
}

TEST_CASE("scalar recovery example") {
  // n = 1 semantics at q = 17: a = 3, s = 5, e = 2 gives b = 0, t = 7
  const std::int64_t q = 17, a = 3, s = 5, e = 2;
  const std::int64_t b = oracle::mod(a * s + e, q);
  CHECK(b == 0);
  const std::int64_t t = s + e;
  const std::int64_t s_rec = oracle::mod((b - t) * scalar_inverse(a - 1, q), q);
  CHECK(scalar_inverse(2, 17) == 9);
  CHECK(s_rec == 5);
}

TEST_CASE("recover_t and recover_s") {
  const auto p = default_params();
  SeededRng rng(testutil::seed_of(63), 0);
  const auto key = gen_trapdoor(p, 67, 2, rng);

  const auto t0 = recover_t(RingElement::zero(p), key);
  CHECK(t0.t == CenteredPoly(std::vector<std::int64_t>(1024, 0)));

  const auto s = sample_psi_k(rng, *p), e = sample_psi_k(rng, *p);
  const auto b = key.a * s.to_ring(p) + e.to_ring(p);
  const auto tr = recover_t(b, key);
  for (std::size_t i = 0; i < 1024; ++i) {
    CHECK(tr.t[i] == s.poly()[i] + e.poly()[i]);
    CHECK(std::llabs(tr.t[i]) <= 32);
  }
  CHECK(tr.lifted_max_abs <= 4320);
  const auto s_rec = recover_s(b, tr.t, key.a);
  REQUIRE(s_rec.has_value());
  CHECK(*s_rec == s.to_ring(p));

  // zero noise: t = s
  const auto bz = key.a * s.to_ring(p);
  CHECK(*recover_s(bz, s.poly(), key.a) == s.to_ring(p));

  // a = 1 has no (a - 1)^-1
  CHECK_FALSE(recover_s(b, tr.t, RingElement::one(p)).has_value());

  // t always centered mod p
  const auto junk = recover_t(sample_uniform_ring(rng, p), key);
  CHECK(junk.t.max_abs() <= 33);
}

TEST_CASE("recover_full and attacker_key") {
  const auto p = default_params();
  SeededRng rng(testutil::seed_of(64), 0);
  const auto key = gen_trapdoor(p, 67, 2, rng);
  for (int i = 0; i < 10; ++i) {
    const auto t = trapdoored_session(key, rng);
    const auto out = recover_full(t, key);
    REQUIRE(out.has_value());
    CHECK(out->guaranteed);
    CHECK_FALSE(out->overflow);
    CHECK(out->matched);
    CHECK(t.msg1.b == key.a * out->s_rec + out->e_rec);
    CHECK(attacker_key(t, out->s_rec) == t.alice_key);
    CHECK(attacker_key(t, out->s_rec) == t.bob_key);
  }

  const auto tz = trapdoored_session(key, rng, true);
  const auto oz = recover_full(tz, key);
  REQUIRE(oz.has_value());
  CHECK(oz->matched);
  CHECK(attacker_key(tz, oz->s_rec) == tz.alice_key);

  // random guess: about half the bits differ
  const auto t = trapdoored_session(key, rng);
  const auto guess = sample_psi_k(rng, *p).to_ring(p);
  const auto hd = attacker_key(t, guess).bits.hamming_distance(t.alice_key.bits);
  CHECK(hd > 400);
  CHECK(hd < 624);
}

TEST_CASE("unrelated trapdoor against a uniform generator fails") {
  const auto p = default_params();
  SeededRng rng(testutil::seed_of(65), 0);
  const auto key = gen_trapdoor(p, 67, 2, rng);
  ProtocolConfig cfg;
  GeneratorSource gen = GeneratorSource::fresh();
  for (int i = 0; i < 5; ++i) {
    const auto t = run_session(cfg, gen, rng);
    // recovery uses the transcript's own a, so the mod-p trick has nothing to grip
    const auto out = recover_full(t, key);
    if (out) CHECK_FALSE(out->matched);
  }
}

TEST_CASE("trapdoor JSON export") {
  const auto p = default_params();
  SeededRng rng(testutil::seed_of(66), 0);
  const auto key = gen_trapdoor(p, 67, 2, rng);
  const auto j = key.to_json();
  CHECK(j["p"] == 67);
  CHECK(j["weight"] == 2);
  CHECK(j["f_hat"]["positions"].size() == 2);
  CHECK(j["g_hat"]["signs"].size() == 2);
  const auto back = TrapdoorKey::from_json(j, p);
  CHECK(back.a == key.a);
  CHECK(back.f == key.f);
  auto bad = j;
  bad["a_hex"] = std::string(bad["a_hex"].get<std::string>().size(), '0');
  CHECK_THROWS_AS(TrapdoorKey::from_json(bad, p), ParameterError);
}

TEST_CASE("pseudo-inverse witness") {
  const CyclicRingElement p_poly(5, {4, 1, 0});  // X + 4
  const CyclicRingElement P(5, {1, 3, 0});       // 3X + 1
  const CyclicRingElement s(5, {4, 1, 0});       // X + 4, s(1) = 0
  CHECK(eval_at_one(s) == 0);
  CHECK(cyclic_mul(cyclic_mul(P, p_poly), s) == s);

  const auto found = pseudo_inverse_find(p_poly);
  REQUIRE(found.has_value());
  CHECK(found->P == P);
  SeededRng rng(testutil::seed_of(67), 0);
  CHECK(pseudo_inverse_check(*found, 1000, rng));

  const auto unit = pseudo_inverse_find(CyclicRingElement::one(3, 5));
  REQUIRE(unit.has_value());
  CHECK(pseudo_inverse_check(*unit, 100, rng));
  CHECK(cyclic_mul(unit->P, CyclicRingElement(5, {1, 4, 0})) == CyclicRingElement(5, {1, 4, 0}));

  CHECK_FALSE(pseudo_inverse_find(CyclicRingElement(5, {1, 1, 1})).has_value());
  CHECK(cyclic_mul(CyclicRingElement(5, {1, 1, 1}), CyclicRingElement(5, {4, 1, 0})) == CyclicRingElement::zero(3, 5));

  // s = 0 always passes
  CHECK(cyclic_mul(cyclic_mul(P, p_poly), CyclicRingElement::zero(3, 5)) == CyclicRingElement::zero(3, 5));

  // every single-coefficient bump of P is caught
  for (std::size_t i = 0; i < 3; ++i)
    for (std::uint32_t bump = 1; bump < 5; ++bump) {
      auto c = std::vector<std::uint32_t>(P.coeffs().begin(), P.coeffs().end());
      c[i] = (c[i] + bump) % 5;
      PseudoInverseWitness w{CyclicRingElement(5, c), p_poly};
      CHECK_FALSE(pseudo_inverse_check(w, 1000, rng));
    }
}

TEST_CASE("pseudo-inverse on larger toy rings") {
  SeededRng rng(testutil::seed_of(68), 0);
  int found = 0;
  for (int i = 0; i < 30; ++i) {
    std::vector<std::uint32_t> c(7);
    for (auto& x : c) x = rng.uniform_below(97);
    const CyclicRingElement pp(97, c);
    const auto w = pseudo_inverse_find(pp);
    if (!w) continue;
    ++found;
    CHECK(pseudo_inverse_check(*w, 200, rng));
  }
  CHECK(found > 20);
}

TEST_CASE("Mol-Yung decomposition predicate") {
  const CyclicRingElement h(17, {3, 9, 0, 14, 2});
  const CyclicRingElement v(17, {1, 0, 1, 1, 0});
  const CyclicRingElement w(17, {0, 1, 1, 0, 0});
  const auto t = cyclic_add(cyclic_mul(h, v), w);
  CHECK(molyung_decomposition_check({h, t, v, w}));
  auto wf = std::vector<std::uint32_t>(w.coeffs().begin(), w.coeffs().end());
  wf[0] ^= 1;
  CHECK_FALSE(molyung_decomposition_check({h, t, v, CyclicRingElement(17, wf)}));
  CHECK(molyung_decomposition_check(
      {h, CyclicRingElement::zero(5, 17), CyclicRingElement::zero(5, 17), CyclicRingElement::zero(5, 17)}));
  CHECK_THROWS_AS(molyung_decomposition_check({h, t, CyclicRingElement(17, {2, 0, 0, 0, 0}), w}), ParameterError);
  CHECK_THROWS_AS(molyung_decomposition_check({h, t, v, CyclicRingElement(17, {0, 0, 16, 0, 0})}), ParameterError);
}
