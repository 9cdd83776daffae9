// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Checks recompute everything they can through the
// oracles in oracles.hpp rather than trusting library aggregates.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "nhlab/backdoor.hpp"
#include "nhlab/harness.hpp"
#include "oracles.hpp"

using namespace nhlab;

namespace {

struct Result {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note << " [" << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::int64_t> i64(const RingElement& x) { return {x.coeffs().begin(), x.coeffs().end()}; }

std::vector<std::int64_t> i64(const NoisePoly& x) {
  return {x.poly().coeffs().begin(), x.poly().coeffs().end()};
}

std::vector<std::int64_t> add(std::vector<std::int64_t> a, const std::vector<std::int64_t>& b, std::int64_t q,
                              int sign = 1) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = oracle::mod(a[i] + sign * b[i], q);
  return a;
}

ScenarioConfig base(Scenario s, std::uint32_t trials, unsigned threads) {
  ScenarioConfig c;
  c.scenario = s;
  c.trials = trials;
  c.threads = threads;
  return c;
}

std::size_t count_records(const Report& r, const std::function<bool(const TrialRecord&)>& pred) {
  std::size_t n = 0;
  for (const auto& rec : r.records) n += pred(rec) ? 1 : 0;
  return n;
}

void c1(Result& r, unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const Report rep = run_honest_batch(base(Scenario::honest, 1000, threads));
  const double secs = seconds_since(t0);
  const std::size_t agreed = count_records(rep, [](const TrialRecord& t) { return t.agreed; });
  r.require(rep.records.size() == 1000, "1000 records");
  r.require(rep.aggregates["agreement"]["successes"] == agreed, "aggregate recomputes");
  r.require(agreed == 1000, "agreement " + std::to_string(agreed) + "/1000");
  r.require(secs < 60.0, "runtime");
  r.note << " agreement " << agreed << "/1000, " << secs << " s";
}

void c2(Result& r, unsigned threads) {
  const auto param = default_params();
  // bound from the triangle inequality on an actual key:
  // |g s + f e|_inf <= |g|_1 k + |f|_1 k
  SeededRng rng(default_seed(), 0xacce);
  const auto key = gen_trapdoor(param, 67, 2, rng);
  const std::int64_t k = param->k_noise();
  const std::int64_t l1f = centered_lift(key.f).l1_norm(), l1g = centered_lift(key.g).l1_norm();
  const std::int64_t bound = (l1f + l1g) * k;
  const std::int64_t half_q = param->q() / 2;
  r.require(bound == 4320, "bound " + std::to_string(bound));
  r.require(half_q == 6144, "q/2");
  r.require(bound < half_q, "bound < q/2");
  r.require(worst_case_bound(*param, 67, 2) == bound, "library bound");

  const Report rep = run_backdoor_batch(base(Scenario::backdoor, 1000, threads));
  const std::size_t matched = count_records(rep, [](const TrialRecord& t) { return t.matched && *t.matched; });
  const std::size_t keyeq =
      count_records(rep, [](const TrialRecord& t) { return t.attacker_key_equal && *t.attacker_key_equal; });
  r.require(rep.records.size() == 1000, "1000 records");
  r.require(matched == 1000, "recovery " + std::to_string(matched));
  r.require(keyeq == 1000, "attacker key " + std::to_string(keyeq));
  r.note << " bound " << bound << " < " << half_q << ", recovery " << matched << "/1000, attacker key " << keyeq
         << "/1000";
}

void c3(Result& r, unsigned threads) {
  const Report rep = run_uniform_control_batch(base(Scenario::uniform_control, 1000, threads));
  const std::size_t matched = count_records(rep, [](const TrialRecord& t) { return t.matched && *t.matched; });
  const std::size_t agreed = count_records(rep, [](const TrialRecord& t) { return t.agreed; });
  r.require(rep.records.size() == 1000, "1000 records");
  r.require(matched == 0, "recovery " + std::to_string(matched));
  r.require(agreed == 1000, "agreement " + std::to_string(agreed));
  r.note << " recovery " << matched << "/1000, agreement " << agreed << "/1000";
}

void c4(Result& r) {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::int64_t q = 12289;
  const std::int64_t t = oracle::max_tolerance(q);
  r.require(t >= q / 4 - 2, "T >= floor(q/4) - 2");
  auto d = [](std::int64_t v) { return DoubledCoeff{static_cast<std::uint32_t>(oracle::mod(v, 2 * q)), q}; };
  std::size_t disagree = 0;
  for (std::int64_t v = 0; v < 2 * q; ++v) {
    if (round_bit(d(v)) != (oracle::round_bit(v, q) == 1)) ++disagree;
    if (cross_bit(d(v)) != (oracle::cross_bit(v, q) == 1)) ++disagree;
    for (int b = 0; b < 2; ++b)
      if (rec_bit(d(v), b == 1) != (oracle::rec_bit(v, b, q) == 1)) ++disagree;
  }
  r.require(disagree == 0, "library vs interval definitions");
  // boundary offsets on the library side
  std::size_t edge = 0;
  for (std::int64_t v = 0; v < 2 * q; ++v)
    for (std::int64_t off : {-t, t})
      if (rec_bit(d(v + off), cross_bit(d(v))) != round_bit(d(v))) ++edge;
  r.require(edge == 0, "edge offsets");
  SeededRng rng(default_seed(), 0xacc4);
  std::size_t bad = 0;
  for (int i = 0; i < 1000000; ++i) {
    const std::int64_t v = rng.uniform_below(2 * q);
    const std::int64_t delta = static_cast<std::int64_t>(rng.uniform_below(2 * t + 1)) - t;
    if (rec_bit(d(v + delta), cross_bit(d(v))) != round_bit(d(v))) ++bad;
  }
  r.require(bad == 0, "random samples");
  const double secs = seconds_since(t0);
  r.require(secs < 30.0, "runtime");
  r.note << " T = " << t << " (floor(q/4) = " << q / 4 << "), 10^6 samples, " << bad << " violations, " << secs
         << " s";
}

void c5(Result& r) {
  SeededRng rng(default_seed(), 0xacc5);
  std::size_t mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::int64_t den = 1 + rng.uniform_below(64);
    std::array<std::int64_t, 4> num{};
    for (auto& x : num) x = static_cast<std::int64_t>(rng.uniform_below(8 * den + 1)) - 4 * den;
    const RationalPoint4 y(num, den);
    const auto got = d4_decode(y);
    const auto ref = oracle::brute_nearest(num, den, false);
    const bool unique = ref.minimizers.size() == 1;
    if (squared_distance_num(y, got) != ref.dist_num || (unique && ref.minimizers[0] != got.half_coords))
      ++mismatches;
    const int cls = static_cast<int>(voronoi_contains(y)) - 1;
    if (cls != oracle::voronoi_24cell(num, den)) ++mismatches;
  }
  r.require(mismatches == 0, "decode mismatches " + std::to_string(mismatches));
  const auto rv = voronoi_relevant_vectors();
  r.require(rv.size() == 24, "24 relevant vectors");
  bool norms = true, boundary = true;
  for (const auto& v : rv) {
    const auto& h = v.half_coords;
    norms = norms && (h[0] * h[0] + h[1] * h[1] + h[2] * h[2] + h[3] * h[3]) == 8;  // 4 |v|^2
    const std::array<std::int64_t, 4> half{h[0], h[1], h[2], h[3]};
    boundary = boundary && voronoi_contains(RationalPoint4(half, 4)) == VoronoiClass::boundary &&
               oracle::voronoi_24cell(half, 4) == 0;
  }
  r.require(norms, "squared norm 2");
  r.require(boundary, "half vectors on boundary");
  r.note << " 10^4 points, " << mismatches << " mismatches, 24 relevant vectors";
}

void c6(Result& r) {
  const auto param = default_params();
  const std::int64_t q = param->q();
  ProtocolConfig cfg;
  GeneratorSource gen = GeneratorSource::fresh();
  std::size_t identity_fail = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    SeededRng rng(default_seed(), 0xacc6000 + i);
    const Transcript t = run_session(cfg, gen, rng);
    const auto s = i64(t.alice.s), e = i64(t.alice.e);
    const auto s1 = i64(t.bob.s1), e1 = i64(t.bob.e1), e2 = i64(t.bob.e2);
    const auto lhs = add(i64(t.bob.v), oracle::negacyclic_mul(i64(t.bob.u), s, q), q, -1);
    auto rhs = add(oracle::negacyclic_mul(e, s1, q), e2, q);
    rhs = add(rhs, oracle::negacyclic_mul(e1, s, q), q, -1);
    if (lhs != rhs) ++identity_fail;
    std::int64_t gap = 0;
    for (auto c : lhs) gap = std::max(gap, std::min(c, q - c));
    if (gap != t.noise_gap) ++identity_fail;
  }
  r.require(identity_fail == 0, "noise identity");

  std::size_t ntt_fail = 0;
  SeededRng rng(default_seed(), 0xacc6);
  for (int i = 0; i < 100; ++i) {
    const auto x = sample_uniform_ring(rng, param), y = sample_uniform_ring(rng, param);
    const auto z = ntt_mul(x, y);
    if (!(z == ring_mul(x, y)) || i64(z) != oracle::negacyclic_mul(i64(x), i64(y), q)) ++ntt_fail;
  }
  r.require(ntt_fail == 0, "ntt");

  // one-coefficient ring at q = 17: a = 3, s = 5, e = 2
  const auto scalar = ParamSet::make(250, "scalar17", 1, 17, 1, 1.0, 5);
  const RingElement a(scalar, {3}), s(scalar, {5}), e(scalar, {2});
  const RingElement b = a * s + e;
  const CenteredPoly tt({5 + 2});
  const auto s_rec = recover_s(b, tt, a);
  r.require(b[0] == 0, "b = 0");
  r.require(s_rec && (*s_rec)[0] == 5, "s_rec = 5");
  r.require(oracle::mod((0 - 7) * oracle::brute_inverse(2, 17), 17) == 5, "hand computation");
  r.note << " 100 sessions identity ok=" << (identity_fail == 0) << ", 100 ntt pairs ok=" << (ntt_fail == 0)
         << ", scalar s_rec = " << (s_rec ? static_cast<int>((*s_rec)[0]) : -1);
}

bool pseudo_inverse_holds(const std::vector<std::int64_t>& P, const std::vector<std::int64_t>& p, std::int64_t q,
                          int trials, SeededRng& rng) {
  const std::size_t n = P.size();
  // also check the spanning set X^i - 1
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<std::int64_t> s(n, 0);
    s[0] = q - 1;
    s[i] = 1;
    if (oracle::cyclic_mul(oracle::cyclic_mul(P, p, q), s, q) != s) return false;
  }
  for (int t = 0; t < trials; ++t) {
    std::vector<std::int64_t> s(n);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      s[i] = rng.uniform_below(static_cast<std::uint32_t>(q));
      sum += s[i];
    }
    s[n - 1] = oracle::mod(-sum, q);
    if (oracle::cyclic_mul(oracle::cyclic_mul(P, p, q), s, q) != s) return false;
  }
  return true;
}

void c7(Result& r) {
  SeededRng rng(default_seed(), 0xacc7);
  const CyclicRingElement p_poly(5, {4, 1, 0});
  const auto w = pseudo_inverse_find(p_poly);
  r.require(w.has_value(), "witness found");
  if (!w) return;
  r.require(w->P == CyclicRingElement(5, {1, 3, 0}), "P = 3X + 1");
  const std::vector<std::int64_t> P{1, 3, 0}, p{4, 1, 0};
  r.require(pseudo_inverse_holds(P, p, 5, 1000, rng), "oracle 10^3 checks");
  r.require(pseudo_inverse_check(*w, 1000, rng), "library 10^3 checks");
  const std::vector<std::int64_t> s{4, 1, 0};
  r.require(oracle::cyclic_mul(oracle::cyclic_mul(P, p, 5), s, 5) == s, "s = X + 4");

  const auto unit = pseudo_inverse_find(CyclicRingElement::one(3, 5));
  r.require(unit && unit->P == CyclicRingElement::one(3, 5), "p = 1 gives P = 1");
  r.require(!pseudo_inverse_find(CyclicRingElement(5, {1, 1, 1})).has_value(), "1 + X + X^2 not found");

  int detected = 0, total = 0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::int64_t bump = 1; bump < 5; ++bump) {
      auto m = P;
      m[i] = (m[i] + bump) % 5;
      ++total;
      std::vector<std::uint32_t> mu(m.begin(), m.end());
      const bool lib = pseudo_inverse_check({CyclicRingElement(5, mu), p_poly}, 1000, rng);
      const bool ora = pseudo_inverse_holds(m, p, 5, 1000, rng);
      if (!lib && !ora) ++detected;
    }
  r.require(detected == total, "mutations");
  r.note << " P = 3X + 1 verified, " << detected << "/" << total << " mutations detected";
}

void c8(Result& r, unsigned threads) {
  auto cc = base(Scenario::cached_a, 20, threads);
  cc.ttl = 5;
  const Report rc = run_cached_a(cc);
  bool windows = rc.records.size() == 20;
  std::size_t within = 0, after = 0;
  for (const auto& t : rc.records) {
    const bool m = t.matched && *t.matched;
    windows = windows && t.window && *t.window == t.index / 5;
    if (t.index < 5)
      within += m;
    else
      after += m;
  }
  r.require(windows, "window boundaries");
  r.require(within == 5, "within ttl " + std::to_string(within));
  r.require(after == 0, "after rotation " + std::to_string(after));

  const Report rm = run_mitm(base(Scenario::mitm, 100, threads));
  std::size_t both = 0, differ = 0;
  for (const auto& t : rm.records) {
    both += (t.oscar_knows_alice_key && *t.oscar_knows_alice_key && t.oscar_knows_bob_key && *t.oscar_knows_bob_key);
    differ += t.alice_bob_keys_differ && *t.alice_bob_keys_differ;
  }
  r.require(both == 100, "oscar knows both keys " + std::to_string(both));
  r.require(differ == 100, "alice and bob differ");
  r.note << " cached: " << within << "/5 in window, " << after << "/15 after rotation; mitm: " << both << "/100";
}

void c9(Result& r) {
  ScenarioConfig c;
  c.scenario = Scenario::verify_claims;
  c.threads = 1;
  const std::string a = verify_claims(c).to_json(false).dump();
  c.threads = 4;
  const std::string b = verify_claims(c).to_json(false).dump();
  r.require(a == b, "verify-claims reports differ");
  r.require(a.find("wall_clock") == std::string::npos, "wall clock excluded");
  r.note << " two verify-claims runs (1 and 4 threads), " << a.size() << " bytes, identical=" << (a == b);
}

}  // namespace

int main(int argc, char** argv) {
  unsigned threads = 4;
  if (argc > 1) threads = static_cast<unsigned>(std::stoul(argv[1]));
  const std::vector<std::pair<std::string, std::function<void(Result&)>>> criteria = {
      {"C1 honest agreement", [&](Result& r) { c1(r, threads); }},
      {"C2 guaranteed backdoor recovery", [&](Result& r) { c2(r, threads); }},
      {"C3 uniform control", [&](Result& r) { c3(r, threads); }},
      {"C4 reconciliation tolerance scan", c4},
      {"C5 D4 decoding oracle equivalence", c5},
      {"C6 algebraic identities", c6},
      {"C7 pseudo-inverse", c7},
      {"C8 cached and mitm scenarios", [&](Result& r) { c8(r, threads); }},
      {"C9 determinism", c9},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Result r;
    try {
      fn(r);
    } catch (const std::exception& e) {
      r.ok = false;
      r.note << " exception: " << e.what();
    }
    std::cout << (r.ok ? "PASS " : "FAIL ") << name << " -" << r.note.str() << std::endl;
    failed += r.ok ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
