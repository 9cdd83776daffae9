#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "nhlab/params.hpp"
#include "nhlab/reconcile.hpp"
#include "oracles.hpp"

using namespace nhlab;

namespace {
constexpr std::uint32_t q = 12289;
DoubledCoeff dc(std::int64_t v) { return {static_cast<std::uint32_t>(oracle::mod(v, 2 * q)), q}; }
RationalPoint4 rp(std::array<std::int64_t, 4> n, std::int64_t d) { return RationalPoint4(n, d); }
LatticePoint4 ip(std::array<std::int64_t, 4> x) { return LatticePoint4::integer(x); }
}  // namespace

TEST_CASE("dbl") {
  CHECK(dbl_deterministic(0, q) == dc(0));
  CHECK(dbl_deterministic(q - 1, q) == dc(2 * q - 2));
  SeededRng rng(testutil::seed_of(30), 0);
  std::array<double, 3> freq{};
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) {
    const std::uint32_t w = rng.uniform_below(q);
    const auto v = dbl(w, q, rng);
    const std::int64_t e = oracle::mod(2 * static_cast<std::int64_t>(w) - v.value + 1, 2 * q) - 1;
    REQUIRE(e >= -1);
    REQUIRE(e <= 1);
    freq[e + 1] += 1;
  }
  CHECK(std::fabs(freq[0] / reps - 0.25) < 0.02);
  CHECK(std::fabs(freq[1] / reps - 0.50) < 0.02);
  CHECK(std::fabs(freq[2] / reps - 0.25) < 0.02);
}

TEST_CASE("round_bit and cross_bit") {
  CHECK(round_bit(dc(0)) == 0);
  CHECK(round_bit(dc(q)) == 1);
  CHECK(round_bit(dc(2 * q - 1)) == 0);
  CHECK(round_bit(dc((q + 1) / 2)) == 1);
  CHECK(round_bit(dc((q + 1) / 2 - 1)) == 0);
  CHECK(cross_bit(dc(0)) == 0);
  CHECK(cross_bit(dc((q + 1) / 2)) == 1);
  CHECK(cross_bit(dc(q + (q + 1) / 2)) == 1);
  for (std::int64_t v = 0; v < 2 * q; ++v) {
    CHECK(round_bit(dc(v)) == (oracle::round_bit(v, q) == 1));
    CHECK(cross_bit(dc(v)) == (oracle::cross_bit(v, q) == 1));
  }
}

TEST_CASE("rec_bit agrees with the interval definition everywhere") {
  CHECK(rec_bit(dc(0), false) == 0);
  for (std::uint32_t qq : {17u, 97u, 257u, 12289u})
    for (std::int64_t w = 0; w < 2 * qq; ++w)
      for (int b = 0; b < 2; ++b)
        CHECK(rec_bit({static_cast<std::uint32_t>(w), qq}, b == 1) == (oracle::rec_bit(w, b, qq) == 1));
}

TEST_CASE("rec_bit tolerance pinned by exhaustive scan") {
  const std::int64_t t = oracle::max_tolerance(q);
  CHECK(t == q / 4 - 1);
  CHECK(t >= q / 4 - 2);
  // library side on the pinned window, both edges
  int failures = 0;
  for (std::int64_t v = 0; v < 2 * q; ++v) {
    const bool b = cross_bit(dc(v));
    const bool want = round_bit(dc(v));
    for (std::int64_t d : std::initializer_list<std::int64_t>{-t, -t + 1, -1, 0, 1, t - 1, t})
      if (rec_bit(dc(v + d), b) != want) ++failures;
  }
  CHECK(failures == 0);
  // one step further breaks somewhere
  bool broken = false;
  for (std::int64_t v = 0; v < 2 * q && !broken; ++v) {
    const bool b = cross_bit(dc(v));
    const bool want = round_bit(dc(v));
    broken = rec_bit(dc(v + t + 1), b) != want || rec_bit(dc(v - t - 1), b) != want;
  }
  CHECK(broken);
}

TEST_CASE("rec_bit antipodal flip away from boundaries") {
  SeededRng rng(testutil::seed_of(31), 0);
  int checked = 0;
  while (checked < 1000) {
    const std::int64_t v = rng.uniform_below(2 * q);
    // stay clear of the quarter-period boundaries
    const std::int64_t r = v % (q / 2);
    if (r < 200 || r > q / 2 - 200) continue;
    const bool b = cross_bit(dc(v));
    CHECK(rec_bit(dc(v + q), b) == !rec_bit(dc(v), b));
    ++checked;
  }
}

TEST_CASE("helprec_peikert / rec_peikert") {
  const auto p = default_params();
  SeededRng rng(testutil::seed_of(32), 0);
  const auto [h0, k0] = helprec_peikert(RingElement::zero(p), rng, DoublingMode::deterministic);
  CHECK(h0.bits == BitString(1024));
  CHECK(k0.bits == BitString(1024));
  CHECK(help_length(Backend::peikert, 1024) == 1024);
  CHECK(key_length(Backend::peikert, 1024) == 1024);

  const auto v = sample_uniform_ring(rng, p);
  const auto [h, k] = helprec_peikert(v, rng, DoublingMode::deterministic);
  CHECK(h.bits.size() == 1024);
  CHECK(rec_peikert(v, h) == k);
  const auto [hr, kr] = helprec_peikert(v, rng);
  CHECK(rec_peikert(v, hr) == kr);

  // |delta| <= floor(T/2) - 1 keeps every bit
  const std::int64_t half = (q / 4 - 1) / 2 - 1;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::int64_t> d(1024);
    for (auto& x : d) x = static_cast<std::int64_t>(rng.uniform_below(2 * half + 1)) - half;
    d[rep] = rep % 2 ? half : -half;
    const auto w = v + RingElement::from_signed(p, d);
    CHECK(rec_peikert(w, h) == k);
  }

  // pushing one coefficient by q/2 flips exactly that key bit
  for (std::size_t i : {0u, 5u, 1023u}) {
    std::vector<std::int64_t> d(1024, 0);
    d[i] = q / 2;
    const auto w = v + RingElement::from_signed(p, d);
    const auto kw = rec_peikert(w, h);
    CHECK(kw.bits.hamming_distance(k.bits) == 1);
    CHECK(kw.bits[i] != k.bits[i]);
  }

  HelpBits wrong = h;
  wrong.backend = Backend::d4;
  CHECK_THROWS_AS(rec_peikert(v, wrong), ParameterError);
  HelpBits short_help{Backend::peikert, BitString(10)};
  CHECK_THROWS_AS(rec_peikert(v, short_help), ParameterError);
}

TEST_CASE("d4_decode examples") {
  CHECK(d4_decode(rp({6, 6, 1, 1}, 10)) == ip({1, 1, 0, 0}));
  CHECK(d4_decode(rp({6, 1, 1, 1}, 10)) == ip({0, 0, 0, 0}));
  CHECK(d4_decode(rp({0, 0, 0, 0}, 1)) == ip({0, 0, 0, 0}));
  CHECK(d4_decode(rp({2, -2, 4, 0}, 1)) == ip({2, -2, 4, 0}));
  CHECK_THROWS_AS(RationalPoint4({1, 1, 1, 1}, 0), ParameterError);
  CHECK_THROWS_AS(LatticePoint4({1, 2, 1, 1}), ParameterError);
}

TEST_CASE("d4_decode equals brute force") {
  std::mt19937_64 gen(33);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::int64_t den = 1 + static_cast<std::int64_t>(gen() % 64);
    std::array<std::int64_t, 4> num{};
    for (auto& x : num) x = static_cast<std::int64_t>(gen() % (8 * den + 1)) - 4 * den;
    const auto y = rp(num, den);
    const auto got = d4_decode(y);
    const auto ref = oracle::brute_nearest(num, den, false);
    const bool ok = squared_distance_num(y, got) == ref.dist_num &&
                    (ref.minimizers.size() > 1 || ref.minimizers[0] == got.half_coords);
    if (!ok) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("dtilde4_decode equals brute force over both cosets, ties to Z^4") {
  std::mt19937_64 gen(34);
  for (int i = 0; i < 5000; ++i) {
    const std::int64_t den = 1 + static_cast<std::int64_t>(gen() % 16);
    std::array<std::int64_t, 4> num{};
    for (auto& x : num) x = static_cast<std::int64_t>(gen() % (4 * den + 1)) - 2 * den;
    const auto y = rp(num, den);
    const auto got = dtilde4_decode(y);
    // integer coset: any Z^4 point, brute force with the parity filter off
    oracle::Nearest zi;
    {
      std::int64_t dist = 0;
      std::array<std::int64_t, 4> h{};
      for (int k = 0; k < 4; ++k) {
        // nearest integer, halves up
        const std::int64_t r = oracle::floor_div(2 * num[k] + den, 2 * den);
        h[k] = 2 * r;
        const std::int64_t diff = 2 * num[k] - h[k] * den;
        dist += diff * diff;
      }
      zi.dist_num = dist;
    }
    const auto zh = oracle::brute_nearest(num, den, true);
    const std::int64_t best = std::min(zi.dist_num, zh.dist_num);
    CHECK(squared_distance_num(y, got) == best);
    CHECK(got.is_integer() == (zi.dist_num <= zh.dist_num));
  }
}

TEST_CASE("24-cell geometry") {
  const auto rv = voronoi_relevant_vectors();
  CHECK(rv.size() == 24);
  std::set<LatticePoint4> all(rv.begin(), rv.end());
  CHECK(all.size() == 24);
  for (const auto& v : rv) {
    CHECK(v.squared_norm_x4() == 8);
    LatticePoint4 neg = v;
    for (auto& h : neg.half_coords) h = -h;
    CHECK(all.count(neg) == 1);
    CHECK(voronoi_contains(rp({v.half_coords[0], v.half_coords[1], v.half_coords[2], v.half_coords[3]}, 4)) ==
          VoronoiClass::boundary);
  }
  CHECK(voronoi_contains(rp({0, 0, 0, 0}, 1)) == VoronoiClass::inside);
  CHECK(voronoi_contains(rp({1, 1, 0, 0}, 2)) == VoronoiClass::boundary);
  CHECK(voronoi_contains(rp({1, 1, 0, 0}, 1)) == VoronoiClass::outside);
  CHECK(voronoi_contains(rp({1, 1, 1, 1}, 2)) == VoronoiClass::boundary);
  CHECK(std::string(voronoi_class_name(VoronoiClass::inside)) == "inside");
}

TEST_CASE("voronoi classification matches the pairwise oracle and decoding") {
  std::mt19937_64 gen(35);
  for (int i = 0; i < 10000; ++i) {
    const std::int64_t den = 1 + static_cast<std::int64_t>(gen() % 64);
    std::array<std::int64_t, 4> num{};
    for (auto& x : num) x = static_cast<std::int64_t>(gen() % (2 * den + 1)) - den;
    const auto y = rp(num, den);
    const auto cls = voronoi_contains(y);
    const int want = oracle::voronoi_24cell(num, den);
    CHECK(static_cast<int>(cls) - 1 == want);
    const bool at_origin = d4_decode(y) == ip({0, 0, 0, 0});
    if (cls == VoronoiClass::inside) CHECK(at_origin);
    if (at_origin && cls != VoronoiClass::boundary) CHECK(cls == VoronoiClass::inside);
  }
}

TEST_CASE("d4_bob / d4_alice") {
  const auto [h0, b0] = d4_bob({0, 0, 0, 0}, q);
  CHECK(b0 == false);
  CHECK(h0 == D4Help{});
  const std::uint32_t c = (q + 1) / 2;
  CHECK(d4_bob({c, c, c, c}, q).second == true);

  SeededRng rng(testutil::seed_of(36), 0);
  for (int i = 0; i < 2000; ++i) {
    std::array<std::uint32_t, 4> g{};
    for (auto& x : g) x = rng.uniform_below(q);
    const auto [h, bit] = d4_bob(g, q);
    for (auto v : h.quarters) {
      CHECK(v >= -2);
      CHECK(v <= 1);
    }
    CHECK(d4_alice(g, h, q) == bit);
  }
}

TEST_CASE("d4 key bit survives small offsets (Monte Carlo)") {
  SeededRng rng(testutil::seed_of(37), 0);
  const std::int64_t lim = q / 8;  // |delta| < q/8
  int flips = 0;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) {
    std::array<std::uint32_t, 4> g{}, g2{};
    for (int k = 0; k < 4; ++k) {
      g[k] = rng.uniform_below(q);
      const std::int64_t d = static_cast<std::int64_t>(rng.uniform_below(2 * lim - 1)) - (lim - 1);
      g2[k] = static_cast<std::uint32_t>(oracle::mod(g[k] + d, q));
    }
    const auto [h, bit] = d4_bob(g, q);
    if (d4_alice(g2, h, q) != bit) ++flips;
  }
  MESSAGE("d4 flips with |delta| < q/8: " << flips << " / " << reps);
  CHECK(flips == 0);
}

TEST_CASE("d4 adversarial offset flips the bit") {
  // Bob at the origin group, Alice pushed half a period away in every coordinate
  const auto [h, bit] = d4_bob({0, 0, 0, 0}, q);
  const std::uint32_t c = (q + 1) / 2;
  CHECK(d4_alice({c, c, c, c}, h, q) != bit);
}

TEST_CASE("helprec_d4 / rec_d4") {
  const auto p = default_params();
  CHECK(help_length(Backend::d4, 1024) == 2048);
  CHECK(key_length(Backend::d4, 1024) == 256);
  SeededRng rng(testutil::seed_of(38), 0);
  const auto v = sample_uniform_ring(rng, p);
  const auto [h, k] = helprec_d4(v);
  CHECK(h.bits.size() == 2048);
  CHECK(k.bits.size() == 256);
  CHECK(rec_d4(v, h) == k);

  // group g is (g, g + n/4, g + n/2, g + 3n/4)
  std::array<std::uint32_t, 4> g7{v[7], v[7 + 256], v[7 + 512], v[7 + 768]};
  CHECK(d4_bob(g7, q).second == k.bits[7]);

  // small noise keeps the key
  std::vector<std::int64_t> d(1024);
  for (auto& x : d) x = static_cast<std::int64_t>(rng.uniform_below(1001)) - 500;
  CHECK(rec_d4(v + RingElement::from_signed(p, d), h) == k);

  // reconcile dispatch
  const auto [hb, kb] = reconcile_bob(Backend::d4, v, rng);
  CHECK(reconcile_alice(v, hb) == kb);
  CHECK_THROWS_AS(rec_d4(v, HelpBits{Backend::peikert, BitString(2048)}), ParameterError);
  CHECK(parse_backend("d4") == Backend::d4);
  CHECK(parse_backend("peikert") == Backend::peikert);
  CHECK_THROWS_AS(parse_backend("ding"), ParameterError);
}

TEST_CASE("d4 small-offset agreement is statistical, not worst case") {
  // a corner offset just inside q/8 that still flips the bit
  const std::int64_t lim = q / 8 - 1;
  const std::array<std::uint32_t, 4> g{5044, 1655, 1655, 1655};
  std::array<std::uint32_t, 4> g2{};
  const std::array<std::int64_t, 4> d{lim, -lim, -lim, -lim};
  for (int k = 0; k < 4; ++k) g2[k] = static_cast<std::uint32_t>(oracle::mod(g[k] + d[k], q));
  const auto [h, bit] = d4_bob(g, q);
  CHECK(d4_alice(g2, h, q) != bit);
}
