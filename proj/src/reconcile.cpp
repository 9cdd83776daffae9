#include "nhlab/reconcile.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

namespace nhlab {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// Round-half-up of num/den.
std::int64_t round_half_up(std::int64_t num, std::int64_t den) {
  return floor_div(2 * num + den, 2 * den);
}

bool in_interval_mod(std::int64_t w, std::int64_t lo, std::int64_t hi, std::int64_t m) {
  return mod_pos(w - lo, m) <= hi - lo;
}

}  // namespace

const char* backend_name(Backend b) { return b == Backend::peikert ? "peikert" : "d4"; }

Backend parse_backend(const std::string& name) {
  if (name == "peikert") return Backend::peikert;
  if (name == "d4") return Backend::d4;
  throw ParameterError("unknown backend '" + name + "' (expected peikert or d4)");
}

std::size_t help_length(Backend backend, std::size_t n) {
  return backend == Backend::peikert ? n : 2 * n;
}

std::size_t key_length(Backend backend, std::size_t n) {
  return backend == Backend::peikert ? n : n / 4;
}

DoubledCoeff dbl(std::uint32_t w, std::uint32_t q, SeededRng& rng) {
  const int e = static_cast<int>(rng.next_bit()) - static_cast<int>(rng.next_bit());
  const std::int64_t m = 2 * static_cast<std::int64_t>(q);
  return {static_cast<std::uint32_t>(mod_pos(2 * static_cast<std::int64_t>(w % q) - e, m)), q};
}

DoubledCoeff dbl_deterministic(std::uint32_t w, std::uint32_t q) { return {2 * (w % q), q}; }

bool round_bit(DoubledCoeff v) {
  const std::uint64_t q = v.q;
  return ((2 * std::uint64_t{v.value} + q) / (2 * q)) % 2 == 1;
}

bool cross_bit(DoubledCoeff v) { return ((2 * std::uint64_t{v.value}) / v.q) % 2 == 1; }

bool rec_bit(DoubledCoeff w, bool b) {
  const std::int64_t q = w.q;
  const std::int64_t e_lo = -(q / 4), e_hi = q / 4 - 1;  // E as an integer interval
  std::int64_t i_lo, i_hi;
  if (!b) {
    i_lo = 0;
    i_hi = (q + 1) / 2 - 1;
  } else {
    i_lo = -(q / 2);
    i_hi = -1;
  }
  return !in_interval_mod(w.value, i_lo + e_lo, i_hi + e_hi, 2 * q);
}

std::pair<HelpBits, KeyBits> helprec_peikert(const RingElement& v, SeededRng& rng,
                                             DoublingMode mode) {
  const auto q = v.param().q();
  HelpBits help{Backend::peikert, BitString(v.size())};
  KeyBits key{BitString(v.size())};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const DoubledCoeff d =
        mode == DoublingMode::randomized ? dbl(v[i], q, rng) : dbl_deterministic(v[i], q);
    help.bits.set(i, cross_bit(d));
    key.bits.set(i, round_bit(d));
  }
  return {std::move(help), std::move(key)};
}

KeyBits rec_peikert(const RingElement& w, const HelpBits& help) {
  if (help.backend != Backend::peikert || help.bits.size() != w.size())
    throw ParameterError("rec_peikert: help bits do not match the peikert backend");
  const auto q = w.param().q();
  KeyBits key{BitString(w.size())};
  for (std::size_t i = 0; i < w.size(); ++i)
    key.bits.set(i, rec_bit(dbl_deterministic(w[i], q), help.bits[i]));
  return key;
}

// --- D4 ----------------------------------------------------------------------

LatticePoint4::LatticePoint4(std::array<std::int64_t, 4> half) : half_coords(half) {
  const auto parity = mod_pos(half[0], 2);
  for (auto h : half)
    if (mod_pos(h, 2) != parity) throw ParameterError("LatticePoint4: mixed coordinate parities");
}

LatticePoint4 LatticePoint4::integer(std::array<std::int64_t, 4> x) {
  for (auto& c : x) c *= 2;
  return LatticePoint4(x);
}

std::int64_t LatticePoint4::squared_norm_x4() const {
  std::int64_t s = 0;
  for (auto h : half_coords) s += h * h;
  return s;
}

RationalPoint4::RationalPoint4(std::array<std::int64_t, 4> numerators, std::int64_t denominator)
    : num(numerators), den(denominator) {
  if (den <= 0) throw ParameterError("RationalPoint4: denominator must be positive");
}

std::int64_t squared_distance_num(const RationalPoint4& y, const LatticePoint4& c) {
  std::int64_t s = 0;
  for (int i = 0; i < 4; ++i) {
    const std::int64_t d = 2 * y.num[i] - c.half_coords[i] * y.den;
    s += d * d;
  }
  return s;
}

namespace {

std::array<std::int64_t, 4> round_to_z4(const RationalPoint4& y) {
  std::array<std::int64_t, 4> r{};
  for (int i = 0; i < 4; ++i) r[i] = round_half_up(y.num[i], y.den);
  return r;
}

}  // namespace

LatticePoint4 d4_decode(const RationalPoint4& y) {
  auto r = round_to_z4(y);
  const std::int64_t sum = r[0] + r[1] + r[2] + r[3];
  if (mod_pos(sum, 2) != 0) {
    int worst = 0;
    std::int64_t worst_err = -1;
    for (int i = 0; i < 4; ++i) {
      const std::int64_t err = std::llabs(y.num[i] - r[i] * y.den);
      if (err > worst_err) {
        worst_err = err;
        worst = i;
      }
    }
    r[worst] += (y.num[worst] >= r[worst] * y.den) ? 1 : -1;
  }
  return LatticePoint4::integer(r);
}

LatticePoint4 dtilde4_decode(const RationalPoint4& y) {
  const LatticePoint4 z = LatticePoint4::integer(round_to_z4(y));
  std::array<std::int64_t, 4> h{};
  for (int i = 0; i < 4; ++i) h[i] = 2 * floor_div(y.num[i], y.den) + 1;
  const LatticePoint4 half(h);
  return squared_distance_num(y, half) < squared_distance_num(y, z) ? half : z;
}

std::vector<LatticePoint4> voronoi_relevant_vectors() {
  std::vector<LatticePoint4> out;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int si : {1, -1})
        for (int sj : {1, -1}) {
          std::array<std::int64_t, 4> x{};
          x[i] = si;
          x[j] = sj;
          out.push_back(LatticePoint4::integer(x));
        }
  return out;
}

const char* voronoi_class_name(VoronoiClass c) {
  switch (c) {
    case VoronoiClass::inside: return "inside";
    case VoronoiClass::boundary: return "boundary";
    case VoronoiClass::outside: return "outside";
  }
  return "?";
}

VoronoiClass voronoi_contains(const RationalPoint4& y) {
  // <y, v> < 1 for every relevant v, compared as sum(num * v) against den.
  static const auto relevant = voronoi_relevant_vectors();
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  for (const auto& v : relevant) {
    std::int64_t dot = 0;
    for (int i = 0; i < 4; ++i) dot += y.num[i] * (v.half_coords[i] / 2);
    best = std::max(best, dot);
  }
  if (best < y.den) return VoronoiClass::inside;
  if (best == y.den) return VoronoiClass::boundary;
  return VoronoiClass::outside;
}

std::pair<D4Help, bool> d4_bob(const std::array<std::uint32_t, 4>& group, std::uint32_t q) {
  RationalPoint4 y({group[0], group[1], group[2], group[3]}, q);
  const LatticePoint4 c = dtilde4_decode(y);
  D4Help help;
  for (int i = 0; i < 4; ++i) {
    // Offset y - c in units of 1/(2q); quarter steps are q/2 of those units.
    const std::int64_t offset = 2 * y.num[i] - c.half_coords[i] * static_cast<std::int64_t>(q);
    const std::int64_t quarters = floor_div(4 * offset + q, 2 * static_cast<std::int64_t>(q));
    help.quarters[i] = static_cast<std::int8_t>(std::clamp<std::int64_t>(quarters, -2, 1));
  }
  return {help, !c.is_integer()};
}

bool d4_alice(const std::array<std::uint32_t, 4>& group, const D4Help& help, std::uint32_t q) {
  const std::int64_t qq = q;
  std::array<std::int64_t, 4> num{};
  for (int i = 0; i < 4; ++i) num[i] = 4 * static_cast<std::int64_t>(group[i]) - help.quarters[i] * qq;
  return !dtilde4_decode(RationalPoint4(num, 4 * qq)).is_integer();
}

namespace {

std::array<std::uint32_t, 4> group_of(const RingElement& x, std::size_t g) {
  const std::size_t stride = x.size() / 4;
  return {x[g], x[g + stride], x[g + 2 * stride], x[g + 3 * stride]};
}

void require_d4(const RingElement& x) {
  if (x.size() % 4 != 0) throw ParameterError("d4 backend requires n divisible by 4");
}

}  // namespace

std::pair<HelpBits, KeyBits> helprec_d4(const RingElement& v) {
  require_d4(v);
  const std::size_t groups = v.size() / 4;
  HelpBits help{Backend::d4, BitString(2 * v.size())};
  KeyBits key{BitString(groups)};
  for (std::size_t g = 0; g < groups; ++g) {
    const auto [h, bit] = d4_bob(group_of(v, g), v.param().q());
    for (int j = 0; j < 4; ++j) {
      const unsigned code = static_cast<unsigned>(h.quarters[j]) & 3u;
      help.bits.set(8 * g + 2 * j, code & 1u);
      help.bits.set(8 * g + 2 * j + 1, (code >> 1) & 1u);
    }
    key.bits.set(g, bit);
  }
  return {std::move(help), std::move(key)};
}

KeyBits rec_d4(const RingElement& w, const HelpBits& help) {
  require_d4(w);
  if (help.backend != Backend::d4 || help.bits.size() != 2 * w.size())
    throw ParameterError("rec_d4: help bits do not match the d4 backend");
  const std::size_t groups = w.size() / 4;
  KeyBits key{BitString(groups)};
  for (std::size_t g = 0; g < groups; ++g) {
    D4Help h;
    for (int j = 0; j < 4; ++j) {
      int code = help.bits[8 * g + 2 * j] | (help.bits[8 * g + 2 * j + 1] << 1);
      if (code >= 2) code -= 4;
      h.quarters[j] = static_cast<std::int8_t>(code);
    }
    key.bits.set(g, d4_alice(group_of(w, g), h, w.param().q()));
  }
  return key;
}

std::pair<HelpBits, KeyBits> reconcile_bob(Backend backend, const RingElement& v, SeededRng& rng,
                                           DoublingMode mode) {
  return backend == Backend::peikert ? helprec_peikert(v, rng, mode) : helprec_d4(v);
}

KeyBits reconcile_alice(const RingElement& w, const HelpBits& help) {
  return help.backend == Backend::peikert ? rec_peikert(w, help) : rec_d4(w, help);
}

}  // namespace nhlab
