#pragma once

// Key-bit reconciliation. Two backends:
//   peikert - one key bit per coefficient, one cross-rounding help bit each,
//             computed on the doubled value in Z_2q.
//   d4      - one key bit per group of four coefficients, decoded against
//             Z^4 u (Z^4 + 1/2); eight help bits per group.

#include <array>
#include <cstdint>
#include <utility>

#include "nhlab/bits.hpp"
#include "nhlab/ring.hpp"
#include "nhlab/sampling.hpp"

namespace nhlab {

enum class Backend : std::uint8_t { peikert = 0, d4 = 1 };

const char* backend_name(Backend b);
Backend parse_backend(const std::string& name);

/// Whether the doubling step draws its rounding noise or pins it to zero.
enum class DoublingMode : std::uint8_t { randomized, deterministic };

/// Value in Z_2q.
struct DoubledCoeff {
  std::uint32_t value;
  std::uint32_t q;
  friend bool operator==(const DoubledCoeff&, const DoubledCoeff&) = default;
};

struct HelpBits {
  Backend backend = Backend::peikert;
  BitString bits;
  friend bool operator==(const HelpBits&, const HelpBits&) = default;
};

struct KeyBits {
  BitString bits;
  std::string hex() const { return bits.hex(); }
  friend bool operator==(const KeyBits&, const KeyBits&) = default;
};

std::size_t help_length(Backend backend, std::size_t n);
std::size_t key_length(Backend backend, std::size_t n);

// --- Peikert-style -----------------------------------------------------------

/// 2w - e mod 2q with e in {-1, 0, 1} drawn with probabilities 1/4, 1/2, 1/4.
DoubledCoeff dbl(std::uint32_t w, std::uint32_t q, SeededRng& rng);
/// 2w mod 2q.
DoubledCoeff dbl_deterministic(std::uint32_t w, std::uint32_t q);

/// floor(v/q + 1/2) mod 2 on Z_2q: 1 iff v in [ceil(q/2), ceil(3q/2)).
bool round_bit(DoubledCoeff v);
/// floor(2v/q) mod 2.
bool cross_bit(DoubledCoeff v);
/// 0 iff w lies in I_b + E (mod 2q) with I_0 = {0..ceil(q/2)-1},
/// I_1 = {-floor(q/2)..-1}, E = [-floor(q/4), floor(q/4)).
bool rec_bit(DoubledCoeff w, bool b);

std::pair<HelpBits, KeyBits> helprec_peikert(const RingElement& v, SeededRng& rng,
                                             DoublingMode mode = DoublingMode::randomized);
KeyBits rec_peikert(const RingElement& w, const HelpBits& help);

// --- D4 geometry -------------------------------------------------------------

/// The point half_coords / 2. All parities must agree.
struct LatticePoint4 {
  std::array<std::int64_t, 4> half_coords{};

  LatticePoint4() = default;
  explicit LatticePoint4(std::array<std::int64_t, 4> half);
  static LatticePoint4 integer(std::array<std::int64_t, 4> x);

  bool is_integer() const { return half_coords[0] % 2 == 0; }
  std::int64_t squared_norm_x4() const;  // 4 * |x|^2
  friend bool operator==(const LatticePoint4&, const LatticePoint4&) = default;
  friend auto operator<=>(const LatticePoint4&, const LatticePoint4&) = default;
};

/// numerators / denominator, denominator > 0.
struct RationalPoint4 {
  std::array<std::int64_t, 4> num{};
  std::int64_t den = 1;

  RationalPoint4() = default;
  RationalPoint4(std::array<std::int64_t, 4> numerators, std::int64_t denominator);
};

/// Exact squared distance between y and a lattice point, as a fraction with
/// denominator 4 den^2 (numerator returned).
std::int64_t squared_distance_num(const RationalPoint4& y, const LatticePoint4& c);

/// Nearest point of D4 = {x in Z^4 : sum x even}. Coordinates round to the
/// nearest integer (halves round up); on odd parity the coordinate with the
/// largest rounding error moves one step toward y (ties: lowest index).
LatticePoint4 d4_decode(const RationalPoint4& y);

/// Nearest point of Z^4 u (Z^4 + (1/2,1/2,1/2,1/2)); ties prefer Z^4.
LatticePoint4 dtilde4_decode(const RationalPoint4& y);

/// The 24 minimal vectors of D4: permutations of (+-1, +-1, 0, 0).
std::vector<LatticePoint4> voronoi_relevant_vectors();

enum class VoronoiClass { inside, boundary, outside };
const char* voronoi_class_name(VoronoiClass c);
/// Position of y relative to the Voronoi cell of the origin in D4 (24-cell).
VoronoiClass voronoi_contains(const RationalPoint4& y);

struct D4Help {
  std::array<std::int8_t, 4> quarters{};  // each in {-2, -1, 0, 1}
  friend bool operator==(const D4Help&, const D4Help&) = default;
};

/// Bob's side for one group: coset bit of the nearest D~4 point to group/q
/// and the offset quantized to quarter steps.
std::pair<D4Help, bool> d4_bob(const std::array<std::uint32_t, 4>& group, std::uint32_t q);
bool d4_alice(const std::array<std::uint32_t, 4>& group, const D4Help& help, std::uint32_t q);

/// Group g holds coefficients (g, g + n/4, g + n/2, g + 3n/4).
std::pair<HelpBits, KeyBits> helprec_d4(const RingElement& v);
KeyBits rec_d4(const RingElement& w, const HelpBits& help);

// --- backend dispatch --------------------------------------------------------

std::pair<HelpBits, KeyBits> reconcile_bob(Backend backend, const RingElement& v, SeededRng& rng,
                                           DoublingMode mode = DoublingMode::randomized);
KeyBits reconcile_alice(const RingElement& w, const HelpBits& help);

}  // namespace nhlab
