#include "nhlab/sampling.hpp"

#include <sodium.h>

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nhlab {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Seed parse_seed_hex(std::string_view hex) {
  if (hex.size() != 64) throw ParameterError("seed must be exactly 64 hex characters");
  Seed s{};
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw ParameterError("seed contains a non-hex character");
    s[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return s;
}

std::string seed_to_hex(const Seed& seed) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : seed) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

SeededRng::SeededRng(const Seed& seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index) {
  static const bool sodium_ready = [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
    return true;
  }();
  (void)sodium_ready;
}

void SeededRng::refill() {
  std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
  for (std::size_t i = 0; i < nonce.size(); ++i)
    nonce[i] = static_cast<std::uint8_t>(stream_index_ >> (8 * i));
  static const std::array<std::uint8_t, 64> kZeros{};
  crypto_stream_chacha20_xor_ic(buffer_.data(), kZeros.data(), buffer_.size(), nonce.data(),
                                block_, seed_.data());
  ++block_;
  pos_ = 0;
}

std::uint8_t SeededRng::next_byte() {
  if (pos_ == buffer_.size()) refill();
  return buffer_[pos_++];
}

std::uint16_t SeededRng::next_u16() {
  const std::uint16_t lo = next_byte();
  return static_cast<std::uint16_t>(lo | next_byte() << 8);
}

std::uint32_t SeededRng::next_u32() {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{next_byte()} << (8 * i);
  return v;
}

std::uint64_t SeededRng::next_u64() {
  const std::uint64_t lo = next_u32();
  return lo | std::uint64_t{next_u32()} << 32;
}

bool SeededRng::next_bit() {
  if (bits_left_ == 0) {
    bit_cache_ = next_byte();
    bits_left_ = 8;
  }
  const bool b = bit_cache_ & 1;
  bit_cache_ >>= 1;
  --bits_left_;
  return b;
}

std::uint32_t SeededRng::uniform_below(std::uint32_t bound) {
  if (bound == 0) throw ParameterError("uniform_below: bound must be positive");
  if (bound == 1) return 0;
  const unsigned width = std::bit_width(bound - 1);
  if (width <= 16) {
    const std::uint32_t mask = (1u << width) - 1;
    for (;;) {
      const std::uint32_t v = next_u16() & mask;
      if (v < bound) return v;
    }
  }
  const std::uint32_t mask = width == 32 ? 0xffffffffu : (1u << width) - 1;
  for (;;) {
    const std::uint32_t v = next_u32() & mask;
    if (v < bound) return v;
  }
}

Seed SeededRng::next_seed() {
  Seed s;
  for (auto& b : s) b = next_byte();
  return s;
}

NoisePoly::NoisePoly(CenteredPoly poly, std::uint32_t bound) : poly_(std::move(poly)), bound_(bound) {
  if (poly_.max_abs() > static_cast<std::int64_t>(bound_))
    throw ParameterError("NoisePoly: coefficient exceeds the noise bound");
}

RingElement sample_uniform_ring(SeededRng& rng, ParamPtr param) {
  std::vector<std::uint32_t> c(param->n());
  for (auto& x : c) x = rng.uniform_below(param->q());
  return RingElement(std::move(param), std::move(c));
}

NoisePoly sample_psi_k(SeededRng& rng, std::size_t n, std::uint32_t k) {
  std::vector<std::int64_t> c(n);
  for (auto& x : c) {
    std::int64_t acc = 0;
    for (std::uint32_t i = 0; i < k; ++i) {
      acc += rng.next_bit();
      acc -= rng.next_bit();
    }
    x = acc;
  }
  return NoisePoly(CenteredPoly(std::move(c)), k);
}

NoisePoly sample_psi_k(SeededRng& rng, const ParamSet& param) {
  return sample_psi_k(rng, param.n(), param.k_noise());
}

CenteredPoly sample_sparse_ternary(SeededRng& rng, std::size_t n, std::size_t weight) {
  if (weight > n) throw ParameterError("sample_sparse_ternary: weight exceeds dimension");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `weight` slots are the chosen positions.
  for (std::size_t i = 0; i < weight; ++i) {
    const std::size_t j = i + rng.uniform_below(static_cast<std::uint32_t>(n - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::int64_t> c(n, 0);
  for (std::size_t i = 0; i < weight; ++i) c[idx[i]] = rng.next_bit() ? 1 : -1;
  return CenteredPoly(std::move(c));
}

double gaussian_weight(std::int64_t x, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian_weight: sigma must be positive");
  const double xd = static_cast<double>(x);
  return std::exp(-(xd * xd) / (2.0 * sigma * sigma));
}

}  // namespace nhlab
