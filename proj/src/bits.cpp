#include "nhlab/bits.hpp"

#include "nhlab/params.hpp"

namespace nhlab {

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::vector<std::uint8_t> BitString::pack() const {
  std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return out;
}

BitString BitString::unpack(std::span<const std::uint8_t> bytes, std::size_t nbits) {
  if (bytes.size() * 8 < nbits) throw ParameterError("BitString::unpack: not enough bytes");
  BitString s(nbits);
  for (std::size_t i = 0; i < nbits; ++i) s.bits_[i] = (bytes[i / 8] >> (i % 8)) & 1;
  return s;
}

std::string BitString::hex() const { return to_hex(pack()); }

BitString BitString::from_hex(const std::string& hex, std::size_t nbits) {
  return unpack(nhlab::from_hex(hex), nbits);
}

std::size_t BitString::hamming_distance(const BitString& other) const {
  if (other.size() != size()) throw ParameterError("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) d += bits_[i] != other.bits_[i];
  return d;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
  if (hex.size() % 2) throw ParameterError("from_hex: odd length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ParameterError("from_hex: invalid character");
  };
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return out;
}

}  // namespace nhlab
