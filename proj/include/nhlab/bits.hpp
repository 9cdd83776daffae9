#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nhlab {

/// A bit string stored one bit per byte. Packed form is LSB-first.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n) : bits_(n, 0) {}
  explicit BitString(std::vector<std::uint8_t> bits);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }
  void push_back(bool v) { bits_.push_back(v ? 1 : 0); }

  std::vector<std::uint8_t> pack() const;
  static BitString unpack(std::span<const std::uint8_t> bytes, std::size_t nbits);
  std::string hex() const;  // hex of the packed bytes
  static BitString from_hex(const std::string& hex, std::size_t nbits);

  std::size_t hamming_distance(const BitString& other) const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

}  // namespace nhlab
