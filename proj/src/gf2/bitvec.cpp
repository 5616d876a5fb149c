#include <bit>

#include "eprqkd/errors.hpp"
#include "eprqkd/gf2.hpp"

namespace eprqkd::gf2 {

BitVec BitVec::from_string(std::string_view bits) {
  BitVec v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    switch (bits[i]) {
      case '0':
        break;
      case '1':
        v.set(i, true);
        break;
      default:
        throw ConfigError("invalid bit character '" + std::string(1, bits[i]) + "' at position " +
                          std::to_string(i));
    }
  }
  return v;
}

BitVec BitVec::from_bits(std::span<const std::uint8_t> bits) {
  BitVec v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw ParameterError("bit values must be 0 or 1");
    v.set(i, bits[i] != 0);
  }
  return v;
}

BitVec BitVec::random(std::size_t length, Rng& rng) {
  BitVec v(length);
  for (auto& w : v.words_) w = rng();
  if (const std::size_t tail = length & 63; tail != 0) {
    v.words_.back() &= (std::uint64_t{1} << tail) - 1;
  }
  return v;
}

std::size_t BitVec::weight() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

bool BitVec::is_zero() const noexcept {
  for (auto w : words_) {
    if (w != 0) return false;
  }
  return true;
}

bool BitVec::dot(const BitVec& other) const {
  if (other.length_ != length_) {
    throw DimensionError("inner product of vectors with lengths " + std::to_string(length_) +
                         " and " + std::to_string(other.length_));
  }
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other.words_[i];
  return (std::popcount(acc) & 1) != 0;
}

BitVec& BitVec::operator^=(const BitVec& other) {
  if (other.length_ != length_) {
    throw DimensionError("xor of vectors with lengths " + std::to_string(length_) + " and " +
                         std::to_string(other.length_));
  }
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

BitVec BitVec::select(std::span<const std::size_t> positions) const {
  BitVec out(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (positions[k] >= length_) throw DimensionError("selected position out of range");
    out.set(k, get(positions[k]));
  }
  return out;
}

std::string BitVec::to_string() const {
  std::string s(length_, '0');
  for (std::size_t i = 0; i < length_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

std::vector<std::uint8_t> BitVec::to_bytes() const {
  std::vector<std::uint8_t> bytes((length_ + 7) / 8, 0);
  for (std::size_t i = 0; i < length_; ++i) {
    if (get(i)) bytes[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  }
  return bytes;
}

}  // namespace eprqkd::gf2
