#pragma once

// Bit vectors and binary matrices over GF(2).
//
// Bit order: index 0 is the leftmost character in every textual form.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eprqkd/rng.hpp"

namespace eprqkd::gf2 {

class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t length) : length_(length), words_((length + 63) / 64, 0) {}

  /// Parses a string of '0'/'1' characters. Throws ConfigError otherwise.
  static BitVec from_string(std::string_view bits);
  static BitVec from_bits(std::span<const std::uint8_t> bits);
  static BitVec random(std::size_t length, Rng& rng);

  std::size_t size() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }

  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  bool operator[](std::size_t i) const { return get(i); }
  void set(std::size_t i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::size_t weight() const noexcept;
  bool is_zero() const noexcept;

  /// Mod-2 inner product. Throws DimensionError on length mismatch.
  bool dot(const BitVec& other) const;

  BitVec& operator^=(const BitVec& other);
  friend BitVec operator^(BitVec lhs, const BitVec& rhs) { return lhs ^= rhs; }
  friend bool operator==(const BitVec&, const BitVec&) = default;

  /// Bits at the given positions, in order.
  BitVec select(std::span<const std::size_t> positions) const;

  std::string to_string() const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// Bits packed MSB-first into bytes (bit 0 is the high bit of byte 0).
  std::vector<std::uint8_t> to_bytes() const;

 private:
  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Number of 1-entries.
inline std::size_t weight(const BitVec& v) noexcept { return v.weight(); }

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);
  /// All rows must share one length; throws DimensionError otherwise.
  explicit BitMatrix(std::vector<BitVec> rows);

  static BitMatrix random(std::size_t rows, std::size_t cols, Rng& rng);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }
  const BitVec& row(std::size_t i) const { return rows_[i]; }
  BitVec& row(std::size_t i) { return rows_[i]; }
  bool get(std::size_t i, std::size_t j) const { return rows_[i].get(j); }
  void set(std::size_t i, std::size_t j, bool v) { rows_[i].set(j, v); }

  /// x^T K: XOR of the rows selected by `coefficients`.
  BitVec combine_rows(const BitVec& coefficients) const;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<BitVec> rows_;
};

/// K x mod 2. Throws DimensionError when x.size() != K.cols().
BitVec matvec_mod2(const BitMatrix& K, const BitVec& x);

std::size_t rank(const BitMatrix& K);

struct WeightReport {
  std::size_t min_weight = 0;
  /// Nonzero coefficient vector (length K.rows()) achieving min_weight.
  BitVec witness;
  bool full_rank = false;
};

inline constexpr std::size_t kExhaustiveRowLimit = 24;

/// Exact minimum of w(x^T K) over all nonzero x. Enumerates 2^m - 1
/// combinations in Gray-code order; refuses when m > kExhaustiveRowLimit.
WeightReport min_combination_weight(const BitMatrix& K);

struct GenerateOptions {
  std::size_t max_attempts = 10'000;
};

/// Rejection-samples uniform random m x r matrices until one has full row rank
/// and every nonzero row combination of weight >= min_weight. Throws
/// MatrixSearchFailed when the attempt budget runs out.
BitMatrix generate_pa_matrix(std::size_t m, std::size_t r, std::size_t min_weight, Rng& rng,
                             const GenerateOptions& options = {});

/// Basis of {x : K x = 0}; r - m vectors for full-row-rank K. Throws
/// ParameterError if K is rank deficient.
std::vector<BitVec> kernel_basis(const BitMatrix& K);

// Matrix file: "m r\n" then m lines of r characters from {0,1}.
std::string serialize(const BitMatrix& K);
BitMatrix parse_matrix(std::string_view text);
void write_matrix(std::ostream& out, const BitMatrix& K);
BitMatrix read_matrix_file(const std::string& path);

}  // namespace eprqkd::gf2
