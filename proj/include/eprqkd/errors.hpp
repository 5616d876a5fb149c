#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eprqkd {

/// A protocol parameter or operation argument lies outside its domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not agree (vector length vs. matrix columns, etc.).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed configuration or matrix file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The one-time pad ran out before the exchange completed.
class PadExhausted : public std::runtime_error {
 public:
  PadExhausted(std::size_t consumed, std::size_t length)
      : std::runtime_error("one-time pad exhausted after " + std::to_string(consumed) + " of " +
                           std::to_string(length) + " bits"),
        consumed_(consumed),
        length_(length) {}

  std::size_t consumed() const noexcept { return consumed_; }
  std::size_t length() const noexcept { return length_; }

 private:
  std::size_t consumed_;
  std::size_t length_;
};

/// Rejection sampling for the privacy-amplification matrix gave up.
class MatrixSearchFailed : public std::runtime_error {
 public:
  MatrixSearchFailed(std::size_t trials, std::size_t best_weight)
      : std::runtime_error("no matrix met the weight requirement after " + std::to_string(trials) +
                           " trials (best minimum weight found: " + std::to_string(best_weight) +
                           ")"),
        trials_(trials),
        best_weight_(best_weight) {}

  std::size_t trials() const noexcept { return trials_; }
  std::size_t best_weight() const noexcept { return best_weight_; }

 private:
  std::size_t trials_;
  std::size_t best_weight_;
};

/// Reconciliation protocol misuse (e.g. a binary search on an even-parity block).
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace eprqkd
