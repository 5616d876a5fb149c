#pragma once

// Bell-basis measurement statistics for polarisation-entangled photon pairs.
//
// Bell basis (Alice's photon first, + basis kets):
//   |0> = (|00> + |11>)/sqrt2    |1> = (|00> - |11>)/sqrt2
//   |2> = (|01> + |10>)/sqrt2    |3> = (|01> - |10>)/sqrt2
// Conjugate basis: |0x> = (|0+> + |1+>)/sqrt2, |1x> = (|0+> - |1+>)/sqrt2.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "eprqkd/gf2.hpp"
#include "eprqkd/rng.hpp"

namespace eprqkd::quantum {

enum class Basis : std::uint8_t { Plus = 0, Times = 1 };

char basis_symbol(Basis b);

using BellIndex = std::uint8_t;
using BasisString = std::vector<Basis>;

/// Per-pair Bell-state indices, each in {0, 1, 2, 3}.
class BellString {
 public:
  BellString() = default;
  explicit BellString(std::vector<BellIndex> entries);
  /// Digits '0'..'3'. Throws ConfigError on anything else.
  static BellString parse(std::string_view digits);

  std::size_t size() const noexcept { return entries_.size(); }
  BellIndex operator[](std::size_t i) const { return entries_[i]; }
  std::span<const BellIndex> entries() const noexcept { return entries_; }

 private:
  std::vector<BellIndex> entries_;
};

/// X_a: Bell states giving equal bits when both measure in `a`; Y_a: unequal.
struct BellSets {
  std::array<BellIndex, 2> agree;
  std::array<BellIndex, 2> disagree;
};

BellSets bell_sets(Basis a);
bool in_agree_set(BellIndex c, Basis a);

/// Outcome probabilities indexed by (alpha << 1) | beta.
using OutcomeTable = std::array<double, 4>;

/// Joint outcome distribution of measuring Bell state c in bases (a, b).
OutcomeTable outcome_dist(BellIndex c, Basis a, Basis b);

/// Exact amplitude sign / sqrt2^power; sign 0 means the amplitude is zero.
struct ExactAmplitude {
  int sign = 0;
  unsigned power = 0;

  double value() const;
  /// Squared modulus; exactly representable as a double.
  double probability() const;
  ExactAmplitude operator*(const ExactAmplitude& other) const;
  friend bool operator==(const ExactAmplitude&, const ExactAmplitude&) = default;
};

/// <alpha_a beta_b | c>, expanded in integer arithmetic from the ket
/// definitions above.
ExactAmplitude exact_amplitude_oracle(BellIndex c, Basis a, Basis b, bool alpha, bool beta);

/// gamma_i = 0 iff c_i = 0, 1 iff c_i is the nonzero member of X_{a_i}.
/// Throws ParameterError if some c_i is outside X_{a_i}.
gf2::BitVec gamma_of(const BellString& c, std::span<const Basis> a);

/// <alpha, alpha |_a c> = (-1)^{alpha . gamma} / sqrt2^r for c in X_a.
ExactAmplitude bell_overlap_exact(const gf2::BitVec& alpha, std::span<const Basis> a,
                                  const BellString& c);
double bell_overlap(const gf2::BitVec& alpha, std::span<const Basis> a, const BellString& c);

// Source models ------------------------------------------------------------

struct IdealSource {};

struct BellDiagonalSource {
  std::array<double, 4> probabilities{1.0, 0.0, 0.0, 0.0};
};

struct ScriptedSource {
  BellString states;
};

/// Ideal |Phi+> source; each pair is intercepted with `probability`.
struct InterceptResendSource {
  double probability = 1.0;
};

using SourceModel =
    std::variant<IdealSource, BellDiagonalSource, ScriptedSource, InterceptResendSource>;

/// Throws ParameterError when probabilities are out of range or do not sum to 1.
void validate_source(const SourceModel& source);

struct EveRecord {
  bool intercepted = false;
  Basis basis = Basis::Plus;
  bool outcome = false;
};

struct MeasurementRecord {
  BasisString alice_bases;
  BasisString bob_bases;
  gf2::BitVec alice_bits;
  gf2::BitVec bob_bits;
  std::vector<EveRecord> eve_log;  ///< empty unless the source intercepts
};

/// Draws (alpha, beta) from outcome_dist(c, a, b).
std::pair<bool, bool> sample_pair_outcome(BellIndex c, Basis a, Basis b, Rng& rng);

/// n pairs: uniform independent bases on both sides, outcomes per the source.
MeasurementRecord sample_transmission(const SourceModel& source, std::size_t n, Rng& rng);

}  // namespace eprqkd::quantum
