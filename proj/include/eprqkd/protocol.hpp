#pragma once

// End-to-end protocol session: sifting, error-rate estimation, reconciliation,
// validation, reconciled-set selection and privacy amplification.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eprqkd/bounds.hpp"
#include "eprqkd/cascade.hpp"
#include "eprqkd/gf2.hpp"
#include "eprqkd/quantum.hpp"

namespace eprqkd::protocol {

using gf2::BitMatrix;
using gf2::BitVec;
using quantum::Basis;
using quantum::BasisString;

// Sifting and validation -----------------------------------------------------

struct SiftResult {
  BitVec d;  ///< d_i = 1 iff a_i = b_i
  /// First `s` agreeing positions (0-based, ascending); empty on SIFT_FAIL.
  std::optional<std::vector<std::size_t>> sifted;

  bool failed() const noexcept { return !sifted.has_value(); }
};

SiftResult sift(std::span<const Basis> a, std::span<const Basis> b, std::size_t s);

/// e < epsilon * s. Throws ParameterError unless 0 <= e <= s.
bool validate(std::size_t e, double epsilon, std::size_t s);

/// First r positions of S \ E, ascending. Throws ParameterError if fewer remain.
std::vector<std::size_t> reconciled_set(std::span<const std::size_t> S,
                                        std::span<const std::size_t> E, std::size_t r);

/// K alpha_R mod 2.
BitVec privacy_amplify(const BitMatrix& K, const BitVec& alpha_r);

/// Uniform m-bit key, drawn from its own stream.
BitVec fallback_key(std::size_t m, Rng& rng);

// Public announcement and compatibility ---------------------------------------

struct Transcript {
  BasisString a;
  BitVec d;
  /// Error vector over S (length s), present once reconciliation ran.
  std::optional<BitVec> e;
  /// Positions disclosed for error-rate estimation (0-based, ascending), and
  /// which of them disagreed. S is the first |sample| + s agreeing positions
  /// minus the sample.
  std::vector<std::size_t> sample;
  std::vector<std::size_t> sample_errors;
  bool validated = false;
  cascade::ChannelLog channel_log;
};

/// S implied by (d, sample, s): first s + |sample| agreeing positions minus
/// the sample. Empty if d has too few agreeing positions.
std::vector<std::size_t> sifted_set(const Transcript& P, std::size_t s);

struct ClassicalData {
  BasisString a;
  BasisString b;
  BitVec alpha;
  BitVec beta;
};

/// True iff C lies in the set of classical data compatible with P: same a,
/// b_i = a_i exactly where d_i = 1, alpha != beta on E (and on disclosed sample
/// mismatches) and alpha = beta on the rest of S (and of the sample).
bool transcript_compatible(const ClassicalData& C, const Transcript& P, std::size_t s);

// Sessions ---------------------------------------------------------------------

/// Protocol parameters together with a verified privacy-amplification matrix.
class SessionSetup {
 public:
  /// Throws ParameterError if params violate their invariants, K is not m x r,
  /// not full rank, or has a row combination lighter than d_K.
  SessionSetup(bounds::ProtocolParams params, BitMatrix pa_matrix);

  const bounds::ProtocolParams& params() const noexcept { return params_; }
  const BitMatrix& pa_matrix() const noexcept { return pa_matrix_; }

 private:
  bounds::ProtocolParams params_;
  BitMatrix pa_matrix_;
};

struct SessionOptions {
  double estimation_fraction = 0.1;
  std::size_t passes = cascade::kDefaultPasses;
  /// Explicit per-pass block sizes; empty selects the default schedule.
  std::vector<std::size_t> block_sizes;
  bool confirm_round = false;
  /// Pre-shared pad length; 0 selects 4 * (s + sample size).
  std::size_t pad_bits = 0;
  /// Abort before reconciliation when the sampled error rate reaches epsilon.
  bool abort_on_estimate = true;
};

/// Pair count and sifting target for a session that also spends `sample_size`
/// sifted bits on error-rate estimation.
struct SessionPlan {
  std::size_t sample_size = 0;
  std::size_t sift_target = 0;  ///< s + sample_size
  std::size_t pairs = 0;        ///< ceil((r + (1 - eps) sample) / ((1 - eps)/2 - tau_s))
  std::size_t pad_bits = 0;
};

SessionPlan plan_session(const bounds::ProtocolParams& params, const SessionOptions& options);

enum class SessionStatus : std::uint8_t {
  Validated,
  SiftFailed,       ///< fewer than s + sample agreeing bases
  EstimateAbort,    ///< sampled error rate >= epsilon
  ErrorThreshold,   ///< e >= epsilon s after reconciliation
  Fault,            ///< pad exhaustion or configuration error
};

const char* status_name(SessionStatus status);

struct SessionOutcome {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t s = 0;
  std::size_t r = 0;
  std::size_t m = 0;
  BitVec kappa_alice;
  BitVec kappa_bob;
  SessionStatus status = SessionStatus::Fault;
  std::string fault_message;
  /// e / s after reconciliation; the sampled rate when the session aborted
  /// before reconciling; 0 on SIFT_FAIL.
  double qber = 0.0;
  double estimated_rate = 0.0;
  std::size_t errors_found = 0;
  std::size_t pad_consumed = 0;
  std::size_t parities_exchanged = 0;
  std::size_t residual_mismatch = 0;
  long long net_gain = 0;
  Transcript transcript;
  ClassicalData classical;
  quantum::MeasurementRecord measurement;

  bool validated() const noexcept { return status == SessionStatus::Validated; }
  bool fault() const noexcept { return status == SessionStatus::Fault; }
  bool keys_equal() const noexcept { return validated() && kappa_alice == kappa_bob; }
};

/// Runs one session end to end; fully determined by `seed`.
SessionOutcome run_session(const SessionSetup& setup, const quantum::SourceModel& source,
                           const SessionOptions& options, std::uint64_t seed);

// Stream indices under a session seed.
inline constexpr std::uint64_t kQuantumStream = 1;
inline constexpr std::uint64_t kSampleStream = 2;
inline constexpr std::uint64_t kShuffleStream = 3;
inline constexpr std::uint64_t kPadStream = 4;
inline constexpr std::uint64_t kFallbackStream = 5;

}  // namespace eprqkd::protocol
