#pragma once

// Interactive error-rate estimation and Cascade reconciliation between two
// endpoints of an authenticated classical channel. Every exchanged parity or
// key bit is masked with fresh one-time-pad bits; only error positions and the
// public block structure travel in the clear.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eprqkd/gf2.hpp"
#include "eprqkd/rng.hpp"

namespace eprqkd::cascade {

using gf2::BitVec;

// One-time pad ---------------------------------------------------------------

/// Pre-shared pad bits. Both endpoints hold the same stream.
class Pad {
 public:
  explicit Pad(BitVec bits) : bits_(std::move(bits)) {}
  static Pad from_seed(std::uint64_t seed, std::size_t length);

  std::size_t size() const noexcept { return bits_.size(); }
  bool bit(std::size_t i) const { return bits_.get(i); }
  const BitVec& bits() const noexcept { return bits_; }

 private:
  BitVec bits_;
};

/// One endpoint's cursor into the shared pad. Each bit is handed out once.
class PadLedger {
 public:
  explicit PadLedger(std::shared_ptr<const Pad> pad) : pad_(std::move(pad)) {}

  /// Next unused pad bit. Throws PadExhausted when none remain.
  bool take();
  std::size_t consumed() const noexcept { return consumed_; }
  std::size_t budget() const noexcept { return pad_->size(); }
  std::size_t remaining() const noexcept { return pad_->size() - consumed_; }

 private:
  std::shared_ptr<const Pad> pad_;
  std::size_t consumed_ = 0;
};

// Channel ----------------------------------------------------------------------

enum class Role : std::uint8_t { Alice, Bob };

struct ChannelMessage {
  std::uint64_t seq = 0;  ///< 1-based
  Role sender = Role::Alice;
  std::string kind;
  std::vector<std::uint8_t> payload;
  bool masked = false;
};

/// Every message that crossed the channel, in order.
class ChannelLog {
 public:
  void append(ChannelMessage msg) { messages_.push_back(std::move(msg)); }
  const std::vector<ChannelMessage>& messages() const noexcept { return messages_; }
  std::size_t size() const noexcept { return messages_.size(); }

  /// One line per message: "seq direction kind payload_hex masked:{0|1}",
  /// direction "A>B" or "B>A".
  void write(std::ostream& out) const;
  std::string to_string() const;

 private:
  std::vector<ChannelMessage> messages_;
};

class ClassicalLink;

/// One party's view of the link: it sends, receives and holds its pad ledger.
class ChannelEndpoint {
 public:
  ChannelEndpoint(Role role, std::shared_ptr<ClassicalLink> link, PadLedger ledger);

  Role role() const noexcept { return role_; }

  void send(std::string kind, std::vector<std::uint8_t> payload);
  /// Sends bit XOR next pad bit.
  void send_masked_bit(std::string kind, bool bit);
  void send_index(std::string kind, std::size_t index);
  void send_flag(std::string kind, bool flag);

  /// Next message addressed to this endpoint. Throws ProtocolError if none is
  /// pending or the kind does not match `expected_kind`.
  ChannelMessage receive(const std::string& expected_kind);
  bool receive_masked_bit(const std::string& kind);
  std::size_t receive_index(const std::string& kind);
  bool receive_flag(const std::string& kind);

  const PadLedger& ledger() const noexcept { return ledger_; }
  const ChannelLog& log() const;

 private:
  Role role_;
  std::shared_ptr<ClassicalLink> link_;
  PadLedger ledger_;
};

/// In-memory authenticated link with a transcript tap.
class ClassicalLink {
 public:
  void deliver(Role sender, std::string kind, std::vector<std::uint8_t> payload, bool masked);
  std::optional<ChannelMessage> take_for(Role receiver);
  const ChannelLog& log() const noexcept { return log_; }

 private:
  ChannelLog log_;
  std::deque<ChannelMessage> to_alice_;
  std::deque<ChannelMessage> to_bob_;
};

/// Two connected endpoints sharing one pad.
std::pair<ChannelEndpoint, ChannelEndpoint> make_endpoints(std::shared_ptr<const Pad> pad);

// Estimation -------------------------------------------------------------------

struct EstimateResult {
  double estimated_rate = 0.0;
  std::vector<std::size_t> sample_indices;  ///< ascending
  std::vector<std::size_t> mismatches;      ///< subset of sample_indices
};

/// Compares a uniformly random sample of `sample_size` positions: Alice
/// announces the positions, sends her bits masked, Bob announces which differ.
EstimateResult estimate_error_rate_sample(const BitVec& alice, const BitVec& bob,
                                          std::size_t sample_size, ChannelEndpoint& alice_ep,
                                          ChannelEndpoint& bob_ep, Rng& rng);

/// Sample size ceil(fraction * length); fraction must lie in (0, 1].
EstimateResult estimate_error_rate(const BitVec& alice, const BitVec& bob, double fraction,
                                   ChannelEndpoint& alice_ep, ChannelEndpoint& bob_ep, Rng& rng);

std::size_t sample_size_for(double fraction, std::size_t length);

/// Bits at every position not listed in `removed` (ascending), in order.
BitVec remove_positions(const BitVec& bits, std::span<const std::size_t> removed);

// Reconciliation ------------------------------------------------------------

/// XOR of bits at `block`. Throws DimensionError on out-of-range indices.
bool block_parity(const BitVec& bits, std::span<const std::size_t> block);

struct ReconcileConfig {
  std::vector<std::size_t> block_sizes;       ///< one per pass, non-decreasing
  std::vector<std::uint64_t> shuffle_seeds;   ///< one per pass; pass 1 is unshuffled
  double estimation_fraction = 0.1;
  bool confirm_round = false;                 ///< extra masked full-string parity

  std::size_t pass_count() const noexcept { return block_sizes.size(); }
  /// Throws ParameterError if sizes are empty, zero, decreasing, or seeds are
  /// missing.
  void validate() const;
};

inline constexpr std::size_t kDefaultPasses = 4;
/// Default schedules never use blocks longer than length / kMinBlocksPerPass.
inline constexpr std::size_t kMinBlocksPerPass = 8;

/// Pass-1 block size ceil(0.73 / rate), doubling every pass, capped at
/// length / kMinBlocksPerPass. The rate is floored at `rate_floor`.
ReconcileConfig default_config(double estimated_rate, std::size_t length, std::uint64_t seed,
                               double rate_floor, std::size_t passes = kDefaultPasses);

struct SearchResult {
  std::size_t corrected_index = 0;
  std::size_t halvings = 0;
};

/// Announces the block parity; if it differs, halves down to one mismatching
/// position and flips Bob's bit there. Throws ProtocolError when the block
/// parities agree.
SearchResult binary_search_error(const BitVec& alice, BitVec& bob,
                                 std::span<const std::size_t> block, ChannelEndpoint& alice_ep,
                                 ChannelEndpoint& bob_ep);

struct ReconcileReport {
  std::set<std::size_t> error_positions;
  std::size_t parities_exchanged = 0;
  std::size_t pad_consumed = 0;
  double estimated_rate = 0.0;
  std::size_t residual_mismatch = 0;  ///< test oracle: Hamming distance after the run
  std::optional<bool> confirmation_ok;  ///< set when the confirm round ran
};

/// Multi-pass Cascade with backtracking. Bob's string is corrected in place.
ReconcileReport reconcile(const BitVec& alice, BitVec& bob, const ReconcileConfig& config,
                          ChannelEndpoint& alice_ep, ChannelEndpoint& bob_ep);

}  // namespace eprqkd::cascade
