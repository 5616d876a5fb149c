#include <algorithm>
#include <cmath>
#include <numeric>

#include "eprqkd/cascade.hpp"
#include "eprqkd/errors.hpp"

namespace eprqkd::cascade {

namespace {

std::vector<std::uint8_t> pack_indices(std::span<const std::size_t> indices) {
  std::vector<std::uint8_t> out;
  out.reserve(indices.size() * 4);
  for (auto i : indices) {
    const auto v = static_cast<std::uint32_t>(i + 1);
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return out;
}

std::vector<std::size_t> unpack_indices(const std::vector<std::uint8_t>& payload) {
  if (payload.size() % 4 != 0) throw ProtocolError("malformed index list");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < payload.size(); k += 4) {
    const std::uint32_t v = (std::uint32_t{payload[k]} << 24) | (std::uint32_t{payload[k + 1]} << 16) |
                            (std::uint32_t{payload[k + 2]} << 8) | std::uint32_t{payload[k + 3]};
    if (v == 0) throw ProtocolError("index lists are 1-based");
    out.push_back(v - 1);
  }
  return out;
}

}  // namespace

std::size_t sample_size_for(double fraction, std::size_t length) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ParameterError("estimation fraction must lie in (0, 1]");
  }
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(length) - 1e-9));
}

EstimateResult estimate_error_rate(const BitVec& alice, const BitVec& bob, double fraction,
                                   ChannelEndpoint& alice_ep, ChannelEndpoint& bob_ep, Rng& rng) {
  return estimate_error_rate_sample(alice, bob, sample_size_for(fraction, alice.size()), alice_ep,
                                    bob_ep, rng);
}

EstimateResult estimate_error_rate_sample(const BitVec& alice, const BitVec& bob,
                                          std::size_t sample_size, ChannelEndpoint& alice_ep,
                                          ChannelEndpoint& bob_ep, Rng& rng) {
  if (alice.size() != bob.size()) throw DimensionError("estimation strings differ in length");
  if (sample_size == 0 || sample_size > alice.size()) {
    throw ParameterError("estimation sample size must lie in [1, length]");
  }
  if (alice_ep.ledger().remaining() < sample_size) {
    throw PadExhausted(alice_ep.ledger().consumed(), alice_ep.ledger().budget());
  }

  // Alice draws the sample (partial Fisher-Yates) and announces it.
  std::vector<std::size_t> order(alice.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < sample_size; ++k) {
    const auto j = k + static_cast<std::size_t>(rng.below(order.size() - k));
    std::swap(order[k], order[j]);
  }
  std::vector<std::size_t> sample(order.begin(), order.begin() + static_cast<long>(sample_size));
  std::sort(sample.begin(), sample.end());
  alice_ep.send("sample_positions", pack_indices(sample));

  const auto announced = unpack_indices(bob_ep.receive("sample_positions").payload);
  for (auto i : sample) alice_ep.send_masked_bit("sample_bit", alice.get(i));
  BitVec flags(announced.size());
  for (std::size_t k = 0; k < announced.size(); ++k) {
    const bool alice_bit = bob_ep.receive_masked_bit("sample_bit");
    flags.set(k, alice_bit != bob.get(announced[k]));
  }
  bob_ep.send("sample_mismatch", flags.to_bytes());

  const auto reply = alice_ep.receive("sample_mismatch").payload;
  EstimateResult result;
  result.sample_indices = sample;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    if ((reply[k / 8] >> (7 - k % 8)) & 1U) result.mismatches.push_back(sample[k]);
  }
  result.estimated_rate =
      static_cast<double>(result.mismatches.size()) / static_cast<double>(sample.size());
  return result;
}

BitVec remove_positions(const BitVec& bits, std::span<const std::size_t> removed) {
  if (removed.size() > bits.size()) throw DimensionError("more positions removed than present");
  BitVec out(bits.size() - removed.size());
  std::size_t next_removed = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (next_removed < removed.size() && removed[next_removed] == i) {
      ++next_removed;
      continue;
    }
    out.set(k++, bits.get(i));
  }
  if (next_removed != removed.size()) throw DimensionError("removed positions must be ascending and in range");
  return out;
}

}  // namespace eprqkd::cascade
