#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eprqkd/cascade.hpp"
#include "eprqkd/errors.hpp"

namespace eprqkd::cascade {

bool block_parity(const BitVec& bits, std::span<const std::size_t> block) {
  bool parity = false;
  for (auto i : block) {
    if (i >= bits.size()) {
      throw DimensionError("block index " + std::to_string(i) + " out of range for length " +
                           std::to_string(bits.size()));
    }
    parity ^= bits.get(i);
  }
  return parity;
}

void ReconcileConfig::validate() const {
  if (block_sizes.empty()) throw ParameterError("reconciliation needs at least one pass");
  if (shuffle_seeds.size() != block_sizes.size()) {
    throw ParameterError("one shuffle seed per pass is required");
  }
  for (std::size_t p = 0; p < block_sizes.size(); ++p) {
    if (block_sizes[p] == 0) throw ParameterError("block sizes must be positive");
    if (p > 0 && block_sizes[p] < block_sizes[p - 1]) {
      throw ParameterError("block sizes must be non-decreasing across passes");
    }
  }
  if (!(estimation_fraction > 0.0 && estimation_fraction < 1.0)) {
    throw ParameterError("estimation fraction must lie in (0, 1)");
  }
}

ReconcileConfig default_config(double estimated_rate, std::size_t length, std::uint64_t seed,
                               double rate_floor, std::size_t passes) {
  if (passes == 0) throw ParameterError("pass count must be positive");
  if (length == 0) throw ParameterError("cannot reconcile an empty string");
  const double rate = std::max(estimated_rate, rate_floor);
  const std::size_t cap = std::max<std::size_t>(1, length / kMinBlocksPerPass);
  std::size_t size = cap;
  if (rate > 0.0) {
    size = std::min(cap, static_cast<std::size_t>(std::ceil(0.73 / rate)));
  }
  size = std::max<std::size_t>(size, 1);
  ReconcileConfig config;
  for (std::size_t p = 0; p < passes; ++p) {
    config.block_sizes.push_back(size);
    config.shuffle_seeds.push_back(derive_seed(seed, p));
    size = std::min(cap, size * 2);
  }
  return config;
}

namespace {

// Alice sends her masked parity of `block`; Bob answers whether his differs.
bool exchange_parity(const BitVec& alice, const BitVec& bob, std::span<const std::size_t> block,
                     ChannelEndpoint& alice_ep, ChannelEndpoint& bob_ep) {
  alice_ep.send_masked_bit("parity", block_parity(alice, block));
  const bool alice_parity = bob_ep.receive_masked_bit("parity");
  bob_ep.send_flag("parity_ack", alice_parity != block_parity(bob, block));
  return alice_ep.receive_flag("parity_ack");
}

// Halves a block known to hold an odd number of mismatches down to one
// position, flips Bob's bit there and announces it.
SearchResult locate_and_fix(const BitVec& alice, BitVec& bob, std::span<const std::size_t> block,
                            ChannelEndpoint& alice_ep, ChannelEndpoint& bob_ep) {
  SearchResult result;
  std::span<const std::size_t> odd = block;
  while (odd.size() > 1) {
    const std::size_t half = odd.size() / 2;
    const auto first = odd.first(half);
    ++result.halvings;
    odd = exchange_parity(alice, bob, first, alice_ep, bob_ep) ? first : odd.subspan(half);
  }
  result.corrected_index = odd.front();
  bob.flip(result.corrected_index);
  bob_ep.send_index("fix", result.corrected_index);
  if (alice_ep.receive_index("fix") != result.corrected_index) {
    throw ProtocolError("endpoints disagree on the corrected position");
  }
  return result;
}

struct Block {
  std::vector<std::size_t> members;
  bool exchanged = false;
  bool odd = false;
};

std::vector<std::size_t> pass_order(std::size_t length, std::size_t pass, std::uint64_t seed) {
  std::vector<std::size_t> order(length);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (pass == 0) return order;
  Rng rng(seed);
  for (std::size_t k = length; k > 1; --k) {
    std::swap(order[k - 1], order[static_cast<std::size_t>(rng.below(k))]);
  }
  return order;
}

}  // namespace

SearchResult binary_search_error(const BitVec& alice, BitVec& bob,
                                 std::span<const std::size_t> block, ChannelEndpoint& alice_ep,
                                 ChannelEndpoint& bob_ep) {
  if (alice.size() != bob.size()) throw DimensionError("strings differ in length");
  if (block.empty()) throw ProtocolError("binary search on an empty block");
  if (!exchange_parity(alice, bob, block, alice_ep, bob_ep)) {
    throw ProtocolError("block parities agree; no odd error count to search");
  }
  return locate_and_fix(alice, bob, block, alice_ep, bob_ep);
}

ReconcileReport reconcile(const BitVec& alice, BitVec& bob, const ReconcileConfig& config,
                          ChannelEndpoint& alice_ep, ChannelEndpoint& bob_ep) {
  if (alice.size() != bob.size()) throw DimensionError("strings differ in length");
  config.validate();

  ReconcileReport report;
  const std::size_t pad_start = alice_ep.ledger().consumed();
  const std::size_t length = alice.size();
  const std::size_t passes = config.pass_count();

  std::vector<Block> blocks;
  std::vector<std::vector<std::size_t>> block_of(passes);
  // Known odd-mismatch blocks, smallest first.
  std::set<std::pair<std::size_t, std::size_t>> odd_blocks;

  auto set_odd = [&](std::size_t id, bool odd) {
    Block& b = blocks[id];
    if (b.odd == odd) return;
    b.odd = odd;
    if (odd) {
      odd_blocks.emplace(b.members.size(), id);
    } else {
      odd_blocks.erase({b.members.size(), id});
    }
  };

  auto exchange = [&](std::span<const std::size_t> members) {
    ++report.parities_exchanged;
    return exchange_parity(alice, bob, members, alice_ep, bob_ep);
  };

  for (std::size_t pass = 0; pass < passes; ++pass) {
    const auto order = pass_order(length, pass, config.shuffle_seeds[pass]);
    const std::size_t size = config.block_sizes[pass];
    block_of[pass].assign(length, 0);
    const std::size_t first_id = blocks.size();
    for (std::size_t start = 0; start < length; start += size) {
      Block b;
      b.members.assign(order.begin() + static_cast<long>(start),
                       order.begin() + static_cast<long>(std::min(length, start + size)));
      for (auto i : b.members) block_of[pass][i] = blocks.size();
      blocks.push_back(std::move(b));
    }

    for (std::size_t id = first_id; id < blocks.size(); ++id) {
      blocks[id].exchanged = true;
      set_odd(id, exchange(blocks[id].members));

      while (!odd_blocks.empty()) {
        const std::size_t target = odd_blocks.begin()->second;
        const auto& members = blocks[target].members;
        // Halving exchanges are counted through the ledger delta below.
        const std::size_t before = alice_ep.ledger().consumed();
        const SearchResult found = locate_and_fix(alice, bob, members, alice_ep, bob_ep);
        report.parities_exchanged += alice_ep.ledger().consumed() - before;
        report.error_positions.insert(found.corrected_index);
        for (std::size_t q = 0; q <= pass; ++q) {
          const std::size_t containing = block_of[q][found.corrected_index];
          if (blocks[containing].exchanged) set_odd(containing, !blocks[containing].odd);
        }
      }
    }
  }

  if (config.confirm_round) {
    std::vector<std::size_t> all(length);
    std::iota(all.begin(), all.end(), std::size_t{0});
    report.confirmation_ok = !exchange(all);
  }

  report.pad_consumed = alice_ep.ledger().consumed() - pad_start;
  for (std::size_t i = 0; i < length; ++i) {
    if (alice.get(i) != bob.get(i)) ++report.residual_mismatch;
  }
  return report;
}

}  // namespace eprqkd::cascade
