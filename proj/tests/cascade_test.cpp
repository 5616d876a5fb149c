#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "eprqkd/cascade.hpp"
#include "eprqkd/errors.hpp"

using namespace eprqkd;
using namespace eprqkd::cascade;

namespace {

BitVec bsc(const BitVec& input, double p, Rng& rng) {
  BitVec out = input;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (rng.bernoulli(p)) out.flip(i);
  }
  return out;
}

std::shared_ptr<const Pad> pad_of(std::uint64_t seed, std::size_t bits = 20'000) {
  return std::make_shared<const Pad>(Pad::from_seed(seed, bits));
}

std::vector<std::size_t> iota_block(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

struct Run {
  EstimateResult estimate;
  ReconcileReport report;
  BitVec bob_after;
  ChannelLog log;
  std::size_t alice_consumed = 0;
  std::size_t bob_consumed = 0;
};

// Estimation on the full string, then reconciliation of the rest.
Run estimate_and_reconcile(const BitVec& alice, const BitVec& bob, std::shared_ptr<const Pad> pad,
                           std::uint64_t seed) {
  auto [a_ep, b_ep] = make_endpoints(std::move(pad));
  Rng sample_rng(derive_seed(seed, 1));
  Run run;
  run.estimate = estimate_error_rate(alice, bob, 0.1, a_ep, b_ep, sample_rng);
  const BitVec a_rest = remove_positions(alice, run.estimate.sample_indices);
  run.bob_after = remove_positions(bob, run.estimate.sample_indices);
  const auto config = default_config(run.estimate.estimated_rate, a_rest.size(),
                                     derive_seed(seed, 2),
                                     1.0 / static_cast<double>(run.estimate.sample_indices.size()));
  run.report = reconcile(a_rest, run.bob_after, config, a_ep, b_ep);
  run.log = a_ep.log();
  run.alice_consumed = a_ep.ledger().consumed();
  run.bob_consumed = b_ep.ledger().consumed();
  return run;
}

}  // namespace

TEST(PadLedger, HandsOutEachBitOnceAndStopsAtBudget) {
  auto pad = std::make_shared<const Pad>(BitVec::from_string("101"));
  PadLedger ledger(pad);
  EXPECT_TRUE(ledger.take());
  EXPECT_FALSE(ledger.take());
  EXPECT_TRUE(ledger.take());
  EXPECT_EQ(ledger.consumed(), 3U);
  EXPECT_EQ(ledger.remaining(), 0U);
  try {
    ledger.take();
    FAIL() << "expected PadExhausted";
  } catch (const PadExhausted& ex) {
    EXPECT_EQ(ex.consumed(), 3U);
    EXPECT_EQ(ex.length(), 3U);
  }
}

TEST(Channel, MaskedBitsRoundTripAndLogFormat) {
  auto [a, b] = make_endpoints(std::make_shared<const Pad>(BitVec::from_string("10")));
  a.send_masked_bit("parity", true);
  EXPECT_TRUE(b.receive_masked_bit("parity"));
  b.send_index("fix", 4);
  EXPECT_EQ(a.receive_index("fix"), 4U);
  EXPECT_EQ(a.log().to_string(), "1 A>B parity 00 masked:1\n2 B>A fix 00000005 masked:0\n");
  EXPECT_EQ(a.ledger().consumed(), b.ledger().consumed());
  EXPECT_THROW(a.receive("fix"), ProtocolError);
  b.send_flag("parity_ack", true);
  EXPECT_THROW(a.receive("fix"), ProtocolError);
}

TEST(Estimate, Examples) {
  Rng rng(1);
  const auto alice = BitVec::random(500, rng);
  {
    auto [a, b] = make_endpoints(pad_of(2));
    const auto est = estimate_error_rate(alice, alice, 0.2, a, b, rng);
    EXPECT_EQ(est.estimated_rate, 0.0);
    EXPECT_EQ(est.sample_indices.size(), 100U);
    EXPECT_EQ(a.ledger().consumed(), 100U);
  }
  {
    BitVec complement = alice;
    for (std::size_t i = 0; i < complement.size(); ++i) complement.flip(i);
    auto [a, b] = make_endpoints(pad_of(3));
    const auto est = estimate_error_rate(alice, complement, 1.0, a, b, rng);
    EXPECT_EQ(est.estimated_rate, 1.0);
    EXPECT_EQ(est.mismatches.size(), 500U);
  }
  auto [a, b] = make_endpoints(pad_of(4));
  EXPECT_THROW(estimate_error_rate(alice, alice, 0.0, a, b, rng), ParameterError);
  EXPECT_THROW(estimate_error_rate(alice, alice, 1.5, a, b, rng), ParameterError);
  auto [c, d] = make_endpoints(pad_of(5, 10));
  EXPECT_THROW(estimate_error_rate(alice, alice, 0.1, c, d, rng), PadExhausted);
}

TEST(Estimate, WithinHoeffdingBound) {
  // sample 1000, confidence 1 - 1e-6: t = sqrt(ln(2e6) / 2000).
  const double t = std::sqrt(std::log(2e6) / 2000.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto alice = BitVec::random(10'000, rng);
    const auto bob = bsc(alice, 0.1, rng);
    auto [a, b] = make_endpoints(pad_of(seed, 2000));
    const auto est = estimate_error_rate(alice, bob, 0.1, a, b, rng);
    EXPECT_EQ(est.sample_indices.size(), 1000U);
    EXPECT_LE(std::abs(est.estimated_rate - 0.1), t) << seed;
  }
}

TEST(Estimate, SampleIsSortedDistinctAndMismatchesAreReal) {
  Rng rng(12);
  const auto alice = BitVec::random(300, rng);
  const auto bob = bsc(alice, 0.2, rng);
  auto [a, b] = make_endpoints(pad_of(13));
  const auto est = estimate_error_rate(alice, bob, 0.3, a, b, rng);
  EXPECT_TRUE(std::is_sorted(est.sample_indices.begin(), est.sample_indices.end()));
  EXPECT_EQ(std::adjacent_find(est.sample_indices.begin(), est.sample_indices.end()),
            est.sample_indices.end());
  std::size_t expected = 0;
  for (auto i : est.sample_indices) expected += alice.get(i) != bob.get(i);
  EXPECT_EQ(est.mismatches.size(), expected);
  for (auto i : est.mismatches) EXPECT_NE(alice.get(i), bob.get(i));
}

TEST(RemovePositions, KeepsOrder) {
  const auto v = BitVec::from_string("110010");
  const std::vector<std::size_t> drop{0, 3};
  EXPECT_EQ(remove_positions(v, drop).to_string(), "1010");
}

TEST(BlockParity, Examples) {
  const auto bits = BitVec::from_string("1011");
  const auto all = iota_block(4);
  EXPECT_TRUE(block_parity(bits, all));
  EXPECT_FALSE(block_parity(bits, std::vector<std::size_t>{}));
  EXPECT_THROW(block_parity(bits, std::vector<std::size_t>{4}), DimensionError);

  Rng rng(3);
  const auto big = BitVec::random(200, rng);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> block;
    for (std::size_t i = 0; i < 200; ++i) {
      if (rng.bit()) block.push_back(i);
    }
    bool expected = false;
    for (auto i : block) expected ^= big.get(i);
    EXPECT_EQ(block_parity(big, block), expected);
  }
}

TEST(BinarySearch, SingleErrorInBlockOfEight) {
  const auto alice = BitVec::from_string("10110010");
  for (std::size_t pos = 0; pos < 8; ++pos) {
    BitVec bob = alice;
    bob.flip(pos);
    auto [a, b] = make_endpoints(pad_of(pos));
    const auto found = binary_search_error(alice, bob, iota_block(8), a, b);
    EXPECT_EQ(found.corrected_index, pos);
    EXPECT_EQ(found.halvings, 3U);
    EXPECT_EQ(bob, alice);
    // Initial parity plus three halvings.
    EXPECT_EQ(a.ledger().consumed(), 4U);
  }
}

TEST(BinarySearch, Singleton) {
  const auto alice = BitVec::from_string("1");
  BitVec bob = BitVec::from_string("0");
  auto [a, b] = make_endpoints(pad_of(1));
  const auto found = binary_search_error(alice, bob, iota_block(1), a, b);
  EXPECT_EQ(found.corrected_index, 0U);
  EXPECT_EQ(found.halvings, 0U);
  EXPECT_EQ(bob, alice);
}

TEST(BinarySearch, ThreeErrorsInSixteen) {
  Rng rng(5);
  const auto alice = BitVec::random(16, rng);
  const std::vector<std::size_t> errors{2, 9, 13};
  BitVec bob = alice;
  for (auto i : errors) bob.flip(i);
  auto [a, b] = make_endpoints(pad_of(6));
  const auto block = iota_block(16);
  const auto found = binary_search_error(alice, bob, block, a, b);
  EXPECT_NE(std::find(errors.begin(), errors.end(), found.corrected_index), errors.end());
  EXPECT_EQ(block_parity(alice, block), block_parity(bob, block));
  EXPECT_EQ(weight(alice ^ bob), 2U);
  EXPECT_LE(found.halvings, 4U);
}

TEST(BinarySearch, RejectsEvenBlocks) {
  const auto alice = BitVec::from_string("0000");
  BitVec bob = BitVec::from_string("0110");
  auto [a, b] = make_endpoints(pad_of(7));
  EXPECT_THROW(binary_search_error(alice, bob, iota_block(4), a, b), ProtocolError);
}

TEST(BinarySearch, HalvingCountIsCeilLog2) {
  Rng rng(8);
  for (std::size_t size = 1; size <= 70; ++size) {
    const auto alice = BitVec::random(size, rng);
    BitVec bob = alice;
    bob.flip(rng.below(size));
    auto [a, b] = make_endpoints(pad_of(size));
    const auto found = binary_search_error(alice, bob, iota_block(size), a, b);
    const auto bound = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(size))));
    EXPECT_LE(found.halvings, bound);
    EXPECT_GE(found.halvings + 1, bound);
  }
}

TEST(BinarySearch, MonotoneProgress) {
  Rng rng(9);
  const auto alice = BitVec::random(256, rng);
  BitVec bob = bsc(alice, 0.1, rng);
  auto [a, b] = make_endpoints(pad_of(10));
  const auto block = iota_block(256);
  std::size_t mismatches = weight(alice ^ bob);
  while (block_parity(alice, block) != block_parity(bob, block)) {
    const BitVec before = bob;
    const auto found = binary_search_error(alice, bob, block, a, b);
    EXPECT_NE(alice.get(found.corrected_index), before.get(found.corrected_index));
    const std::size_t now = weight(alice ^ bob);
    EXPECT_EQ(now + 1, mismatches);
    mismatches = now;
  }
}

TEST(ReconcileConfig, Validation) {
  ReconcileConfig config{{4, 8}, {1, 2}};
  EXPECT_NO_THROW(config.validate());
  EXPECT_THROW((ReconcileConfig{{8, 4}, {1, 2}}).validate(), ParameterError);
  EXPECT_THROW((ReconcileConfig{{0, 4}, {1, 2}}).validate(), ParameterError);
  EXPECT_THROW((ReconcileConfig{{4, 8}, {1}}).validate(), ParameterError);
  EXPECT_THROW((ReconcileConfig{{}, {}}).validate(), ParameterError);
}

TEST(ReconcileConfig, DefaultSchedule) {
  const auto c = default_config(0.05, 900, 1, 0.01);
  ASSERT_EQ(c.pass_count(), 4U);
  EXPECT_EQ(c.block_sizes[0], 15U);  // ceil(0.73 / 0.05)
  EXPECT_EQ(c.block_sizes[1], 30U);
  EXPECT_EQ(c.block_sizes[2], 60U);
  EXPECT_EQ(c.block_sizes[3], 112U);  // capped at 900 / 8
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(default_config(0.0, 900, 1, 0.01).block_sizes[0], 73U);
}

TEST(Reconcile, ZeroErrorsExchangesOneParityPerBlock) {
  Rng rng(21);
  const auto alice = BitVec::random(100, rng);
  BitVec bob = alice;
  const ReconcileConfig config{{10, 20, 40}, {1, 2, 3}};
  auto [a, b] = make_endpoints(pad_of(22));
  const auto report = reconcile(alice, bob, config, a, b);
  EXPECT_TRUE(report.error_positions.empty());
  EXPECT_EQ(report.parities_exchanged, 10U + 5U + 3U);
  EXPECT_EQ(report.pad_consumed, report.parities_exchanged);
}

TEST(Reconcile, SingleErrorAlwaysCorrected) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t len = 1 + rng.below(400);
    const auto alice = BitVec::random(len, rng);
    BitVec bob = alice;
    const std::size_t pos = rng.below(len);
    bob.flip(pos);
    const auto config = default_config(rng.uniform() * 0.3, len, rng(), 0.001, 1 + rng.below(4));
    auto [a, b] = make_endpoints(pad_of(trial));
    const auto report = reconcile(alice, bob, config, a, b);
    EXPECT_EQ(bob, alice);
    EXPECT_EQ(report.error_positions, std::set<std::size_t>{pos});
  }
}

TEST(Reconcile, BscFivePercentMostlyClean) {
  int clean = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(1000 + seed);
    const auto alice = BitVec::random(1000, rng);
    const auto bob = bsc(alice, 0.05, rng);
    const auto run = estimate_and_reconcile(alice, bob, pad_of(seed), seed);
    clean += run.report.residual_mismatch == 0;
  }
  EXPECT_GE(clean, 95);
}

TEST(Reconcile, ReportInvariants) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(2000 + seed);
    const auto alice = BitVec::random(1000, rng);
    const auto bob = bsc(alice, 0.08, rng);
    const auto run = estimate_and_reconcile(alice, bob, pad_of(seed), seed);
    const BitVec a_rest = remove_positions(alice, run.estimate.sample_indices);
    const BitVec b_rest = remove_positions(bob, run.estimate.sample_indices);
    EXPECT_EQ(run.alice_consumed, run.bob_consumed);
    EXPECT_EQ(run.alice_consumed,
              run.report.parities_exchanged + run.estimate.sample_indices.size());
    EXPECT_GE(run.report.pad_consumed, run.report.parities_exchanged);
    for (auto i : run.report.error_positions) {
      ASSERT_LT(i, a_rest.size());
      EXPECT_NE(a_rest.get(i), b_rest.get(i));
    }
    EXPECT_EQ(weight(a_rest ^ run.bob_after), run.report.residual_mismatch);
    EXPECT_EQ(weight(a_rest ^ b_rest),
              run.report.error_positions.size() + run.report.residual_mismatch);
  }
}

TEST(Reconcile, ConfirmRoundUsesOneMoreParity) {
  Rng rng(31);
  const auto alice = BitVec::random(400, rng);
  BitVec bob = bsc(alice, 0.03, rng);
  auto config = default_config(0.03, 400, 5, 0.01);
  config.confirm_round = true;
  auto [a, b] = make_endpoints(pad_of(32));
  const auto report = reconcile(alice, bob, config, a, b);
  ASSERT_TRUE(report.confirmation_ok.has_value());
  EXPECT_EQ(*report.confirmation_ok, report.residual_mismatch % 2 == 0);
  EXPECT_EQ(report.pad_consumed, report.parities_exchanged);
}

TEST(Reconcile, PadExhaustionPropagates) {
  Rng rng(33);
  const auto alice = BitVec::random(400, rng);
  BitVec bob = bsc(alice, 0.05, rng);
  auto [a, b] = make_endpoints(pad_of(34, 20));
  EXPECT_THROW(reconcile(alice, bob, default_config(0.05, 400, 1, 0.01), a, b), PadExhausted);
}

TEST(Reconcile, DeterministicGivenSeeds) {
  Rng rng(35);
  const auto alice = BitVec::random(600, rng);
  const auto bob = bsc(alice, 0.07, rng);
  const auto x = estimate_and_reconcile(alice, bob, pad_of(36), 37);
  const auto y = estimate_and_reconcile(alice, bob, pad_of(36), 37);
  EXPECT_EQ(x.log.to_string(), y.log.to_string());
  EXPECT_EQ(x.report.error_positions, y.report.error_positions);
}

TEST(LeakConfinement, RePaddingFlipsMaskedBitsOnly) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(3000 + seed);
    const auto alice = BitVec::random(1000, rng);
    const auto bob = bsc(alice, 0.05, rng);
    const auto pad = pad_of(seed);
    BitVec inverted = pad->bits();
    for (std::size_t i = 0; i < inverted.size(); ++i) inverted.flip(i);

    const auto x = estimate_and_reconcile(alice, bob, pad, seed);
    const auto y = estimate_and_reconcile(alice, bob, std::make_shared<const Pad>(inverted), seed);
    const auto z = estimate_and_reconcile(alice, bob, pad_of(seed + 500), seed);

    EXPECT_EQ(x.report.error_positions, y.report.error_positions);
    EXPECT_EQ(x.report.error_positions, z.report.error_positions);
    const auto& mx = x.log.messages();
    const auto& my = y.log.messages();
    const auto& mz = z.log.messages();
    ASSERT_EQ(mx.size(), my.size());
    ASSERT_EQ(mx.size(), mz.size());
    for (std::size_t k = 0; k < mx.size(); ++k) {
      ASSERT_EQ(mx[k].kind, my[k].kind);
      ASSERT_EQ(mx[k].masked, my[k].masked);
      if (mx[k].masked) {
        EXPECT_NE(mx[k].payload, my[k].payload);
      } else {
        EXPECT_EQ(mx[k].payload, my[k].payload);
        EXPECT_EQ(mx[k].payload, mz[k].payload);
      }
    }
  }
}

TEST(LeakConfinement, PlaintextDependsOnlyOnErrorPattern) {
  // Different strings with the same error pattern produce the same
  // unmasked traffic.
  Rng rng(41);
  const auto alice1 = BitVec::random(800, rng);
  const auto alice2 = BitVec::random(800, rng);
  const auto noise = bsc(BitVec(800), 0.06, rng);
  const auto x = estimate_and_reconcile(alice1, alice1 ^ noise, pad_of(42), 43);
  const auto y = estimate_and_reconcile(alice2, alice2 ^ noise, pad_of(42), 43);
  EXPECT_EQ(x.report.error_positions, y.report.error_positions);
  const auto& mx = x.log.messages();
  const auto& my = y.log.messages();
  ASSERT_EQ(mx.size(), my.size());
  for (std::size_t k = 0; k < mx.size(); ++k) {
    EXPECT_EQ(mx[k].kind, my[k].kind);
    if (!mx[k].masked) EXPECT_EQ(mx[k].payload, my[k].payload);
  }
}
