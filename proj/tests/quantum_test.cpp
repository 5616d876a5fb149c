#include <gtest/gtest.h>

#include <cmath>

#include "eprqkd/errors.hpp"
#include "eprqkd/quantum.hpp"

using namespace eprqkd;
using namespace eprqkd::quantum;

namespace {

constexpr Basis kBases[] = {Basis::Plus, Basis::Times};

double total_variation(const OutcomeTable& p, const std::array<std::size_t, 4>& counts,
                       std::size_t samples) {
  double tv = 0.0;
  for (int k = 0; k < 4; ++k) tv += std::abs(p[k] - static_cast<double>(counts[k]) / samples);
  return tv / 2;
}

}  // namespace

TEST(BellSets, Examples) {
  const auto plus = bell_sets(Basis::Plus);
  EXPECT_EQ(plus.agree, (std::array<BellIndex, 2>{0, 1}));
  EXPECT_EQ(plus.disagree, (std::array<BellIndex, 2>{2, 3}));
  const auto times = bell_sets(Basis::Times);
  EXPECT_EQ(times.agree, (std::array<BellIndex, 2>{0, 2}));
  EXPECT_EQ(times.disagree, (std::array<BellIndex, 2>{1, 3}));
}

TEST(BellSets, PartitionTheFourStates) {
  for (Basis a : kBases) {
    const auto sets = bell_sets(a);
    std::array<int, 4> hits{};
    for (auto c : sets.agree) ++hits[c];
    for (auto c : sets.disagree) ++hits[c];
    EXPECT_EQ(hits, (std::array<int, 4>{1, 1, 1, 1}));
    for (BellIndex c = 0; c < 4; ++c) {
      const bool listed = c == sets.agree[0] || c == sets.agree[1];
      EXPECT_EQ(in_agree_set(c, a), listed);
    }
  }
}

TEST(OutcomeDist, Examples) {
  EXPECT_EQ(outcome_dist(0, Basis::Plus, Basis::Plus), (OutcomeTable{0.5, 0, 0, 0.5}));
  EXPECT_EQ(outcome_dist(3, Basis::Times, Basis::Times), (OutcomeTable{0, 0.5, 0.5, 0}));
  EXPECT_EQ(outcome_dist(1, Basis::Plus, Basis::Times), (OutcomeTable{0.25, 0.25, 0.25, 0.25}));
}

TEST(ExactAmplitude, Examples) {
  const auto a = exact_amplitude_oracle(0, Basis::Plus, Basis::Plus, false, false);
  EXPECT_EQ(a.sign, 1);
  EXPECT_EQ(a.power, 1U);
  EXPECT_DOUBLE_EQ(a.value(), 1 / std::sqrt(2.0));

  EXPECT_EQ(exact_amplitude_oracle(3, Basis::Plus, Basis::Plus, false, false).sign, 0);

  const auto b = exact_amplitude_oracle(2, Basis::Plus, Basis::Times, false, true);
  EXPECT_NE(b.sign, 0);
  EXPECT_EQ(b.power, 2U);
  EXPECT_DOUBLE_EQ(std::abs(b.value()), 0.5);
  EXPECT_EQ(b.probability(), 0.25);
}

TEST(ExactAmplitude, SquaresEqualOutcomeDistExactly) {
  for (BellIndex c = 0; c < 4; ++c) {
    for (Basis a : kBases) {
      for (Basis b : kBases) {
        const auto table = outcome_dist(c, a, b);
        double total = 0.0;
        for (int k = 0; k < 4; ++k) {
          const auto amp = exact_amplitude_oracle(c, a, b, (k >> 1) & 1, k & 1);
          EXPECT_EQ(amp.probability(), table[k]);
          total += table[k];
        }
        EXPECT_EQ(total, 1.0);
      }
    }
  }
}

TEST(ExactAmplitude, EachStateIsNormalisedInEveryProductBasis) {
  // Independent of outcome_dist: sum of squared amplitudes over outcomes.
  for (BellIndex c = 0; c < 4; ++c) {
    for (Basis a : kBases) {
      for (Basis b : kBases) {
        double norm = 0.0;
        for (int k = 0; k < 4; ++k) {
          norm += exact_amplitude_oracle(c, a, b, (k >> 1) & 1, k & 1).probability();
        }
        EXPECT_EQ(norm, 1.0);
      }
    }
  }
}

TEST(OutcomeDist, EqualBasesAreDeterministicInParity) {
  for (BellIndex c = 0; c < 4; ++c) {
    for (Basis a : kBases) {
      const auto t = outcome_dist(c, a, a);
      if (in_agree_set(c, a)) {
        EXPECT_EQ(t[1] + t[2], 0.0);
      } else {
        EXPECT_EQ(t[0] + t[3], 0.0);
      }
    }
  }
}

TEST(Gamma, Examples) {
  const BasisString a{Basis::Plus, Basis::Times};
  EXPECT_EQ(gamma_of(BellString({1, 2}), a).to_string(), "11");
  EXPECT_TRUE(gamma_of(BellString({0, 0}), a).is_zero());
  EXPECT_THROW(gamma_of(BellString({1}), BasisString{Basis::Times}), ParameterError);
  EXPECT_THROW(gamma_of(BellString({3, 0}), a), ParameterError);
}

TEST(BellOverlap, Examples) {
  const BasisString plus{Basis::Plus};
  EXPECT_DOUBLE_EQ(bell_overlap(gf2::BitVec::from_string("0"), plus, BellString({0})),
                   1 / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(bell_overlap(gf2::BitVec::from_string("1"), plus, BellString({1})),
                   -1 / std::sqrt(2.0));
  const BasisString two{Basis::Plus, Basis::Times};
  EXPECT_DOUBLE_EQ(bell_overlap(gf2::BitVec::from_string("00"), two, BellString({1, 2})), 0.5);
  EXPECT_THROW(bell_overlap(gf2::BitVec::from_string("0"), plus, BellString({2})),
               ParameterError);
}

TEST(BellOverlap, MatchesProductOfSinglePairAmplitudes) {
  for (std::size_t r = 1; r <= 3; ++r) {
    const std::size_t combos = std::size_t{1} << r;
    for (std::size_t abits = 0; abits < combos; ++abits) {
      BasisString a(r);
      for (std::size_t i = 0; i < r; ++i) a[i] = kBases[(abits >> i) & 1];
      for (std::size_t gbits = 0; gbits < combos; ++gbits) {
        std::vector<BellIndex> cs(r);
        for (std::size_t i = 0; i < r; ++i) {
          cs[i] = ((gbits >> i) & 1) ? bell_sets(a[i]).agree[1] : BellIndex{0};
        }
        const BellString c(cs);
        for (std::size_t xbits = 0; xbits < combos; ++xbits) {
          gf2::BitVec alpha(r);
          for (std::size_t i = 0; i < r; ++i) alpha.set(i, (xbits >> i) & 1);
          ExactAmplitude product{1, 0};
          for (std::size_t i = 0; i < r; ++i) {
            product = product * exact_amplitude_oracle(c[i], a[i], a[i], alpha[i], alpha[i]);
          }
          EXPECT_EQ(bell_overlap_exact(alpha, a, c), product);
          EXPECT_EQ(product.power, r);
        }
      }
    }
  }
}

TEST(Sampler, MatchesOutcomeDistWithinTotalVariation) {
  constexpr std::size_t kSamples = 20'000;
  Rng rng(101);
  for (BellIndex c = 0; c < 4; ++c) {
    for (Basis a : kBases) {
      for (Basis b : kBases) {
        std::array<std::size_t, 4> counts{};
        for (std::size_t i = 0; i < kSamples; ++i) {
          const auto [x, y] = sample_pair_outcome(c, a, b, rng);
          ++counts[(x ? 2 : 0) | (y ? 1 : 0)];
        }
        EXPECT_LE(total_variation(outcome_dist(c, a, b), counts, kSamples), 0.02);
      }
    }
  }
}

TEST(Transmission, IdealSourceNeverDisagreesInEqualBases) {
  Rng rng(7);
  const auto rec = sample_transmission(IdealSource{}, 5000, rng);
  std::size_t equal = 0;
  for (std::size_t i = 0; i < 5000; ++i) {
    if (rec.alice_bases[i] != rec.bob_bases[i]) continue;
    ++equal;
    EXPECT_EQ(rec.alice_bits[i], rec.bob_bits[i]);
  }
  EXPECT_GT(equal, 2000U);
  EXPECT_TRUE(rec.eve_log.empty());
}

TEST(Transmission, SingletStateAlwaysDisagreesInEqualBases) {
  Rng rng(8);
  const auto rec =
      sample_transmission(ScriptedSource{BellString(std::vector<BellIndex>(2000, 3))}, 2000, rng);
  for (std::size_t i = 0; i < 2000; ++i) {
    if (rec.alice_bases[i] == rec.bob_bases[i]) EXPECT_NE(rec.alice_bits[i], rec.bob_bits[i]);
  }
}

TEST(Transmission, BasesAreBalanced) {
  constexpr std::size_t n = 40'000;
  Rng rng(9);
  const auto rec = sample_transmission(IdealSource{}, n, rng);
  std::size_t plus_a = 0;
  std::size_t plus_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    plus_a += rec.alice_bases[i] == Basis::Plus;
    plus_b += rec.bob_bases[i] == Basis::Plus;
  }
  const double sigma = std::sqrt(n * 0.25);
  EXPECT_LT(std::abs(plus_a - n / 2.0), 5 * sigma);
  EXPECT_LT(std::abs(plus_b - n / 2.0), 5 * sigma);
}

TEST(Transmission, InterceptResendGivesQuarterDisagreement) {
  constexpr std::size_t n = 100'000;
  Rng rng(10);
  const auto rec = sample_transmission(InterceptResendSource{1.0}, n, rng);
  ASSERT_EQ(rec.eve_log.size(), n);
  std::size_t equal = 0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_TRUE(rec.eve_log[i].intercepted);
    if (rec.alice_bases[i] != rec.bob_bases[i]) continue;
    ++equal;
    wrong += rec.alice_bits[i] != rec.bob_bits[i];
  }
  const double rate = static_cast<double>(wrong) / equal;
  EXPECT_LT(std::abs(rate - 0.25), 3 * std::sqrt(0.25 * 0.75 / equal));
}

TEST(Transmission, InterceptionQuarterFollowsFromAmplitudes) {
  // Eve's basis e and outcome o leave the product state |o_e>|o_e>; the
  // disagreement probability for equal bases a follows from the single-qubit
  // overlaps of |Phi+> and the product states.
  double disagree = 0.0;
  for (Basis a : kBases) {
    for (Basis e : kBases) {
      for (int o = 0; o < 2; ++o) {
        // P(Eve sees o | e) from |0> = |Phi+>.
        const double p_o = outcome_dist(0, e, e)[o == 0 ? 0 : 3];
        // Single-qubit |<x_a | o_e>|^2 is 1/2 across bases, delta within one.
        auto overlap = [&](int x) { return a == e ? (x == o ? 1.0 : 0.0) : 0.5; };
        double p_diff = 0.0;
        for (int x = 0; x < 2; ++x) p_diff += overlap(x) * overlap(1 - x);
        disagree += 0.25 * p_o * p_diff;
      }
    }
  }
  EXPECT_DOUBLE_EQ(disagree, 0.25);
}

TEST(Transmission, SeedDeterminism) {
  for (const SourceModel& source :
       {SourceModel{IdealSource{}}, SourceModel{BellDiagonalSource{{0.7, 0.1, 0.1, 0.1}}},
        SourceModel{InterceptResendSource{0.5}}}) {
    Rng a(99);
    Rng b(99);
    const auto x = sample_transmission(source, 1000, a);
    const auto y = sample_transmission(source, 1000, b);
    EXPECT_EQ(x.alice_bases, y.alice_bases);
    EXPECT_EQ(x.bob_bases, y.bob_bases);
    EXPECT_EQ(x.alice_bits, y.alice_bits);
    EXPECT_EQ(x.bob_bits, y.bob_bits);
    ASSERT_EQ(x.eve_log.size(), y.eve_log.size());
    for (std::size_t i = 0; i < x.eve_log.size(); ++i) {
      EXPECT_EQ(x.eve_log[i].intercepted, y.eve_log[i].intercepted);
      EXPECT_EQ(x.eve_log[i].outcome, y.eve_log[i].outcome);
    }
  }
}

TEST(Source, Validation) {
  EXPECT_NO_THROW(validate_source(BellDiagonalSource{{0.98, 0, 0, 0.02}}));
  EXPECT_THROW(validate_source(BellDiagonalSource{{0.5, 0.5, 0.1, 0}}), ParameterError);
  EXPECT_THROW(validate_source(BellDiagonalSource{{1.2, -0.2, 0, 0}}), ParameterError);
  EXPECT_THROW(validate_source(InterceptResendSource{1.5}), ParameterError);
  EXPECT_THROW(BellString::parse("0124"), ConfigError);
  EXPECT_EQ(BellString::parse("0123").size(), 4U);
  Rng rng(1);
  EXPECT_THROW(sample_transmission(ScriptedSource{BellString::parse("01")}, 3, rng),
               ParameterError);
}
