#include <cmath>
#include <string>
#include <tuple>

#include "eprqkd/errors.hpp"
#include "eprqkd/quantum.hpp"

namespace eprqkd::quantum {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Basis random_basis(Rng& rng) { return rng.bit() ? Basis::Times : Basis::Plus; }

BellIndex sample_bell_index(const std::array<double, 4>& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (BellIndex c = 0; c < 3; ++c) {
    acc += p[c];
    if (u < acc) return c;
  }
  return 3;
}

// Measuring photon prepared as |prepared>_{prep_basis} in basis `basis`.
bool measure_prepared(Basis prep_basis, bool prepared, Basis basis, Rng& rng) {
  return prep_basis == basis ? prepared : rng.bit();
}

}  // namespace

void validate_source(const SourceModel& source) {
  std::visit(Overloaded{
                 [](const IdealSource&) {},
                 [](const BellDiagonalSource& s) {
                   double total = 0.0;
                   for (double p : s.probabilities) {
                     if (!(p >= 0.0 && p <= 1.0)) {
                       throw ParameterError("Bell-diagonal probabilities must lie in [0, 1]");
                     }
                     total += p;
                   }
                   if (std::abs(total - 1.0) > 1e-12) {
                     throw ParameterError("Bell-diagonal probabilities must sum to 1");
                   }
                 },
                 [](const ScriptedSource&) {},
                 [](const InterceptResendSource& s) {
                   if (!(s.probability >= 0.0 && s.probability <= 1.0)) {
                     throw ParameterError("interception probability must lie in [0, 1]");
                   }
                 },
             },
             source);
}

std::pair<bool, bool> sample_pair_outcome(BellIndex c, Basis a, Basis b, Rng& rng) {
  const OutcomeTable table = outcome_dist(c, a, b);
  const double u = rng.uniform();
  double acc = 0.0;
  unsigned outcome = 3;
  for (unsigned k = 0; k < 3; ++k) {
    acc += table[k];
    if (u < acc) {
      outcome = k;
      break;
    }
  }
  return {(outcome >> 1) != 0, (outcome & 1U) != 0};
}

MeasurementRecord sample_transmission(const SourceModel& source, std::size_t n, Rng& rng) {
  if (n == 0) throw ParameterError("transmission needs at least one pair");
  validate_source(source);
  if (const auto* scripted = std::get_if<ScriptedSource>(&source);
      scripted != nullptr && scripted->states.size() != n) {
    throw ParameterError("scripted source has " + std::to_string(scripted->states.size()) +
                         " states but the session sends " + std::to_string(n) + " pairs");
  }

  MeasurementRecord rec;
  rec.alice_bases.reserve(n);
  rec.bob_bases.reserve(n);
  rec.alice_bits = gf2::BitVec(n);
  rec.bob_bits = gf2::BitVec(n);
  const auto* attack = std::get_if<InterceptResendSource>(&source);
  if (attack != nullptr) rec.eve_log.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const Basis a = random_basis(rng);
    const Basis b = random_basis(rng);
    rec.alice_bases.push_back(a);
    rec.bob_bases.push_back(b);

    bool alpha = false;
    bool beta = false;
    if (attack != nullptr && rng.bernoulli(attack->probability)) {
      // Eve measures |Phi+> in a random basis, obtaining a uniform bit that the
      // partner photon shares, then resends |o>|o> in her basis.
      EveRecord& eve = rec.eve_log[i];
      eve.intercepted = true;
      eve.basis = random_basis(rng);
      eve.outcome = rng.bit();
      alpha = measure_prepared(eve.basis, eve.outcome, a, rng);
      beta = measure_prepared(eve.basis, eve.outcome, b, rng);
    } else {
      const BellIndex c = std::visit(Overloaded{
                                         [](const IdealSource&) -> BellIndex { return 0; },
                                         [&](const BellDiagonalSource& s) {
                                           return sample_bell_index(s.probabilities, rng);
                                         },
                                         [&](const ScriptedSource& s) { return s.states[i]; },
                                         [](const InterceptResendSource&) -> BellIndex {
                                           return 0;
                                         },
                                     },
                                     source);
      std::tie(alpha, beta) = sample_pair_outcome(c, a, b, rng);
    }
    rec.alice_bits.set(i, alpha);
    rec.bob_bits.set(i, beta);
  }
  return rec;
}

}  // namespace eprqkd::quantum
