#include <cmath>
#include <string>

#include "eprqkd/errors.hpp"
#include "eprqkd/quantum.hpp"

namespace eprqkd::quantum {

char basis_symbol(Basis b) { return b == Basis::Plus ? '+' : 'x'; }

BellString::BellString(std::vector<BellIndex> entries) : entries_(std::move(entries)) {
  for (auto c : entries_) {
    if (c > 3) throw ParameterError("Bell index " + std::to_string(c) + " outside {0,1,2,3}");
  }
}

BellString BellString::parse(std::string_view digits) {
  std::vector<BellIndex> entries;
  entries.reserve(digits.size());
  for (char ch : digits) {
    if (ch < '0' || ch > '3') {
      throw ConfigError(std::string("invalid Bell index character '") + ch + "'");
    }
    entries.push_back(static_cast<BellIndex>(ch - '0'));
  }
  return BellString(std::move(entries));
}

BellSets bell_sets(Basis a) {
  if (a == Basis::Plus) return {{0, 1}, {2, 3}};
  return {{0, 2}, {1, 3}};
}

bool in_agree_set(BellIndex c, Basis a) {
  const auto sets = bell_sets(a);
  return c == sets.agree[0] || c == sets.agree[1];
}

OutcomeTable outcome_dist(BellIndex c, Basis a, Basis b) {
  if (a != b) return {0.25, 0.25, 0.25, 0.25};
  if (in_agree_set(c, a)) return {0.5, 0.0, 0.0, 0.5};
  return {0.0, 0.5, 0.5, 0.0};
}

double ExactAmplitude::value() const {
  return sign == 0 ? 0.0 : sign * std::pow(std::sqrt(2.0), -static_cast<double>(power));
}

double ExactAmplitude::probability() const {
  return sign == 0 ? 0.0 : std::ldexp(1.0, -static_cast<int>(power));
}

ExactAmplitude ExactAmplitude::operator*(const ExactAmplitude& other) const {
  if (sign == 0 || other.sign == 0) return {};
  return {sign * other.sign, power + other.power};
}

namespace {

// Integer coefficients of |c> on |xy>_+ (x = Alice); overall factor 1/sqrt2.
constexpr int kBellCoefficients[4][2][2] = {
    {{1, 0}, {0, 1}},
    {{1, 0}, {0, -1}},
    {{0, 1}, {1, 0}},
    {{0, 1}, {-1, 0}},
};

// Integer coefficient of <outcome|_basis on |x>_+; the x basis carries an
// extra 1/sqrt2 that the caller accounts for.
int projection(Basis basis, bool outcome, int x) {
  if (basis == Basis::Plus) return static_cast<int>(outcome) == x ? 1 : 0;
  return (outcome && x == 1) ? -1 : 1;
}

}  // namespace

ExactAmplitude exact_amplitude_oracle(BellIndex c, Basis a, Basis b, bool alpha, bool beta) {
  if (c > 3) throw ParameterError("Bell index outside {0,1,2,3}");
  int numerator = 0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      numerator += projection(a, alpha, x) * projection(b, beta, y) * kBellCoefficients[c][x][y];
    }
  }
  unsigned power = 1U + (a == Basis::Times ? 1U : 0U) + (b == Basis::Times ? 1U : 0U);
  if (numerator == 0) return {};
  // numerator in {+-1, +-2}; fold a factor 2 into the surd power.
  if (numerator == 2 || numerator == -2) {
    numerator /= 2;
    power -= 2;
  }
  if (numerator != 1 && numerator != -1) {
    throw ProtocolError("unexpected amplitude numerator");
  }
  return {numerator, power};
}

gf2::BitVec gamma_of(const BellString& c, std::span<const Basis> a) {
  if (c.size() != a.size()) throw DimensionError("Bell string and basis string lengths differ");
  gf2::BitVec gamma(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!in_agree_set(c[i], a[i])) {
      throw ParameterError("Bell index " + std::to_string(c[i]) + " at position " +
                           std::to_string(i) + " is not in X_" + basis_symbol(a[i]));
    }
    gamma.set(i, c[i] != 0);
  }
  return gamma;
}

ExactAmplitude bell_overlap_exact(const gf2::BitVec& alpha, std::span<const Basis> a,
                                  const BellString& c) {
  if (alpha.size() != a.size()) throw DimensionError("bit string and basis string lengths differ");
  const gf2::BitVec gamma = gamma_of(c, a);
  return {alpha.dot(gamma) ? -1 : 1, static_cast<unsigned>(alpha.size())};
}

double bell_overlap(const gf2::BitVec& alpha, std::span<const Basis> a, const BellString& c) {
  return bell_overlap_exact(alpha, a, c).value();
}

}  // namespace eprqkd::quantum
