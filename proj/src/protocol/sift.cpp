#include <algorithm>
#include <string>

#include "eprqkd/errors.hpp"
#include "eprqkd/protocol.hpp"

namespace eprqkd::protocol {

SiftResult sift(std::span<const Basis> a, std::span<const Basis> b, std::size_t s) {
  if (a.size() != b.size()) throw DimensionError("basis strings differ in length");
  if (s > a.size()) throw ParameterError("s exceeds the number of pairs");
  SiftResult result{BitVec(a.size()), std::nullopt};
  std::vector<std::size_t> agreeing;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) {
      result.d.set(i, true);
      if (agreeing.size() < s) agreeing.push_back(i);
    }
  }
  if (agreeing.size() == s) result.sifted = std::move(agreeing);
  return result;
}

bool validate(std::size_t e, double epsilon, std::size_t s) {
  if (e > s) throw ParameterError("error count exceeds sifted length");
  return static_cast<double>(e) < epsilon * static_cast<double>(s);
}

std::vector<std::size_t> reconciled_set(std::span<const std::size_t> S,
                                        std::span<const std::size_t> E, std::size_t r) {
  std::vector<std::size_t> R;
  R.reserve(r);
  for (auto i : S) {
    if (R.size() == r) break;
    if (std::find(E.begin(), E.end(), i) == E.end()) R.push_back(i);
  }
  if (R.size() < r) {
    throw ParameterError("only " + std::to_string(R.size()) + " error-free sifted positions, need " +
                         std::to_string(r));
  }
  return R;
}

BitVec privacy_amplify(const BitMatrix& K, const BitVec& alpha_r) {
  return gf2::matvec_mod2(K, alpha_r);
}

BitVec fallback_key(std::size_t m, Rng& rng) { return BitVec::random(m, rng); }

std::vector<std::size_t> sifted_set(const Transcript& P, std::size_t s) {
  const std::size_t target = s + P.sample.size();
  std::vector<std::size_t> S;
  std::size_t agreeing = 0;
  for (std::size_t i = 0; i < P.d.size() && agreeing < target; ++i) {
    if (!P.d.get(i)) continue;
    ++agreeing;
    if (!std::binary_search(P.sample.begin(), P.sample.end(), i)) S.push_back(i);
  }
  if (agreeing < target) return {};
  return S;
}

bool transcript_compatible(const ClassicalData& C, const Transcript& P, std::size_t s) {
  const std::size_t n = P.a.size();
  if (C.a.size() != n || C.b.size() != n || C.alpha.size() != n || C.beta.size() != n ||
      P.d.size() != n) {
    throw DimensionError("classical data and transcript lengths differ");
  }
  if (!std::equal(C.a.begin(), C.a.end(), P.a.begin())) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if ((C.b[i] == P.a[i]) != P.d.get(i)) return false;
  }

  auto differs = [&](std::size_t i) { return C.alpha.get(i) != C.beta.get(i); };
  for (auto i : P.sample) {
    const bool disclosed_error =
        std::binary_search(P.sample_errors.begin(), P.sample_errors.end(), i);
    if (differs(i) != disclosed_error) return false;
  }
  if (!P.e) return true;

  const auto S = sifted_set(P, s);
  if (S.size() != s || P.e->size() != s) return false;
  for (std::size_t k = 0; k < s; ++k) {
    if (differs(S[k]) != P.e->get(k)) return false;
  }
  return true;
}

}  // namespace eprqkd::protocol
