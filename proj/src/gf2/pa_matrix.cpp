#include <algorithm>

#include "eprqkd/errors.hpp"
#include "eprqkd/gf2.hpp"

namespace eprqkd::gf2 {

BitMatrix generate_pa_matrix(std::size_t m, std::size_t r, std::size_t min_weight, Rng& rng,
                             const GenerateOptions& options) {
  if (m == 0 || r == 0) throw ParameterError("matrix dimensions must be positive");
  if (m > kExhaustiveRowLimit) {
    throw ParameterError("m = " + std::to_string(m) + " exceeds the exhaustive verification limit " +
                         std::to_string(kExhaustiveRowLimit));
  }
  if (m > r) throw ParameterError("m must not exceed r for a full-row-rank matrix");
  if (min_weight > r) throw ParameterError("d_K must not exceed r");
  if (options.max_attempts == 0) throw ParameterError("attempt budget must be positive");

  std::size_t best = 0;
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    BitMatrix candidate = BitMatrix::random(m, r, rng);
    const WeightReport report = min_combination_weight(candidate);
    if (report.full_rank && report.min_weight >= min_weight) return candidate;
    best = std::max(best, report.min_weight);
  }
  throw MatrixSearchFailed(options.max_attempts, best);
}

}  // namespace eprqkd::gf2
