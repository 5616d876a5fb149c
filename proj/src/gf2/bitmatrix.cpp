#include <algorithm>
#include <bit>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "eprqkd/errors.hpp"
#include "eprqkd/gf2.hpp"

namespace eprqkd::gf2 {

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVec(cols)) {}

BitMatrix::BitMatrix(std::vector<BitVec> rows) : rows_(std::move(rows)) {
  if (!rows_.empty()) cols_ = rows_.front().size();
  for (const auto& row : rows_) {
    if (row.size() != cols_) throw DimensionError("matrix rows have differing lengths");
  }
}

BitMatrix BitMatrix::random(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<BitVec> data;
  data.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) data.push_back(BitVec::random(cols, rng));
  return BitMatrix(std::move(data));
}

BitVec BitMatrix::combine_rows(const BitVec& coefficients) const {
  if (coefficients.size() != rows()) {
    throw DimensionError("coefficient vector has length " + std::to_string(coefficients.size()) +
                         ", matrix has " + std::to_string(rows()) + " rows");
  }
  BitVec out(cols_);
  for (std::size_t i = 0; i < rows(); ++i) {
    if (coefficients.get(i)) out ^= rows_[i];
  }
  return out;
}

BitVec matvec_mod2(const BitMatrix& K, const BitVec& x) {
  if (x.size() != K.cols()) {
    throw DimensionError("vector length " + std::to_string(x.size()) +
                         " does not match matrix columns " + std::to_string(K.cols()));
  }
  BitVec out(K.rows());
  for (std::size_t i = 0; i < K.rows(); ++i) out.set(i, K.row(i).dot(x));
  return out;
}

namespace {

// Row-reduces in place; returns pivot column of each rank row, in order.
std::vector<std::size_t> row_reduce(std::vector<BitVec>& rows, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t next = 0;
  for (std::size_t col = 0; col < cols && next < rows.size(); ++col) {
    std::size_t found = next;
    while (found < rows.size() && !rows[found].get(col)) ++found;
    if (found == rows.size()) continue;
    std::swap(rows[next], rows[found]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != next && rows[i].get(col)) rows[i] ^= rows[next];
    }
    pivots.push_back(col);
    ++next;
  }
  return pivots;
}

std::vector<BitVec> copy_rows(const BitMatrix& K) {
  std::vector<BitVec> rows;
  rows.reserve(K.rows());
  for (std::size_t i = 0; i < K.rows(); ++i) rows.push_back(K.row(i));
  return rows;
}

}  // namespace

std::size_t rank(const BitMatrix& K) {
  auto rows = copy_rows(K);
  return row_reduce(rows, K.cols()).size();
}

WeightReport min_combination_weight(const BitMatrix& K) {
  const std::size_t m = K.rows();
  if (m == 0) throw ParameterError("matrix has no rows");
  if (m > kExhaustiveRowLimit) {
    throw ParameterError("exhaustive weight verification is limited to " +
                         std::to_string(kExhaustiveRowLimit) + " rows (got " + std::to_string(m) +
                         "); screen larger matrices probabilistically instead");
  }

  WeightReport report;
  report.min_weight = std::numeric_limits<std::size_t>::max();
  BitVec combination(K.cols());
  std::uint64_t best_code = 0;
  std::uint64_t gray = 0;
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto row = static_cast<std::size_t>(std::countr_zero(step));
    combination ^= K.row(row);
    gray ^= std::uint64_t{1} << row;
    const std::size_t w = combination.weight();
    if (w < report.min_weight) {
      report.min_weight = w;
      best_code = gray;
      if (w == 0) break;
    }
  }
  report.witness = BitVec(m);
  for (std::size_t i = 0; i < m; ++i) report.witness.set(i, (best_code >> i) & 1U);
  report.full_rank = report.min_weight > 0;
  return report;
}

std::vector<BitVec> kernel_basis(const BitMatrix& K) {
  auto rows = copy_rows(K);
  const auto pivots = row_reduce(rows, K.cols());
  if (pivots.size() != K.rows()) {
    throw ParameterError("kernel basis requires full row rank (rank " +
                         std::to_string(pivots.size()) + " < " + std::to_string(K.rows()) + ")");
  }
  std::vector<bool> is_pivot(K.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;

  std::vector<BitVec> basis;
  for (std::size_t free = 0; free < K.cols(); ++free) {
    if (is_pivot[free]) continue;
    BitVec u(K.cols());
    u.set(free, true);
    // Reduced row i reads x[pivot_i] + sum_{free j} R[i][j] x[j] = 0.
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      if (rows[i].get(free)) u.set(pivots[i], true);
    }
    basis.push_back(std::move(u));
  }
  return basis;
}

std::string serialize(const BitMatrix& K) {
  std::ostringstream out;
  write_matrix(out, K);
  return out.str();
}

void write_matrix(std::ostream& out, const BitMatrix& K) {
  out << K.rows() << ' ' << K.cols() << '\n';
  for (std::size_t i = 0; i < K.rows(); ++i) out << K.row(i).to_string() << '\n';
}

BitMatrix parse_matrix(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("matrix file is empty");
  std::istringstream hdr(header);
  long long m = 0;
  long long r = 0;
  std::string trailing;
  if (!(hdr >> m >> r) || (hdr >> trailing) || m <= 0 || r <= 0) {
    throw ConfigError("matrix header must be two positive integers \"m r\"");
  }
  std::vector<BitVec> rows;
  std::string line;
  while (rows.size() < static_cast<std::size_t>(m) && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != static_cast<std::size_t>(r)) {
      throw ConfigError("matrix row " + std::to_string(rows.size() + 1) + " has " +
                        std::to_string(line.size()) + " characters, expected " +
                        std::to_string(r));
    }
    rows.push_back(BitVec::from_string(line));
  }
  if (rows.size() != static_cast<std::size_t>(m)) {
    throw ConfigError("matrix file has " + std::to_string(rows.size()) + " rows, header says " +
                      std::to_string(m));
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r") throw ConfigError("unexpected content after matrix rows");
  }
  return BitMatrix(std::move(rows));
}

BitMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str());
}

}  // namespace eprqkd::gf2
