#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include "eprqkd/cli.hpp"
#include "eprqkd/errors.hpp"

namespace eprqkd::cli {

SessionRecord to_record(const protocol::SessionOutcome& o) {
  return {o.seed,       o.n,         o.s,       o.r,           o.m,         o.qber,
          o.validated(), o.fault(),  o.pad_consumed, o.net_gain, o.keys_equal()};
}

std::string format_record(const SessionRecord& rec) {
  char qber[32];
  std::snprintf(qber, sizeof qber, "%.17g", rec.qber);
  std::ostringstream out;
  out << rec.seed << ',' << rec.n << ',' << rec.s << ',' << rec.r << ',' << rec.m << ',' << qber
      << ',' << (rec.validated ? "true" : "false") << ',' << (rec.fault ? "true" : "false") << ','
      << rec.pad_consumed << ',' << rec.net_gain << ',' << (rec.keys_equal ? "true" : "false");
  return out.str();
}

void write_session_csv(std::ostream& out, const std::vector<SessionRecord>& records) {
  out << kSessionCsvHeader << '\n';
  for (const auto& rec : records) out << format_record(rec) << '\n';
}

namespace {

template <class T>
T parse_field(std::string_view field, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ConfigError("CSV line " + std::to_string(line) + ": bad field '" + std::string(field) +
                      "'");
  }
  return value;
}

bool parse_flag(std::string_view field, std::size_t line) {
  if (field == "true") return true;
  if (field == "false") return false;
  throw ConfigError("CSV line " + std::to_string(line) + ": expected true/false");
}

}  // namespace

std::vector<SessionRecord> parse_session_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kSessionCsvHeader) {
    throw ConfigError("CSV header mismatch");
  }
  std::vector<SessionRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 11) throw ConfigError("CSV line " + std::to_string(line_no) + ": 11 fields expected");
    SessionRecord rec;
    rec.seed = parse_field<std::uint64_t>(f[0], line_no);
    rec.n = parse_field<std::size_t>(f[1], line_no);
    rec.s = parse_field<std::size_t>(f[2], line_no);
    rec.r = parse_field<std::size_t>(f[3], line_no);
    rec.m = parse_field<std::size_t>(f[4], line_no);
    rec.qber = parse_field<double>(f[5], line_no);
    rec.validated = parse_flag(f[6], line_no);
    rec.fault = parse_flag(f[7], line_no);
    rec.pad_consumed = parse_field<std::size_t>(f[8], line_no);
    rec.net_gain = parse_field<long long>(f[9], line_no);
    rec.keys_equal = parse_flag(f[10], line_no);
    records.push_back(rec);
  }
  return records;
}

Aggregate aggregate(const std::vector<SessionRecord>& records) {
  Aggregate agg;
  agg.sessions = records.size();
  if (records.empty()) return agg;
  double qber = 0.0;
  double gain = 0.0;
  std::size_t validated = 0;
  for (const auto& rec : records) {
    qber += rec.qber;
    gain += static_cast<double>(rec.net_gain);
    if (rec.validated) ++validated;
    if (rec.fault) ++agg.faults;
  }
  const auto count = static_cast<double>(records.size());
  agg.mean_qber = qber / count;
  agg.mean_net_gain = gain / count;
  agg.validation_rate = static_cast<double>(validated) / count;
  return agg;
}

}  // namespace eprqkd::cli
