#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "eprqkd/cli.hpp"
#include "eprqkd/errors.hpp"

namespace eprqkd::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string where(std::size_t line) { return "config line " + std::to_string(line) + ": "; }

double parse_double(std::string_view v, const std::string& ctx) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(ctx + "expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view v, const std::string& ctx) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(ctx + "expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view v, const std::string& ctx) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(ctx + "expected true/false, got '" + std::string(v) + "'");
}

std::vector<std::string_view> split(std::string_view v, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = v.find(sep);
    parts.push_back(trim(v.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    v.remove_prefix(pos + 1);
  }
  return parts;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ConfigError("grid is empty");
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("range grid must be start:stop:step");
    const double start = parse_double(parts[0], "grid: ");
    const double stop = parse_double(parts[1], "grid: ");
    const double step = parse_double(parts[2], "grid: ");
    if (!(step > 0.0) || stop < start) throw ConfigError("range grid needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>((stop - start) / step + 1e-9) + 1;
    for (std::size_t k = 0; k < count; ++k) grid.push_back(start + static_cast<double>(k) * step);
  } else {
    for (auto part : split(text, ',')) grid.push_back(parse_double(part, "grid: "));
  }
  return grid;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::string source_kind = "ideal";
  std::optional<std::array<double, 4>> bell_probs;
  std::optional<double> delta;
  std::optional<double> intercept;
  std::optional<std::string> script;

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where(line_no) + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string ctx = where(line_no) + key + ": ";
    if (value.empty()) throw ConfigError(ctx + "missing value");

    if (key == "m") {
      config.m = parse_u64(value, ctx);
    } else if (key == "epsilon") {
      config.epsilon = parse_double(value, ctx);
    } else if (key == "tau") {
      config.tau = parse_double(value, ctx);
    } else if (key == "tau_s") {
      config.tau_s = parse_double(value, ctx);
    } else if (key == "r") {
      config.r = parse_u64(value, ctx);
    } else if (key == "source") {
      source_kind = std::string(value);
    } else if (key == "bell_probabilities") {
      const auto parts = split(value, ',');
      if (parts.size() != 4) throw ConfigError(ctx + "expected four comma-separated values");
      std::array<double, 4> p{};
      for (std::size_t i = 0; i < 4; ++i) p[i] = parse_double(parts[i], ctx);
      bell_probs = p;
    } else if (key == "delta") {
      delta = parse_double(value, ctx);
    } else if (key == "intercept_probability") {
      intercept = parse_double(value, ctx);
    } else if (key == "script") {
      script = std::string(value);
    } else if (key == "estimation_fraction") {
      config.options.estimation_fraction = parse_double(value, ctx);
    } else if (key == "passes") {
      config.options.passes = parse_u64(value, ctx);
    } else if (key == "block_sizes") {
      config.options.block_sizes.clear();
      for (auto part : split(value, ',')) config.options.block_sizes.push_back(parse_u64(part, ctx));
    } else if (key == "confirm_round") {
      config.options.confirm_round = parse_bool(value, ctx);
    } else if (key == "abort_on_estimate") {
      config.options.abort_on_estimate = parse_bool(value, ctx);
    } else if (key == "pad_bits") {
      config.options.pad_bits = parse_u64(value, ctx);
    } else if (key == "seed") {
      config.seed = parse_u64(value, ctx);
    } else if (key == "sessions") {
      config.sessions = parse_u64(value, ctx);
    } else if (key == "out") {
      config.out_path = std::string(value);
    } else if (key == "transcript_dir") {
      config.transcript_dir = std::string(value);
    } else if (key == "matrix") {
      config.matrix_path = std::string(value);
    } else if (key == "matrix_attempts") {
      config.matrix_attempts = parse_u64(value, ctx);
    } else if (key == "threads") {
      config.threads = parse_u64(value, ctx);
    } else {
      throw ConfigError(ctx + "unknown key");
    }
  }

  if (source_kind == "ideal") {
    config.source = quantum::IdealSource{};
  } else if (source_kind == "bell_diagonal") {
    if (bell_probs && delta) throw ConfigError("give either bell_probabilities or delta, not both");
    if (delta) {
      config.source = quantum::BellDiagonalSource{{1.0 - *delta, 0.0, 0.0, *delta}};
    } else if (bell_probs) {
      config.source = quantum::BellDiagonalSource{*bell_probs};
    } else {
      throw ConfigError("bell_diagonal source needs bell_probabilities or delta");
    }
  } else if (source_kind == "scripted") {
    if (!script) throw ConfigError("scripted source needs script");
    config.source = quantum::ScriptedSource{quantum::BellString::parse(*script)};
  } else if (source_kind == "intercept_resend") {
    config.source = quantum::InterceptResendSource{intercept.value_or(1.0)};
  } else {
    throw ConfigError("unknown source '" + source_kind +
                      "' (ideal, bell_diagonal, scripted, intercept_resend)");
  }

  if (config.sessions == 0) throw ConfigError("sessions must be positive");
  validated_params(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

bounds::ProtocolParams validated_params(const RunConfig& config) {
  bounds::ProtocolParams params;
  try {
    params = bounds::derive_params(config.m, config.epsilon, config.tau, config.tau_s, config.r);
    quantum::validate_source(config.source);
    if (!(config.options.estimation_fraction > 0.0 && config.options.estimation_fraction < 1.0)) {
      throw ParameterError("estimation_fraction must lie in (0, 1)");
    }
    if (config.options.block_sizes.empty() && config.options.passes == 0) {
      throw ParameterError("passes must be positive");
    }
    if (!config.options.block_sizes.empty()) {
      cascade::ReconcileConfig probe;
      probe.block_sizes = config.options.block_sizes;
      probe.shuffle_seeds.assign(probe.block_sizes.size(), 0);
      probe.validate();
    }
  } catch (const ParameterError& ex) {
    throw ConfigError(std::string("invalid parameters: ") + ex.what());
  }
  if (config.m > gf2::kExhaustiveRowLimit) {
    throw ConfigError("m above " + std::to_string(gf2::kExhaustiveRowLimit) +
                      " cannot be verified exhaustively");
  }
  return params;
}

protocol::SessionSetup build_setup(const RunConfig& config) {
  const auto params = validated_params(config);
  gf2::BitMatrix K;
  if (!config.matrix_path.empty()) {
    K = gf2::read_matrix_file(config.matrix_path);
  } else {
    Rng rng(derive_seed(config.seed, kMatrixStream));
    try {
      K = gf2::generate_pa_matrix(params.m, params.r, params.d_k, rng,
                                  {.max_attempts = config.matrix_attempts});
    } catch (const MatrixSearchFailed& ex) {
      throw ConfigError(std::string("cannot build the privacy-amplification matrix: ") + ex.what());
    } catch (const ParameterError& ex) {
      throw ConfigError(std::string("cannot build the privacy-amplification matrix: ") + ex.what());
    }
  }
  try {
    return protocol::SessionSetup(params, std::move(K));
  } catch (const ParameterError& ex) {
    throw ConfigError(ex.what());
  }
}

}  // namespace eprqkd::cli
