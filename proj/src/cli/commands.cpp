#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "eprqkd/cli.hpp"
#include "eprqkd/errors.hpp"

namespace eprqkd::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

RunConfig load_with_overrides(const std::string& path, const RunOverrides& overrides) {
  RunConfig config = load_config(path);
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.sessions) {
    if (*overrides.sessions == 0) throw ConfigError("--sessions must be positive");
    config.sessions = *overrides.sessions;
  }
  if (overrides.out_path) config.out_path = *overrides.out_path;
  return config;
}

// Writes `content` to path (or `fallback` when path is empty).
void emit(const std::string& path, const std::string& content, std::ostream& fallback) {
  if (path.empty()) {
    fallback << content;
    return;
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw ConfigError("cannot write output file: " + path);
  file << content;
}

}  // namespace

std::uint64_t session_seed(std::uint64_t master, std::size_t index) {
  return derive_seed(master, index);
}

std::vector<protocol::SessionOutcome> run_sessions(const protocol::SessionSetup& setup,
                                                   const RunConfig& config) {
  std::vector<protocol::SessionOutcome> outcomes(config.sessions);
  std::size_t workers = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, config.sessions);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < outcomes.size(); i = next++) {
      outcomes[i] = protocol::run_session(setup, config.source, config.options,
                                          session_seed(config.seed, i));
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  return outcomes;
}

int cmd_bounds(const BoundsArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (!(args.epsilon >= 0.0 && args.epsilon < 0.25)) {
      throw ParameterError("epsilon must satisfy 0 <= epsilon < 1/4");
    }
    const double th = bounds::theta(static_cast<double>(args.r), args.tau);
    const auto bound = bounds::entropy_lower_bound(args.m, th);
    out << "r = " << args.r << '\n'
        << "tau = " << fmt(args.tau) << '\n'
        << "m = " << args.m << '\n'
        << "theta = " << fmt(th) << '\n'
        << "entropy_bound_raw = " << fmt(bound.raw) << '\n'
        << "entropy_bound = " << fmt(bound.clamped) << '\n';
    try {
      const auto p = bounds::derive_params(args.m, args.epsilon, args.tau, args.tau_s, args.r);
      out << "epsilon = " << fmt(p.epsilon) << '\n'
          << "tau_s = " << fmt(p.tau_s) << '\n'
          << "s = " << p.s << '\n'
          << "n = " << p.n << '\n'
          << "d_K = " << p.d_k << '\n'
          << "q_min = " << p.q_min << '\n'
          << "feasible_m_max = " << p.feasible_m_max << '\n'
          << "feasible = " << (p.feasible ? "true" : "false") << '\n';
    } catch (const ParameterError& ex) {
      out << "setup = unavailable (" << ex.what() << ")\n";
    }
    out << "net_gain_margin = " << fmt(bounds::net_gain_margin(args.epsilon)) << '\n'
        << "epsilon_star = " << fmt(bounds::epsilon_star(1e-9)) << '\n';
    if (args.epsilon_grid) {
      const auto grid = parse_grid(*args.epsilon_grid);
      out << "\nepsilon,net_gain_margin\n";
      for (double eps : grid) out << fmt(eps) << ',' << fmt(bounds::net_gain_margin(eps)) << '\n';
    }
    return kExitOk;
  } catch (const std::exception& ex) {
    err << "bounds: " << ex.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_genmat(const GenmatArgs& args, std::ostream& out, std::ostream& err) {
  try {
    Rng rng(args.seed);
    const auto K = gf2::generate_pa_matrix(args.m, args.r, args.d_k, rng,
                                           {.max_attempts = args.attempts});
    emit(args.out_path, gf2::serialize(K), out);
    return kExitOk;
  } catch (const MatrixSearchFailed& ex) {
    err << "genmat: " << ex.what() << '\n';
    return kExitRequirementNotMet;
  } catch (const std::exception& ex) {
    err << "genmat: " << ex.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_verify(const std::string& matrix_path, std::optional<std::size_t> d_k, std::ostream& out,
               std::ostream& err) {
  try {
    const auto K = gf2::read_matrix_file(matrix_path);
    const auto report = gf2::min_combination_weight(K);
    const bool ok = report.full_rank && (!d_k || report.min_weight >= *d_k);
    out << "rows = " << K.rows() << '\n'
        << "cols = " << K.cols() << '\n'
        << "min_weight = " << report.min_weight << '\n'
        << "witness = " << report.witness.to_string() << '\n'
        << "full_rank = " << (report.full_rank ? "true" : "false") << '\n';
    if (d_k) out << "d_K = " << *d_k << '\n';
    out << "verified = " << (ok ? "true" : "false") << '\n';
    return ok ? kExitOk : kExitRequirementNotMet;
  } catch (const std::exception& ex) {
    err << "verify: " << ex.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_run(const std::string& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err) {
  RunConfig config;
  std::optional<protocol::SessionSetup> setup;
  try {
    config = load_with_overrides(config_path, overrides);
    setup.emplace(build_setup(config));
  } catch (const std::exception& ex) {
    err << "run: " << ex.what() << '\n';
    return kExitConfigError;
  }

  const auto outcomes = run_sessions(*setup, config);
  std::vector<SessionRecord> records;
  records.reserve(outcomes.size());
  bool any_fault = false;
  for (const auto& o : outcomes) {
    records.push_back(to_record(o));
    if (o.fault()) {
      any_fault = true;
      err << "run: session seed " << o.seed << " fault: " << o.fault_message << '\n';
    }
  }

  try {
    std::ostringstream csv;
    write_session_csv(csv, records);
    emit(config.out_path, csv.str(), out);
    if (!config.transcript_dir.empty()) {
      std::filesystem::create_directories(config.transcript_dir);
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto path = std::filesystem::path(config.transcript_dir) /
                          ("session_" + std::to_string(i + 1) + ".log");
        emit(path.string(), outcomes[i].transcript.channel_log.to_string(), out);
      }
    }
  } catch (const std::exception& ex) {
    err << "run: " << ex.what() << '\n';
    return kExitConfigError;
  }

  const auto agg = aggregate(records);
  err << "run: " << agg.sessions << " sessions, validation rate " << fmt(agg.validation_rate)
      << ", mean qber " << fmt(agg.mean_qber) << ", mean net gain " << fmt(agg.mean_net_gain)
      << '\n';
  return any_fault ? kExitFault : kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::string& grid_text, const RunOverrides& overrides, std::ostream& out,
              std::ostream& err) {
  RunConfig base;
  std::vector<double> grid;
  try {
    base = load_with_overrides(config_path, overrides);
    grid = parse_grid(grid_text);
    static const char* const kParameters[] = {"epsilon", "tau", "r", "intercept_probability",
                                              "delta"};
    if (std::find(std::begin(kParameters), std::end(kParameters), parameter) ==
        std::end(kParameters)) {
      throw ConfigError("unknown sweep parameter '" + parameter +
                        "' (epsilon, tau, r, intercept_probability, delta)");
    }
  } catch (const std::exception& ex) {
    err << "sweep: " << ex.what() << '\n';
    return kExitConfigError;
  }

  std::ostringstream csv;
  csv << kSweepCsvHeader << '\n';
  bool any_fault = false;
  for (double value : grid) {
    RunConfig config = base;
    std::optional<protocol::SessionSetup> setup;
    try {
      if (parameter == "epsilon") {
        config.epsilon = value;
      } else if (parameter == "tau") {
        config.tau = value;
      } else if (parameter == "r") {
        if (!(value >= 1.0) || value != static_cast<double>(static_cast<std::size_t>(value))) {
          throw ConfigError("r grid values must be positive integers");
        }
        config.r = static_cast<std::size_t>(value);
      } else if (parameter == "intercept_probability") {
        config.source = quantum::InterceptResendSource{value};
      } else {
        config.source = quantum::BellDiagonalSource{{1.0 - value, 0.0, 0.0, value}};
      }
      setup.emplace(build_setup(config));
    } catch (const std::exception& ex) {
      err << "sweep: " << parameter << " = " << fmt(value) << ": " << ex.what() << '\n';
      return kExitConfigError;
    }
    std::vector<SessionRecord> records;
    for (const auto& o : run_sessions(*setup, config)) {
      records.push_back(to_record(o));
      any_fault = any_fault || o.fault();
    }
    const auto agg = aggregate(records);
    const double th = bounds::theta(static_cast<double>(config.r), config.tau);
    csv << parameter << ',' << fmt(value) << ',' << agg.sessions << ',' << fmt(th) << ','
        << fmt(agg.mean_qber) << ',' << fmt(agg.validation_rate) << ','
        << fmt(agg.mean_net_gain) << ',' << agg.faults << '\n';
  }

  try {
    emit(base.out_path, csv.str(), out);
  } catch (const std::exception& ex) {
    err << "sweep: " << ex.what() << '\n';
    return kExitConfigError;
  }
  return any_fault ? kExitFault : kExitOk;
}

}  // namespace eprqkd::cli
