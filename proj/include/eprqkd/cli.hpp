#pragma once

// Command-line front end: flat key-value run configuration, session execution,
// sweeps, bounds tables and matrix tools.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eprqkd/bounds.hpp"
#include "eprqkd/protocol.hpp"
#include "eprqkd/quantum.hpp"

namespace eprqkd::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitFault = 3,
  kExitRequirementNotMet = 4,  ///< genmat search failed / verify rejected the matrix
};

struct RunConfig {
  std::size_t m = 8;
  double epsilon = 0.1;
  double tau = 0.2;
  double tau_s = 0.15;
  std::size_t r = 200;
  quantum::SourceModel source = quantum::IdealSource{};
  protocol::SessionOptions options;
  std::uint64_t seed = 1;
  std::size_t sessions = 1;
  std::string out_path;        ///< empty: stdout
  std::string transcript_dir;  ///< empty: no per-session logs
  std::string matrix_path;     ///< empty: generate from the seed
  std::size_t matrix_attempts = 10'000;
  std::size_t threads = 0;     ///< 0: hardware concurrency
};

/// Parses "key = value" lines (# starts a comment). Unknown keys, bad values
/// and parameter sets rejected by derive_params raise ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Re-checks the derived parameters and source model; throws ConfigError.
bounds::ProtocolParams validated_params(const RunConfig& config);

/// Loads or generates the privacy-amplification matrix and verifies it.
protocol::SessionSetup build_setup(const RunConfig& config);

inline constexpr std::uint64_t kMatrixStream = 0x6d61747269780000ULL;

/// Seed of session `index` under the configured master seed.
std::uint64_t session_seed(std::uint64_t master, std::size_t index);

/// Runs sessions [0, count) across worker threads; results in index order.
std::vector<protocol::SessionOutcome> run_sessions(const protocol::SessionSetup& setup,
                                                   const RunConfig& config);

// CSV records ------------------------------------------------------------------

inline constexpr std::string_view kSessionCsvHeader =
    "seed,n,s,r,m,qber,validated,fault,pad_consumed,net_gain,keys_equal";

struct SessionRecord {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t s = 0;
  std::size_t r = 0;
  std::size_t m = 0;
  double qber = 0.0;
  bool validated = false;
  bool fault = false;
  std::size_t pad_consumed = 0;
  long long net_gain = 0;
  bool keys_equal = false;

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

SessionRecord to_record(const protocol::SessionOutcome& outcome);
std::string format_record(const SessionRecord& record);
void write_session_csv(std::ostream& out, const std::vector<SessionRecord>& records);
/// Inverse of write_session_csv. Throws ConfigError on malformed input.
std::vector<SessionRecord> parse_session_csv(std::string_view text);

struct Aggregate {
  std::size_t sessions = 0;
  double mean_qber = 0.0;
  double validation_rate = 0.0;
  double mean_net_gain = 0.0;
  std::size_t faults = 0;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

Aggregate aggregate(const std::vector<SessionRecord>& records);

inline constexpr std::string_view kSweepCsvHeader =
    "parameter,value,sessions,theta,mean_qber,validation_rate,mean_net_gain,faults";

/// Comma list ("0,0.5,1") or inclusive range "start:stop:step".
std::vector<double> parse_grid(std::string_view text);

// Commands -----------------------------------------------------------------------

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sessions;
  std::optional<std::string> out_path;
};

struct BoundsArgs {
  double epsilon = 0.1;
  double tau = 0.2;
  double tau_s = 0.05;
  std::size_t r = 1000;
  std::size_t m = 64;
  std::optional<std::string> epsilon_grid;
};

int cmd_bounds(const BoundsArgs& args, std::ostream& out, std::ostream& err);

struct GenmatArgs {
  std::size_t m = 0;
  std::size_t r = 0;
  std::size_t d_k = 0;
  std::uint64_t seed = 1;
  std::size_t attempts = 10'000;
  std::string out_path;  ///< empty: stdout
};

int cmd_genmat(const GenmatArgs& args, std::ostream& out, std::ostream& err);

int cmd_verify(const std::string& matrix_path, std::optional<std::size_t> d_k, std::ostream& out,
               std::ostream& err);

int cmd_run(const std::string& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err);

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::string& grid, const RunOverrides& overrides, std::ostream& out,
              std::ostream& err);

}  // namespace eprqkd::cli
