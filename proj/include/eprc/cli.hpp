#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "eprc/distinguisher.hpp"
#include "eprc/protocol.hpp"
#include "eprc/qcore.hpp"
#include "eprc/stats.hpp"

namespace eprc::cli {

inline constexpr const char* kToolVersion = "1.0.0";

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fully resolved run configuration. Re-running with the values echoed in a
// JSON report reproduces that report byte for byte.
struct RunConfig {
  std::string command;
  int rounds = 5;
  Amplitude ancilla_a{0.0, 0.0};  // normalized; defaults set by parse_config
  Amplitude ancilla_b{0.0, 0.0};
  std::string state = "0";  // named input state: 0, 1, +, -
  std::optional<std::array<double, 4>> state_amplitudes;  // overrides `state`
  std::uint64_t trials = 0;
  std::uint64_t group_size = 10;
  std::uint64_t num_bits = 1000;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string output_path;  // empty = stdout
};

struct ExactResult {
  CountDistribution distribution;
};

struct SimulateResult {
  CountDistribution exact;
  EmpiricalDistribution empirical;
  double tv_distance;
  HypothesisTestResult gof;
  SecondLevelSummary summary;
  std::vector<std::uint8_t> trial_zero_counts;  // ordinal order
  std::vector<std::uint32_t> trial_outcomes;    // bit r = outcome of round r
};

struct AuditResult {
  AuditReport report;
};

struct TransmitResult {
  TransmissionReport report;
};

struct TeleportResult {
  std::uint64_t trials;
  double min_fidelity;
  double mean_fidelity;
  double max_fidelity;
};

struct Report {
  RunConfig config;
  std::variant<ExactResult, SimulateResult, AuditResult, TransmitResult,
               TeleportResult>
      result;
};

// Parses subcommand + flags into a validated RunConfig. Throws
// std::invalid_argument on anything the CLI would reject (exit code 1).
RunConfig parse_config(const std::vector<std::string>& args);

// The single-qubit input state selected by --state / --amp.
PureState input_state(const RunConfig& cfg);

// Executes the configured subcommand. Deterministic given cfg.seed.
Report run_command(const RunConfig& cfg);

// JSON (stable key order, 17-significant-digit numbers) or CSV per
// cfg.format.
void emit_report(const Report& report, std::ostream& out);
std::string report_to_string(const Report& report);

// Exit-code contract: 0 success, 1 user/config error, 2 broken internal
// invariant.
int exit_code_for_exception(const std::exception& e);

int main_entry(int argc, const char* const* argv);

}  // namespace eprc::cli
