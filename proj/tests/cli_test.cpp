#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "eprc/cli.hpp"
#include "json.hpp"

using namespace eprc;
using eprc::cli::parse_config;
using eprc::cli::run_command;
using eprc::cli::Report;
using eprc::cli::RunConfig;

namespace {

constexpr double kTol = 1e-12;

Report run(const std::vector<std::string>& args) {
  return run_command(parse_config(args));
}

}  // namespace

TEST_CASE("defaults fill in the standard ancilla and rounds") {
  const RunConfig cfg = parse_config({"exact", "--state", "+", "--rounds", "5"});
  CHECK(cfg.command == "exact");
  CHECK(cfg.rounds == 5);
  CHECK(std::abs(cfg.ancilla_a - Amplitude(1.0 / std::sqrt(5.0))) <= kTol);
  CHECK(std::abs(cfg.ancilla_b - Amplitude(2.0 / std::sqrt(5.0))) <= kTol);
  CHECK(cfg.state == "+");
  CHECK(cfg.seed == 1);
  CHECK(cfg.format == "json");
}

TEST_CASE("ancilla parsing accepts real and complex forms") {
  const RunConfig real = parse_config({"audit", "--ancilla", "3,4"});
  CHECK(std::abs(real.ancilla_a - Amplitude(0.6)) <= kTol);
  CHECK(std::abs(real.ancilla_b - Amplitude(0.8)) <= kTol);
  const RunConfig complex4 =
      parse_config({"audit", "--ancilla", "0,1,2,0"});
  CHECK(std::abs(complex4.ancilla_a - Amplitude(0.0, 1.0 / std::sqrt(5.0))) <=
        kTol);
  CHECK_THROWS_AS(parse_config({"audit", "--ancilla", "1,2,3"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"audit", "--ancilla", "1,x"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"audit", "--ancilla", "0,0"}),
                  std::invalid_argument);
}

TEST_CASE("bad arguments are rejected") {
  CHECK_THROWS_AS(parse_config({"simulate", "--trials", "0"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"exact", "--state", "x"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"exact", "--rounds", "0"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"frobnicate"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"exact", "--wat"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({}), std::invalid_argument);
  CHECK_THROWS_AS(
      parse_config({"exact", "--state", "0", "--amp", "1,0,0,0"}),
      std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"audit", "--format", "csv"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"exact", "--format", "xml"}),
                  std::invalid_argument);
}

TEST_CASE("amp states are normalized and override the named state") {
  const RunConfig cfg = parse_config({"exact", "--amp", "1,0,1,0"});
  const PureState s = eprc::cli::input_state(cfg);
  CHECK(std::abs(s.amplitude(0) - Amplitude(1.0 / std::sqrt(2.0))) <= kTol);
}

TEST_CASE("exact command reproduces the binomial law") {
  const Report report = run({"exact", "--state", "0", "--rounds", "5"});
  const auto& res = std::get<eprc::cli::ExactResult>(report.result);
  const std::vector<double> want = {0.32768, 0.4096, 0.2048,
                                    0.0512,  0.0064, 0.00032};
  for (int c = 0; c <= 5; ++c)
    CHECK(std::abs(res.distribution.at(c) - want[c]) <= kTol);
}

TEST_CASE("audit command reports no detectable difference") {
  const Report report = run({"audit", "--rounds", "5", "--format", "json"});
  const auto& res = std::get<eprc::cli::AuditResult>(report.result);
  CHECK(res.report.max_abs_difference <= kTol);
  CHECK(res.report.sequence_distribution_difference <= kTol);
}

TEST_CASE("teleport command reports unit fidelity") {
  const Report report = run({"teleport", "--trials", "100", "--seed", "9"});
  const auto& res = std::get<eprc::cli::TeleportResult>(report.result);
  CHECK(res.trials == 100);
  CHECK(res.min_fidelity >= 1.0 - kTol);
  CHECK(res.max_fidelity <= 1.0 + kTol);
}

TEST_CASE("simulate command passes its own goodness of fit") {
  const Report report = run({"simulate", "--state", "1", "--trials", "20000",
                             "--seed", "1234"});
  const auto& res = std::get<eprc::cli::SimulateResult>(report.result);
  CHECK(res.empirical.total == 20000);
  CHECK(res.tv_distance <= 0.02);
  CHECK(res.gof.p_value > 0.001);
  CHECK(res.trial_zero_counts.size() == 20000);
}

TEST_CASE("json report parses, echoes the config, and is byte-stable") {
  const std::vector<std::string> args = {"simulate", "--state",  "+",
                                         "--trials", "500",      "--seed",
                                         "77",       "--rounds", "4"};
  const Report report = run(args);
  const std::string text1 = eprc::cli::report_to_string(report);
  const std::string text2 = eprc::cli::report_to_string(run(args));
  CHECK(text1 == text2);

  const nlohmann::json parsed = nlohmann::json::parse(text1);
  CHECK(parsed.at("command") == "simulate");
  CHECK(parsed.at("seed") == 77);
  CHECK(parsed.at("config").at("rounds") == 4);
  CHECK(parsed.at("config").at("state") == "+");
  CHECK(parsed.at("config").at("trials") == 500);
  CHECK(parsed.at("results").at("empirical_counts").size() == 5);
  const double tv = parsed.at("results").at("total_variation").get<double>();
  CHECK(std::abs(tv - std::get<eprc::cli::SimulateResult>(report.result)
                          .tv_distance) <= 1e-15);
}

TEST_CASE("the echoed config reproduces the report bit for bit") {
  const Report first = run({"transmit", "--bits", "20", "--group-size", "3",
                            "--seed", "4242"});
  const nlohmann::json echo =
      nlohmann::json::parse(eprc::cli::report_to_string(first))["config"];
  RunConfig cfg;
  cfg.command = echo.at("command");
  cfg.rounds = echo.at("rounds");
  cfg.ancilla_a = Amplitude(echo.at("ancilla_a")[0], echo.at("ancilla_a")[1]);
  cfg.ancilla_b = Amplitude(echo.at("ancilla_b")[0], echo.at("ancilla_b")[1]);
  cfg.num_bits = echo.at("num_bits");
  cfg.group_size = echo.at("group_size");
  cfg.seed = echo.at("seed");
  cfg.format = echo.at("format");
  const Report second = run_command(cfg);
  CHECK(eprc::cli::report_to_string(first) ==
        eprc::cli::report_to_string(second));
}

TEST_CASE("transmit json carries the sent and decoded bit sequences") {
  const Report report =
      run({"transmit", "--bits", "25", "--group-size", "2", "--seed", "8"});
  const nlohmann::json parsed =
      nlohmann::json::parse(eprc::cli::report_to_string(report));
  const std::string sent = parsed.at("results").at("sent_bits");
  const std::string decoded = parsed.at("results").at("decoded_bits");
  CHECK(sent.size() == 25);
  CHECK(decoded.size() == 25);
  int mismatches = 0;
  for (std::size_t i = 0; i < sent.size(); ++i) mismatches += sent[i] != decoded[i];
  CHECK(mismatches ==
        parsed.at("results").at("bit_errors").get<int>());
}

TEST_CASE("csv output carries one row per trial") {
  const Report report = run({"transmit", "--bits", "6", "--group-size", "4",
                             "--seed", "5", "--format", "csv"});
  std::istringstream lines(eprc::cli::report_to_string(report));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "trial_index,alice_basis,alice_outcome,outcomes,zero_count");
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6 * 4);

  const Report sim = run({"simulate", "--trials", "64", "--seed", "5",
                          "--format", "csv"});
  std::istringstream sim_lines(eprc::cli::report_to_string(sim));
  std::getline(sim_lines, line);
  rows = 0;
  while (std::getline(sim_lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 64);
}

TEST_CASE("too few trials for the goodness of fit is a config-level error") {
  CHECK_THROWS_AS(run({"simulate", "--trials", "4", "--seed", "5"}),
                  std::invalid_argument);
}

TEST_CASE("exit codes are mapped by exception type") {
  CHECK(eprc::cli::exit_code_for_exception(
            std::invalid_argument("bad flag")) == 1);
  CHECK(eprc::cli::exit_code_for_exception(std::out_of_range("idx")) == 1);
  CHECK(eprc::cli::exit_code_for_exception(branch_budget_error("too deep")) ==
        1);
  CHECK(eprc::cli::exit_code_for_exception(eprc::cli::io_error("disk")) == 1);
  CHECK(eprc::cli::exit_code_for_exception(invariant_error("broken")) == 2);
  CHECK(eprc::cli::exit_code_for_exception(std::runtime_error("other")) == 2);
}

TEST_CASE("thread cap does not change the payload") {
  const std::vector<std::string> args = {"simulate", "--trials", "2000",
                                         "--seed", "31", "--state", "-"};
  setenv("EPR_CASCADE_THREADS", "1", 1);
  const std::string single = eprc::cli::report_to_string(run(args));
  setenv("EPR_CASCADE_THREADS", "4", 1);
  const std::string quad = eprc::cli::report_to_string(run(args));
  unsetenv("EPR_CASCADE_THREADS");
  CHECK(single == quad);
}
