// Acceptance suite: one criterion per run_criterion call, one PASS/FAIL line
// each. Exits nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "eprc/cli.hpp"
#include "eprc/distinguisher.hpp"
#include "eprc/parallel.hpp"
#include "eprc/protocol.hpp"
#include "eprc/qcore.hpp"
#include "eprc/stats.hpp"
#include "test_helpers.hpp"

using namespace eprc;

namespace {

int g_failures = 0;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

void require_close(double actual, double expected, double tol,
                   const std::string& what) {
  if (!(std::abs(actual - expected) <= tol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": got " << actual << ", want " << expected << " +/- "
        << tol;
    throw std::runtime_error(msg.str());
  }
}

void run_criterion(const std::string& name, double time_limit_s,
                   const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  try {
    body();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (time_limit_s > 0.0 && elapsed > time_limit_s) {
      std::printf("[FAIL] %s (took %.2fs, limit %.0fs)\n", name.c_str(),
                  elapsed, time_limit_s);
      ++g_failures;
      return;
    }
    std::printf("[PASS] %s (%.2fs)\n", name.c_str(), elapsed);
  } catch (const std::exception& e) {
    std::printf("[FAIL] %s: %s\n", name.c_str(), e.what());
    ++g_failures;
  }
}

const std::vector<double> kLawZero = {0.32768, 0.4096, 0.2048,
                                      0.0512,  0.0064, 0.00032};
const std::vector<double> kLawOne = {0.00032, 0.0064, 0.0512,
                                     0.2048,  0.4096, 0.32768};
const std::vector<double> kLawMixed = {0.164, 0.208, 0.128,
                                       0.128, 0.208, 0.164};

void criterion_branch_probabilities() {
  const AncillaSpec anc;
  const double inv_sqrt5 = 1.0 / std::sqrt(5.0);
  require_close(step_zero_probability(ket_zero(), anc), 0.2, 1e-12, "p(|0>)");
  require_close(step_zero_probability(ket_one(), anc), 0.8, 1e-12, "p(|1>)");
  require_close(step_zero_probability(ket_plus(), anc), 0.5, 1e-12, "p(|+>)");
  require_close(step_zero_probability(ket_minus(), anc), 0.5, 1e-12,
                "p(|->)");
  for (int sign : {+1, -1}) {
    const PureState low(1, {inv_sqrt5, sign * 2.0 * inv_sqrt5});
    const PureState high(1, {2.0 * inv_sqrt5, sign * inv_sqrt5});
    require_close(step_zero_probability(low, anc), 17.0 / 25.0, 1e-12,
                  "p((|0> +/- 2|1>)/sqrt5)");
    require_close(step_zero_probability(high, anc), 8.0 / 25.0, 1e-12,
                  "p((2|0> +/- |1>)/sqrt5)");
  }
}

void criterion_conditional_means() {
  RngStream rng(1002);
  const CascadeConfig cfg{5, AncillaSpec()};
  const GroupRecord group =
      transmit_group(BasisChoice::Computational, 20000, cfg, rng);
  double sum0 = 0.0, sum1 = 0.0;
  std::size_t n0 = 0, n1 = 0;
  for (const TrialRecord& t : group.trials) {
    if (t.alice_outcome == 0) {
      sum0 += t.bob_zero_count;
      ++n0;
    } else {
      sum1 += t.bob_zero_count;
      ++n1;
    }
  }
  require(n0 > 0 && n1 > 0, "both outcomes must occur");
  const double sigma0 = std::sqrt(5.0 * 0.2 * 0.8 / static_cast<double>(n0));
  const double sigma1 = std::sqrt(5.0 * 0.2 * 0.8 / static_cast<double>(n1));
  require_close(sum0 / static_cast<double>(n0), 1.0, 3.0 * sigma0,
                "E[zero_count | alice 0]");
  require_close(sum1 / static_cast<double>(n1), 4.0, 3.0 * sigma1,
                "E[zero_count | alice 1]");
}

void criterion_oracle_vs_closed_form() {
  const CascadeConfig cfg{5, AncillaSpec()};
  const CountDistribution d0 =
      exact_count_distribution(DensityOperator::from_pure(ket_zero()), cfg);
  const CountDistribution d1 =
      exact_count_distribution(DensityOperator::from_pure(ket_one()), cfg);
  for (int c = 0; c <= 5; ++c) {
    require_close(d0.at(c), kLawZero[c], 1e-12, "oracle(|0>) vs Bin(5,1/5)");
    require_close(d1.at(c), kLawOne[c], 1e-12, "oracle(|1>) vs Bin(5,4/5)");
    require_close(d0.at(c), test::binomial_pmf(5, c, 0.2), 1e-12,
                  "oracle(|0>) vs independent pmf");
    require_close(d1.at(c), test::binomial_pmf(5, c, 0.8), 1e-12,
                  "oracle(|1>) vs independent pmf");
  }
}

void criterion_no_signaling_audit() {
  const CascadeConfig cfg{5, AncillaSpec()};
  const AuditReport audit = no_signaling_audit(cfg);
  require(audit.max_abs_difference <= 1e-12,
          "zero-count laws of the two ensembles must agree");
  require(audit.sequence_distribution_difference <= 1e-12,
          "full sequence laws of the two ensembles must agree");
  // the published diagonal-ensemble mass, via the operator branch tree
  for (int c = 0; c <= 5; ++c)
    require_close(audit.d_diagonal.at(c), kLawMixed[c], 1e-12,
                  "diagonal-ensemble mass");
  // independent affinity decomposition: pure-state trees for |+> and |->
  const std::vector<double> plus = test::cascade_tree_reference(ket_plus(), cfg);
  const std::vector<double> minus =
      test::cascade_tree_reference(ket_minus(), cfg);
  for (int c = 0; c <= 5; ++c)
    require_close(0.5 * plus[c] + 0.5 * minus[c], audit.d_diagonal.at(c),
                  1e-12, "affinity decomposition vs branch tree");
}

void criterion_monte_carlo_convergence() {
  const CascadeConfig cfg{5, AncillaSpec()};
  const int n = 100000;
  const std::pair<const char*, PureState> inputs[] = {
      {"0", ket_zero()}, {"1", ket_one()}, {"+", ket_plus()},
      {"-", ket_minus()}};
  std::uint64_t seed = 501;
  for (const auto& [name, input] : inputs) {
    const CountDistribution law =
        exact_count_distribution(DensityOperator::from_pure(input), cfg);
    const RngStream master(seed++);
    std::vector<int> samples(n);
    parallel_for(n, resolve_thread_count(), [&](std::size_t i) {
      RngStream trial = master.substream(i);
      samples[i] = run_cascade(input, cfg, trial).zero_count;
    });
    const EmpiricalDistribution emp = empirical_distribution(samples, 5);
    const double tv = total_variation(to_distribution(emp), law);
    require(tv <= 0.01, std::string("TV for state ") + name + " is " +
                            std::to_string(tv));
    const HypothesisTestResult gof = chi_square_gof(emp, law);
    require(gof.p_value > 0.001, std::string("GOF p-value for state ") + name +
                                     " is " + std::to_string(gof.p_value));
  }
}

void criterion_end_to_end_ber() {
  const RngStream rng(2024);
  const TransmissionReport report = run_transmission_experiment(
      10000, 10, CascadeConfig{5, AncillaSpec()}, rng, resolve_thread_count());
  require(report.bit_error_rate >= 0.48 && report.bit_error_rate <= 0.52,
          "BER " + std::to_string(report.bit_error_rate) +
              " outside [0.48, 0.52]");
}

void criterion_property_suites() {
  RngStream rng(7007);
  const CascadeConfig cfg{5, AncillaSpec()};
  // unitarity + norm preservation + CNOT involution
  for (int rep = 0; rep < 100; ++rep) {
    RngStream trial = rng.substream(rep);
    const PureState s = random_state(3, trial);
    const GateMatrix u = test::random_unitary2(trial);
    require_close(apply_single_qubit(s, u, rep % 3).norm_squared(), 1.0, 1e-12,
                  "norm after unitary");
    const PureState flipped = apply_cnot(s, rep % 3, (rep + 1) % 3);
    require_close(flipped.norm_squared(), 1.0, 1e-12, "norm after CNOT");
    const PureState back = apply_cnot(flipped, rep % 3, (rep + 1) % 3);
    for (std::size_t i = 0; i < s.dimension(); ++i)
      require(std::abs(back.amplitude(i) - s.amplitude(i)) <= 1e-12,
              "CNOT involution");
  }
  // oracle affinity on 100 random density pairs
  for (int rep = 0; rep < 100; ++rep) {
    RngStream trial = rng.substream(1000 + rep);
    const DensityOperator r1 = test::random_density1(trial);
    const DensityOperator r2 = test::random_density1(trial);
    const double w = trial.uniform();
    std::vector<Amplitude> mixed(4);
    for (int i = 0; i < 4; ++i)
      mixed[i] = w * r1.entries()[i] + (1.0 - w) * r2.entries()[i];
    const CountDistribution dm =
        exact_count_distribution(DensityOperator(1, mixed), cfg);
    const CountDistribution d1 = exact_count_distribution(r1, cfg);
    const CountDistribution d2 = exact_count_distribution(r2, cfg);
    for (int c = 0; c <= cfg.rounds; ++c)
      require_close(dm.at(c), w * d1.at(c) + (1.0 - w) * d2.at(c), 1e-12,
                    "oracle affinity");
  }
  // Z-invariance
  const CountDistribution plus =
      exact_count_distribution(DensityOperator::from_pure(ket_plus()), cfg);
  const CountDistribution minus =
      exact_count_distribution(DensityOperator::from_pure(ket_minus()), cfg);
  for (int c = 0; c <= cfg.rounds; ++c)
    require_close(plus.at(c), minus.at(c), 1e-12, "D(|+>) = D(|->)");
  // measurement-average reconstruction
  for (int rep = 0; rep < 50; ++rep) {
    RngStream trial = rng.substream(2000 + rep);
    const PureState s = random_state(3, trial);
    const int measured = rep % 3;
    const auto [p0, p1] = outcome_probability(s, measured);
    const DensityOperator marg = reduced_density(s, measured);
    require_close(p0, marg.at(0, 0).real(), 1e-12,
                  "diagonal reconstruction (p0)");
    require_close(p1, marg.at(1, 1).real(), 1e-12,
                  "diagonal reconstruction (p1)");
    for (int other = 0; other < 3; ++other) {
      if (other == measured) continue;
      const DensityOperator before = reduced_density(s, other);
      std::vector<Amplitude> mixed(4, 0.0);
      for (int outcome = 0; outcome < 2; ++outcome) {
        const double p = outcome == 0 ? p0 : p1;
        if (p < 1e-14) continue;
        const auto [prob, post] = project_qubit(s, measured, outcome);
        const DensityOperator part = reduced_density(post, other);
        for (int i = 0; i < 4; ++i) mixed[i] += prob * part.entries()[i];
      }
      for (int i = 0; i < 4; ++i)
        require(std::abs(mixed[i] - before.entries()[i]) <= 1e-12,
                "unmeasured marginals survive measurement");
    }
  }
}

void criterion_teleportation() {
  RngStream rng(8008);
  for (int rep = 0; rep < 100; ++rep) {
    RngStream trial = rng.substream(rep);
    const PureState input = random_state(1, trial);
    for (const TeleportBranch& br : teleport_branches(input))
      require(state_fidelity(input, br.bob_corrected) >= 1.0 - 1e-12,
              "fidelity on a Bell branch");
    require(teleport_with_ccc(input, trial) >= 1.0 - 1e-12,
            "fidelity of a sampled run");
  }
}

void criterion_determinism() {
  const std::vector<std::string> simulate_args = {
      "simulate", "--state", "+", "--trials", "5000", "--seed", "11"};
  const std::string sim1 = eprc::cli::report_to_string(
      eprc::cli::run_command(eprc::cli::parse_config(simulate_args)));
  const std::string sim2 = eprc::cli::report_to_string(
      eprc::cli::run_command(eprc::cli::parse_config(simulate_args)));
  require(sim1 == sim2, "simulate reports must match byte for byte");
  const std::vector<std::string> transmit_args = {
      "transmit", "--bits", "200", "--group-size", "10", "--seed", "12"};
  const std::string tx1 = eprc::cli::report_to_string(
      eprc::cli::run_command(eprc::cli::parse_config(transmit_args)));
  const std::string tx2 = eprc::cli::report_to_string(
      eprc::cli::run_command(eprc::cli::parse_config(transmit_args)));
  require(tx1 == tx2, "transmit reports must match byte for byte");
}

}  // namespace

int main() {
  run_criterion("1. branch probabilities 1/5, 4/5, 1/2, 17/25, 8/25", 1.0,
                criterion_branch_probabilities);
  run_criterion("2. conditional zero-count means 1 and 4", 10.0,
                criterion_conditional_means);
  run_criterion("3. oracle equals the closed-form binomial laws", 0.0,
                criterion_oracle_vs_closed_form);
  run_criterion("4. no-signaling audit finds identical statistics", 0.0,
                criterion_no_signaling_audit);
  run_criterion("5. Monte Carlo converges to the oracle", 30.0,
                criterion_monte_carlo_convergence);
  run_criterion("6. end-to-end BER is indistinguishable from chance", 0.0,
                criterion_end_to_end_ber);
  run_criterion("7. property suites", 0.0, criterion_property_suites);
  run_criterion("8. teleportation baseline is exact", 0.0,
                criterion_teleportation);
  run_criterion("9. reports are deterministic", 0.0, criterion_determinism);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
