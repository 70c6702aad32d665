#include "eprc/protocol.hpp"

#include <cmath>
#include <utility>

#include "eprc/parallel.hpp"

namespace eprc {

namespace {

// 95% Wilson score interval for e successes out of n.
std::pair<double, double> wilson_interval(std::size_t e, std::size_t n) {
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(e) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

DensityOperator computational_ensemble() {
  return density_from_ensemble({{0.5, ket_zero()}, {0.5, ket_one()}});
}

DensityOperator diagonal_ensemble() {
  return density_from_ensemble({{0.5, ket_plus()}, {0.5, ket_minus()}});
}

// Input (x) EPR, CNOT(0->1), H(0): ready for the Bell measurement on
// qubits 0 and 1.
PureState teleport_pre_measurement(const PureState& input) {
  if (input.num_qubits() != 1)
    throw std::invalid_argument("teleport: input must be a single qubit");
  PureState reg = tensor_with(input, epr_pair());
  reg = apply_cnot(reg, 0, 1);
  return apply_single_qubit(reg, GateMatrix::hadamard(), 0);
}

PureState pauli_correct(const PureState& bob, int m1, int m2) {
  PureState out = bob;
  if (m2 == 1) out = apply_single_qubit(out, GateMatrix::pauli_x(), 0);
  if (m1 == 1) out = apply_single_qubit(out, GateMatrix::pauli_z(), 0);
  return out;
}

}  // namespace

std::pair<int, PureState> alice_prepare_and_measure(BasisChoice basis,
                                                    RngStream& rng) {
  PureState shared = epr_pair();
  if (basis == BasisChoice::Diagonal)
    shared = apply_single_qubit(shared, GateMatrix::hadamard(), 0);
  auto [record, post] = measure_qubit(shared, 0, rng);
  return {record.outcome, factor_out_qubit(post, 0, record.outcome)};
}

GroupRecord transmit_group(BasisChoice basis, std::size_t n,
                           const CascadeConfig& cfg, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("transmit_group: n must be >= 1");
  std::vector<TrialRecord> trials;
  trials.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    auto [outcome, bob] = alice_prepare_and_measure(basis, rng);
    CascadeResult res = run_cascade(bob, cfg, rng);
    trials.push_back(TrialRecord{basis, outcome, std::move(res.outcomes),
                                 res.zero_count});
  }
  return GroupRecord{basis, std::move(trials)};
}

Verdict classify_group(const GroupRecord& group,
                       const CountDistribution& d_comp,
                       const CountDistribution& d_diag, RngStream& rng) {
  if (group.trials.empty())
    throw std::invalid_argument("classify_group: empty group");
  std::vector<int> zero_counts;
  zero_counts.reserve(group.trials.size());
  for (const auto& t : group.trials) zero_counts.push_back(t.bob_zero_count);
  const double llr = log_likelihood_ratio(zero_counts, d_comp, d_diag);
  BasisChoice guess;
  if (llr > 0.0)
    guess = BasisChoice::Computational;
  else if (llr < 0.0)
    guess = BasisChoice::Diagonal;
  else
    guess = rng.uniform() < 0.5 ? BasisChoice::Computational
                                : BasisChoice::Diagonal;
  const int rounds = static_cast<int>(group.trials.front().bob_outcomes.size());
  SecondLevelSummary summary =
      second_level_summary(empirical_distribution(zero_counts, rounds));
  return Verdict{guess, llr, std::move(summary)};
}

TransmissionReport run_transmission_experiment(std::size_t num_bits,
                                               std::size_t group_size,
                                               const CascadeConfig& cfg,
                                               const RngStream& rng,
                                               std::size_t num_threads) {
  if (num_bits < 1)
    throw std::invalid_argument(
        "run_transmission_experiment: num_bits must be >= 1");
  if (group_size < 1)
    throw std::invalid_argument(
        "run_transmission_experiment: group_size must be >= 1");
  const CountDistribution d_comp =
      exact_count_distribution(computational_ensemble(), cfg);
  const CountDistribution d_diag =
      exact_count_distribution(diagonal_ensemble(), cfg);

  std::vector<int> sent(num_bits), decoded(num_bits);
  std::vector<GroupRecord> groups(num_bits,
                                  GroupRecord{BasisChoice::Computational, {}});
  parallel_for(num_bits, num_threads, [&](std::size_t j) {
    RngStream stream = rng.substream(j);
    const int bit = stream.uniform() < 0.5 ? 0 : 1;
    const BasisChoice basis =
        bit == 0 ? BasisChoice::Computational : BasisChoice::Diagonal;
    GroupRecord group = transmit_group(basis, group_size, cfg, stream);
    const Verdict verdict = classify_group(group, d_comp, d_diag, stream);
    sent[j] = bit;
    decoded[j] = verdict.guessed_basis == BasisChoice::Computational ? 0 : 1;
    groups[j] = std::move(group);
  });

  std::size_t errors = 0;
  for (std::size_t j = 0; j < num_bits; ++j)
    if (sent[j] != decoded[j]) ++errors;
  const double ber = static_cast<double>(errors) / static_cast<double>(num_bits);
  const auto [lo, hi] = wilson_interval(errors, num_bits);
  return TransmissionReport{num_bits,  group_size, std::move(sent),
                            std::move(decoded), errors, ber,
                            lo,        hi,       std::move(groups)};
}

AuditReport no_signaling_audit(const CascadeConfig& cfg,
                               std::size_t branch_budget) {
  const DensityOperator comp = computational_ensemble();
  const DensityOperator diag = diagonal_ensemble();
  CountDistribution d_comp = exact_count_distribution(comp, cfg, branch_budget);
  CountDistribution d_diag = exact_count_distribution(diag, cfg, branch_budget);
  double max_diff = 0.0;
  for (int c = 0; c <= cfg.rounds; ++c)
    max_diff = std::max(max_diff, std::abs(d_comp.at(c) - d_diag.at(c)));
  const std::vector<double> s_comp =
      exact_sequence_distribution(comp, cfg, branch_budget);
  const std::vector<double> s_diag =
      exact_sequence_distribution(diag, cfg, branch_budget);
  double seq_diff = 0.0;
  for (std::size_t i = 0; i < s_comp.size(); ++i)
    seq_diff = std::max(seq_diff, std::abs(s_comp[i] - s_diag[i]));
  return AuditReport{std::move(d_comp), std::move(d_diag), max_diff, seq_diff};
}

double teleport_with_ccc(const PureState& input, RngStream& rng) {
  PureState reg = teleport_pre_measurement(input);
  auto [rec1, post1] = measure_qubit(reg, 0, rng);
  auto [rec2, post2] = measure_qubit(post1, 1, rng);
  PureState bob = factor_out_qubit(
      factor_out_qubit(post2, 0, rec1.outcome), 0, rec2.outcome);
  return state_fidelity(input, pauli_correct(bob, rec1.outcome, rec2.outcome));
}

std::array<TeleportBranch, 4> teleport_branches(const PureState& input) {
  const PureState reg = teleport_pre_measurement(input);
  std::array<TeleportBranch, 4> branches = {
      TeleportBranch{0, 0, 0.0, ket_zero(), ket_zero()},
      TeleportBranch{0, 1, 0.0, ket_zero(), ket_zero()},
      TeleportBranch{1, 0, 0.0, ket_zero(), ket_zero()},
      TeleportBranch{1, 1, 0.0, ket_zero(), ket_zero()}};
  for (int m1 = 0; m1 < 2; ++m1) {
    for (int m2 = 0; m2 < 2; ++m2) {
      auto [p1, s1] = project_qubit(reg, 0, m1);
      auto [p2, s2] = project_qubit(s1, 1, m2);
      PureState bob =
          factor_out_qubit(factor_out_qubit(s2, 0, m1), 0, m2);
      TeleportBranch& br = branches[m1 * 2 + m2];
      br.probability = p1 * p2;
      br.bob_corrected = pauli_correct(bob, m1, m2);
      br.bob_uncorrected = std::move(bob);
    }
  }
  return branches;
}

}  // namespace eprc
