#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "eprc/distinguisher.hpp"
#include "eprc/qcore.hpp"
#include "eprc/rng.hpp"
#include "eprc/stats.hpp"

namespace eprc {

// Alice's measurement basis: {|0>, |1>} or {(|0> +/- |1>)/sqrt(2)}.
enum class BasisChoice { Computational, Diagonal };

struct TrialRecord {
  BasisChoice alice_basis;
  int alice_outcome;
  std::vector<int> bob_outcomes;
  int bob_zero_count;
};

struct GroupRecord {
  BasisChoice basis;
  std::vector<TrialRecord> trials;
};

struct Verdict {
  BasisChoice guessed_basis;
  double log_likelihood_ratio;
  SecondLevelSummary summary;
};

struct AuditReport {
  CountDistribution d_computational;
  CountDistribution d_diagonal;
  double max_abs_difference;            // over zero-count mass
  double sequence_distribution_difference;  // over all 2^k outcome sequences
};

struct TransmissionReport {
  std::size_t num_bits;
  std::size_t group_size;
  std::vector<int> sent_bits;
  std::vector<int> decoded_bits;
  std::size_t bit_errors;
  double bit_error_rate;
  double ci_low, ci_high;  // 95% Wilson score interval
  std::vector<GroupRecord> groups;
};

struct TeleportBranch {
  int m1, m2;  // Alice's Bell-measurement bits
  double probability;
  PureState bob_uncorrected;
  PureState bob_corrected;
};

// Shares an EPR pair, measures Alice's half in `basis` (Diagonal = Hadamard
// then computational), and returns her outcome plus Bob's collapsed qubit.
std::pair<int, PureState> alice_prepare_and_measure(BasisChoice basis,
                                                    RngStream& rng);

// n independent trials of alice_prepare_and_measure + run_cascade under one
// basis; the stream is consumed sequentially across trials.
GroupRecord transmit_group(BasisChoice basis, std::size_t n,
                           const CascadeConfig& cfg, RngStream& rng);

// Log-likelihood-ratio classifier over the group's zero-counts: Computational
// when the LLR is positive, Diagonal when negative, and a single fair draw
// from `rng` on an exact tie.
Verdict classify_group(const GroupRecord& group,
                       const CountDistribution& d_comp,
                       const CountDistribution& d_diag, RngStream& rng);

// Sends num_bits random bits (0 -> Computational, 1 -> Diagonal), one group
// per bit, classifying each against the exact ensemble reference laws.
// Bit j uses rng.substream(j), so runs parallelize across bits without
// changing the result.
TransmissionReport run_transmission_experiment(std::size_t num_bits,
                                               std::size_t group_size,
                                               const CascadeConfig& cfg,
                                               const RngStream& rng,
                                               std::size_t num_threads = 1);

// Exact count and full outcome-sequence laws for the two ensembles Alice can
// steer Bob's qubit into: (|0><0| + |1><1|)/2 and (|+><+| + |-><-|)/2.
AuditReport no_signaling_audit(const CascadeConfig& cfg,
                               std::size_t branch_budget = kDefaultBranchBudget);

// Standard teleportation over a shared EPR pair with the two-bit classical
// correction; returns |<input|bob>|^2.
double teleport_with_ccc(const PureState& input, RngStream& rng);

// All four Bell branches of the teleportation circuit, with Bob's qubit
// before and after the Pauli correction.
std::array<TeleportBranch, 4> teleport_branches(const PureState& input);

}  // namespace eprc
