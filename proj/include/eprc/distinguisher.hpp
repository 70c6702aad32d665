#pragma once

#include <cstddef>
#include <vector>

#include "eprc/qcore.hpp"
#include "eprc/rng.hpp"

namespace eprc {

// Exact branch enumeration walks all 2^rounds outcome sequences; refuse runs
// beyond this many leaves unless the caller raises the budget.
inline constexpr std::size_t kDefaultBranchBudget = 1ull << 20;

class branch_budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ancilla preparation a|0> + b|1>. Default-constructed spec is
// (|0> + 2|1>)/sqrt(5).
class AncillaSpec {
 public:
  AncillaSpec();
  AncillaSpec(Amplitude a, Amplitude b);  // must be normalized

  // Scales (a, b) to unit norm first; leaves already-normalized inputs
  // bit-identical so an echoed config reparses to the same spec.
  static AncillaSpec from_unnormalized(Amplitude a, Amplitude b);

  const Amplitude& a() const { return a_; }
  const Amplitude& b() const { return b_; }
  PureState state() const { return PureState(1, {a_, b_}); }

 private:
  Amplitude a_, b_;
};

struct CascadeConfig {
  int rounds = 5;
  AncillaSpec ancilla{};
};

struct CascadeResult {
  std::vector<int> outcomes;               // target outcome per round
  int zero_count;                          // number of 0 outcomes
  std::vector<double> step_probabilities;  // Born prob of each realized outcome
  PureState final_control;                 // control qubit after the last round
};

// Law of zero_count, mass indexed by count 0..rounds.
class CountDistribution {
 public:
  CountDistribution(int rounds, std::vector<double> mass);

  int rounds() const { return rounds_; }
  const std::vector<double>& mass() const { return mass_; }
  double at(int count) const { return mass_.at(count); }

 private:
  int rounds_;
  std::vector<double> mass_;
};

// One cascade stage before measurement: attach a fresh ancilla as target and
// apply CNOT with the carrier qubit as control (qubit 0 = control,
// qubit 1 = target).
PureState cascade_step(const PureState& control, const AncillaSpec& ancilla);

// Born probability that the target measures 0 after cascade_step:
// |c0|^2 |a|^2 + |c1|^2 |b|^2 for control c0|0> + c1|1>.
double step_zero_probability(const PureState& control,
                             const AncillaSpec& ancilla);

// Runs `cfg.rounds` stages of attach / CNOT / measure target / discard,
// collapsing the control along the realized branch.
CascadeResult run_cascade(const PureState& control, const CascadeConfig& cfg,
                          RngStream& rng);

// Exact law of zero_count for a (possibly mixed) single-qubit input,
// obtained by enumerating every outcome branch: each round lifts the
// unnormalized conditional control operator with a fresh ancilla, conjugates
// by CNOT and projects the target, without renormalizing; a leaf's weight is
// the trace of its conditional operator.
CountDistribution exact_count_distribution(
    const DensityOperator& input, const CascadeConfig& cfg,
    std::size_t branch_budget = kDefaultBranchBudget);

// Exact probability of every length-`rounds` outcome sequence, indexed with
// round 0 as the most significant bit.
std::vector<double> exact_sequence_distribution(
    const DensityOperator& input, const CascadeConfig& cfg,
    std::size_t branch_budget = kDefaultBranchBudget);

// Binomial(k, p) as a CountDistribution.
CountDistribution binomial_distribution(int k, double p);

}  // namespace eprc
