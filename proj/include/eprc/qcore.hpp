#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eprc/rng.hpp"

namespace eprc {

using Amplitude = std::complex<double>;

// Tolerances used throughout: inputs may drift by kValidationTol, exact
// identities are held to kExactTol, and collapse never divides by a
// probability below kCollapseFloor.
inline constexpr double kValidationTol = 1e-9;
inline constexpr double kExactTol = 1e-12;
inline constexpr double kCollapseFloor = 1e-15;

// A broken internal invariant (e.g. collapsing onto a branch of probability
// ~0, or factoring out a qubit that is still entangled). Kept distinct from
// std::invalid_argument so the CLI can map it to a different exit code.
class invariant_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Basis index convention, used everywhere in this library:
// qubit 0 is the MOST significant bit of the basis index, so the basis state
// |q0 q1 ... q(n-1)> sits at index q0*2^(n-1) + q1*2^(n-2) + ... + q(n-1).
inline int basis_bit(std::size_t index, int qubit, int num_qubits) {
  return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1u);
}

// Normalized dense amplitude vector over n qubits.
class PureState {
 public:
  PureState(int num_qubits, std::vector<Amplitude> amplitudes);

  // |index> in the bit-ordering convention above.
  static PureState computational(int num_qubits, std::size_t index);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  const std::vector<Amplitude>& amplitudes() const { return amplitudes_; }
  const Amplitude& amplitude(std::size_t index) const {
    return amplitudes_.at(index);
  }
  double norm_squared() const;

 private:
  int num_qubits_;
  std::vector<Amplitude> amplitudes_;
};

PureState ket_zero();
PureState ket_one();
PureState ket_plus();
PureState ket_minus();

// (|00> + |11>)/sqrt(2), qubit 0 = Alice, qubit 1 = Bob.
PureState epr_pair();

// Unitary 2x2 or 4x4 matrix, row-major.
class GateMatrix {
 public:
  GateMatrix(int dimension, std::vector<Amplitude> entries);

  int dimension() const { return dimension_; }
  const Amplitude& at(int row, int col) const {
    return entries_[static_cast<std::size_t>(row) * dimension_ + col];
  }

  static GateMatrix identity2();
  static GateMatrix hadamard();
  static GateMatrix pauli_x();
  static GateMatrix pauli_y();
  static GateMatrix pauli_z();
  // 4x4 CNOT, first (most significant) qubit controls the second.
  static GateMatrix cnot();

 private:
  int dimension_;
  std::vector<Amplitude> entries_;
};

// Hermitian, trace-one, positive semidefinite matrix over n qubits.
// Positivity is checked at construction via a Jacobi eigensolver
// (eigenvalues >= -kValidationTol).
class DensityOperator {
 public:
  DensityOperator(int num_qubits, std::vector<Amplitude> entries);

  static DensityOperator from_pure(const PureState& state);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return 1ull << num_qubits_; }
  const std::vector<Amplitude>& entries() const { return entries_; }
  const Amplitude& at(std::size_t row, std::size_t col) const {
    return entries_[row * dimension() + col];
  }
  Amplitude trace() const;

 private:
  int num_qubits_;
  std::vector<Amplitude> entries_;
};

struct MeasurementRecord {
  int qubit_index;
  int outcome;        // 0 or 1
  double probability; // Born probability of the realized outcome
};

// Kronecker product; left occupies the high bits of the result index.
PureState tensor_with(const PureState& left, const PureState& right);

PureState apply_cnot(const PureState& state, int control, int target);

PureState apply_single_qubit(const PureState& state, const GateMatrix& gate,
                             int qubit);

// Born probabilities (p0, p1) for measuring `qubit` in the computational
// basis; each is an explicit sum of squared magnitudes.
std::pair<double, double> outcome_probability(const PureState& state,
                                              int qubit);

// Deterministic post-selection: probability of `outcome` and the renormalized
// projected state. Throws invariant_error when that probability is below
// kCollapseFloor (nothing to renormalize).
std::pair<double, PureState> project_qubit(const PureState& state, int qubit,
                                           int outcome);

// Projective measurement with collapse; the outcome is drawn from `rng`
// according to the Born rule.
std::pair<MeasurementRecord, PureState> measure_qubit(const PureState& state,
                                                      int qubit,
                                                      RngStream& rng);

// Removes qubit `qubit`, which must already be in basis state `outcome`
// (e.g. right after measurement); throws invariant_error if it is not.
PureState factor_out_qubit(const PureState& state, int qubit, int outcome);

// Single-qubit partial trace over all other qubits.
DensityOperator reduced_density(const PureState& state, int qubit);

// sum_i weight_i |state_i><state_i| over single-qubit states; weights must be
// nonnegative and sum to 1 within kValidationTol.
DensityOperator density_from_ensemble(
    const std::vector<std::pair<double, PureState>>& parts);

// Haar-distributed pure state (independent complex gaussian amplitudes,
// normalized).
PureState random_state(int num_qubits, RngStream& rng);

// |<x|y>|^2
double state_fidelity(const PureState& x, const PureState& y);

}  // namespace eprc
