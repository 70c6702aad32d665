#include "eprc/qcore.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace eprc {

namespace {

constexpr int kMaxQubits = 20;

bool finite(const Amplitude& a) {
  return std::isfinite(a.real()) && std::isfinite(a.imag());
}

void check_qubit_index(const char* who, const PureState& state, int qubit) {
  if (qubit < 0 || qubit >= state.num_qubits()) {
    throw std::out_of_range(std::string(who) + ": qubit index " +
                            std::to_string(qubit) + " out of range for " +
                            std::to_string(state.num_qubits()) + " qubit(s)");
  }
}

// Basis-index mask selecting `qubit` (qubit 0 = most significant bit).
std::size_t qubit_mask(int qubit, int num_qubits) {
  return 1ull << (num_qubits - 1 - qubit);
}

// Inserts `bit` at the index position of `qubit` into a sub-index over the
// remaining qubits.
std::size_t insert_bit(std::size_t sub, int qubit, int num_qubits, int bit) {
  const int pos = num_qubits - 1 - qubit;
  const std::size_t low = sub & ((1ull << pos) - 1);
  const std::size_t high = sub >> pos;
  return (high << (pos + 1)) | (static_cast<std::size_t>(bit) << pos) | low;
}

// Eigenvalues of a Hermitian dim x dim matrix via cyclic Jacobi sweeps on the
// real symmetric embedding [[Re, -Im], [Im, Re]] (each eigenvalue appears
// twice). Fine for the small operators this library handles.
std::vector<double> hermitian_eigenvalues(std::size_t dim,
                                          const std::vector<Amplitude>& m) {
  const std::size_t n = 2 * dim;
  std::vector<double> a(n * n, 0.0);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const Amplitude& e = m[r * dim + c];
      a[r * n + c] = e.real();
      a[(r + dim) * n + (c + dim)] = e.real();
      a[r * n + (c + dim)] = -e.imag();
      a[(r + dim) * n + c] = e.imag();
    }
  }
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r + 1; c < n; ++c) off += a[r * n + c] * a[r * n + c];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t r = 0; r < n; ++r) eig[r] = a[r * n + r];
  return eig;
}

double gaussian(RngStream& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace

PureState::PureState(int num_qubits, std::vector<Amplitude> amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
  if (num_qubits_ < 1 || num_qubits_ > kMaxQubits)
    throw std::invalid_argument("PureState: num_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "]");
  if (amplitudes_.size() != (1ull << num_qubits_))
    throw std::invalid_argument(
        "PureState: amplitude count must be 2^num_qubits");
  for (const auto& a : amplitudes_)
    if (!finite(a))
      throw std::invalid_argument("PureState: non-finite amplitude");
  if (std::abs(norm_squared() - 1.0) > kValidationTol)
    throw std::invalid_argument("PureState: amplitudes are not normalized");
}

PureState PureState::computational(int num_qubits, std::size_t index) {
  if (num_qubits < 1 || num_qubits > kMaxQubits)
    throw std::invalid_argument("computational: bad qubit count");
  if (index >= (1ull << num_qubits))
    throw std::out_of_range("computational: basis index out of range");
  std::vector<Amplitude> amps(1ull << num_qubits, 0.0);
  amps[index] = 1.0;
  return PureState(num_qubits, std::move(amps));
}

double PureState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s;
}

PureState ket_zero() { return PureState::computational(1, 0); }
PureState ket_one() { return PureState::computational(1, 1); }

PureState ket_plus() {
  const double r = 1.0 / std::sqrt(2.0);
  return PureState(1, {r, r});
}

PureState ket_minus() {
  const double r = 1.0 / std::sqrt(2.0);
  return PureState(1, {r, -r});
}

PureState epr_pair() {
  const double r = 1.0 / std::sqrt(2.0);
  return PureState(2, {r, 0.0, 0.0, r});
}

GateMatrix::GateMatrix(int dimension, std::vector<Amplitude> entries)
    : dimension_(dimension), entries_(std::move(entries)) {
  if (dimension_ != 2 && dimension_ != 4)
    throw std::invalid_argument("GateMatrix: dimension must be 2 or 4");
  if (entries_.size() != static_cast<std::size_t>(dimension_) * dimension_)
    throw std::invalid_argument("GateMatrix: wrong entry count");
  for (const auto& e : entries_)
    if (!finite(e)) throw std::invalid_argument("GateMatrix: non-finite entry");
  // U^dag U = I within kValidationTol
  for (int r = 0; r < dimension_; ++r) {
    for (int c = 0; c < dimension_; ++c) {
      Amplitude s = 0.0;
      for (int k = 0; k < dimension_; ++k)
        s += std::conj(at(k, r)) * at(k, c);
      const Amplitude expect = (r == c) ? 1.0 : 0.0;
      if (std::abs(s - expect) > kValidationTol)
        throw std::invalid_argument("GateMatrix: matrix is not unitary");
    }
  }
}

GateMatrix GateMatrix::identity2() { return GateMatrix(2, {1, 0, 0, 1}); }

GateMatrix GateMatrix::hadamard() {
  const double r = 1.0 / std::sqrt(2.0);
  return GateMatrix(2, {r, r, r, -r});
}

GateMatrix GateMatrix::pauli_x() { return GateMatrix(2, {0, 1, 1, 0}); }

GateMatrix GateMatrix::pauli_y() {
  return GateMatrix(2, {0, Amplitude(0, -1), Amplitude(0, 1), 0});
}

GateMatrix GateMatrix::pauli_z() { return GateMatrix(2, {1, 0, 0, -1}); }

GateMatrix GateMatrix::cnot() {
  return GateMatrix(4, {1, 0, 0, 0,  //
                        0, 1, 0, 0,  //
                        0, 0, 0, 1,  //
                        0, 0, 1, 0});
}

DensityOperator::DensityOperator(int num_qubits, std::vector<Amplitude> entries)
    : num_qubits_(num_qubits), entries_(std::move(entries)) {
  if (num_qubits_ < 1 || num_qubits_ > kMaxQubits)
    throw std::invalid_argument("DensityOperator: bad qubit count");
  const std::size_t dim = 1ull << num_qubits_;
  if (entries_.size() != dim * dim)
    throw std::invalid_argument("DensityOperator: wrong entry count");
  for (const auto& e : entries_)
    if (!finite(e))
      throw std::invalid_argument("DensityOperator: non-finite entry");
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = r; c < dim; ++c)
      if (std::abs(at(r, c) - std::conj(at(c, r))) > kValidationTol)
        throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
  if (std::abs(trace() - Amplitude(1.0)) > kValidationTol)
    throw std::invalid_argument("DensityOperator: trace must be 1");
  for (double ev : hermitian_eigenvalues(dim, entries_))
    if (ev < -kValidationTol)
      throw std::invalid_argument(
          "DensityOperator: matrix is not positive semidefinite");
}

DensityOperator DensityOperator::from_pure(const PureState& state) {
  const std::size_t dim = state.dimension();
  std::vector<Amplitude> e(dim * dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      e[r * dim + c] = state.amplitude(r) * std::conj(state.amplitude(c));
  return DensityOperator(state.num_qubits(), std::move(e));
}

Amplitude DensityOperator::trace() const {
  Amplitude t = 0.0;
  const std::size_t dim = dimension();
  for (std::size_t r = 0; r < dim; ++r) t += at(r, r);
  return t;
}

PureState tensor_with(const PureState& left, const PureState& right) {
  const std::size_t dl = left.dimension();
  const std::size_t dr = right.dimension();
  std::vector<Amplitude> amps(dl * dr);
  for (std::size_t i = 0; i < dl; ++i)
    for (std::size_t j = 0; j < dr; ++j)
      amps[i * dr + j] = left.amplitude(i) * right.amplitude(j);
  return PureState(left.num_qubits() + right.num_qubits(), std::move(amps));
}

PureState apply_cnot(const PureState& state, int control, int target) {
  check_qubit_index("apply_cnot", state, control);
  check_qubit_index("apply_cnot", state, target);
  if (control == target)
    throw std::invalid_argument("apply_cnot: control and target must differ");
  const std::size_t mc = qubit_mask(control, state.num_qubits());
  const std::size_t mt = qubit_mask(target, state.num_qubits());
  std::vector<Amplitude> amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i)
    if ((i & mc) && !(i & mt)) std::swap(amps[i], amps[i | mt]);
  return PureState(state.num_qubits(), std::move(amps));
}

PureState apply_single_qubit(const PureState& state, const GateMatrix& gate,
                             int qubit) {
  check_qubit_index("apply_single_qubit", state, qubit);
  if (gate.dimension() != 2)
    throw std::invalid_argument("apply_single_qubit: gate must be 2x2");
  const std::size_t mask = qubit_mask(qubit, state.num_qubits());
  std::vector<Amplitude> amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & mask) continue;
    const Amplitude a0 = amps[i];
    const Amplitude a1 = amps[i | mask];
    amps[i] = gate.at(0, 0) * a0 + gate.at(0, 1) * a1;
    amps[i | mask] = gate.at(1, 0) * a0 + gate.at(1, 1) * a1;
  }
  return PureState(state.num_qubits(), std::move(amps));
}

std::pair<double, double> outcome_probability(const PureState& state,
                                              int qubit) {
  check_qubit_index("outcome_probability", state, qubit);
  const std::size_t mask = qubit_mask(qubit, state.num_qubits());
  double p0 = 0.0, p1 = 0.0;
  const auto& amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i)
    ((i & mask) ? p1 : p0) += std::norm(amps[i]);
  return {p0, p1};
}

std::pair<double, PureState> project_qubit(const PureState& state, int qubit,
                                           int outcome) {
  check_qubit_index("project_qubit", state, qubit);
  if (outcome != 0 && outcome != 1)
    throw std::invalid_argument("project_qubit: outcome must be 0 or 1");
  const auto [p0, p1] = outcome_probability(state, qubit);
  const double p = (outcome == 0) ? p0 : p1;
  if (p < kCollapseFloor)
    throw invariant_error("project_qubit: collapse onto a branch of "
                          "probability below 1e-15");
  const std::size_t mask = qubit_mask(qubit, state.num_qubits());
  const double scale = 1.0 / std::sqrt(p);
  std::vector<Amplitude> amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const bool keep = ((i & mask) != 0) == (outcome == 1);
    amps[i] = keep ? amps[i] * scale : Amplitude(0.0);
  }
  return {p, PureState(state.num_qubits(), std::move(amps))};
}

std::pair<MeasurementRecord, PureState> measure_qubit(const PureState& state,
                                                      int qubit,
                                                      RngStream& rng) {
  check_qubit_index("measure_qubit", state, qubit);
  const auto [p0, p1] = outcome_probability(state, qubit);
  const int outcome = rng.uniform() < p0 ? 0 : 1;
  auto [p, post] = project_qubit(state, qubit, outcome);
  return {MeasurementRecord{qubit, outcome, p}, std::move(post)};
}

PureState factor_out_qubit(const PureState& state, int qubit, int outcome) {
  check_qubit_index("factor_out_qubit", state, qubit);
  if (state.num_qubits() < 2)
    throw std::invalid_argument("factor_out_qubit: need at least 2 qubits");
  if (outcome != 0 && outcome != 1)
    throw std::invalid_argument("factor_out_qubit: outcome must be 0 or 1");
  const int n = state.num_qubits();
  std::vector<Amplitude> amps(1ull << (n - 1));
  double mass = 0.0;
  for (std::size_t sub = 0; sub < amps.size(); ++sub) {
    amps[sub] = state.amplitude(insert_bit(sub, qubit, n, outcome));
    mass += std::norm(amps[sub]);
  }
  if (std::abs(mass - 1.0) > kValidationTol)
    throw invariant_error(
        "factor_out_qubit: qubit is not in the requested basis state");
  return PureState(n - 1, std::move(amps));
}

DensityOperator reduced_density(const PureState& state, int qubit) {
  check_qubit_index("reduced_density", state, qubit);
  const int n = state.num_qubits();
  const std::size_t rest = 1ull << (n - 1);
  std::vector<Amplitude> rho(4, 0.0);
  for (std::size_t sub = 0; sub < rest; ++sub) {
    const Amplitude a0 = state.amplitude(insert_bit(sub, qubit, n, 0));
    const Amplitude a1 = state.amplitude(insert_bit(sub, qubit, n, 1));
    rho[0] += a0 * std::conj(a0);
    rho[1] += a0 * std::conj(a1);
    rho[2] += a1 * std::conj(a0);
    rho[3] += a1 * std::conj(a1);
  }
  return DensityOperator(1, std::move(rho));
}

DensityOperator density_from_ensemble(
    const std::vector<std::pair<double, PureState>>& parts) {
  if (parts.empty())
    throw std::invalid_argument("density_from_ensemble: empty ensemble");
  double total = 0.0;
  std::vector<Amplitude> rho(4, 0.0);
  for (const auto& [w, s] : parts) {
    if (!(w >= 0.0))
      throw std::invalid_argument("density_from_ensemble: negative weight");
    if (s.num_qubits() != 1)
      throw std::invalid_argument(
          "density_from_ensemble: states must be single-qubit");
    total += w;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        rho[r * 2 + c] += w * s.amplitude(r) * std::conj(s.amplitude(c));
  }
  if (std::abs(total - 1.0) > kValidationTol)
    throw std::invalid_argument("density_from_ensemble: weights must sum to 1");
  return DensityOperator(1, std::move(rho));
}

PureState random_state(int num_qubits, RngStream& rng) {
  if (num_qubits < 1 || num_qubits > kMaxQubits)
    throw std::invalid_argument("random_state: bad qubit count");
  std::vector<Amplitude> amps(1ull << num_qubits);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& a : amps) {
      a = Amplitude(gaussian(rng), gaussian(rng));
      norm2 += std::norm(a);
    }
  } while (norm2 < 1e-12);
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& a : amps) a *= scale;
  return PureState(num_qubits, std::move(amps));
}

double state_fidelity(const PureState& x, const PureState& y) {
  if (x.num_qubits() != y.num_qubits())
    throw std::invalid_argument("state_fidelity: qubit counts differ");
  Amplitude inner = 0.0;
  for (std::size_t i = 0; i < x.dimension(); ++i)
    inner += std::conj(x.amplitude(i)) * y.amplitude(i);
  return std::norm(inner);
}

}  // namespace eprc
