#include "eprc/distinguisher.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <string>

namespace eprc {

namespace {

using Mat2 = std::array<Amplitude, 4>;    // row-major 2x2
using Mat4 = std::array<Amplitude, 16>;   // row-major 4x4

Mat4 mat4_mul(const Mat4& x, const Mat4& y) {
  Mat4 out{};
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) {
      const Amplitude xrk = x[r * 4 + k];
      if (xrk == Amplitude(0.0)) continue;
      for (int c = 0; c < 4; ++c) out[r * 4 + c] += xrk * y[k * 4 + c];
    }
  return out;
}

Mat4 mat4_dagger(const Mat4& x) {
  Mat4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r * 4 + c] = std::conj(x[c * 4 + r]);
  return out;
}

Mat4 cnot4() {
  const GateMatrix g = GateMatrix::cnot();
  Mat4 u;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) u[r * 4 + c] = g.at(r, c);
  return u;
}

// kron(rho, chi): control is the high bit, matching the register layout of
// cascade_step.
Mat4 lift_with_ancilla(const Mat2& rho, const Mat2& chi) {
  Mat4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      out[r * 4 + c] = rho[(r >> 1) * 2 + (c >> 1)] * chi[(r & 1) * 2 + (c & 1)];
  return out;
}

// <outcome|_target sigma |outcome>_target, a 2x2 operator on the control.
Mat2 project_target(const Mat4& sigma, int outcome) {
  Mat2 out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      out[r * 2 + c] = sigma[(2 * r + outcome) * 4 + (2 * c + outcome)];
  return out;
}

double trace_re(const Mat2& m) { return (m[0] + m[3]).real(); }

void check_cascade_config(const CascadeConfig& cfg) {
  if (cfg.rounds < 1)
    throw std::invalid_argument("CascadeConfig: rounds must be >= 1");
}

void check_control(const char* who, const PureState& control) {
  if (control.num_qubits() != 1)
    throw std::invalid_argument(std::string(who) +
                                ": control must be a single qubit");
}

// Walks all 2^rounds branches depth-first; calls leaf(sequence, zero_count,
// weight) once per leaf. sequence holds round 0 in its most significant bit.
void walk_branches(const Mat2& input, const CascadeConfig& cfg,
                   const std::function<void(std::size_t, int, double)>& leaf) {
  const Mat2 chi = {
      cfg.ancilla.a() * std::conj(cfg.ancilla.a()),
      cfg.ancilla.a() * std::conj(cfg.ancilla.b()),
      cfg.ancilla.b() * std::conj(cfg.ancilla.a()),
      cfg.ancilla.b() * std::conj(cfg.ancilla.b()),
  };
  const Mat4 u = cnot4();
  const Mat4 udag = mat4_dagger(u);

  std::function<void(const Mat2&, int, std::size_t, int)> recurse =
      [&](const Mat2& rho, int depth, std::size_t seq, int zeros) {
        if (depth == cfg.rounds) {
          leaf(seq, zeros, trace_re(rho));
          return;
        }
        const Mat4 sigma = mat4_mul(mat4_mul(u, lift_with_ancilla(rho, chi)), udag);
        recurse(project_target(sigma, 0), depth + 1, seq << 1, zeros + 1);
        recurse(project_target(sigma, 1), depth + 1, (seq << 1) | 1, zeros);
      };
  recurse(input, 0, 0, 0);
}

Mat2 to_mat2(const DensityOperator& input) {
  if (input.num_qubits() != 1)
    throw std::invalid_argument("exact enumeration: input must be one qubit");
  return {input.at(0, 0), input.at(0, 1), input.at(1, 0), input.at(1, 1)};
}

void check_budget(const CascadeConfig& cfg, std::size_t budget) {
  check_cascade_config(cfg);
  if (cfg.rounds >= 63 || (1ull << cfg.rounds) > budget)
    throw branch_budget_error(
        "exact enumeration: 2^" + std::to_string(cfg.rounds) +
        " branches exceed the budget of " + std::to_string(budget));
}

}  // namespace

AncillaSpec::AncillaSpec()
    : a_(1.0 / std::sqrt(5.0)), b_(2.0 / std::sqrt(5.0)) {}

AncillaSpec::AncillaSpec(Amplitude a, Amplitude b) : a_(a), b_(b) {
  if (!std::isfinite(a_.real()) || !std::isfinite(a_.imag()) ||
      !std::isfinite(b_.real()) || !std::isfinite(b_.imag()))
    throw std::invalid_argument("AncillaSpec: non-finite amplitude");
  if (std::abs(std::norm(a_) + std::norm(b_) - 1.0) > kValidationTol)
    throw std::invalid_argument("AncillaSpec: |a|^2 + |b|^2 must be 1");
}

AncillaSpec AncillaSpec::from_unnormalized(Amplitude a, Amplitude b) {
  const double n2 = std::norm(a) + std::norm(b);
  if (!std::isfinite(n2) || n2 < 1e-12)
    throw std::invalid_argument("AncillaSpec: amplitudes have ~zero norm");
  if (std::abs(n2 - 1.0) <= kExactTol) return AncillaSpec(a, b);
  const double s = 1.0 / std::sqrt(n2);
  return AncillaSpec(a * s, b * s);
}

CountDistribution::CountDistribution(int rounds, std::vector<double> mass)
    : rounds_(rounds), mass_(std::move(mass)) {
  if (rounds_ < 1)
    throw std::invalid_argument("CountDistribution: rounds must be >= 1");
  if (mass_.size() != static_cast<std::size_t>(rounds_) + 1)
    throw std::invalid_argument("CountDistribution: need rounds+1 entries");
  double sum = 0.0;
  for (double m : mass_) {
    if (!std::isfinite(m) || m < -kExactTol)
      throw std::invalid_argument("CountDistribution: negative mass");
    sum += m;
  }
  if (std::abs(sum - 1.0) > kValidationTol)
    throw std::invalid_argument("CountDistribution: mass must sum to 1");
}

PureState cascade_step(const PureState& control, const AncillaSpec& ancilla) {
  check_control("cascade_step", control);
  return apply_cnot(tensor_with(control, ancilla.state()), 0, 1);
}

double step_zero_probability(const PureState& control,
                             const AncillaSpec& ancilla) {
  check_control("step_zero_probability", control);
  return std::norm(control.amplitude(0)) * std::norm(ancilla.a()) +
         std::norm(control.amplitude(1)) * std::norm(ancilla.b());
}

CascadeResult run_cascade(const PureState& control, const CascadeConfig& cfg,
                          RngStream& rng) {
  check_control("run_cascade", control);
  check_cascade_config(cfg);
  PureState carrier = control;
  std::vector<int> outcomes;
  std::vector<double> probs;
  outcomes.reserve(cfg.rounds);
  probs.reserve(cfg.rounds);
  int zeros = 0;
  for (int round = 0; round < cfg.rounds; ++round) {
    const PureState pair = cascade_step(carrier, cfg.ancilla);
    auto [record, post] = measure_qubit(pair, 1, rng);
    carrier = factor_out_qubit(post, 1, record.outcome);
    outcomes.push_back(record.outcome);
    probs.push_back(record.probability);
    if (record.outcome == 0) ++zeros;
  }
  return CascadeResult{std::move(outcomes), zeros, std::move(probs),
                       std::move(carrier)};
}

CountDistribution exact_count_distribution(const DensityOperator& input,
                                           const CascadeConfig& cfg,
                                           std::size_t branch_budget) {
  check_budget(cfg, branch_budget);
  std::vector<double> mass(static_cast<std::size_t>(cfg.rounds) + 1, 0.0);
  walk_branches(to_mat2(input), cfg,
                [&](std::size_t, int zeros, double w) { mass[zeros] += w; });
  double sum = 0.0;
  for (double m : mass) sum += m;
  if (std::abs(sum - 1.0) > kExactTol)
    throw invariant_error("exact_count_distribution: branch weights sum to " +
                          std::to_string(sum));
  return CountDistribution(cfg.rounds, std::move(mass));
}

std::vector<double> exact_sequence_distribution(const DensityOperator& input,
                                                const CascadeConfig& cfg,
                                                std::size_t branch_budget) {
  check_budget(cfg, branch_budget);
  std::vector<double> law(1ull << cfg.rounds, 0.0);
  walk_branches(to_mat2(input), cfg,
                [&](std::size_t seq, int, double w) { law[seq] = w; });
  return law;
}

CountDistribution binomial_distribution(int k, double p) {
  if (k < 1)
    throw std::invalid_argument("binomial_distribution: k must be >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binomial_distribution: p must be in [0, 1]");
  // Pascal's row keeps the coefficients exact in double up to k = 20+.
  std::vector<double> coeff(static_cast<std::size_t>(k) + 1, 0.0);
  coeff[0] = 1.0;
  for (int row = 1; row <= k; ++row)
    for (int c = row; c >= 1; --c) coeff[c] += coeff[c - 1];
  std::vector<double> mass(static_cast<std::size_t>(k) + 1);
  for (int c = 0; c <= k; ++c)
    mass[c] = coeff[c] * std::pow(p, c) * std::pow(1.0 - p, k - c);
  return CountDistribution(k, std::move(mass));
}

}  // namespace eprc
