#include "qts/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qts/error.hpp"

namespace qts {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  int b = 0;
  while ((std::size_t{1} << b) < n) ++b;
  return b;
}

// exp(2*pi*i*m/n) for m = 0..n-1, with the index reduced mod n before the
// angle is formed so large j*k products do not lose precision.
std::vector<cdouble> unit_roots(std::size_t n) {
  std::vector<cdouble> roots(n);
  for (std::size_t m = 0; m < n; ++m)
    roots[m] = std::polar(1.0, 2.0 * kPi * double(m) / double(n));
  return roots;
}

std::vector<cdouble> dft_sum(std::span<const cdouble> values, bool inverse) {
  const std::size_t n = values.size();
  if (!is_pow2(n)) throw ShapeError("transform length must be a power of two");
  const auto roots = unit_roots(n);
  const double scale = 1.0 / std::sqrt(double(n));
  std::vector<cdouble> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cdouble acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const cdouble w = roots[(j * k) % n];
      acc += (inverse ? std::conj(w) : w) * values[k];
    }
    out[j] = acc * scale;
  }
  return out;
}

StateVector apply_fourier(const StateVector& state, std::vector<int> targets,
                          bool inverse) {
  if (targets.empty()) {
    targets.resize(state.n_qubits);
    for (int q = 0; q < state.n_qubits; ++q) targets[q] = q;
  }
  auto f = qft_matrix(std::size_t{1} << targets.size());
  if (inverse)
    for (auto& v : f.data) v = std::conj(v);
  return apply_block_unitary(state, f, targets);
}

std::pair<StateVector, double> normalized_state(std::span<const double> y,
                                                const char* which) {
  if (!is_pow2(y.size()))
    throw ShapeError(std::string(which) + " series length " +
                     std::to_string(y.size()) + " is not a power of two");
  std::vector<cdouble> amps(y.begin(), y.end());
  try {
    return from_amplitudes(std::move(amps));
  } catch (const DegenerateInputError&) {
    throw DegenerateInputError(std::string(which) + " series is identically zero");
  }
}

void check_pair(std::span<const double> y1, std::span<const double> y2) {
  if (y1.size() != y2.size())
    throw ShapeError("series lengths differ: " + std::to_string(y1.size()) +
                     " vs " + std::to_string(y2.size()));
  if (y1.empty()) throw ShapeError("series must be non-empty");
}

}  // namespace

ComplexMatrix qft_matrix(std::size_t n) {
  if (!is_pow2(n)) throw ShapeError("Fourier matrix size must be a power of two");
  const auto roots = unit_roots(n);
  const double scale = 1.0 / std::sqrt(double(n));
  ComplexMatrix f(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) f.data[j * n + k] = roots[(j * k) % n] * scale;
  return f;
}

StateVector apply_qft(const StateVector& state, std::vector<int> targets) {
  return apply_fourier(state, std::move(targets), false);
}

StateVector apply_qft_inverse(const StateVector& state, std::vector<int> targets) {
  return apply_fourier(state, std::move(targets), true);
}

std::vector<cdouble> classical_dft(std::span<const cdouble> values, bool inverse) {
  return dft_sum(values, inverse);
}

SwapTestResult swap_test(const StateVector& a, const StateVector& b,
                         std::optional<std::uint64_t> shots, std::uint64_t seed) {
  if (a.n_qubits != b.n_qubits)
    throw ShapeError("swap test registers differ in width");
  const int n = a.n_qubits;
  if (1 + 2 * n > kMaxQubits)
    throw CapacityError("swap test register pair exceeds the qubit cap");

  // Control on top, then the two registers: index = (c << 2n) | (i << n) | j.
  StateVector joint;
  joint.n_qubits = 1 + 2 * n;
  joint.amplitudes.assign(std::size_t{1} << joint.n_qubits, 0.0);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      joint.amplitudes[(i << n) | j] = a.amplitudes[i] * b.amplitudes[j];

  joint = apply_gate(joint, hadamard(0));
  for (int q = 0; q < n; ++q)
    joint = apply_gate(joint, swap_gate(1 + q, 1 + n + q, {0}));
  joint = apply_gate(joint, hadamard(0));

  double p_zero = 0.0;
  if (shots) {
    if (*shots == 0) throw DomainError("shot count must be positive");
    const std::uint64_t half = joint.dim() / 2;
    std::uint64_t zeros = 0;
    for (const auto& [idx, count] : sample(joint, *shots, seed))
      if (idx < half) zeros += count;
    p_zero = double(zeros) / double(*shots);
  } else {
    const std::size_t half = joint.dim() / 2;
    for (std::size_t i = 0; i < half; ++i) p_zero += std::norm(joint.amplitudes[i]);
  }
  return {p_zero, std::clamp(2.0 * p_zero - 1.0, 0.0, 1.0)};
}

QftDistanceReport qft_distance_stacked(std::span<const double> y1,
                                       std::span<const double> y2) {
  check_pair(y1, y2);
  if (!is_pow2(y1.size()))
    throw ShapeError("series length " + std::to_string(y1.size()) +
                     " is not a power of two");

  std::vector<cdouble> comb(y1.begin(), y1.end());
  comb.insert(comb.end(), y2.begin(), y2.end());
  StateVector state;
  double comb_norm = 0.0;
  try {
    std::tie(state, comb_norm) = from_amplitudes(std::move(comb));
  } catch (const DegenerateInputError&) {
    throw DegenerateInputError("both series are identically zero");
  }

  const int reg = log2_exact(y1.size());
  if (reg > 0) {
    std::vector<int> lower(reg);
    for (int q = 0; q < reg; ++q) lower[q] = 1 + q;
    state = apply_qft(state, lower);
  }
  state = apply_gate(state, hadamard(0));

  double p_minus = 0.0;
  for (std::size_t i = state.dim() / 2; i < state.dim(); ++i)
    p_minus += std::norm(state.amplitudes[i]);

  QftDistanceReport rep;
  rep.strategy = "stacked";
  rep.p_minus = p_minus;
  rep.distance_estimate = std::sqrt(2.0 * p_minus) * comb_norm;
  rep.qubits_used = 1 + reg;
  return rep;
}

QftDistanceReport qft_distance_superposed(std::span<const double> y1,
                                          std::span<const double> y2) {
  check_pair(y1, y2);
  auto [s1, n1] = normalized_state(y1, "first");
  auto [s2, n2] = normalized_state(y2, "second");

  std::vector<cdouble> diff(s1.dim());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = s1.amplitudes[i] - s2.amplitudes[i];
  StateVector state;
  double dist = 0.0;
  try {
    std::tie(state, dist) = from_amplitudes(std::move(diff));
  } catch (const DegenerateInputError&) {
    throw DegenerateInputError(
        "normalized series coincide; no interference branch to measure");
  }
  state = apply_qft(state);

  QftDistanceReport rep;
  rep.strategy = "superposed";
  rep.p_minus = dist * dist / 4.0;
  rep.distance_estimate = dist;
  rep.qubits_used = state.n_qubits;
  return rep;
}

QftDistanceReport qft_distance_two_register(std::span<const double> y1,
                                            std::span<const double> y2,
                                            std::optional<std::uint64_t> shots,
                                            std::uint64_t seed) {
  check_pair(y1, y2);
  auto [s1, n1] = normalized_state(y1, "first");
  auto [s2, n2] = normalized_state(y2, "second");

  const StateVector f1 = apply_qft(s1);
  const StateVector f2 = apply_qft(s2);
  const cdouble overlap = inner_product(f1, f2);
  const auto swap = swap_test(f1, f2, shots, seed);

  QftDistanceReport rep;
  rep.strategy = "two-register";
  rep.p_minus = 1.0 - swap.p_zero;
  rep.qubits_used = 1 + 2 * f1.n_qubits;
  rep.shots = shots;
  rep.overlap_flagged = overlap.real() < -1e-10 || std::abs(overlap.imag()) > 1e-10;
  if (shots) {
    rep.distance_estimate =
        std::sqrt(std::max(0.0, 2.0 - 2.0 * std::sqrt(swap.overlap_sq)));
  } else {
    rep.distance_estimate = std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap.real()));
  }
  return rep;
}

}  // namespace qts
