#include "qts/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qts/error.hpp"

namespace qts {

namespace {

constexpr double kGateUnitarityTol = 1e-10;
constexpr double kBlockUnitarityTol = 1e-8;
constexpr double kBranchFloor = 1e-12;

// Bit position (counted from the least significant end of the basis index)
// occupied by `qubit` under the MSB-first labeling.
int bit_pos(int n_qubits, int qubit) { return n_qubits - 1 - qubit; }

void check_qubits_in_range(const StateVector& s, std::span<const int> qubits,
                           const char* what) {
  for (int q : qubits) {
    if (q < 0 || q >= s.n_qubits)
      throw ShapeError(std::string(what) + " qubit " + std::to_string(q) +
                       " out of range for " + std::to_string(s.n_qubits) +
                       "-qubit state");
  }
}

double portable_uniform(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// Shared kernel: applies `matrix` to the subspace spanned by `targets`,
// conditioned on `controls`. Walks each orbit of the non-target bits once,
// gathers the 2^k amplitudes addressed by the targets, multiplies, scatters.
StateVector apply_matrix(const StateVector& state, const ComplexMatrix& matrix,
                         std::span<const int> targets, std::span<const int> controls) {
  const int n = state.n_qubits;
  const int k = int(targets.size());
  if (k == 0) throw ShapeError("gate needs at least one target qubit");
  check_qubits_in_range(state, targets, "target");
  check_qubits_in_range(state, controls, "control");

  std::vector<int> seen(targets.begin(), targets.end());
  seen.insert(seen.end(), controls.begin(), controls.end());
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw ShapeError("target/control qubits must be distinct");

  const std::size_t block = std::size_t{1} << k;
  if (matrix.dim != block || matrix.data.size() != block * block)
    throw ShapeError("gate matrix is " + std::to_string(matrix.dim) + "-dimensional, expected " +
                     std::to_string(block) + " for " + std::to_string(k) + " target(s)");

  std::vector<std::size_t> tmask(k);
  std::size_t target_union = 0;
  for (int r = 0; r < k; ++r) {
    tmask[r] = std::size_t{1} << bit_pos(n, targets[r]);
    target_union |= tmask[r];
  }
  std::size_t cmask = 0;
  for (int c : controls) cmask |= std::size_t{1} << bit_pos(n, c);

  // spread[j] plants the bits of the gate-local index j into the full index,
  // with targets[0] as the local MSB.
  std::vector<std::size_t> spread(block);
  for (std::size_t j = 0; j < block; ++j) {
    std::size_t x = 0;
    for (int r = 0; r < k; ++r)
      if ((j >> (k - 1 - r)) & 1u) x |= tmask[r];
    spread[j] = x;
  }

  StateVector out = state;
  std::vector<cdouble> in(block), res(block);
  const std::size_t dim = state.dim();
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & target_union) continue;
    if ((base & cmask) != cmask) continue;
    for (std::size_t j = 0; j < block; ++j) in[j] = state.amplitudes[base | spread[j]];
    for (std::size_t r = 0; r < block; ++r) {
      cdouble acc = 0.0;
      const cdouble* row = matrix.data.data() + r * block;
      for (std::size_t c = 0; c < block; ++c) acc += row[c] * in[c];
      res[r] = acc;
    }
    for (std::size_t j = 0; j < block; ++j) out.amplitudes[base | spread[j]] = res[j];
  }
  return out;
}

MeasurementOutcome collapse(const StateVector& state, int qubit, int bit,
                            double probability) {
  const int n = state.n_qubits;
  const int pos = bit_pos(n, qubit);
  const std::size_t low_mask = (std::size_t{1} << pos) - 1;
  StateVector out;
  out.n_qubits = n - 1;
  out.amplitudes.resize(state.dim() / 2);
  const double scale = 1.0 / std::sqrt(probability);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (int((i >> pos) & 1u) != bit) continue;
    const std::size_t packed = ((i >> (pos + 1)) << pos) | (i & low_mask);
    out.amplitudes[packed] = state.amplitudes[i] * scale;
  }
  return {probability, std::move(out), bit};
}

}  // namespace

double StateVector::norm() const {
  double acc = 0.0;
  for (const auto& a : amplitudes) acc += std::norm(a);
  return std::sqrt(acc);
}

StateVector new_zero_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw CapacityError("qubit count " + std::to_string(n_qubits) +
                        " outside supported range [1, " + std::to_string(kMaxQubits) + "]");
  StateVector s;
  s.n_qubits = n_qubits;
  s.amplitudes.assign(std::size_t{1} << n_qubits, 0.0);
  s.amplitudes[0] = 1.0;
  return s;
}

std::pair<StateVector, double> from_amplitudes(std::vector<cdouble> values) {
  if (values.empty()) throw ShapeError("amplitude list is empty");
  if ((values.size() & (values.size() - 1)) != 0)
    throw ShapeError("amplitude count " + std::to_string(values.size()) +
                     " is not a power of two");
  int n = 0;
  while ((std::size_t{1} << n) < values.size()) ++n;
  if (n > kMaxQubits)
    throw CapacityError("amplitude count needs " + std::to_string(n) + " qubits, cap is " +
                        std::to_string(kMaxQubits));
  double nrm2 = 0.0;
  for (const auto& v : values) nrm2 += std::norm(v);
  const double nrm = std::sqrt(nrm2);
  if (nrm < 1e-150) throw DegenerateInputError("cannot normalize the zero vector");
  // Scaling by sqrt(1/nrm2) rounds each amplitude once, so e.g. (1,1) lands
  // on the nearest double to 1/sqrt(2); dividing by the rounded norm would
  // shift such entries one ulp low.
  const double inv = std::sqrt(1.0 / nrm2);
  for (auto& v : values) v *= inv;
  StateVector s;
  s.n_qubits = n;
  s.amplitudes = std::move(values);
  return {std::move(s), nrm};
}

StateVector uniform_state(int n_qubits) {
  StateVector s = new_zero_state(n_qubits);
  // sqrt(1/dim) rather than 1/sqrt(dim): exact for even qubit counts, and
  // within one rounding of the true value (never below it) for odd counts,
  // which keeps the uniform state's stationarity score at exactly 1.
  const double a = std::sqrt(1.0 / double(s.dim()));
  std::fill(s.amplitudes.begin(), s.amplitudes.end(), cdouble(a, 0.0));
  return s;
}

Gate rotation_gate(Axis axis, double theta, int target, std::vector<int> controls) {
  if (!std::isfinite(theta)) throw DomainError("rotation angle must be finite");
  const double h = theta / 2.0;
  ComplexMatrix m(2);
  switch (axis) {
    case Axis::X:
      m.at(0, 0) = std::cos(h);
      m.at(0, 1) = cdouble(0.0, -std::sin(h));
      m.at(1, 0) = cdouble(0.0, -std::sin(h));
      m.at(1, 1) = std::cos(h);
      break;
    case Axis::Y:
      m.at(0, 0) = std::cos(h);
      m.at(0, 1) = -std::sin(h);
      m.at(1, 0) = std::sin(h);
      m.at(1, 1) = std::cos(h);
      break;
    case Axis::Z:
      m.at(0, 0) = std::polar(1.0, -h);
      m.at(1, 1) = std::polar(1.0, h);
      break;
  }
  return {std::move(m), {target}, std::move(controls)};
}

Gate hadamard(int target) {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix m(2);
  m.at(0, 0) = r;
  m.at(0, 1) = r;
  m.at(1, 0) = r;
  m.at(1, 1) = -r;
  return {std::move(m), {target}, {}};
}

Gate pauli_x(int target, std::vector<int> controls) {
  ComplexMatrix m(2);
  m.at(0, 1) = 1.0;
  m.at(1, 0) = 1.0;
  return {std::move(m), {target}, std::move(controls)};
}

Gate swap_gate(int a, int b, std::vector<int> controls) {
  ComplexMatrix m(4);
  m.at(0, 0) = 1.0;
  m.at(1, 2) = 1.0;
  m.at(2, 1) = 1.0;
  m.at(3, 3) = 1.0;
  return {std::move(m), {a, b}, std::move(controls)};
}

StateVector apply_gate(const StateVector& state, const Gate& gate) {
  if (!is_unitary(gate.matrix, kGateUnitarityTol))
    throw UnitarityError("gate matrix is not unitary within 1e-10");
  return apply_matrix(state, gate.matrix, gate.targets, gate.controls);
}

StateVector apply_gates(const StateVector& state, std::span<const Gate> gates) {
  StateVector s = state;
  for (const Gate& g : gates) s = apply_gate(s, g);
  return s;
}

StateVector apply_block_unitary(const StateVector& state, const ComplexMatrix& matrix,
                                std::span<const int> targets) {
  if ((matrix.dim & (matrix.dim - 1)) != 0 || matrix.dim == 0)
    throw ShapeError("block dimension " + std::to_string(matrix.dim) +
                     " is not a power of two");
  if (!is_unitary(matrix, kBlockUnitarityTol))
    throw UnitarityError("block matrix is not unitary within 1e-8");
  return apply_matrix(state, matrix, targets, {});
}

MeasurementOutcome measure_qubit(const StateVector& state, int qubit, int postselect) {
  if (postselect != 0 && postselect != 1)
    throw DomainError("postselect bit must be 0 or 1");
  const int q[] = {qubit};
  check_qubits_in_range(state, q, "measured");
  const int pos = bit_pos(state.n_qubits, qubit);
  double p[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < state.dim(); ++i)
    p[(i >> pos) & 1u] += std::norm(state.amplitudes[i]);
  if (p[postselect] <= kBranchFloor)
    throw ImpossibleOutcomeError("postselected branch " + std::to_string(postselect) +
                                 " of qubit " + std::to_string(qubit) +
                                 " has probability " + std::to_string(p[postselect]));
  return collapse(state, qubit, postselect, p[postselect]);
}

MeasurementOutcome measure_qubit(const StateVector& state, int qubit, Rng& rng) {
  const int q[] = {qubit};
  check_qubits_in_range(state, q, "measured");
  const int pos = bit_pos(state.n_qubits, qubit);
  double p[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < state.dim(); ++i)
    p[(i >> pos) & 1u] += std::norm(state.amplitudes[i]);
  const int bit = portable_uniform(rng) < p[0] ? 0 : 1;
  return collapse(state, qubit, bit, p[bit]);
}

std::map<std::uint64_t, std::uint64_t> sample(const StateVector& state,
                                              std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw DomainError("shot count must be positive");
  std::vector<double> cum(state.dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    acc += std::norm(state.amplitudes[i]);
    cum[i] = acc;
  }
  Rng rng(seed);
  std::map<std::uint64_t, std::uint64_t> hist;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = portable_uniform(rng) * acc;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t idx = std::min<std::size_t>(it - cum.begin(), state.dim() - 1);
    ++hist[idx];
  }
  return hist;
}

cdouble inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim())
    throw ShapeError("inner product of states with dimensions " + std::to_string(a.dim()) +
                     " and " + std::to_string(b.dim()));
  cdouble acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return acc;
}

}  // namespace qts
