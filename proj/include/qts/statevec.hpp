#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "qts/matrix.hpp"

namespace qts {

// Dense simulation is capped here: 2^24 complex doubles is 256 MiB, which is
// the largest register the toolkit is expected to handle.
inline constexpr int kMaxQubits = 24;

// One seedable generator per simulation context; nothing in the library
// touches global random state.
using Rng = std::mt19937_64;

// Dense state over n_qubits. Qubit 0 is the leftmost tensor factor, i.e. the
// most significant bit of the basis index: for basis index i, the bit of
// qubit q is (i >> (n_qubits - 1 - q)) & 1. A 0-qubit state (one amplitude)
// is legal and shows up as the result of measuring the last qubit away.
struct StateVector {
  int n_qubits = 0;
  std::vector<cdouble> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
  double norm() const;
};

enum class Axis { X, Y, Z };

// k-qubit operator placed on `targets`, optionally conditioned on every
// qubit in `controls` being |1>. targets[0] is the most significant qubit of
// the gate's own 2^k-dimensional space.
struct Gate {
  ComplexMatrix matrix;
  std::vector<int> targets;
  std::vector<int> controls;
};

struct MeasurementOutcome {
  double probability = 0.0;
  StateVector collapsed;  // measured qubit removed from the register
  int bit = 0;
};

StateVector new_zero_state(int n_qubits);

// Normalizes `values` into a state and reports the original L2 norm.
// Length must be a power of two; the zero vector is rejected.
std::pair<StateVector, double> from_amplitudes(std::vector<cdouble> values);

// |0...0> mapped through a Hadamard on every qubit (equal superposition).
StateVector uniform_state(int n_qubits);

// Half-angle convention: rotation_gate(axis, theta) returns the 2x2 matrix
// with entries in theta/2, e.g. for Axis::X
//   [ cos(theta/2)     -i sin(theta/2) ]
//   [ -i sin(theta/2)   cos(theta/2)   ]
// so rotation_gate(Axis::X, pi) is ((0,-i),(-i,0)) and
// rotation_gate(Axis::Z, pi/2) is diag(e^{-i pi/4}, e^{+i pi/4}).
Gate rotation_gate(Axis axis, double theta, int target = 0,
                   std::vector<int> controls = {});

Gate hadamard(int target);
Gate pauli_x(int target, std::vector<int> controls = {});
Gate swap_gate(int a, int b, std::vector<int> controls = {});

StateVector apply_gate(const StateVector& state, const Gate& gate);
StateVector apply_gates(const StateVector& state, std::span<const Gate> gates);

// Applies a dense 2^k x 2^k unitary to the subspace spanned by `targets`
// (no controls). The matrix must be unitary within 1e-8.
StateVector apply_block_unitary(const StateVector& state, const ComplexMatrix& matrix,
                                std::span<const int> targets);

// Postselecting form: fails with ImpossibleOutcomeError when the requested
// branch has probability <= 1e-12.
MeasurementOutcome measure_qubit(const StateVector& state, int qubit, int postselect);
// Sampling form: the branch is drawn from `rng`.
MeasurementOutcome measure_qubit(const StateVector& state, int qubit, Rng& rng);

// Computational-basis histogram of `shots` draws. Deterministic for a given
// seed; uses its own generator derived from `seed`.
std::map<std::uint64_t, std::uint64_t> sample(const StateVector& state,
                                              std::uint64_t shots, std::uint64_t seed);

// <a|b>, conjugate-linear in `a`.
cdouble inner_product(const StateVector& a, const StateVector& b);

}  // namespace qts
