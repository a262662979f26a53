#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "qts/matrix.hpp"
#include "qts/statevec.hpp"

namespace qts {

// Exponential smoothing weights on amplitudes. For alpha in (0,1),
//   a = sqrt(alpha) + sqrt(1 - alpha)
//   b = sqrt(alpha) - sqrt(1 - alpha)
// so a^2 + b^2 = 2 and alpha = 0.5 gives b = 0 (the smoothed state is the
// latest point).
struct SmoothingCoefficients {
  double alpha = 0.0;
  double a = 0.0;
  double b = 0.0;
};

SmoothingCoefficients smoothing_coefficients(double alpha);

// Amplitude-level smoothing of a history of unit states y_0..y_m via
//   w_0 = a * y_0,   w_i = a * y_i + b * w_{i-1}
// Each w_i is renormalized for simulation, but its norm is recorded in
// norm_trace[i], so norm_trace[i] * smoothed state at step i reproduces the
// unnormalized recurrence (equivalently the expansion
// a*b^i*y_0 + sum_{j>=1} a*b^{i-j}*y_j) exactly. `smoothed` is the final
// unit state; norm_trace has one entry per history element.
struct ExpSmoothResult {
  StateVector smoothed;
  std::vector<double> norm_trace;
};

ExpSmoothResult quantum_exp_smooth(std::span<const StateVector> history, double alpha);

// Value-level reference: y'_0 = y_0, y'_i = alpha*y_i + (1-alpha)*y'_{i-1}.
std::vector<double> classical_exp_smooth(std::span<const double> values, double alpha);

struct BinResult {
  StateVector reduced;
  double postselect_prob = 0.0;
};

// Hadamards on the log2(k) least significant qubits followed by
// postselecting them all on |0>. The surviving register holds amplitudes
// proportional to the k-wide bin sums; postselect_prob is the joint
// probability of the all-zero outcome, ||bin sums||^2 / k for a unit input.
BinResult quantum_bin_average(const StateVector& state, std::size_t k);

// Same construction on the log2(k) most significant qubits: the reduced
// register holds the stride-(dim/k) sums across the k segments.
BinResult moving_average_operator(const StateVector& state, std::size_t k);

std::vector<double> classical_bin_means(std::span<const double> values, std::size_t k);

// Haar wavelet matrix of size n (a power of two), built by the recurrence
//   H_1 = [1],  H_2N = [ H_N (x) (1, 1) ; I_N (x) (1, -1) ]
// and, when `normalized`, rescaled to unit-norm rows (orthogonal).
RealMatrix haar_matrix(std::size_t n, bool normalized);

// Applies the normalized Haar matrix across the full register.
StateVector quantum_haar_transform(const StateVector& state);

// Haar transform followed by keeping the `keep` largest-magnitude
// coefficients (ties broken toward the lower index). dropped_energy is the
// squared norm that was zeroed out; kept pairs are sorted by index.
struct WaveletCompression {
  std::vector<std::pair<std::size_t, cdouble>> kept;
  double dropped_energy = 0.0;
};

WaveletCompression wavelet_compress(const StateVector& state, std::size_t keep);

// Gate realization of |j> -> |j + amount mod 2^n>: a ladder of
// multi-controlled X gates (most significant target first). On amplitude
// vectors this rotates entries downward: entry i moves to i + amount.
// Power-of-two amounts address the upper qubits directly; other amounts
// repeat the unit shift, which is valid but linearly more gates.
std::vector<Gate> cyclic_shift_operator(int n_qubits, std::size_t amount = 1);

struct DifferenceOrder {
  enum class Kind { First, Second, Seasonal };
  Kind kind = Kind::First;
  std::size_t lag = 1;

  static DifferenceOrder first() { return {Kind::First, 1}; }
  static DifferenceOrder second() { return {Kind::Second, 1}; }
  static DifferenceOrder seasonal(std::size_t s) { return {Kind::Seasonal, s}; }
};

// Differencing circuit: an ancilla prepared in |1> is prepended as the most
// significant qubit, a Hadamard splits the register into (y, -y)/sqrt(2),
// a controlled cyclic shift rotates the lower branch, and a final Hadamard
// interferes the branches. The ancilla-0 half of full_state then carries the
// cyclic differences y_i - y_{i-s} (times 1/2) and the ancilla-1 half the
// cyclic sums. difference_part is the ancilla-0 branch after postselection,
// postselect_prob its probability (probabilities multiply across the two
// passes of a second-order difference).
struct DifferenceResult {
  StateVector full_state;
  StateVector difference_part;
  double postselect_prob = 0.0;
  DifferenceOrder order;
};

DifferenceResult quantum_difference(const StateVector& state, DifferenceOrder order);

// Plain differences of raw values. cyclic=true wraps around (same length
// out); cyclic=false drops the first lag entries per pass.
std::vector<double> classical_difference(std::span<const double> values,
                                         DifferenceOrder order, bool cyclic);

// Squared overlap with the equal superposition, |<H...H 0|state>|^2.
// 1 for the uniform state, 2^-n for a basis state.
double stationarity_score(const StateVector& state);

}  // namespace qts
