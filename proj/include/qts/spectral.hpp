#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qts/matrix.hpp"
#include "qts/statevec.hpp"

namespace qts {

// Fourier matrix F[j][k] = exp(+2*pi*i*j*k/N) / sqrt(N), N a power of two.
ComplexMatrix qft_matrix(std::size_t n);

// Fourier transform applied as a single dense block, outputs in natural
// frequency order. With empty `targets` the whole register is transformed;
// otherwise `targets` names the sub-register, most significant qubit first.
StateVector apply_qft(const StateVector& state, std::vector<int> targets = {});
StateVector apply_qft_inverse(const StateVector& state, std::vector<int> targets = {});

// Reference transform computed by direct summation. Kept independent of the
// gate path so the two implementations can be checked against each other.
std::vector<cdouble> classical_dft(std::span<const cdouble> values, bool inverse = false);

struct SwapTestResult {
  double p_zero = 0.0;      // probability of reading 0 on the control qubit
  double overlap_sq = 0.0;  // 2*p_zero - 1, clamped to [0, 1]
};

// Swap test between two registers of equal width. Without `shots` the
// control-qubit distribution is computed exactly from the final state;
// with `shots` it is estimated from seeded samples of the same circuit.
SwapTestResult swap_test(const StateVector& a, const StateVector& b,
                         std::optional<std::uint64_t> shots = std::nullopt,
                         std::uint64_t seed = 0);

struct QftDistanceReport {
  std::string strategy;
  double p_minus = 0.0;           // probability of the interference branch
  double distance_estimate = 0.0; // Euclidean distance between the spectra
  int qubits_used = 0;
  std::optional<std::uint64_t> shots;
  // Two-register runs lose the sign and phase of the overlap; this is set
  // when the true overlap is negative or has a significant imaginary part,
  // meaning a magnitude-only reconstruction of the distance is unreliable.
  bool overlap_flagged = false;
};

// Spectral distance between two equal-length series (length a power of two).
//
// stacked: both series share one register with a selector qubit on top; a
// Hadamard on the selector interferes the two spectra and the minus branch
// weight recovers ||F y1 - F y2|| without normalizing the inputs.
QftDistanceReport qft_distance_stacked(std::span<const double> y1,
                                       std::span<const double> y2);

// superposed: each series is normalized first, the difference of the unit
// vectors is transformed directly. Identical inputs leave nothing to
// transform and are rejected as degenerate.
QftDistanceReport qft_distance_superposed(std::span<const double> y1,
                                          std::span<const double> y2);

// two-register: each normalized series is transformed in its own register
// and compared with a swap test, optionally shot-sampled.
QftDistanceReport qft_distance_two_register(
    std::span<const double> y1, std::span<const double> y2,
    std::optional<std::uint64_t> shots = std::nullopt, std::uint64_t seed = 0);

}  // namespace qts
