#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qts/matrix.hpp"
#include "qts/statevec.hpp"

namespace qts {

struct DriftFit {
  double c = 0.0;            // mean step of the series
  double residual_std = 0.0; // population std of the de-drifted steps
};

// Random-walk-with-drift baseline: c is the mean first difference.
DriftFit drift_fit(std::span<const double> values);

struct ArimaParams {
  std::size_t p = 0;
  std::size_t d = 0;
  std::size_t q = 0;
  double c = 0.0;         // intercept on the differenced scale
  std::vector<double> a;  // AR coefficients, lag 1 first
  std::vector<double> b;  // MA coefficients, lag 1 first
};

struct ClassicalFitResult {
  ArimaParams params;
  // One-step residuals on the differenced scale, aligned with that series
  // (entries before index p are zero, the conditional convention).
  std::vector<double> residuals;
  std::vector<double> loss_trace;  // mse after each refinement sweep
  double mse = 0.0;
  bool converged = true;
};

// Conditional least squares. AR-only models need a single linear solve;
// moving-average terms are handled by alternating residual re-estimation
// with the solve until the parameters settle (tolerance 1e-8, at most 200
// sweeps; non-convergence is reported, not thrown).
ClassicalFitResult classical_fit(std::span<const double> values, std::size_t p,
                                 std::size_t d, std::size_t q);

// Iterates the fitted recurrence past the end of `history` with future
// shocks set to zero, then integrates the differences back to the original
// scale. Returns `horizon` values.
std::vector<double> predict(const ArimaParams& params, std::span<const double> history,
                            std::size_t horizon);

struct SeasonalityScan {
  std::size_t best_p = 0;
  std::vector<double> scores;  // AIC per candidate order, index 0 = p(1)
};

// Order selection for the AR part: fits p = 1..p_max and scores each fit by
// 2p + n*ln(mse). Ties resolve to the smaller order.
SeasonalityScan seasonality_scan(std::span<const double> series, std::size_t p_max);

// ---------------------------------------------------------------------------
// Variational forecaster

enum class InputForm { TwoRegister, WeightedSum, Stacked };

enum class Optimizer { Spsa, NelderMead };

struct VariationalConfig {
  std::size_t p = 1;
  std::size_t d = 0;
  std::size_t q = 0;
  // Width of the lag register. Zero means the smallest register that holds
  // the longer of the two lag windows.
  int n_qubits = 0;
  int layers = 1;
  InputForm input_form = InputForm::TwoRegister;
  // WeightedSum mixing angles; must satisfy theta_y^2 + theta_eps^2 = 1.
  double theta_y = 0.7071067811865476;
  double theta_eps = 0.7071067811865476;
  Optimizer optimizer = Optimizer::Spsa;
  std::size_t max_iters = 200;
  std::uint64_t seed = 0;
};

struct VariationalModel {
  int n_qubits = 0;  // total circuit width, including any shock register
  int layers = 0;
  std::vector<double> thetas;
  InputForm input_form = InputForm::TwoRegister;
  std::size_t readout = 0;  // amplitude index read as the prediction
};

struct VariationalFitResult {
  VariationalModel model;
  std::vector<double> residuals;   // differenced scale, zeros before the
                                   // first fitted index
  std::vector<double> loss_trace;  // best loss seen after each iteration
  double mse = 0.0;
  bool converged = false;
};

// One R_y rotation per qubit per layer followed by a ring of CX gates
// (qubit i controls i+1 mod n; the ring is dropped for a single qubit).
std::vector<Gate> build_ansatz(int n_qubits, int layers, std::span<const double> thetas);

// Combines a lag state and a shock state into the circuit input register.
StateVector prepare_model_input(const StateVector& y_state, const StateVector& eps_state,
                                InputForm form, double theta_y, double theta_eps);

// Unitary whose first row is the normalized concatenation (a, b), padded to
// a power of two; the remaining rows complete an orthonormal basis. Applying
// it to a data state leaves <params, data> in amplitude 0.
ComplexMatrix parameter_row_unitary(std::span<const double> a, std::span<const double> b);

// Objective used by variational_fit, evaluated at explicit angles. Exposed
// so the loss landscape can be probed directly.
double variational_loss(std::span<const double> series, const VariationalConfig& config,
                        std::span<const double> thetas);

VariationalFitResult variational_fit(std::span<const double> series,
                                     const VariationalConfig& config);

// Single two-sided simultaneous-perturbation gradient estimate at `thetas`
// with the iteration-k perturbation gain. Draws one Rademacher direction
// from `rng`; averaging many calls recovers the descent direction.
std::vector<double> spsa_gradient_estimate(
    const std::function<double(std::span<const double>)>& loss,
    std::span<const double> thetas, std::size_t k, Rng& rng);

// ---------------------------------------------------------------------------
// Circulant formulation of the AR recursion

struct CirculantOperator {
  std::size_t n = 0;
  std::vector<cdouble> first_column;
  std::vector<cdouble> eigenvalues;  // sqrt(n) times the DFT of the column
};

CirculantOperator circulant_from_column(std::vector<cdouble> column);

// Stencil for the AR recursion: column[0] = 1, column[i] = -a_i, so that
// C y stacks the one-step residuals (with wrap-around at the boundary).
CirculantOperator circulant_from_params(const ArimaParams& params, std::size_t n);

// C v computed in the Fourier eigenbasis: transform, scale by eigenvalues,
// transform back. C is generally not unitary, so the result is renormalized
// and the consumed norm returned alongside.
std::pair<StateVector, double> apply_circulant(const CirculantOperator& op,
                                               const StateVector& state);

}  // namespace qts
