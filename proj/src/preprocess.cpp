#include "qts/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qts/error.hpp"

namespace qts {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

}  // namespace

SmoothingCoefficients smoothing_coefficients(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("smoothing alpha must lie in (0, 1)");
  const double sa = std::sqrt(alpha);
  const double sb = std::sqrt(1.0 - alpha);
  return {alpha, sa + sb, sa - sb};
}

ExpSmoothResult quantum_exp_smooth(std::span<const StateVector> history, double alpha) {
  if (history.empty()) throw ShapeError("smoothing needs at least one state");
  const auto [al, a, b] = smoothing_coefficients(alpha);
  (void)al;
  const std::size_t dim = history[0].dim();
  for (const auto& s : history)
    if (s.dim() != dim) throw ShapeError("smoothing history states differ in dimension");

  // Carry the unit state v and the scale s with w = s*v, so renormalizing
  // never loses the unnormalized recurrence.
  std::vector<cdouble> w(history[0].amplitudes);
  for (auto& x : w) x *= a;
  std::vector<double> trace;
  trace.reserve(history.size());

  auto renorm = [&](std::vector<cdouble>& v) {
    double nrm2 = 0.0;
    for (const auto& x : v) nrm2 += std::norm(x);
    const double nrm = std::sqrt(nrm2);
    if (nrm < 1e-12)
      throw DegenerateInputError("smoothing recurrence cancelled to the zero vector");
    return nrm;
  };

  double scale = renorm(w);
  trace.push_back(scale);
  std::vector<cdouble> v = w;
  for (auto& x : v) x /= scale;

  for (std::size_t i = 1; i < history.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j)
      v[j] = a * history[i].amplitudes[j] + b * scale * v[j];
    scale = renorm(v);
    trace.push_back(scale);
    for (auto& x : v) x /= scale;
  }

  StateVector out;
  out.n_qubits = history[0].n_qubits;
  out.amplitudes = std::move(v);
  return {std::move(out), std::move(trace)};
}

std::vector<double> classical_exp_smooth(std::span<const double> values, double alpha) {
  if (values.empty()) throw ShapeError("smoothing needs at least one value");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("smoothing alpha must lie in (0, 1)");
  std::vector<double> out(values.size());
  out[0] = values[0];
  for (std::size_t i = 1; i < values.size(); ++i)
    out[i] = alpha * values[i] + (1.0 - alpha) * out[i - 1];
  return out;
}

namespace {

BinResult hadamard_postselect(const StateVector& state, std::size_t k, bool msb_side) {
  if (!is_pow2(k) || k < 2)
    throw ShapeError("bin width " + std::to_string(k) + " must be a power of two >= 2");
  if (state.dim() % k != 0 || state.dim() < k)
    throw ShapeError("bin width " + std::to_string(k) + " does not divide dimension " +
                     std::to_string(state.dim()));
  const int m = log2_exact(k);
  const int n = state.n_qubits;

  StateVector s = state;
  for (int j = 0; j < m; ++j) {
    const int q = msb_side ? j : n - m + j;
    s = apply_gate(s, hadamard(q));
  }
  double prob = 1.0;
  for (int j = 0; j < m; ++j) {
    // After each collapse the register shrinks by one qubit; the qubit to
    // postselect next is always at the same end.
    const int q = msb_side ? 0 : s.n_qubits - 1;
    auto out = measure_qubit(s, q, 0);
    prob *= out.probability;
    s = std::move(out.collapsed);
  }
  return {std::move(s), prob};
}

}  // namespace

BinResult quantum_bin_average(const StateVector& state, std::size_t k) {
  return hadamard_postselect(state, k, /*msb_side=*/false);
}

BinResult moving_average_operator(const StateVector& state, std::size_t k) {
  return hadamard_postselect(state, k, /*msb_side=*/true);
}

std::vector<double> classical_bin_means(std::span<const double> values, std::size_t k) {
  if (k == 0 || values.empty() || values.size() % k != 0)
    throw ShapeError("bin width " + std::to_string(k) + " does not divide " +
                     std::to_string(values.size()) + " values");
  std::vector<double> out(values.size() / k, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) out[i / k] += values[i];
  for (auto& x : out) x /= double(k);
  return out;
}

RealMatrix haar_matrix(std::size_t n, bool normalized) {
  if (!is_pow2(n)) throw ShapeError("Haar matrix size must be a power of two");
  RealMatrix h(1);
  h.at(0, 0) = 1.0;
  for (std::size_t sz = 2; sz <= n; sz <<= 1) {
    const std::size_t half = sz / 2;
    RealMatrix next(sz);
    for (std::size_t r = 0; r < half; ++r)
      for (std::size_t c = 0; c < half; ++c) {
        next.at(r, 2 * c) = h.at(r, c);
        next.at(r, 2 * c + 1) = h.at(r, c);
      }
    for (std::size_t r = 0; r < half; ++r) {
      next.at(half + r, 2 * r) = 1.0;
      next.at(half + r, 2 * r + 1) = -1.0;
    }
    h = std::move(next);
  }
  if (normalized) {
    for (std::size_t r = 0; r < n; ++r) {
      double nrm2 = 0.0;
      for (std::size_t c = 0; c < n; ++c) nrm2 += h.at(r, c) * h.at(r, c);
      const double inv = 1.0 / std::sqrt(nrm2);
      for (std::size_t c = 0; c < n; ++c) h.at(r, c) *= inv;
    }
  }
  return h;
}

StateVector quantum_haar_transform(const StateVector& state) {
  if (state.n_qubits == 0) return state;
  const auto h = haar_matrix(state.dim(), /*normalized=*/true).to_complex();
  std::vector<int> targets(state.n_qubits);
  std::iota(targets.begin(), targets.end(), 0);
  return apply_block_unitary(state, h, targets);
}

WaveletCompression wavelet_compress(const StateVector& state, std::size_t keep) {
  if (keep == 0 || keep > state.dim())
    throw DomainError("keep count " + std::to_string(keep) +
                      " outside [1, " + std::to_string(state.dim()) + "]");
  const StateVector t = quantum_haar_transform(state);
  std::vector<std::size_t> order(t.dim());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const double mi = std::abs(t.amplitudes[i]);
    const double mj = std::abs(t.amplitudes[j]);
    if (mi != mj) return mi > mj;
    return i < j;
  });

  WaveletCompression out;
  out.kept.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r)
    out.kept.emplace_back(order[r], t.amplitudes[order[r]]);
  std::sort(out.kept.begin(), out.kept.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t r = keep; r < order.size(); ++r)
    out.dropped_energy += std::norm(t.amplitudes[order[r]]);
  return out;
}

std::vector<Gate> cyclic_shift_operator(int n_qubits, std::size_t amount) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ShapeError("cyclic shift needs a register of 1.." + std::to_string(kMaxQubits) +
                     " qubits");
  const std::size_t dim = std::size_t{1} << n_qubits;
  amount %= dim;
  std::vector<Gate> gates;
  if (amount == 0) return gates;

  // Increment ladder on the top `span` qubits: X on qubit j fires when all
  // less significant qubits of the span are 1, applied MSB-first so every
  // gate sees pre-increment values.
  auto emit_increment = [&gates](int span) {
    for (int j = 0; j < span; ++j) {
      std::vector<int> controls;
      for (int c = j + 1; c < span; ++c) controls.push_back(c);
      gates.push_back(pauli_x(j, std::move(controls)));
    }
  };

  if (is_pow2(amount)) {
    // Adding 2^m increments the integer formed by the n-m upper qubits.
    const int m = log2_exact(amount);
    emit_increment(n_qubits - m);
  } else {
    for (std::size_t rep = 0; rep < amount; ++rep) emit_increment(n_qubits);
  }
  return gates;
}

DifferenceResult quantum_difference(const StateVector& state, DifferenceOrder order) {
  if (order.kind == DifferenceOrder::Kind::Second) {
    auto pass1 = quantum_difference(state, DifferenceOrder::first());
    auto pass2 = quantum_difference(pass1.difference_part, DifferenceOrder::first());
    return {std::move(pass2.full_state), std::move(pass2.difference_part),
            pass1.postselect_prob * pass2.postselect_prob, order};
  }

  const std::size_t lag = order.kind == DifferenceOrder::Kind::First ? 1 : order.lag;
  if (state.n_qubits < 1)
    throw ShapeError("differencing needs at least a 1-qubit register");
  if (state.n_qubits + 1 > kMaxQubits)
    throw CapacityError("differencing ancilla exceeds the qubit cap");
  if (lag < 1 || lag >= state.dim())
    throw ShapeError("seasonal lag " + std::to_string(lag) +
                     " outside [1, " + std::to_string(state.dim() - 1) + "]");

  // Ancilla |1> prepended as the new most significant qubit.
  StateVector ext;
  ext.n_qubits = state.n_qubits + 1;
  ext.amplitudes.assign(state.dim() * 2, 0.0);
  std::copy(state.amplitudes.begin(), state.amplitudes.end(),
            ext.amplitudes.begin() + state.dim());

  ext = apply_gate(ext, hadamard(0));
  for (Gate g : cyclic_shift_operator(state.n_qubits, lag)) {
    for (int& t : g.targets) ++t;
    for (int& c : g.controls) ++c;
    g.controls.push_back(0);
    ext = apply_gate(ext, g);
  }
  ext = apply_gate(ext, hadamard(0));

  MeasurementOutcome top;
  try {
    top = measure_qubit(ext, 0, 0);
  } catch (const ImpossibleOutcomeError&) {
    throw ImpossibleOutcomeError(
        "difference branch has zero probability (constant input)");
  }
  return {std::move(ext), std::move(top.collapsed), top.probability, order};
}

std::vector<double> classical_difference(std::span<const double> values,
                                         DifferenceOrder order, bool cyclic) {
  const std::size_t lag = order.kind == DifferenceOrder::Kind::Seasonal ? order.lag : 1;
  const int passes = order.kind == DifferenceOrder::Kind::Second ? 2 : 1;
  if (lag < 1) throw ShapeError("seasonal lag must be positive");

  std::vector<double> cur(values.begin(), values.end());
  for (int p = 0; p < passes; ++p) {
    if (cyclic) {
      if (cur.size() < 2 || lag >= cur.size())
        throw ShapeError("series too short for cyclic lag " + std::to_string(lag));
      std::vector<double> next(cur.size());
      for (std::size_t i = 0; i < cur.size(); ++i)
        next[i] = cur[i] - cur[(i + cur.size() - lag) % cur.size()];
      cur = std::move(next);
    } else {
      if (cur.size() <= lag)
        throw ShapeError("series of length " + std::to_string(cur.size()) +
                         " too short for lag " + std::to_string(lag));
      std::vector<double> next(cur.size() - lag);
      for (std::size_t i = lag; i < cur.size(); ++i) next[i - lag] = cur[i] - cur[i - lag];
      cur = std::move(next);
    }
  }
  return cur;
}

double stationarity_score(const StateVector& state) {
  // <H...H|state> = sum(amplitudes)/sqrt(dim). The sum is reduced pairwise
  // and the dim division applied last (an exact exponent shift), so the
  // uniform state lands on 1 without accumulation drift. Rounding can still
  // leave the square a hair outside [0,1]; clamp to the codomain.
  std::vector<cdouble> acc = state.amplitudes;
  for (std::size_t len = acc.size(); len > 1; len /= 2)
    for (std::size_t i = 0; i < len / 2; ++i) acc[i] += acc[i + len / 2];
  const double score = std::norm(acc[0]) / double(state.dim());
  return std::min(1.0, std::max(0.0, score));
}

}  // namespace qts
