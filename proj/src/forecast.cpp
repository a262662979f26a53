#include "qts/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qts/error.hpp"
#include "qts/spectral.hpp"

namespace qts {

namespace {

double portable_uniform(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

int width_for(std::size_t len) {
  int w = 0;
  while ((std::size_t{1} << w) < len) ++w;
  return w;
}

std::vector<double> difference_times(std::span<const double> values, std::size_t d) {
  std::vector<double> z(values.begin(), values.end());
  for (std::size_t i = 0; i < d; ++i) {
    if (z.size() < 2)
      throw ShapeError("series too short to difference " + std::to_string(d) + " times");
    std::vector<double> next(z.size() - 1);
    for (std::size_t t = 1; t < z.size(); ++t) next[t - 1] = z[t] - z[t - 1];
    z = std::move(next);
  }
  return z;
}

// Householder QR least squares for a thin row-major system. Columns whose
// remaining mass collapses are treated as rank deficiency rather than being
// silently pivoted away.
std::vector<double> solve_least_squares(std::vector<double> a, std::size_t rows,
                                        std::size_t cols, std::vector<double> b) {
  if (rows < cols) throw ShapeError("least squares needs at least as many rows as columns");
  for (std::size_t k = 0; k < cols; ++k) {
    double colnorm = 0.0;
    for (std::size_t r = k; r < rows; ++r) colnorm += a[r * cols + k] * a[r * cols + k];
    colnorm = std::sqrt(colnorm);
    if (colnorm < 1e-12) throw RankDeficiencyError("design matrix is rank deficient");

    const double alpha = a[k * cols + k] >= 0.0 ? -colnorm : colnorm;
    std::vector<double> v(rows - k);
    v[0] = a[k * cols + k] - alpha;
    for (std::size_t r = k + 1; r < rows; ++r) v[r - k] = a[r * cols + k];
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    if (vnorm2 < 1e-300) continue;  // column already in triangular form

    for (std::size_t c = k; c < cols; ++c) {
      double dot = 0.0;
      for (std::size_t r = k; r < rows; ++r) dot += v[r - k] * a[r * cols + c];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t r = k; r < rows; ++r) a[r * cols + c] -= f * v[r - k];
    }
    double dot = 0.0;
    for (std::size_t r = k; r < rows; ++r) dot += v[r - k] * b[r];
    const double f = 2.0 * dot / vnorm2;
    for (std::size_t r = k; r < rows; ++r) b[r] -= f * v[r - k];
  }

  std::vector<double> x(cols, 0.0);
  for (std::size_t k = cols; k-- > 0;) {
    double acc = b[k];
    for (std::size_t c = k + 1; c < cols; ++c) acc -= a[k * cols + c] * x[c];
    const double piv = a[k * cols + k];
    if (std::abs(piv) < 1e-12) throw RankDeficiencyError("design matrix is rank deficient");
    x[k] = acc / piv;
  }
  return x;
}

// Forward residual pass with the conditional convention: shocks before the
// first fully-lagged index are pinned to zero.
std::vector<double> residual_pass(std::span<const double> z, const ArimaParams& par) {
  const std::size_t m = z.size();
  std::vector<double> eps(m, 0.0);
  for (std::size_t t = par.p; t < m; ++t) {
    double fit = par.c;
    for (std::size_t i = 1; i <= par.p; ++i) fit += par.a[i - 1] * z[t - i];
    for (std::size_t j = 1; j <= par.q; ++j)
      fit += par.b[j - 1] * (t >= j ? eps[t - j] : 0.0);
    eps[t] = z[t] - fit;
  }
  return eps;
}

double fitted_mse(std::span<const double> eps, std::size_t p) {
  double acc = 0.0;
  for (std::size_t t = p; t < eps.size(); ++t) acc += eps[t] * eps[t];
  return acc / double(eps.size() - p);
}

}  // namespace

DriftFit drift_fit(std::span<const double> values) {
  if (values.size() < 2) throw ShapeError("drift fit needs at least two points");
  const std::size_t m = values.size() - 1;
  double c = 0.0;
  for (std::size_t t = 0; t < m; ++t) c += values[t + 1] - values[t];
  c /= double(m);
  double var = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const double r = values[t + 1] - values[t] - c;
    var += r * r;
  }
  return {c, std::sqrt(var / double(m))};
}

ClassicalFitResult classical_fit(std::span<const double> values, std::size_t p,
                                 std::size_t d, std::size_t q) {
  if (values.size() <= p + q + d + 2)
    throw ShapeError("series of length " + std::to_string(values.size()) +
                     " too short for order (" + std::to_string(p) + "," +
                     std::to_string(d) + "," + std::to_string(q) + ")");

  const std::vector<double> z = difference_times(values, d);
  const std::size_t m = z.size();
  const std::size_t rows = m - p;
  const std::size_t cols = 1 + p + q;

  ClassicalFitResult out;
  out.params.p = p;
  out.params.d = d;
  out.params.q = q;
  out.params.a.assign(p, 0.0);
  out.params.b.assign(q, 0.0);

  std::vector<double> eps(m, 0.0);
  std::vector<double> prev(cols, 0.0);
  const std::size_t sweeps = q == 0 ? 1 : 200;
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    // The zero-initialized shocks would make the MA columns identically
    // zero on the first sweep, so that solve runs without them.
    const std::size_t active = sweep == 0 ? 1 + p : cols;
    std::vector<double> design(rows * active);
    std::vector<double> target(rows);
    for (std::size_t t = p; t < m; ++t) {
      const std::size_t r = t - p;
      design[r * active + 0] = 1.0;
      for (std::size_t i = 1; i <= p; ++i) design[r * active + i] = z[t - i];
      for (std::size_t j = 1; j + p < active; ++j)
        design[r * active + p + j] = t >= j ? eps[t - j] : 0.0;
      target[r] = z[t];
    }
    const auto x = solve_least_squares(std::move(design), rows, active, std::move(target));

    out.params.c = x[0];
    for (std::size_t i = 0; i < p; ++i) out.params.a[i] = x[1 + i];
    for (std::size_t j = 0; j < q; ++j)
      out.params.b[j] = 1 + p + j < active ? x[1 + p + j] : 0.0;

    eps = residual_pass(z, out.params);
    out.loss_trace.push_back(fitted_mse(eps, p));

    std::vector<double> full(cols, 0.0);
    for (std::size_t i = 0; i < active; ++i) full[i] = x[i];
    double delta = 0.0;
    for (std::size_t i = 0; i < cols; ++i)
      delta = std::max(delta, std::abs(full[i] - prev[i]));
    prev = std::move(full);
    if (q == 0 || (sweep > 0 && delta < 1e-8)) {
      out.converged = true;
      break;
    }
    out.converged = false;
  }

  out.residuals = std::move(eps);
  out.mse = out.loss_trace.back();
  return out;
}

std::vector<double> predict(const ArimaParams& params, std::span<const double> history,
                            std::size_t horizon) {
  if (history.size() < params.p + params.d)
    throw ShapeError("history of length " + std::to_string(history.size()) +
                     " too short for order (" + std::to_string(params.p) + "," +
                     std::to_string(params.d) + "," + std::to_string(params.q) + ")");

  // Tails of each integration level: tails[j] is the last value of the
  // series differenced j times.
  std::vector<double> tails(params.d + 1);
  std::vector<double> z(history.begin(), history.end());
  tails[0] = z.back();
  for (std::size_t j = 1; j <= params.d; ++j) {
    z = difference_times(z, 1);
    tails[j] = z.back();
  }

  std::vector<double> eps = residual_pass(z, params);
  std::vector<double> out;
  out.reserve(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    double next = params.c;
    for (std::size_t i = 1; i <= params.p; ++i) next += params.a[i - 1] * z[z.size() - i];
    for (std::size_t j = 1; j <= params.q; ++j)
      next += eps.size() >= j ? params.b[j - 1] * eps[eps.size() - j] : 0.0;
    z.push_back(next);
    eps.push_back(0.0);

    double value = next;
    for (std::size_t j = params.d; j-- > 0;) {
      value += tails[j];
      tails[j] = value;
    }
    out.push_back(value);
  }
  return out;
}

SeasonalityScan seasonality_scan(std::span<const double> series, std::size_t p_max) {
  if (p_max < 1 || p_max * 3 >= series.size())
    throw DomainError("candidate order limit " + std::to_string(p_max) +
                      " must satisfy 1 <= p_max < length/3");
  SeasonalityScan scan;
  scan.scores.reserve(p_max);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 1; p <= p_max; ++p) {
    const auto fit = classical_fit(series, p, 0, 0);
    const double aic =
        2.0 * double(p) + double(series.size()) * std::log(std::max(fit.mse, 1e-300));
    scan.scores.push_back(aic);
    if (aic < best) {
      best = aic;
      scan.best_p = p;
    }
  }
  return scan;
}

// ---------------------------------------------------------------------------

std::vector<Gate> build_ansatz(int n_qubits, int layers, std::span<const double> thetas) {
  if (n_qubits < 1 || layers < 1)
    throw ShapeError("ansatz needs at least one qubit and one layer");
  if (thetas.size() != std::size_t(layers) * std::size_t(n_qubits))
    throw ShapeError("expected " + std::to_string(layers * n_qubits) +
                     " angles, got " + std::to_string(thetas.size()));
  std::vector<Gate> gates;
  gates.reserve(std::size_t(layers) * std::size_t(2 * n_qubits));
  for (int l = 0; l < layers; ++l) {
    for (int qb = 0; qb < n_qubits; ++qb)
      gates.push_back(rotation_gate(Axis::Y, thetas[std::size_t(l) * n_qubits + qb], qb));
    if (n_qubits > 1)
      for (int qb = 0; qb < n_qubits; ++qb)
        gates.push_back(pauli_x((qb + 1) % n_qubits, {qb}));
  }
  return gates;
}

StateVector prepare_model_input(const StateVector& y_state, const StateVector& eps_state,
                                InputForm form, double theta_y, double theta_eps) {
  if (y_state.n_qubits != eps_state.n_qubits)
    throw ShapeError("lag and shock registers differ in width");

  switch (form) {
    case InputForm::TwoRegister: {
      StateVector joint;
      joint.n_qubits = y_state.n_qubits + eps_state.n_qubits;
      joint.amplitudes.assign(std::size_t{1} << joint.n_qubits, 0.0);
      for (std::size_t i = 0; i < y_state.dim(); ++i)
        for (std::size_t j = 0; j < eps_state.dim(); ++j)
          joint.amplitudes[(i << eps_state.n_qubits) | j] =
              y_state.amplitudes[i] * eps_state.amplitudes[j];
      return joint;
    }
    case InputForm::WeightedSum: {
      if (std::abs(theta_y * theta_y + theta_eps * theta_eps - 1.0) > 1e-9)
        throw DomainError("weighted-sum mixing angles must satisfy theta_y^2 + theta_eps^2 = 1");
      std::vector<cdouble> combo(y_state.dim());
      for (std::size_t i = 0; i < combo.size(); ++i)
        combo[i] = theta_y * y_state.amplitudes[i] + theta_eps * eps_state.amplitudes[i];
      try {
        return from_amplitudes(std::move(combo)).first;
      } catch (const DegenerateInputError&) {
        throw DegenerateInputError("weighted sum of lag and shock states cancels to zero");
      }
    }
    case InputForm::Stacked: {
      StateVector joint;
      joint.n_qubits = y_state.n_qubits + 1;
      joint.amplitudes.resize(std::size_t{1} << joint.n_qubits);
      const double inv = 1.0 / std::sqrt(2.0);
      for (std::size_t i = 0; i < y_state.dim(); ++i) {
        joint.amplitudes[i] = y_state.amplitudes[i] * inv;
        joint.amplitudes[y_state.dim() + i] = eps_state.amplitudes[i] * inv;
      }
      return joint;
    }
  }
  throw DomainError("unknown input form");
}

ComplexMatrix parameter_row_unitary(std::span<const double> a, std::span<const double> b) {
  std::vector<double> row(a.begin(), a.end());
  row.insert(row.end(), b.begin(), b.end());
  if (row.empty()) throw DegenerateInputError("parameter vector is empty");
  row.resize(std::max<std::size_t>(2, next_pow2(row.size())), 0.0);

  double norm = 0.0;
  for (double v : row) norm += v * v;
  norm = std::sqrt(norm);
  if (norm < 1e-12) throw DegenerateInputError("parameter vector is zero");
  const std::size_t dim = row.size();

  std::vector<std::vector<double>> rows;
  rows.reserve(dim);
  rows.emplace_back(dim);
  for (std::size_t i = 0; i < dim; ++i) rows[0][i] = row[i] / norm;

  for (std::size_t k = 0; rows.size() < dim && k < dim; ++k) {
    std::vector<double> cand(dim, 0.0);
    cand[k] = 1.0;
    // Two projection passes keep the basis orthogonal to working precision.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& r : rows) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim; ++i) dot += r[i] * cand[i];
        for (std::size_t i = 0; i < dim; ++i) cand[i] -= dot * r[i];
      }
    double cnorm = 0.0;
    for (double v : cand) cnorm += v * v;
    cnorm = std::sqrt(cnorm);
    if (cnorm <= 1e-12) continue;  // basis vector parallel to the span so far
    for (double& v : cand) v /= cnorm;
    rows.push_back(std::move(cand));
  }
  if (rows.size() != dim)
    throw DegenerateInputError("failed to complete an orthonormal basis");

  ComplexMatrix u(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) u.at(r, c) = rows[r][c];
  return u;
}

namespace {

// Everything variational_loss needs, precomputed once per fit: the
// differenced series, per-target lag and shock windows as unit states with
// their norms, and the circuit wiring.
struct LossContext {
  std::vector<double> z;
  std::size_t first;  // first predictable index of z
  int reg_width = 0;  // width of one input register
  int circuit_width = 0;
  int layers = 0;
  InputForm form = InputForm::TwoRegister;
  bool use_shocks = false;
  double theta_y = 0.0, theta_eps = 0.0;

  struct Sample {
    StateVector input;   // assembled circuit input (unit norm)
    double scale = 0.0;  // norm that converts amplitude back to data units
    bool empty = false;  // all-zero window: prediction is 0 by convention
  };
  std::vector<Sample> samples;

  double operator()(std::span<const double> thetas) const {
    const auto gates = build_ansatz(circuit_width, layers, thetas);
    double acc = 0.0;
    for (std::size_t t = first; t < z.size(); ++t) {
      const auto& s = samples[t - first];
      double pred = 0.0;
      if (!s.empty) {
        const StateVector out = apply_gates(s.input, gates);
        pred = out.amplitudes[0].real() * s.scale;
      }
      const double err = pred - z[t];
      acc += err * err;
    }
    return acc / double(z.size() - first);
  }
};

std::pair<StateVector, double> window_state(std::span<const double> src, std::size_t t,
                                            std::size_t lags, int width) {
  std::vector<cdouble> w(std::size_t{1} << width, 0.0);
  double norm = 0.0;
  for (std::size_t i = 1; i <= lags; ++i) {
    const double v = src[t - i];
    w[i - 1] = v;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  StateVector state;
  state.n_qubits = width;
  if (norm > 0.0)
    for (auto& amp : w) amp /= norm;
  state.amplitudes.assign(w.begin(), w.end());
  return {std::move(state), norm};
}

LossContext make_loss_context(std::span<const double> series,
                              const VariationalConfig& config) {
  if (config.p == 0 && config.q == 0)
    throw DomainError("variational model needs at least one lag or shock term");
  if (config.layers < 1) throw DomainError("layer count must be at least one");
  if (config.max_iters < 1) throw DomainError("iteration budget must be at least one");

  LossContext ctx;
  ctx.z = difference_times(series, config.d);
  ctx.form = config.input_form;
  ctx.layers = config.layers;
  ctx.use_shocks = config.q > 0;
  ctx.theta_y = config.theta_y;
  ctx.theta_eps = config.theta_eps;

  double spread = 0.0;
  for (double v : ctx.z) spread = std::max(spread, std::abs(v - ctx.z.front()));
  if (spread < 1e-12)
    throw DegenerateInputError("series is constant after differencing");

  const std::size_t longest = std::max<std::size_t>(std::max(config.p, config.q), 1);
  ctx.reg_width = config.n_qubits > 0 ? config.n_qubits : std::max(width_for(longest), 1);
  if ((std::size_t{1} << ctx.reg_width) < longest)
    throw ShapeError("register of " + std::to_string(ctx.reg_width) +
                     " qubits cannot hold " + std::to_string(longest) + " lags");

  if (!ctx.use_shocks) {
    ctx.circuit_width = ctx.reg_width;
  } else {
    switch (ctx.form) {
      case InputForm::TwoRegister: ctx.circuit_width = 2 * ctx.reg_width; break;
      case InputForm::WeightedSum: ctx.circuit_width = ctx.reg_width; break;
      case InputForm::Stacked: ctx.circuit_width = ctx.reg_width + 1; break;
    }
  }
  if (ctx.circuit_width > kMaxQubits)
    throw CapacityError("variational circuit exceeds the qubit cap");

  ctx.first = std::max(config.p, config.q);
  if (ctx.z.size() <= ctx.first)
    throw ShapeError("series too short for the requested lag windows");

  // Shock windows come from a preliminary classical fit of the same order.
  std::vector<double> eps;
  if (ctx.use_shocks) eps = classical_fit(series, config.p, config.d, config.q).residuals;

  for (std::size_t t = ctx.first; t < ctx.z.size(); ++t) {
    LossContext::Sample s;
    auto [ys, ynorm] = window_state(ctx.z, t, config.p, ctx.reg_width);
    if (!ctx.use_shocks) {
      s.scale = ynorm;
      s.empty = ynorm == 0.0;
      s.input = std::move(ys);
    } else {
      auto [es, enorm] = window_state(eps, t, config.q, ctx.reg_width);
      s.scale = config.p > 0 ? ynorm : enorm;
      s.empty = s.scale == 0.0;
      if (!s.empty) {
        if (ctx.form == InputForm::WeightedSum) {
          std::vector<cdouble> combo(ys.dim());
          for (std::size_t i = 0; i < combo.size(); ++i)
            combo[i] = ctx.theta_y * ys.amplitudes[i] + ctx.theta_eps * es.amplitudes[i];
          double cn = 0.0;
          for (const auto& c : combo) cn += std::norm(c);
          cn = std::sqrt(cn);
          if (cn < 1e-12) {
            s.empty = true;  // lag and shock windows cancel; predict 0
          } else {
            for (auto& c : combo) c /= cn;
            s.input.n_qubits = ctx.reg_width;
            s.input.amplitudes = std::move(combo);
          }
        } else {
          // A register with no signal cannot be normalized; park it at its
          // first basis vector so the tensor structure stays intact.
          if (ynorm == 0.0) ys.amplitudes[0] = 1.0;
          if (enorm == 0.0) es.amplitudes[0] = 1.0;
          s.input = prepare_model_input(ys, es, ctx.form, ctx.theta_y, ctx.theta_eps);
        }
      }
    }
    ctx.samples.push_back(std::move(s));
  }
  return ctx;
}

int rademacher(Rng& rng) { return portable_uniform(rng) < 0.5 ? -1 : 1; }

// Stall rule: stop once a loss sequence has not improved by 1e-12 over the
// trailing 50 iterations. SPSA feeds it the iterate's own loss, not the
// best-so-far trace: lucky wide perturbations early on can freeze the best
// while the iterate is still descending, and stopping then would abandon a
// run that is making progress.
bool plateaued(const std::vector<double>& trace) {
  const std::size_t window = 50;
  if (trace.size() < window + 1) return false;
  return trace[trace.size() - 1 - window] - trace.back() < 1e-12;
}

}  // namespace

double variational_loss(std::span<const double> series, const VariationalConfig& config,
                        std::span<const double> thetas) {
  return make_loss_context(series, config)(thetas);
}

std::vector<double> spsa_gradient_estimate(
    const std::function<double(std::span<const double>)>& loss,
    std::span<const double> thetas, std::size_t k, Rng& rng) {
  const double ck = 0.1 / std::pow(double(k + 1), 0.101);
  std::vector<int> delta(thetas.size());
  for (auto& d : delta) d = rademacher(rng);

  std::vector<double> plus(thetas.begin(), thetas.end());
  std::vector<double> minus(thetas.begin(), thetas.end());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    plus[i] += ck * delta[i];
    minus[i] -= ck * delta[i];
  }
  const double diff = loss(plus) - loss(minus);
  std::vector<double> grad(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i)
    grad[i] = diff / (2.0 * ck * double(delta[i]));
  return grad;
}

namespace {

struct TrackedBest {
  double loss = std::numeric_limits<double>::infinity();
  std::vector<double> thetas;

  void offer(double l, const std::vector<double>& t) {
    if (l < loss) {
      loss = l;
      thetas = t;
    }
  }
};

void run_spsa(const LossContext& ctx, std::vector<double>& thetas,
              std::size_t max_iters, std::uint64_t seed, TrackedBest& best,
              std::vector<double>& trace, bool& converged) {
  Rng rng(seed);
  best.offer(ctx(thetas), thetas);
  std::vector<double> plus(thetas.size()), minus(thetas.size());
  std::vector<double> iterate_loss;
  for (std::size_t k = 0; k < max_iters; ++k) {
    const double ak = 0.1 / std::pow(double(k + 1), 0.602);
    const double ck = 0.1 / std::pow(double(k + 1), 0.101);
    std::vector<int> delta(thetas.size());
    for (auto& d : delta) d = rademacher(rng);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      plus[i] = thetas[i] + ck * delta[i];
      minus[i] = thetas[i] - ck * delta[i];
    }
    const double lp = ctx(plus), lm = ctx(minus);
    best.offer(lp, plus);
    best.offer(lm, minus);
    const double scale = (lp - lm) / (2.0 * ck);
    for (std::size_t i = 0; i < thetas.size(); ++i)
      thetas[i] -= ak * scale / double(delta[i]);
    const double lt = ctx(thetas);
    best.offer(lt, thetas);
    iterate_loss.push_back(
        iterate_loss.empty() ? lt : std::min(iterate_loss.back(), lt));
    trace.push_back(best.loss);
    if (plateaued(iterate_loss)) {
      converged = true;
      return;
    }
  }
  converged = false;
}

void run_nelder_mead(const LossContext& ctx, std::vector<double>& thetas,
                     std::size_t max_iters, TrackedBest& best,
                     std::vector<double>& trace, bool& converged) {
  const std::size_t n = thetas.size();
  std::vector<std::vector<double>> simplex(n + 1, thetas);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += 0.1;
  std::vector<double> value(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    value[i] = ctx(simplex[i]);
    best.offer(value[i], simplex[i]);
  }

  std::vector<std::size_t> order(n + 1);
  for (std::size_t k = 0; k < max_iters; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return value[x] < value[y]; });
    const std::size_t lo = order[0], hi = order[n], second = order[n - 1];

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == hi) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= double(n);

    auto blend = [&](double coeff) {
      std::vector<double> pt(n);
      for (std::size_t j = 0; j < n; ++j)
        pt[j] = centroid[j] + coeff * (simplex[hi][j] - centroid[j]);
      return pt;
    };

    auto reflected = blend(-1.0);
    const double fr = ctx(reflected);
    best.offer(fr, reflected);
    if (fr < value[lo]) {
      auto expanded = blend(-2.0);
      const double fe = ctx(expanded);
      best.offer(fe, expanded);
      if (fe < fr) {
        simplex[hi] = std::move(expanded);
        value[hi] = fe;
      } else {
        simplex[hi] = std::move(reflected);
        value[hi] = fr;
      }
    } else if (fr < value[second]) {
      simplex[hi] = std::move(reflected);
      value[hi] = fr;
    } else {
      auto contracted = blend(0.5);
      const double fc = ctx(contracted);
      best.offer(fc, contracted);
      if (fc < value[hi]) {
        simplex[hi] = std::move(contracted);
        value[hi] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == lo) continue;
          for (std::size_t j = 0; j < n; ++j)
            simplex[i][j] = simplex[lo][j] + 0.5 * (simplex[i][j] - simplex[lo][j]);
          value[i] = ctx(simplex[i]);
          best.offer(value[i], simplex[i]);
        }
      }
    }
    trace.push_back(best.loss);
    if (plateaued(trace)) {
      converged = true;
      return;
    }
    double spread = 0.0;
    for (double v : value) spread = std::max(spread, std::abs(v - value[order[0]]));
    if (spread < 1e-14) {
      converged = true;
      return;
    }
  }
  converged = false;
}

}  // namespace

VariationalFitResult variational_fit(std::span<const double> series,
                                     const VariationalConfig& config) {
  const LossContext ctx = make_loss_context(series, config);
  std::vector<double> thetas(std::size_t(ctx.circuit_width) * std::size_t(ctx.layers), 0.1);

  VariationalFitResult out;
  TrackedBest best;
  if (config.optimizer == Optimizer::Spsa)
    run_spsa(ctx, thetas, config.max_iters, config.seed, best, out.loss_trace,
             out.converged);
  else
    run_nelder_mead(ctx, thetas, config.max_iters, best, out.loss_trace, out.converged);

  out.model.n_qubits = ctx.circuit_width;
  out.model.layers = ctx.layers;
  out.model.thetas = best.thetas;
  out.model.input_form = ctx.form;
  out.model.readout = 0;

  // Residuals at the best parameters, aligned with the differenced series.
  const auto gates = build_ansatz(ctx.circuit_width, ctx.layers, best.thetas);
  out.residuals.assign(ctx.z.size(), 0.0);
  double acc = 0.0;
  for (std::size_t t = ctx.first; t < ctx.z.size(); ++t) {
    const auto& s = ctx.samples[t - ctx.first];
    double pred = 0.0;
    if (!s.empty) {
      const StateVector o = apply_gates(s.input, gates);
      pred = o.amplitudes[0].real() * s.scale;
    }
    out.residuals[t] = ctx.z[t] - pred;
    acc += out.residuals[t] * out.residuals[t];
  }
  out.mse = acc / double(ctx.z.size() - ctx.first);
  return out;
}

// ---------------------------------------------------------------------------

CirculantOperator circulant_from_column(std::vector<cdouble> column) {
  if (!is_pow2(column.size()))
    throw ShapeError("circulant dimension must be a power of two");
  CirculantOperator op;
  op.n = column.size();
  op.eigenvalues = classical_dft(column);
  const double scale = std::sqrt(double(op.n));
  for (auto& ev : op.eigenvalues) ev *= scale;
  op.first_column = std::move(column);
  return op;
}

CirculantOperator circulant_from_params(const ArimaParams& params, std::size_t n) {
  if (!is_pow2(n)) throw ShapeError("circulant dimension must be a power of two");
  if (n <= params.p)
    throw ShapeError("circulant dimension " + std::to_string(n) +
                     " must exceed the AR order " + std::to_string(params.p));
  std::vector<cdouble> column(n, 0.0);
  column[0] = 1.0;
  for (std::size_t i = 1; i <= params.p; ++i) column[i] = -params.a[i - 1];
  return circulant_from_column(std::move(column));
}

std::pair<StateVector, double> apply_circulant(const CirculantOperator& op,
                                               const StateVector& state) {
  if (op.n != state.dim())
    throw ShapeError("circulant dimension does not match the state");

  StateVector work = apply_qft(state);
  for (std::size_t i = 0; i < op.n; ++i) work.amplitudes[i] *= op.eigenvalues[i];
  work = apply_qft_inverse(work);

  const double norm = work.norm();
  if (norm < 1e-12)
    throw DegenerateInputError("circulant annihilates the state");
  for (auto& a : work.amplitudes) a /= norm;
  return {std::move(work), norm};
}

}  // namespace qts
