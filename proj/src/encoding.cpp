#include "qts/encoding.hpp"

#include <cmath>
#include <string>

#include "qts/error.hpp"

namespace qts {

namespace {

int log2_exact(std::size_t n) {
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

void require_nonempty(const TimeSeries& s) {
  if (s.length() == 0 || s.dim == 0) throw ShapeError("series has no rows");
}

double l2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

TimeSeries make_time_series(std::vector<double> timestamps, std::vector<double> values,
                            std::size_t dim) {
  if (dim == 0) throw ShapeError("series dimension must be positive");
  if (values.size() % dim != 0)
    throw ShapeError("value count " + std::to_string(values.size()) +
                     " is not a multiple of dimension " + std::to_string(dim));
  if (timestamps.size() * dim != values.size())
    throw ShapeError("got " + std::to_string(timestamps.size()) + " timestamps for " +
                     std::to_string(values.size() / dim) + " rows");
  for (std::size_t i = 1; i < timestamps.size(); ++i)
    if (!(timestamps[i] > timestamps[i - 1]))
      throw ValidationError("timestamps must be strictly increasing (violated at row " +
                            std::to_string(i + 1) + ")");
  for (double t : timestamps)
    if (!std::isfinite(t)) throw ValidationError("non-finite timestamp");
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("non-finite value");
  return {std::move(timestamps), std::move(values), dim};
}

TimeSeries make_time_series(std::vector<double> values) {
  std::vector<double> ts(values.size());
  for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = double(i);
  return make_time_series(std::move(ts), std::move(values), 1);
}

std::pair<std::vector<double>, std::size_t> pad_to_power_of_two(std::span<const double> values) {
  if (values.empty()) throw ShapeError("cannot pad an empty vector");
  std::size_t target = 1;
  while (target < values.size()) target <<= 1;
  std::vector<double> out(values.begin(), values.end());
  out.resize(target, 0.0);
  return {std::move(out), target - values.size()};
}

Encoded encode_superposed(const TimeSeries& series) {
  require_nonempty(series);
  std::vector<double> sum(series.dim, 0.0);
  for (std::size_t r = 0; r < series.length(); ++r)
    for (std::size_t c = 0; c < series.dim; ++c) sum[c] += series.at(r, c);

  auto [padded, pad_len] = pad_to_power_of_two(sum);
  const double nrm = l2(padded);
  if (nrm < 1e-150)
    throw DegenerateInputError("row sum vanishes; superposed layout undefined");

  std::vector<cdouble> amps(padded.begin(), padded.end());
  auto [state, global_norm] = from_amplitudes(std::move(amps));
  EncodingRecord rec{Layout::Superposed, pad_len,      global_norm, {},
                     state.n_qubits,     series.length(), series.dim};
  return {std::move(state), std::move(rec)};
}

Encoded encode_stacked(const TimeSeries& series) {
  require_nonempty(series);
  auto [padded, pad_len] = pad_to_power_of_two(series.values);
  if (l2(padded) < 1e-150)
    throw DegenerateInputError("all-zero series; stacked layout undefined");

  std::vector<cdouble> amps(padded.begin(), padded.end());
  auto [state, global_norm] = from_amplitudes(std::move(amps));
  EncodingRecord rec{Layout::Stacked, pad_len,        global_norm, {},
                     state.n_qubits,  series.length(), series.dim};
  return {std::move(state), std::move(rec)};
}

Encoded encode_tensor(const TimeSeries& series) {
  require_nonempty(series);
  std::size_t d_padded = 1;
  while (d_padded < series.dim) d_padded <<= 1;
  const int qubits_per_row = log2_exact(d_padded);
  const std::size_t total_qubits = series.length() * std::size_t(qubits_per_row);
  if (total_qubits > kMaxQubits)
    throw CapacityError("tensor layout needs " + std::to_string(total_qubits) +
                        " qubits (" + std::to_string(series.length()) + " rows x " +
                        std::to_string(qubits_per_row) + "), cap is " +
                        std::to_string(kMaxQubits));

  std::vector<double> block_norms;
  block_norms.reserve(series.length());
  // Running Kronecker product, first row in the most significant position.
  std::vector<cdouble> amps{1.0};
  for (std::size_t r = 0; r < series.length(); ++r) {
    const double nrm = l2(series.row(r));
    if (nrm < 1e-150)
      throw DegenerateInputError("row " + std::to_string(r + 1) +
                                 " is zero; tensor layout needs nonzero rows");
    block_norms.push_back(nrm);
    std::vector<cdouble> next(amps.size() * d_padded, 0.0);
    for (std::size_t i = 0; i < amps.size(); ++i)
      for (std::size_t c = 0; c < series.dim; ++c)
        next[i * d_padded + c] = amps[i] * (series.at(r, c) / nrm);
    amps = std::move(next);
  }

  StateVector state;
  state.n_qubits = int(total_qubits);
  state.amplitudes = std::move(amps);
  EncodingRecord rec{Layout::TensorProduct,
                     d_padded - series.dim,
                     1.0,
                     std::move(block_norms),
                     state.n_qubits,
                     series.length(),
                     series.dim};
  return {std::move(state), std::move(rec)};
}

std::vector<double> decode(const StateVector& state, const EncodingRecord& record) {
  switch (record.layout) {
    case Layout::Superposed: {
      if (state.dim() != record.dim + record.pad_len)
        throw ShapeError("state dimension does not match encoding record");
      std::vector<double> out(record.dim);
      for (std::size_t c = 0; c < record.dim; ++c)
        out[c] = state.amplitudes[c].real() * record.global_norm;
      return out;
    }
    case Layout::Stacked: {
      const std::size_t n_values = record.rows * record.dim;
      if (state.dim() != n_values + record.pad_len)
        throw ShapeError("state dimension does not match encoding record");
      std::vector<double> out(n_values);
      for (std::size_t i = 0; i < n_values; ++i)
        out[i] = state.amplitudes[i].real() * record.global_norm;
      return out;
    }
    case Layout::TensorProduct:
      throw UnsupportedError(
          "tensor-product encodings cannot be decoded; only per-row norms are retained");
  }
  throw DomainError("unknown layout");
}

}  // namespace qts
