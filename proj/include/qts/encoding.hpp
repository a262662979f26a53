#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "qts/statevec.hpp"

namespace qts {

// Uniformly sampled multivariate series: `values` is row-major with
// length() rows of `dim` entries each. Timestamps are strictly increasing
// and every value is finite; build instances through make_time_series so
// those invariants actually hold.
struct TimeSeries {
  std::vector<double> timestamps;
  std::vector<double> values;
  std::size_t dim = 1;

  std::size_t length() const { return dim == 0 ? 0 : values.size() / dim; }
  double at(std::size_t row, std::size_t col) const { return values[row * dim + col]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * dim, dim};
  }
};

TimeSeries make_time_series(std::vector<double> timestamps, std::vector<double> values,
                            std::size_t dim);
// Convenience form with implicit timestamps 0..n-1.
TimeSeries make_time_series(std::vector<double> values);

enum class Layout { Superposed, Stacked, TensorProduct };

// Bookkeeping needed to undo an encoding: `global_norm` is the L2 norm
// divided out when normalizing, `pad_len` the number of zeros appended
// (per row for TensorProduct, on the flattened vector otherwise), and
// rows/dim the original shape.
struct EncodingRecord {
  Layout layout = Layout::Stacked;
  std::size_t pad_len = 0;
  double global_norm = 1.0;
  std::vector<double> per_block_norms;
  int n_qubits = 0;
  std::size_t rows = 0;
  std::size_t dim = 0;
};

struct Encoded {
  StateVector state;
  EncodingRecord record;
};

std::pair<std::vector<double>, std::size_t> pad_to_power_of_two(std::span<const double> values);

// State proportional to the plain vector sum of the rows. Uses
// ceil(log2(dim)) qubits after padding.
Encoded encode_superposed(const TimeSeries& series);

// Row-major concatenation of all rows, zero-padded to a power of two and
// normalized as one long vector.
Encoded encode_stacked(const TimeSeries& series);

// Tensor product of the individually normalized rows; each row becomes its
// own log2(dim_padded)-qubit register with its norm kept in
// per_block_norms. Every row must be nonzero and the total qubit count must
// stay within the simulator cap.
Encoded encode_tensor(const TimeSeries& series);

// Reconstructs raw values from a state plus its record: the row-major
// series for Stacked, the summed vector for Superposed. TensorProduct
// cannot be decoded (a product state only retains per-row directions) and
// raises UnsupportedError.
std::vector<double> decode(const StateVector& state, const EncodingRecord& record);

}  // namespace qts
