#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qts {

using cdouble = std::complex<double>;

// Dense square complex matrix, row-major.
struct ComplexMatrix {
  std::size_t dim = 0;
  std::vector<cdouble> data;

  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t d) : dim(d), data(d * d) {}

  cdouble& at(std::size_t r, std::size_t c) { return data[r * dim + c]; }
  const cdouble& at(std::size_t r, std::size_t c) const { return data[r * dim + c]; }

  static ComplexMatrix identity(std::size_t d);
};

// Dense square real matrix, row-major.
struct RealMatrix {
  std::size_t dim = 0;
  std::vector<double> data;

  RealMatrix() = default;
  explicit RealMatrix(std::size_t d) : dim(d), data(d * d) {}

  double& at(std::size_t r, std::size_t c) { return data[r * dim + c]; }
  const double& at(std::size_t r, std::size_t c) const { return data[r * dim + c]; }

  ComplexMatrix to_complex() const;
};

std::vector<cdouble> matvec(const ComplexMatrix& m, const std::vector<cdouble>& v);

// Unitarity test. For dim <= 64 this forms the full Gram matrix U'U and
// compares against the identity. Beyond that the cubic cost is prohibitive
// (a 1024-dim operator would need ~1e9 products), so larger matrices are
// probed with fixed-seed random vectors: ||U'(Uv) - v|| <= tol * ||v||.
bool is_unitary(const ComplexMatrix& u, double tol);

}  // namespace qts
