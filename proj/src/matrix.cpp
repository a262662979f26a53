#include "qts/matrix.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace qts {

ComplexMatrix ComplexMatrix::identity(std::size_t d) {
  ComplexMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) m.at(i, i) = 1.0;
  return m;
}

ComplexMatrix RealMatrix::to_complex() const {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < data.size(); ++i) m.data[i] = data[i];
  return m;
}

std::vector<cdouble> matvec(const ComplexMatrix& m, const std::vector<cdouble>& v) {
  std::vector<cdouble> out(m.dim);
  for (std::size_t r = 0; r < m.dim; ++r) {
    cdouble acc = 0.0;
    const cdouble* row = m.data.data() + r * m.dim;
    for (std::size_t c = 0; c < m.dim; ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return out;
}

namespace {

// Uniform double in [0, 1) built from the top 53 bits of the generator
// output, so the sequence does not depend on the standard library's
// distribution implementation.
double portable_uniform(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

bool is_unitary(const ComplexMatrix& u, double tol) {
  const std::size_t n = u.dim;
  if (n == 0 || u.data.size() != n * n) return false;

  if (n <= 64) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        cdouble acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          acc += std::conj(u.at(k, r)) * u.at(k, c);
        const cdouble want = (r == c) ? 1.0 : 0.0;
        if (std::abs(acc - want) > tol) return false;
      }
    }
    return true;
  }

  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  for (int probe = 0; probe < 8; ++probe) {
    std::vector<cdouble> v(n);
    double nrm2 = 0.0;
    for (auto& x : v) {
      // Box-Muller, again avoiding std::normal_distribution for determinism.
      const double u1 = portable_uniform(rng);
      const double u2 = portable_uniform(rng);
      const double r = std::sqrt(-2.0 * std::log(u1 + 0x1.0p-60));
      x = cdouble(r * std::cos(6.283185307179586 * u2),
                  r * std::sin(6.283185307179586 * u2));
      nrm2 += std::norm(x);
    }
    std::vector<cdouble> w = matvec(u, v);
    // x = U' w without materializing the adjoint.
    std::vector<cdouble> x(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        x[c] += std::conj(u.at(r, c)) * w[r];
    double err2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) err2 += std::norm(x[i] - v[i]);
    if (std::sqrt(err2) > tol * std::sqrt(nrm2)) return false;
  }
  return true;
}

}  // namespace qts
