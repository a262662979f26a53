#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qts/error.hpp"
#include "qts/spectral.hpp"
#include "test_util.hpp"

using qts::cdouble;
using qts::StateVector;

namespace {

std::vector<double> normalized(std::vector<double> v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

}  // namespace

TEST_CASE("Fourier matrix on four points") {
  auto f = qts::qft_matrix(4);
  CHECK(qts::is_unitary(f, 1e-12));
  // Column 1 is (1, i, -1, -i)/2.
  CHECK(std::abs(f.at(0, 1) - cdouble(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(f.at(1, 1) - cdouble(0.0, 0.5)) < 1e-14);
  CHECK(std::abs(f.at(2, 1) - cdouble(-0.5, 0.0)) < 1e-14);
  CHECK(std::abs(f.at(3, 1) - cdouble(0.0, -0.5)) < 1e-14);

  CHECK_THROWS_AS(qts::qft_matrix(3), qts::ShapeError);
  CHECK_THROWS_AS(qts::qft_matrix(0), qts::ShapeError);
}

TEST_CASE("Fourier transform of a basis state") {
  auto s = qts::from_amplitudes({0.0, 1.0, 0.0, 0.0}).first;
  auto t = qts::apply_qft(s);
  CHECK(std::abs(t.amplitudes[0] - cdouble(0.5, 0.0)) < 1e-12);
  CHECK(std::abs(t.amplitudes[1] - cdouble(0.0, 0.5)) < 1e-12);
  CHECK(std::abs(t.amplitudes[2] - cdouble(-0.5, 0.0)) < 1e-12);
  CHECK(std::abs(t.amplitudes[3] - cdouble(0.0, -0.5)) < 1e-12);

  auto back = qts::apply_qft_inverse(t);
  CHECK(testutil::max_abs_diff(back.amplitudes, s.amplitudes) < 1e-12);
}

TEST_CASE("gate path matches the direct summation") {
  std::mt19937_64 rng(2202);
  for (int n = 1; n <= 8; ++n) {
    auto s = testutil::random_state(rng, n);
    auto viaGate = qts::apply_qft(s);
    auto viaSum = qts::classical_dft(s.amplitudes);
    CHECK(testutil::max_abs_diff(viaGate.amplitudes, viaSum) < 1e-10);

    auto invGate = qts::apply_qft_inverse(s);
    auto invSum = qts::classical_dft(s.amplitudes, true);
    CHECK(testutil::max_abs_diff(invGate.amplitudes, invSum) < 1e-10);
  }
}

TEST_CASE("direct summation is unitary") {
  std::mt19937_64 rng(2203);
  for (int trial = 0; trial < 5; ++trial) {
    auto s = testutil::random_state(rng, 4);
    auto f = qts::classical_dft(s.amplitudes);
    double energy = 0.0;
    for (const auto& c : f) energy += std::norm(c);
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));

    auto back = qts::classical_dft(f, true);
    CHECK(testutil::max_abs_diff(back, s.amplitudes) < 1e-12);
  }
}

TEST_CASE("partial transform leaves the upper qubits alone") {
  // Two blocks stacked under a selector qubit: transforming qubits 1..2
  // must act on each block independently.
  auto s = qts::from_amplitudes({0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0}).first;
  auto t = qts::apply_qft(s, {1, 2});
  const double h = 0.5 / std::sqrt(2.0);
  CHECK(std::abs(t.amplitudes[0] - cdouble(h, 0.0)) < 1e-12);
  CHECK(std::abs(t.amplitudes[1] - cdouble(0.0, h)) < 1e-12);
  CHECK(std::abs(t.amplitudes[2] - cdouble(-h, 0.0)) < 1e-12);
  CHECK(std::abs(t.amplitudes[3] - cdouble(0.0, -h)) < 1e-12);
  for (int i = 4; i < 8; ++i)
    CHECK(std::abs(t.amplitudes[i] - cdouble(h, 0.0)) < 1e-12);
}

TEST_CASE("swap test on exact states") {
  std::mt19937_64 rng(2204);
  auto a = testutil::random_state(rng, 3);

  SUBCASE("identical registers always read zero") {
    auto r = qts::swap_test(a, a);
    CHECK(r.p_zero == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.overlap_sq == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("orthogonal registers read zero half the time") {
    auto e0 = qts::from_amplitudes({1.0, 0.0}).first;
    auto e1 = qts::from_amplitudes({0.0, 1.0}).first;
    auto r = qts::swap_test(e0, e1);
    CHECK(r.p_zero == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.overlap_sq == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("half overlap gives three quarters") {
    auto e0 = qts::from_amplitudes({1.0, 0.0}).first;
    auto plus = qts::from_amplitudes({1.0, 1.0}).first;
    auto r = qts::swap_test(e0, plus);
    CHECK(r.p_zero == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(r.overlap_sq == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("matches the inner product on random pairs") {
    for (int trial = 0; trial < 8; ++trial) {
      auto x = testutil::random_state(rng, 2);
      auto y = testutil::random_state(rng, 2);
      auto r = qts::swap_test(x, y);
      const double expect = std::norm(qts::inner_product(x, y));
      CHECK(r.overlap_sq == doctest::Approx(expect).epsilon(1e-10));
    }
  }

  SUBCASE("width mismatch is rejected") {
    auto b = testutil::random_state(rng, 2);
    CHECK_THROWS_AS(qts::swap_test(a, b), qts::ShapeError);
  }
}

TEST_CASE("swap test with shots") {
  std::mt19937_64 rng(2205);
  auto a = testutil::random_state(rng, 2);
  auto b = testutil::random_state(rng, 2);
  const double exact = qts::swap_test(a, b).p_zero;

  const std::uint64_t shots = 100000;
  auto r1 = qts::swap_test(a, b, shots, 42);
  auto r2 = qts::swap_test(a, b, shots, 42);
  CHECK(r1.p_zero == r2.p_zero);

  const double sigma = std::sqrt(exact * (1.0 - exact) / double(shots));
  CHECK(std::abs(r1.p_zero - exact) < 5.0 * sigma);

  CHECK_THROWS_AS(qts::swap_test(a, b, std::uint64_t{0}, 1), qts::DomainError);
}

TEST_CASE("distance strategies on orthogonal basis series") {
  const std::vector<double> y1 = {1.0, 0.0, 0.0, 0.0};
  const std::vector<double> y2 = {0.0, 1.0, 0.0, 0.0};
  const double root2 = std::sqrt(2.0);

  auto st = qts::qft_distance_stacked(y1, y2);
  CHECK(st.strategy == "stacked");
  CHECK(st.distance_estimate == doctest::Approx(root2).epsilon(1e-12));
  CHECK(st.p_minus == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(st.qubits_used == 3);

  auto sp = qts::qft_distance_superposed(y1, y2);
  CHECK(sp.distance_estimate == doctest::Approx(root2).epsilon(1e-12));
  CHECK(sp.p_minus == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sp.qubits_used == 2);

  auto tr = qts::qft_distance_two_register(y1, y2);
  CHECK(tr.distance_estimate == doctest::Approx(root2).epsilon(1e-12));
  CHECK(tr.p_minus == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tr.qubits_used == 5);
  CHECK_FALSE(tr.overlap_flagged);
  CHECK_FALSE(tr.shots.has_value());
}

TEST_CASE("strategies agree on unit-norm inputs") {
  std::mt19937_64 rng(2206);
  for (int trial = 0; trial < 10; ++trial) {
    auto y1 = normalized(testutil::random_reals(rng, 8, -1.0, 1.0));
    auto y2 = normalized(testutil::random_reals(rng, 8, -1.0, 1.0));
    double direct = 0.0;
    for (std::size_t i = 0; i < y1.size(); ++i)
      direct += (y1[i] - y2[i]) * (y1[i] - y2[i]);
    direct = std::sqrt(direct);

    auto st = qts::qft_distance_stacked(y1, y2);
    auto sp = qts::qft_distance_superposed(y1, y2);
    auto tr = qts::qft_distance_two_register(y1, y2);
    CHECK(st.distance_estimate == doctest::Approx(direct).epsilon(1e-10));
    CHECK(sp.distance_estimate == doctest::Approx(direct).epsilon(1e-10));
    if (!tr.overlap_flagged)
      CHECK(tr.distance_estimate == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("stacked distance works on raw unnormalized series") {
  std::mt19937_64 rng(2207);
  for (int trial = 0; trial < 5; ++trial) {
    auto y1 = testutil::random_reals(rng, 16, -3.0, 3.0);
    auto y2 = testutil::random_reals(rng, 16, -3.0, 3.0);
    double direct = 0.0;
    for (std::size_t i = 0; i < y1.size(); ++i)
      direct += (y1[i] - y2[i]) * (y1[i] - y2[i]);
    auto st = qts::qft_distance_stacked(y1, y2);
    CHECK(st.distance_estimate == doctest::Approx(std::sqrt(direct)).epsilon(1e-10));
  }
}

TEST_CASE("opposite-sign series expose the overlap flag") {
  const std::vector<double> y1 = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> y2 = y1;
  for (double& v : y2) v = -v;

  auto tr = qts::qft_distance_two_register(y1, y2);
  CHECK(tr.overlap_flagged);
  CHECK(tr.distance_estimate == doctest::Approx(2.0).epsilon(1e-12));

  // A magnitude-only shot estimate collapses the same pair to distance 0;
  // the flag is what warns the caller.
  auto shot = qts::qft_distance_two_register(y1, y2, std::uint64_t{4096}, 7);
  CHECK(shot.overlap_flagged);
  CHECK(shot.distance_estimate < 0.1);

  auto sp = qts::qft_distance_superposed(y1, y2);
  CHECK(sp.distance_estimate == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("distance input validation") {
  const std::vector<double> good = {1.0, 0.0, 0.0, 0.0};
  const std::vector<double> shorter = {1.0, 0.0};
  const std::vector<double> odd = {1.0, 0.0, 0.0};
  const std::vector<double> zero = {0.0, 0.0, 0.0, 0.0};

  CHECK_THROWS_AS(qts::qft_distance_stacked(good, shorter), qts::ShapeError);
  CHECK_THROWS_AS(qts::qft_distance_stacked(odd, odd), qts::ShapeError);
  CHECK_THROWS_AS(qts::qft_distance_superposed(zero, good), qts::DegenerateInputError);
  CHECK_THROWS_AS(qts::qft_distance_two_register(good, zero), qts::DegenerateInputError);
  CHECK_THROWS_AS(qts::qft_distance_superposed(good, good), qts::DegenerateInputError);

  // Stacked tolerates one zero series (distance to the origin).
  auto st = qts::qft_distance_stacked(good, zero);
  CHECK(st.distance_estimate == doctest::Approx(1.0).epsilon(1e-12));
}
