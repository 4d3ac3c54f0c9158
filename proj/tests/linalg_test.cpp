#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qmt/linalg.hpp"
#include "support.hpp"

using namespace qmt;
using namespace qmt::testing;

TEST_CASE("kron matches the element-wise definition") {
  // Independent oracle: direct index arithmetic, no shared code path.
  const ComplexMatrix a = pauli_x();
  const ComplexMatrix b = pauli_z();
  const ComplexMatrix k = kron(a, b);
  REQUIRE(k.rows() == 4);
  REQUIRE(k.cols() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const Complex expected = a(i / 2, j / 2) * b(i % 2, j % 2);
      CHECK(std::abs(k(i, j) - expected) <= 1e-15);
    }
  }
}

TEST_CASE("kron is associative and respects the mixed product rule") {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = random_matrix(rng, 2, 2);
    const ComplexMatrix b = random_matrix(rng, 3, 3);
    const ComplexMatrix c = random_matrix(rng, 2, 2);
    const ComplexMatrix d = random_matrix(rng, 3, 3);
    CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) <= 1e-12);
    CHECK(max_abs_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)) <= 1e-10);
  }
}

TEST_CASE("partial trace recovers the factors of a product operator") {
  SplitMix64 rng(102);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix rho = random_psd(rng, 3);
    const ComplexMatrix sigma = random_psd(rng, 2);
    const ComplexMatrix joint = kron(rho, sigma);
    const ComplexMatrix over_b = partial_trace(joint, 3, 2, Subsystem::B);
    const ComplexMatrix over_a = partial_trace(joint, 3, 2, Subsystem::A);
    CHECK(max_abs_diff(over_b, rho * sigma.trace()) <= 1e-10);
    CHECK(max_abs_diff(over_a, sigma * rho.trace()) <= 1e-10);
    // trace preservation
    CHECK(std::abs(over_b.trace() - joint.trace()) <= 1e-10);
    CHECK(std::abs(over_a.trace() - joint.trace()) <= 1e-10);
  }
}

TEST_CASE("partial trace of the Bell projector is maximally mixed") {
  const CVector bell = bell_vector();
  const ComplexMatrix p = ComplexMatrix::outer(bell, bell);
  const ComplexMatrix half = ComplexMatrix::identity(2) * Complex(0.5, 0.0);
  CHECK(max_abs_diff(partial_trace(p, 2, 2, Subsystem::B), half) <= 1e-12);
  CHECK(max_abs_diff(partial_trace(p, 2, 2, Subsystem::A), half) <= 1e-12);
}

TEST_CASE("eigh solves frozen 2x2 problems") {
  const Eigh ez = eigh(pauli_z());
  REQUIRE(ez.values.size() == 2);
  CHECK(ez.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ez.values[1] == doctest::Approx(-1.0).epsilon(1e-12));

  // [[2, 1], [1, 2]] has eigenvalues 3 and 1.
  const ComplexMatrix m(2, 2, {2.0, 1.0, 1.0, 2.0});
  const Eigh e = eigh(m);
  CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigh reconstructs random Hermitian matrices") {
  SplitMix64 rng(103);
  for (std::size_t n = 2; n <= 8; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const ComplexMatrix h = random_hermitian(rng, n);
      const Eigh e = eigh(h);
      // eigenvalues descending
      for (std::size_t i = 0; i + 1 < e.values.size(); ++i)
        CHECK(e.values[i] >= e.values[i + 1] - 1e-12);
      // unitary eigenvector matrix
      CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, ComplexMatrix::identity(n)) <= 1e-11);
      // reconstruction
      const ComplexMatrix rebuilt =
          e.vectors * ComplexMatrix::diagonal(e.values) * e.vectors.adjoint();
      CHECK(max_abs_diff(rebuilt, h) <= 1e-10);
    }
  }
}

TEST_CASE("eigh handles fully degenerate spectra") {
  const ComplexMatrix m = ComplexMatrix::identity(4) * Complex(2.5, 0.0);
  const Eigh e = eigh(m);
  for (double lam : e.values) CHECK(lam == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, ComplexMatrix::identity(4)) <= 1e-12);
}

TEST_CASE("eigh rejects non-Hermitian input") {
  ComplexMatrix m(2, 2, {1.0, Complex(0.0, 0.5), Complex(0.0, 0.5), 1.0});
  CHECK_THROWS_AS(eigh(m), HermiticityError);
}

TEST_CASE("eigh is deterministic") {
  SplitMix64 rng(104);
  const ComplexMatrix h = random_hermitian(rng, 5);
  const Eigh a = eigh(h);
  const Eigh b = eigh(h);
  CHECK(max_abs_diff(a.vectors, b.vectors) == 0.0);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("svd_bipartite of the Bell vector gives two equal singular values") {
  const BipartiteSvd svd = svd_bipartite(bell_vector(), 2, 2);
  REQUIRE(svd.values.size() == 2);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(svd.values[0] == doctest::Approx(r).epsilon(1e-12));
  CHECK(svd.values[1] == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("svd_bipartite of a product vector has a single singular value") {
  SplitMix64 rng(105);
  const CVector a = random_unit_vector(rng, 3);
  const CVector b = random_unit_vector(rng, 4);
  const BipartiteSvd svd = svd_bipartite(kron_vec(a, b), 3, 4);
  REQUIRE(svd.values.size() == 1);
  CHECK(svd.values[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("svd_bipartite satisfies normalization, orthonormality and reconstruction") {
  SplitMix64 rng(106);
  const std::size_t shapes[][2] = {{2, 2}, {2, 3}, {4, 2}, {3, 5}, {8, 8}};
  for (const auto& shape : shapes) {
    const std::size_t da = shape[0], db = shape[1];
    for (int trial = 0; trial < 5; ++trial) {
      const CVector v = random_unit_vector(rng, da * db);
      const BipartiteSvd svd = svd_bipartite(v, da, db);
      double sum2 = 0.0;
      for (double s : svd.values) sum2 += s * s;
      CHECK(sum2 == doctest::Approx(1.0).epsilon(1e-10));

      const std::size_t r = svd.values.size();
      CHECK(max_abs_diff(svd.left.adjoint() * svd.left, ComplexMatrix::identity(r)) <= 1e-10);
      CHECK(max_abs_diff(svd.right.adjoint() * svd.right, ComplexMatrix::identity(r)) <= 1e-10);

      // reconstruct v[i*db + j] = sum_k s_k u_k[i] conj(w_k[j])
      double worst = 0.0;
      for (std::size_t i = 0; i < da; ++i) {
        for (std::size_t j = 0; j < db; ++j) {
          Complex rebuilt = 0.0;
          for (std::size_t k = 0; k < r; ++k)
            rebuilt += svd.values[k] * svd.left(i, k) * std::conj(svd.right(j, k));
          worst = std::max(worst, std::abs(rebuilt - v[i * db + j]));
        }
      }
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("psd_sqrt of a frozen diagonal matrix") {
  const ComplexMatrix m(2, 2, {4.0, 0.0, 0.0, 1.0});
  const ComplexMatrix r = psd_sqrt(m);
  CHECK(max_abs_diff(r, ComplexMatrix(2, 2, {2.0, 0.0, 0.0, 1.0})) <= 1e-12);
}

TEST_CASE("psd_sqrt squares back to the input") {
  SplitMix64 rng(107);
  for (std::size_t n = 2; n <= 6; ++n) {
    const ComplexMatrix m = random_psd(rng, n);
    const ComplexMatrix r = psd_sqrt(m);
    CHECK(max_abs_diff(r * r, m) <= 1e-9);
    CHECK(is_hermitian(r, 1e-12));
  }
}

TEST_CASE("psd_sqrt clips tiny negative eigenvalues and rejects real ones") {
  const ComplexMatrix tiny(2, 2, {1.0, 0.0, 0.0, -5e-11});
  CHECK_NOTHROW(psd_sqrt(tiny));
  const ComplexMatrix bad(2, 2, {1.0, 0.0, 0.0, -1e-6});
  CHECK_THROWS_AS(psd_sqrt(bad), PositivityError);
}

TEST_CASE("op_distance equals the largest singular value of the difference") {
  CHECK(op_distance(pauli_z(), -pauli_z()) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(op_distance(pauli_x(), pauli_x()) <= 1e-12);
  SplitMix64 rng(108);
  const ComplexMatrix a = random_matrix(rng, 3, 3);
  const ComplexMatrix b = random_matrix(rng, 3, 3);
  CHECK(op_distance(a, b) == doctest::Approx(op_distance(b, a)).epsilon(1e-10));
  // operator norm dominates scaled Frobenius norm from below: |A|_op >= |A|_F / sqrt(n)
  const double handle = (a - b).frobenius_norm();
  CHECK(op_distance(a, b) >= handle / std::sqrt(3.0) - 1e-10);
  CHECK(op_distance(a, b) <= handle + 1e-10);
}

TEST_CASE("matrix literals reject bad shapes and non-finite entries") {
  CHECK_THROWS_AS(ComplexMatrix(2, 2, {1.0, 2.0, 3.0}), DimensionError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ComplexMatrix(1, 2, {Complex(1.0, 0.0), Complex(inf, 0.0)}), ValidationError);
}
