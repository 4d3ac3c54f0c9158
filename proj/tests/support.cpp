#include "support.hpp"

#include <cmath>

namespace qmt::testing {

double random_normal(SplitMix64& rng) {
  // Box-Muller; discard the second variate for simplicity.
  double u1 = rng.next_unit();
  while (u1 <= 0.0) u1 = rng.next_unit();
  const double u2 = rng.next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Complex random_complex(SplitMix64& rng) {
  const double re = random_normal(rng);
  const double im = random_normal(rng);
  return Complex(re, im);
}

ComplexMatrix random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols) {
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = random_complex(rng);
  return m;
}

ComplexMatrix random_hermitian(SplitMix64& rng, std::size_t n) {
  return hermitian_part(random_matrix(rng, n, n));
}

ComplexMatrix random_psd(SplitMix64& rng, std::size_t n) {
  const ComplexMatrix g = random_matrix(rng, n, n);
  return hermitian_part(g * g.adjoint());
}

ComplexMatrix random_unitary(SplitMix64& rng, std::size_t n) {
  // Gram-Schmidt of a random matrix; generically full rank.
  const ComplexMatrix g = random_matrix(rng, n, n);
  ComplexMatrix u(n, n);
  std::size_t placed = 0;
  for (std::size_t c = 0; c < n && placed < n; ++c) {
    CVector v = g.column(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < placed; ++k) {
        const CVector uk = u.column(k);
        const Complex coeff = inner(uk, v);
        for (std::size_t i = 0; i < n; ++i) v[i] -= coeff * uk[i];
      }
    }
    const double nv = vec_norm(v);
    if (nv < 1e-8) continue;
    u.set_column(placed++, scale_vec(v, Complex(1.0 / nv, 0.0)));
  }
  if (placed != n) throw InternalError("random_unitary: rank deficiency");
  return u;
}

CVector random_unit_vector(SplitMix64& rng, std::size_t n) {
  CVector v(n);
  double norm2 = 0.0;
  do {
    for (std::size_t i = 0; i < n; ++i) v[i] = random_complex(rng);
    norm2 = vec_norm(v);
  } while (norm2 < 1e-6);
  return scale_vec(v, Complex(1.0 / norm2, 0.0));
}

State random_state(SplitMix64& rng, std::size_t n) {
  ComplexMatrix p = random_psd(rng, n);
  const double tr = p.trace().real();
  return State(p * Complex(1.0 / tr, 0.0));
}

State random_pure_state(SplitMix64& rng, std::size_t n) {
  return State::pure(random_unit_vector(rng, n));
}

DiscreteObservable random_povm(SplitMix64& rng, std::size_t dim, std::size_t n_outcomes) {
  std::vector<ComplexMatrix> parts;
  ComplexMatrix total(dim, dim);
  for (std::size_t k = 0; k < n_outcomes; ++k) {
    ComplexMatrix g = random_psd(rng, dim);
    parts.push_back(g);
    total = total + g;
  }
  // S^(-1/2) via the eigendecomposition of the (positive definite) sum.
  const Eigh e = eigh(total);
  std::vector<double> inv_roots(e.values.size());
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    if (e.values[i] <= 1e-12) throw InternalError("random_povm: singular normalizer");
    inv_roots[i] = 1.0 / std::sqrt(e.values[i]);
  }
  const ComplexMatrix s_inv_half =
      e.vectors * ComplexMatrix::diagonal(inv_roots) * e.vectors.adjoint();
  std::vector<std::string> labels;
  std::vector<Effect> effects;
  for (std::size_t k = 0; k < n_outcomes; ++k) {
    labels.push_back("w" + std::to_string(k));
    effects.emplace_back(hermitian_part(s_inv_half * parts[k] * s_inv_half));
  }
  return DiscreteObservable(std::move(labels), std::move(effects));
}

// ---- frozen reference objects ------------------------------------------

ComplexMatrix pauli_x() {
  return ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0});
}

ComplexMatrix pauli_y() {
  return ComplexMatrix(2, 2, {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0});
}

ComplexMatrix pauli_z() {
  return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0});
}

ComplexMatrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  return ComplexMatrix(2, 2, {s, s, s, -s});
}

DiscreteObservable sigma_z_observable() {
  Effect up(ComplexMatrix(2, 2, {1.0, 0.0, 0.0, 0.0}));
  Effect down(ComplexMatrix(2, 2, {0.0, 0.0, 0.0, 1.0}));
  return DiscreteObservable({"+1", "-1"}, {up, down});
}

DiscreteObservable sigma_x_observable() {
  Effect plus(ComplexMatrix(2, 2, {0.5, 0.5, 0.5, 0.5}));
  Effect minus(ComplexMatrix(2, 2, {0.5, -0.5, -0.5, 0.5}));
  return DiscreteObservable({"+1", "-1"}, {plus, minus});
}

DiscreteObservable trine_povm() {
  std::vector<std::string> labels = {"t0", "t1", "t2"};
  std::vector<Effect> effects;
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * M_PI * k / 3.0;
    const CVector u = {std::cos(a / 2.0), std::sin(a / 2.0)};
    effects.emplace_back(ComplexMatrix::outer(u, u) * Complex(2.0 / 3.0, 0.0));
  }
  return DiscreteObservable(std::move(labels), std::move(effects));
}

State plus_state() {
  const double s = 1.0 / std::sqrt(2.0);
  return State::pure({s, s});
}

State basis_state(std::size_t dim, std::size_t k) {
  CVector v(dim, Complex(0.0, 0.0));
  v[k] = 1.0;
  return State::pure(v);
}

CVector bell_vector() {
  const double s = 1.0 / std::sqrt(2.0);
  return {s, 0.0, 0.0, s};
}

std::vector<ComplexMatrix> hermitian_basis(std::size_t dim) {
  std::vector<ComplexMatrix> basis;
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < dim; ++k) {
    ComplexMatrix m(dim, dim);
    m(k, k) = 1.0;
    basis.push_back(m);
  }
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t l = k + 1; l < dim; ++l) {
      ComplexMatrix re(dim, dim), im(dim, dim);
      re(k, l) = s;
      re(l, k) = s;
      im(k, l) = Complex(0.0, s);
      im(l, k) = Complex(0.0, -s);
      basis.push_back(re);
      basis.push_back(im);
    }
  }
  return basis;
}

ComplexMatrix swap_subsystems(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b) {
  const std::size_t d = dim_a * dim_b;
  ComplexMatrix r(d, d);
  for (std::size_t ia = 0; ia < dim_a; ++ia)
    for (std::size_t ib = 0; ib < dim_b; ++ib)
      for (std::size_t ja = 0; ja < dim_a; ++ja)
        for (std::size_t jb = 0; jb < dim_b; ++jb)
          r(ib * dim_a + ia, jb * dim_a + ja) = m(ia * dim_b + ib, ja * dim_b + jb);
  return r;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).max_abs();
}

}  // namespace qmt::testing
