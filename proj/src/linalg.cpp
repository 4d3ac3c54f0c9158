#include "qmt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qmt {

namespace {

// Jacobi sweep limits.  The off-diagonal Frobenius norm of a Hermitian
// matrix shrinks quadratically once rotations are small, so 100 sweeps is
// far beyond what any desk-scale matrix needs; the cap only guards against
// a logic defect looping forever.
constexpr double kJacobiOffNorm = 1e-12;
constexpr int kJacobiMaxSweeps = 100;

// Singular values at or below this are treated as exact zeros.
constexpr double kSingularCutoff = 1e-12;

std::string shape_of(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix literal: expected " + std::to_string(rows_ * cols_) +
                         " entries for a " + shape_of(*this) + " matrix, got " +
                         std::to_string(data_.size()));
  }
  ensure_finite("matrix literal");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& entries) {
  ComplexMatrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(const CVector& u, const CVector& v) {
  ComplexMatrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(i, j) = std::conj((*this)(i, j));
  return m;
}

Complex ComplexMatrix::trace() const {
  if (!is_square()) throw DimensionError("trace of non-square " + shape_of(*this) + " matrix");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const Complex& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const Complex& z : data_) m = std::max(m, std::abs(z));
  return m;
}

CVector ComplexMatrix::column(std::size_t c) const {
  CVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
  return v;
}

void ComplexMatrix::set_column(std::size_t c, const CVector& v) {
  if (v.size() != rows_) {
    throw DimensionError("set_column: vector of length " + std::to_string(v.size()) +
                         " into " + shape_of(*this) + " matrix");
  }
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = v[i];
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw DimensionError("matrix sum: " + shape_of(*this) + " + " + shape_of(o));
  ComplexMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = data_[i] + o.data_[i];
  return m;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw DimensionError("matrix difference: " + shape_of(*this) + " - " + shape_of(o));
  ComplexMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = data_[i] - o.data_[i];
  return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& o) const {
  if (cols_ != o.rows_)
    throw DimensionError("matrix product: " + shape_of(*this) + " * " + shape_of(o));
  ComplexMatrix m(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Complex a = (*this)(i, k);
      if (a == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) m(i, j) += a * o(k, j);
    }
  }
  return m;
}

ComplexMatrix ComplexMatrix::operator*(Complex s) const {
  ComplexMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = data_[i] * s;
  return m;
}

ComplexMatrix ComplexMatrix::operator-() const { return (*this) * Complex(-1.0, 0.0); }

void ComplexMatrix::ensure_finite(const char* what) const {
  for (const Complex& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ValidationError(std::string(what) + ": non-finite matrix entry");
  }
}

// ---- vectors ----------------------------------------------------------

double vec_norm(const CVector& v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return std::sqrt(s);
}

Complex inner(const CVector& u, const CVector& v) {
  if (u.size() != v.size())
    throw DimensionError("inner product of vectors with lengths " + std::to_string(u.size()) +
                         " and " + std::to_string(v.size()));
  Complex s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

CVector mat_vec(const ComplexMatrix& m, const CVector& v) {
  if (m.cols() != v.size())
    throw DimensionError("matrix-vector product: " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " with length " + std::to_string(v.size()));
  CVector r(m.rows(), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
  return r;
}

CVector kron_vec(const CVector& a, const CVector& b) {
  CVector r(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i * b.size() + j] = a[i] * b[j];
  return r;
}

CVector scale_vec(const CVector& v, Complex s) {
  CVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] * s;
  return r;
}

// ---- predicates --------------------------------------------------------

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j) - b(i, j)) > tol) return false;
  return true;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (!m.is_square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    }
  }
  return true;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  ComplexMatrix h(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return h;
}

// ---- kron / partial trace ----------------------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const Complex av = a(ia, ja);
      if (av == Complex(0.0, 0.0)) continue;
      for (std::size_t ib = 0; ib < b.rows(); ++ib)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
          m(ia * b.rows() + ib, ja * b.cols() + jb) = av * b(ib, jb);
    }
  return m;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a,
                            std::size_t dim_b, Subsystem traced_out) {
  if (!m.is_square() || m.rows() != dim_a * dim_b) {
    throw DimensionError("partial_trace: matrix " + shape_of(m) + " does not match factors " +
                         std::to_string(dim_a) + "x" + std::to_string(dim_b));
  }
  if (traced_out == Subsystem::B) {
    ComplexMatrix r(dim_a, dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
      for (std::size_t k = 0; k < dim_a; ++k) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < dim_b; ++j) s += m(i * dim_b + j, k * dim_b + j);
        r(i, k) = s;
      }
    return r;
  }
  ComplexMatrix r(dim_b, dim_b);
  for (std::size_t j = 0; j < dim_b; ++j)
    for (std::size_t l = 0; l < dim_b; ++l) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < dim_a; ++i) s += m(i * dim_b + j, i * dim_b + l);
      r(j, l) = s;
    }
  return r;
}

// ---- eigh ---------------------------------------------------------------

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Make the largest-magnitude component of each column real positive.  Keeps
// eigen- and singular-vector output reproducible across runs and platforms.
void fix_column_phases(ComplexMatrix& v) {
  for (std::size_t c = 0; c < v.cols(); ++c) {
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
      const double a = std::abs(v(i, c));
      if (a > best) { best = a; imax = i; }
    }
    if (best <= 0.0) continue;
    const Complex phase = v(imax, c) / best;
    for (std::size_t i = 0; i < v.rows(); ++i) v(i, c) *= std::conj(phase);
  }
}

}  // namespace

Eigh eigh(const ComplexMatrix& m, const Tolerances& tol) {
  if (!m.is_square()) throw DimensionError("eigh: non-square " + shape_of(m) + " matrix");
  if (!is_hermitian(m, tol.eq_tol))
    throw HermiticityError("eigh: matrix deviates from its adjoint beyond eq_tol");

  const std::size_t n = m.rows();
  ComplexMatrix a = hermitian_part(m);  // discard roundoff in the input
  ComplexMatrix v = ComplexMatrix::identity(n);

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= kJacobiOffNorm) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        // 2x2 unitary G = D(phase) * Jacobi rotation annihilating a(p,q):
        //   G(p,p) = c, G(p,q) = s, G(q,p) = -s conj(phase), G(q,q) = c conj(phase)
        const Complex phase = a(p, q) / r;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // columns p,q of A and of the accumulated eigenvector matrix
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(phase) * akq;
          a(k, q) = s * akp + c * std::conj(phase) * akq;
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * std::conj(phase) * vkq;
          v(k, q) = s * vkp + c * std::conj(phase) * vkq;
        }
        // rows p,q of A (G^dagger from the left)
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

  Eigh out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]).real();
    out.vectors.set_column(c, v.column(order[c]));
  }
  fix_column_phases(out.vectors);
  return out;
}

// ---- svd ----------------------------------------------------------------

BipartiteSvd svd_bipartite(const CVector& v, std::size_t dim_a, std::size_t dim_b,
                           const Tolerances& tol) {
  if (v.size() != dim_a * dim_b) {
    throw DimensionError("svd_bipartite: vector of length " + std::to_string(v.size()) +
                         " does not factor as " + std::to_string(dim_a) + "*" +
                         std::to_string(dim_b));
  }
  ComplexMatrix c(dim_a, dim_b);
  for (std::size_t i = 0; i < dim_a; ++i)
    for (std::size_t j = 0; j < dim_b; ++j) c(i, j) = v[i * dim_b + j];

  // Right singular vectors from the Gram matrix C^dagger C; left vectors
  // paired through C itself so phases stay consistent.
  const Eigh gram = eigh(hermitian_part(c.adjoint() * c), tol);

  // Rank cutoff in Gram-eigenvalue space.  Squaring C pushes the zero modes
  // up to roundoff level (~1e-16 * lambda_max), so a purely absolute cutoff
  // on s would keep noise vectors; anything below the relative noise floor
  // is a numerical zero.
  const double lambda_max = gram.values.empty() ? 0.0 : std::max(gram.values.front(), 0.0);
  const double lambda_cut =
      std::max(kSingularCutoff * kSingularCutoff, lambda_max * 1e-13);

  BipartiteSvd out;
  std::size_t rank = 0;
  for (std::size_t k = 0; k < gram.values.size(); ++k) {
    if (gram.values[k] <= lambda_cut) continue;
    ++rank;
    out.values.push_back(std::sqrt(gram.values[k]));
  }
  out.left = ComplexMatrix(dim_a, rank);
  out.right = ComplexMatrix(dim_b, rank);
  for (std::size_t k = 0; k < rank; ++k) {
    const CVector w = gram.vectors.column(k);
    CVector u = mat_vec(c, w);
    for (Complex& z : u) z /= out.values[k];
    out.left.set_column(k, u);
    out.right.set_column(k, w);
  }
  // Phase convention on the left vectors; rotating u_k and w_k by the same
  // phase leaves s_k u_k w_k^dagger unchanged.
  for (std::size_t k = 0; k < rank; ++k) {
    CVector u = out.left.column(k);
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double a = std::abs(u[i]);
      if (a > best) { best = a; imax = i; }
    }
    if (best <= 0.0) continue;
    const Complex phase = std::conj(u[imax] / best);
    out.left.set_column(k, scale_vec(u, phase));
    out.right.set_column(k, scale_vec(out.right.column(k), phase));
  }
  return out;
}

// ---- psd sqrt / operator distance ---------------------------------------

ComplexMatrix psd_sqrt(const ComplexMatrix& m, const Tolerances& tol) {
  const Eigh e = eigh(m, tol);
  std::vector<double> roots(e.values.size());
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    double lam = e.values[i];
    if (lam < -tol.psd_tol) {
      throw PositivityError("psd_sqrt: eigenvalue " + std::to_string(lam) +
                            " below -psd_tol");
    }
    roots[i] = std::sqrt(std::max(lam, 0.0));
  }
  const ComplexMatrix r = e.vectors * ComplexMatrix::diagonal(roots) * e.vectors.adjoint();
  return hermitian_part(r);
}

double op_distance(const ComplexMatrix& a, const ComplexMatrix& b, const Tolerances& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("op_distance: " + shape_of(a) + " vs " + shape_of(b));
  const ComplexMatrix d = a - b;
  const Eigh gram = eigh(hermitian_part(d.adjoint() * d), tol);
  double top = gram.values.empty() ? 0.0 : std::max(gram.values.front(), 0.0);
  return std::sqrt(top);
}

}  // namespace qmt
