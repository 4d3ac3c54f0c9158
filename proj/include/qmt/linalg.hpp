#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "qmt/errors.hpp"

namespace qmt {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

// Numerical tolerances used throughout the toolkit.
//   eq_tol         -- operator/scalar equality checks
//   psd_tol        -- accepted negative slack on eigenvalues of positive
//                     operators; eigenvalues in [-psd_tol, 0) are clipped to 0
//   degeneracy_tol -- relative gap below which singular values are grouped
//                     into one degenerate multiplet
struct Tolerances {
  double eq_tol = 1e-9;
  double psd_tol = 1e-10;
  double degeneracy_tol = 1e-8;
};

// Shared default instance (the values above).
const Tolerances& default_tolerances();

// Dense complex matrix, row major.  The only invariants enforced here are
// shape consistency and finiteness of entries; structural properties
// (hermiticity, positivity, unitarity) belong to the layers above.
class ComplexMatrix {
 public:
  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0, 0.0)) {}
  // Entries row major; throws DimensionError on a count mismatch and
  // ValidationError on non-finite entries.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix diagonal(const std::vector<double>& entries);
  // |u><v| (conjugates v).
  static ComplexMatrix outer(const CVector& u, const CVector& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;
  Complex trace() const;
  double frobenius_norm() const;
  // Largest |entry|; cheap coarse magnitude measure.
  double max_abs() const;

  // Column c as a vector.
  CVector column(std::size_t c) const;
  void set_column(std::size_t c, const CVector& v);

  ComplexMatrix operator+(const ComplexMatrix& o) const;
  ComplexMatrix operator-(const ComplexMatrix& o) const;
  ComplexMatrix operator*(const ComplexMatrix& o) const;
  ComplexMatrix operator*(Complex s) const;
  ComplexMatrix operator-() const;

  // Throws ValidationError if any entry is NaN or infinite.
  void ensure_finite(const char* what) const;

 private:
  std::size_t rows_, cols_;
  std::vector<Complex> data_;
};

inline ComplexMatrix operator*(Complex s, const ComplexMatrix& m) { return m * s; }

// ---- vectors ----------------------------------------------------------

double vec_norm(const CVector& v);
// <u|v>, conjugate linear in u.
Complex inner(const CVector& u, const CVector& v);
CVector mat_vec(const ComplexMatrix& m, const CVector& v);
CVector kron_vec(const CVector& a, const CVector& b);
CVector scale_vec(const CVector& v, Complex s);

// ---- structural predicates and helpers --------------------------------

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol);
bool is_hermitian(const ComplexMatrix& m, double tol);
// (m + m^dagger)/2; use after operations that are Hermitian in exact
// arithmetic to discard roundoff in the anti-Hermitian part.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

// ---- core operations ---------------------------------------------------

// Kronecker product; subsystem A is the first (slow) factor: the composite
// row index is (i_a * b.rows() + i_b).  Every composite-space routine in the
// toolkit relies on this one ordering convention.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

enum class Subsystem { A, B };

// Trace out one factor of an operator on a bipartite space of shape
// dim_a * dim_b; `traced_out` names the factor that disappears.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a,
                            std::size_t dim_b, Subsystem traced_out);

struct Eigh {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // column k pairs with values[k]
};

// Hermitian eigendecomposition by cyclic Jacobi rotations (deterministic:
// fixed sweep order, convergence when the off-diagonal Frobenius norm drops
// below 1e-12, at most 100 sweeps).  Eigenvalues are returned in descending
// order; each eigenvector's phase is fixed by making its largest-magnitude
// component real positive.  Throws HermiticityError if m deviates from its
// adjoint beyond tol.eq_tol.
Eigh eigh(const ComplexMatrix& m, const Tolerances& tol = default_tolerances());

struct BipartiteSvd {
  std::vector<double> values;  // descending, strictly positive
  ComplexMatrix left;          // dim_a x r
  ComplexMatrix right;         // dim_b x r; C = sum_k values[k] |left_k><right_k|
};

// Singular value decomposition of the dim_a x dim_b matrix C obtained by
// reshaping the bipartite vector v (C(i,j) = v[i*dim_b + j]).  Right vectors
// come from the eigendecomposition of C^dagger C, left vectors are paired as
// u_k = C v_k / s_k, which keeps phases consistent so that
// C = sum_k s_k u_k w_k^dagger.  Singular values below 1e-12 are dropped.
BipartiteSvd svd_bipartite(const CVector& v, std::size_t dim_a, std::size_t dim_b,
                           const Tolerances& tol = default_tolerances());

// Positive square root of a positive semidefinite matrix.  Eigenvalues in
// [-psd_tol, 0) are clipped to 0; anything below -psd_tol raises
// PositivityError.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, const Tolerances& tol = default_tolerances());

// Operator-norm distance (largest singular value of a - b).
double op_distance(const ComplexMatrix& a, const ComplexMatrix& b,
                   const Tolerances& tol = default_tolerances());

}  // namespace qmt
