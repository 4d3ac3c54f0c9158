#include "qmt/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qmt {

namespace {

double span_cutoff(const Tolerances& tol) { return std::max(10.0 * tol.eq_tol, 1e-12); }

// Gram-Schmidt with two re-orthogonalization passes; vectors whose residual
// falls below the cutoff are dependent and dropped.
std::vector<CVector> orthonormalize(const std::vector<CVector>& vectors, std::size_t ambient_dim,
                                    double cutoff) {
  std::vector<CVector> kept;
  for (const CVector& candidate : vectors) {
    if (candidate.size() != ambient_dim)
      throw DimensionError("subspace: spanning vector has the wrong length");
    CVector v = candidate;
    for (int pass = 0; pass < 2; ++pass) {
      for (const CVector& w : kept) {
        const Complex c = inner(w, v);
        for (std::size_t r = 0; r < v.size(); ++r) v[r] -= c * w[r];
      }
    }
    const double nv = vec_norm(v);
    if (nv <= cutoff) continue;
    kept.push_back(scale_vec(v, Complex(1.0 / nv, 0.0)));
  }
  return kept;
}

ComplexMatrix columns_to_matrix(const std::vector<CVector>& columns, std::size_t ambient_dim) {
  ComplexMatrix m(ambient_dim, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) m.set_column(c, columns[c]);
  return m;
}

}  // namespace

// ---- Subspace ---------------------------------------------------------------

Subspace::Subspace(std::size_t ambient_dim, ComplexMatrix basis, const Tolerances& tol)
    : ambient_dim_(ambient_dim), basis_(std::move(basis)) {
  if (ambient_dim_ == 0) throw DimensionError("subspace: zero ambient dimension");
  if (basis_.rows() != ambient_dim_)
    throw DimensionError("subspace: basis rows do not match the ambient dimension");
  if (basis_.cols() > ambient_dim_)
    throw SubspaceError("subspace: more basis vectors than the ambient dimension");
  basis_.ensure_finite("subspace basis");
  if (!approx_equal(basis_.adjoint() * basis_, ComplexMatrix::identity(basis_.cols()),
                    tol.eq_tol))
    throw SubspaceError("subspace: basis columns are not orthonormal within eq_tol");
}

Subspace Subspace::zero(std::size_t ambient_dim) {
  return Subspace(ambient_dim, ComplexMatrix(ambient_dim, 0));
}

Subspace Subspace::full(std::size_t ambient_dim) {
  return Subspace(ambient_dim, ComplexMatrix::identity(ambient_dim));
}

Subspace Subspace::span(std::size_t ambient_dim, const std::vector<CVector>& vectors,
                        const Tolerances& tol) {
  return Subspace(ambient_dim,
                  columns_to_matrix(orthonormalize(vectors, ambient_dim, span_cutoff(tol)),
                                    ambient_dim),
                  tol);
}

Subspace Subspace::line(const CVector& v, const Tolerances& tol) {
  const double n = vec_norm(v);
  if (n <= span_cutoff(tol)) throw NormError("subspace line: vector has (numerically) no length");
  return Subspace(v.size(), columns_to_matrix({scale_vec(v, Complex(1.0 / n, 0.0))}, v.size()),
                  tol);
}

ComplexMatrix Subspace::projector() const { return basis_ * basis_.adjoint(); }

bool Subspace::contains(const Subspace& other, const Tolerances& tol) const {
  if (other.ambient_dim_ != ambient_dim_)
    throw DimensionError("subspace: mismatched ambient dimensions");
  const ComplexMatrix p_other = other.projector();
  return approx_equal(projector() * p_other, p_other, tol.eq_tol);
}

// ---- lattice operations -----------------------------------------------------

Subspace meet(const Subspace& a, const Subspace& b, const Tolerances& tol) {
  if (a.ambient_dim() != b.ambient_dim())
    throw DimensionError("meet: mismatched ambient dimensions");
  const std::size_t n = a.ambient_dim();
  // x is in both subspaces iff it is annihilated by (1-P_a) + (1-P_b),
  // a PSD operator; its near-kernel (eigenvalue <= eq_tol) is the meet.
  const ComplexMatrix gap = (ComplexMatrix::identity(n) - a.projector()) +
                            (ComplexMatrix::identity(n) - b.projector());
  const Eigh e = eigh(gap, tol);
  std::vector<CVector> kernel;
  for (std::size_t i = 0; i < e.values.size(); ++i)
    if (e.values[i] <= tol.eq_tol) kernel.push_back(e.vectors.column(i));
  return Subspace(n, columns_to_matrix(kernel, n), tol);
}

Subspace join(const Subspace& a, const Subspace& b, const Tolerances& tol) {
  if (a.ambient_dim() != b.ambient_dim())
    throw DimensionError("join: mismatched ambient dimensions");
  std::vector<CVector> spanning;
  for (std::size_t c = 0; c < a.dim(); ++c) spanning.push_back(a.basis().column(c));
  for (std::size_t c = 0; c < b.dim(); ++c) spanning.push_back(b.basis().column(c));
  return Subspace::span(a.ambient_dim(), spanning, tol);
}

Subspace ortho(const Subspace& a, const Tolerances& tol) {
  const Eigh e = eigh(a.projector(), tol);
  std::vector<CVector> kernel;
  for (std::size_t i = 0; i < e.values.size(); ++i)
    if (e.values[i] < 0.5) kernel.push_back(e.vectors.column(i));
  return Subspace(a.ambient_dim(), columns_to_matrix(kernel, a.ambient_dim()), tol);
}

bool is_relevant(const Subspace& b, const Subspace& a, const Tolerances& tol) {
  return meet(b, ortho(a, tol), tol).is_zero();
}

// ---- orthomodularity --------------------------------------------------------

LawCheck check_orthomodularity(const std::vector<std::pair<Subspace, Subspace>>& pairs,
                               double residual_tol, const Tolerances& tol) {
  LawCheck out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Subspace& a = pairs[i].first;
    const Subspace& b = pairs[i].second;
    if (!b.contains(a, tol))
      throw OrderError("orthomodularity: pair " + std::to_string(i) +
                       " does not satisfy a <= b");
    const Subspace rebuilt = join(a, meet(b, ortho(a, tol), tol), tol);
    const double residual = op_distance(rebuilt.projector(), b.projector(), tol);
    out.max_residual = std::max(out.max_residual, residual);
    ++out.pairs_checked;
    if (residual > residual_tol) {
      out.holds = false;
      out.failing_indices.push_back(i);
      out.failing_residuals.push_back(residual);
    }
  }
  return out;
}

// ---- Boolean failure witness --------------------------------------------------

BooleanFailureWitness boolean_failure_witness(std::size_t dim, const Tolerances& tol) {
  if (dim < 2) throw DimensionError("boolean_failure_witness: need dimension at least 2");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  CVector e0(dim, Complex(0.0, 0.0)), diag(dim, Complex(0.0, 0.0));
  e0[0] = 1.0;
  diag[0] = inv_sqrt2;
  diag[1] = inv_sqrt2;

  // Two distinct non-orthogonal lines: disjoint but not orthogonal.
  Subspace a = Subspace::line(e0, tol);
  Subspace b = Subspace::line(diag, tol);

  // Half-spaces a' = span{e_0..e_{m-1}} and b' spanned by diagonals
  // (e_i + e_{m+i})/sqrt(2) (plus leftover basis vectors when dim is odd):
  // both b' and ortho(b') meet ortho(a') trivially, so both are relevant
  // to a', yet [P_a', P_b'] != 0.
  const std::size_t m = (dim + 1) / 2;
  std::vector<CVector> a_vecs, b_vecs;
  for (std::size_t i = 0; i < m; ++i) {
    CVector e(dim, Complex(0.0, 0.0));
    e[i] = 1.0;
    a_vecs.push_back(std::move(e));
  }
  for (std::size_t i = 0; i + m < dim; ++i) {
    CVector w(dim, Complex(0.0, 0.0));
    w[i] = inv_sqrt2;
    w[m + i] = inv_sqrt2;
    b_vecs.push_back(std::move(w));
  }
  for (std::size_t i = dim - m; i < m; ++i) {
    CVector e(dim, Complex(0.0, 0.0));
    e[i] = 1.0;
    b_vecs.push_back(std::move(e));
  }
  Subspace a2 = Subspace::span(dim, a_vecs, tol);
  Subspace b2 = Subspace::span(dim, b_vecs, tol);

  BooleanFailureWitness out{std::move(a), std::move(b), false, false,
                            std::move(a2), std::move(b2), false, false};
  out.disjoint_holds = meet(out.disjoint_a, out.disjoint_b, tol).is_zero();
  out.non_orthogonal_holds =
      !ortho(out.disjoint_b, tol).contains(out.disjoint_a, tol);
  const ComplexMatrix pa = out.incompatible_a.projector();
  const ComplexMatrix pb = out.incompatible_b.projector();
  out.incompatible_holds = !approx_equal(pa * pb, pb * pa, tol.eq_tol);
  out.double_relevance_holds =
      is_relevant(out.incompatible_b, out.incompatible_a, tol) &&
      is_relevant(ortho(out.incompatible_b, tol), out.incompatible_a, tol);
  if (!out.disjoint_holds || !out.non_orthogonal_holds || !out.incompatible_holds ||
      !out.double_relevance_holds)
    throw InternalError("boolean_failure_witness: constructed certificate failed verification");
  return out;
}

// ---- nested chain demo ---------------------------------------------------------

ChainDemo nested_relevant_chain(std::size_t ambient_dim, const Tolerances& tol) {
  if (ambient_dim == 0) throw DimensionError("nested_relevant_chain: zero ambient dimension");
  ChainDemo out;
  out.ambient_dim = ambient_dim;
  for (std::size_t k = 1; k <= ambient_dim; ++k) {
    std::vector<CVector> vecs;
    for (std::size_t i = 0; i < k; ++i) {
      CVector e(ambient_dim, Complex(0.0, 0.0));
      e[i] = 1.0;
      vecs.push_back(std::move(e));
    }
    out.chain.push_back(Subspace::span(ambient_dim, vecs, tol));
  }

  out.relevance_monotone = true;
  std::vector<std::pair<Subspace, Subspace>> nested;
  for (std::size_t i = 0; i < out.chain.size(); ++i) {
    for (std::size_t j = i; j < out.chain.size(); ++j) {
      nested.emplace_back(out.chain[i], out.chain[j]);
      if (!is_relevant(out.chain[i], out.chain[j], tol)) out.relevance_monotone = false;
    }
  }
  const LawCheck law = check_orthomodularity(nested, 1e-8, tol);
  out.orthomodular = law.holds;
  out.max_residual = law.max_residual;
  out.note =
      "finite ascending chain: the orthomodular law holds on every nested pair; "
      "the failure possible for infinite chains is not reproducible at finite dimension";
  return out;
}

}  // namespace qmt
