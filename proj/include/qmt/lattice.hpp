#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qmt/errors.hpp"
#include "qmt/linalg.hpp"

namespace qmt {

// Closed subspace of C^n, carried as an orthonormal basis (possibly with
// zero columns).  Meets, joins and orthocomplements are computed spectrally,
// with ranks decided by eigenvalue thresholds, which keeps long chains of
// operations numerically stable.
class Subspace {
 public:
  // basis columns must be orthonormal within eq_tol (SubspaceError).
  Subspace(std::size_t ambient_dim, ComplexMatrix basis,
           const Tolerances& tol = default_tolerances());

  static Subspace zero(std::size_t ambient_dim);
  static Subspace full(std::size_t ambient_dim);
  // Orthonormalizes the given spanning vectors, dropping dependent ones.
  static Subspace span(std::size_t ambient_dim, const std::vector<CVector>& vectors,
                       const Tolerances& tol = default_tolerances());
  static Subspace line(const CVector& v, const Tolerances& tol = default_tolerances());

  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t dim() const { return basis_.cols(); }
  bool is_zero() const { return dim() == 0; }
  const ComplexMatrix& basis() const { return basis_; }
  ComplexMatrix projector() const;

  // True when other <= this (projector absorption within eq_tol).
  bool contains(const Subspace& other, const Tolerances& tol = default_tolerances()) const;

 private:
  std::size_t ambient_dim_;
  ComplexMatrix basis_;
};

// Lattice operations.  meet = intersection (kernel of (1-P_a) + (1-P_b)),
// join = closed span of the union, ortho = orthocomplement.
Subspace meet(const Subspace& a, const Subspace& b, const Tolerances& tol = default_tolerances());
Subspace join(const Subspace& a, const Subspace& b, const Tolerances& tol = default_tolerances());
Subspace ortho(const Subspace& a, const Tolerances& tol = default_tolerances());

// Relevance of b with respect to a: b is irrelevant when b meet ortho(a) is
// nonzero, relevant otherwise.  In particular b <= a implies relevance.
bool is_relevant(const Subspace& b, const Subspace& a,
                 const Tolerances& tol = default_tolerances());

// Verdict of checking b = a join (b meet ortho(a)) over nested pairs a <= b.
// In finite dimension the law must always hold; a failure signals a
// numerical defect and is reported with its residual.
struct LawCheck {
  bool holds = true;
  std::size_t pairs_checked = 0;
  double max_residual = 0.0;
  std::vector<std::size_t> failing_indices;
  std::vector<double> failing_residuals;
};

// Throws OrderError when some pair violates a <= b within eq_tol.
LawCheck check_orthomodularity(const std::vector<std::pair<Subspace, Subspace>>& pairs,
                               double residual_tol = 1e-8,
                               const Tolerances& tol = default_tolerances());

// Constructed certificate that the lattice is not Boolean:
//  - disjoint_a, disjoint_b: meet = 0 yet disjoint_a is not inside
//    ortho(disjoint_b) (disjointness without orthogonality);
//  - incompatible_a, incompatible_b: non-commuting projections with both
//    incompatible_b and its orthocomplement relevant to incompatible_a.
// The *_holds flags record the verified predicates.
struct BooleanFailureWitness {
  Subspace disjoint_a;
  Subspace disjoint_b;
  bool disjoint_holds = false;
  bool non_orthogonal_holds = false;

  Subspace incompatible_a;
  Subspace incompatible_b;
  bool incompatible_holds = false;
  bool double_relevance_holds = false;
};

BooleanFailureWitness boolean_failure_witness(std::size_t dim,
                                              const Tolerances& tol = default_tolerances());

// Strictly increasing chain V_1 < V_2 < ... < V_n of nested subspaces with
// every earlier member relevant to every later one, checked against the
// orthomodular law.  A chain of finite length always satisfies the law;
// the failure that infinite ascending chains can produce is out of numeric
// reach, and this demo does not reproduce it.
struct ChainDemo {
  std::size_t ambient_dim = 0;
  std::vector<Subspace> chain;
  bool orthomodular = false;
  bool relevance_monotone = false;
  double max_residual = 0.0;
  std::string note;
};

ChainDemo nested_relevant_chain(std::size_t ambient_dim,
                                const Tolerances& tol = default_tolerances());

}  // namespace qmt
