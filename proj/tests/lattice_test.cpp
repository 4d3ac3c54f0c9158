#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "qmt/errors.hpp"
#include "qmt/lattice.hpp"
#include "qmt/linalg.hpp"
#include "support.hpp"

using namespace qmt;
using namespace qmt::testing;

namespace {

CVector unit(std::size_t dim, std::size_t k) {
  CVector v(dim, Complex(0.0, 0.0));
  v[k] = 1.0;
  return v;
}

// Random subspace of the given rank: first columns of a Haar-ish unitary.
Subspace random_subspace(SplitMix64& rng, std::size_t ambient, std::size_t rank) {
  const ComplexMatrix u = random_unitary(rng, ambient);
  ComplexMatrix basis(ambient, rank);
  for (std::size_t c = 0; c < rank; ++c) basis.set_column(c, u.column(c));
  return Subspace(ambient, basis);
}

}  // namespace

TEST_CASE("subspace constructors validate orthonormality") {
  CHECK_NOTHROW(Subspace::zero(3));
  CHECK_NOTHROW(Subspace::full(3));
  CHECK(Subspace::zero(3).dim() == 0);
  CHECK(Subspace::full(3).dim() == 3);

  ComplexMatrix skew(2, 1);
  skew(0, 0) = 1.0;
  skew(1, 0) = 1.0;  // length sqrt(2)
  CHECK_THROWS_AS(Subspace(2, skew), SubspaceError);
  CHECK_THROWS_AS(Subspace(3, ComplexMatrix::identity(2)), DimensionError);

  // span drops dependent vectors.
  const Subspace s = Subspace::span(3, {unit(3, 0), unit(3, 0), unit(3, 1)});
  CHECK(s.dim() == 2);
  CHECK_THROWS_AS(Subspace::line(CVector(3, Complex(0.0, 0.0))), NormError);
}

TEST_CASE("meet and join against hand values") {
  const Subspace e0 = Subspace::line(unit(2, 0));
  const Subspace e1 = Subspace::line(unit(2, 1));
  CVector plus{Complex(1.0, 0.0), Complex(1.0, 0.0)};

  CHECK(meet(e0, e0).dim() == 1);
  CHECK(max_abs_diff(meet(e0, e0).projector(), e0.projector()) < 1e-10);
  CHECK(meet(e0, e1).is_zero());
  CHECK(meet(e0, Subspace::line(plus)).is_zero());

  CHECK(join(e0, e1).dim() == 2);
  CHECK(max_abs_diff(join(e0, e1).projector(), ComplexMatrix::identity(2)) < 1e-10);
  CHECK(join(e0, e0).dim() == 1);

  // ortho flips the pieces.
  CHECK(max_abs_diff(ortho(e0).projector(), e1.projector()) < 1e-10);
  CHECK(ortho(Subspace::full(3)).is_zero());
  CHECK(ortho(Subspace::zero(3)).dim() == 3);
}

TEST_CASE("lattice identities hold on random pairs") {
  SplitMix64 rng(909);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 2 + (rng.next_u64() % 4);  // ambient 2..5
    const std::size_t ra = rng.next_u64() % (n + 1);
    const std::size_t rb = rng.next_u64() % (n + 1);
    const Subspace a = random_subspace(rng, n, ra);
    const Subspace b = random_subspace(rng, n, rb);

    // Dimension count: dim(join) + dim(meet) = dim a + dim b.
    CHECK(join(a, b).dim() + meet(a, b).dim() == a.dim() + b.dim());

    // De Morgan: ortho(join) = meet(ortho, ortho).
    CHECK(max_abs_diff(ortho(join(a, b)).projector(),
                       meet(ortho(a), ortho(b)).projector()) < 1e-8);

    // Double complement.
    CHECK(max_abs_diff(ortho(ortho(a)).projector(), a.projector()) < 1e-9);

    // Complement laws.
    CHECK(meet(a, ortho(a)).is_zero());
    CHECK(join(a, ortho(a)).dim() == n);

    // Meet is contained in both arguments.
    const Subspace m = meet(a, b);
    CHECK(a.contains(m));
    CHECK(b.contains(m));
  }
}

TEST_CASE("meet agrees with a brute-force kernel oracle") {
  SplitMix64 rng(1010);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 4;
    const Subspace a = random_subspace(rng, n, 2);
    const Subspace b = random_subspace(rng, n, 3);
    // Oracle: rank of [basis_a | basis_b] gives dim(join); kernel dimension
    // of the stacked Gram construction gives the meet via the dimension
    // formula.  Compute the rank from singular values of the concatenation.
    ComplexMatrix concat(n, a.dim() + b.dim());
    for (std::size_t c = 0; c < a.dim(); ++c) concat.set_column(c, a.basis().column(c));
    for (std::size_t c = 0; c < b.dim(); ++c)
      concat.set_column(a.dim() + c, b.basis().column(c));
    const Eigh gram = eigh(hermitian_part(concat.adjoint() * concat));
    std::size_t rank = 0;
    for (double v : gram.values)
      if (v > 1e-9) ++rank;
    CHECK(meet(a, b).dim() == a.dim() + b.dim() - rank);
  }
}

TEST_CASE("relevance follows containment and genericity") {
  const Subspace e0 = Subspace::line(unit(3, 0));
  const Subspace e01 = Subspace::span(3, {unit(3, 0), unit(3, 1)});

  // b <= a implies b relevant to a.
  CHECK(is_relevant(e0, e01));
  CHECK(is_relevant(e0, e0));
  // The orthocomplement of a proper nonzero subspace is irrelevant to it.
  CHECK_FALSE(is_relevant(ortho(e01), e01));

  // Two generic lines in C^2: each relevant to the other.
  CVector plus{Complex(1.0, 0.0), Complex(1.0, 0.0)};
  const Subspace p = Subspace::line(plus);
  const Subspace z = Subspace::line(unit(2, 0));
  CHECK(is_relevant(p, z));
  CHECK(is_relevant(z, p));

  // Monotonicity on random nested pairs.
  SplitMix64 rng(1111);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 3 + (rng.next_u64() % 3);
    const Subspace small = random_subspace(rng, n, 1 + rng.next_u64() % (n - 1));
    const Subspace big = join(small, random_subspace(rng, n, 1));
    CHECK(is_relevant(small, big));
  }
}

TEST_CASE("orthomodular law holds on nested pairs") {
  // Hand pairs: a = 0 and a = b.
  const Subspace b = Subspace::span(3, {unit(3, 0), unit(3, 2)});
  std::vector<std::pair<Subspace, Subspace>> pairs;
  pairs.emplace_back(Subspace::zero(3), b);
  pairs.emplace_back(b, b);
  const LawCheck trivial = check_orthomodularity(pairs);
  CHECK(trivial.holds);
  CHECK(trivial.pairs_checked == 2);
  CHECK(trivial.max_residual < 1e-10);

  // Random nested pairs in C^4.
  SplitMix64 rng(1212);
  std::vector<std::pair<Subspace, Subspace>> random_pairs;
  for (int rep = 0; rep < 50; ++rep) {
    const Subspace a = random_subspace(rng, 4, rng.next_u64() % 3);
    const Subspace big = join(a, random_subspace(rng, 4, 1 + rng.next_u64() % 2));
    random_pairs.emplace_back(a, big);
  }
  const LawCheck swept = check_orthomodularity(random_pairs);
  CHECK(swept.holds);
  CHECK(swept.max_residual < 1e-8);

  // Violated precondition: a not inside b.
  std::vector<std::pair<Subspace, Subspace>> bad;
  CVector plus{Complex(1.0, 0.0), Complex(1.0, 0.0)};
  bad.emplace_back(Subspace::line(plus), Subspace::line(unit(2, 0)));
  CHECK_THROWS_AS(check_orthomodularity(bad), OrderError);
}

TEST_CASE("boolean failure witness certifies non-Booleanity") {
  for (std::size_t dim : {2, 3, 4, 7}) {
    const BooleanFailureWitness w = boolean_failure_witness(dim);
    CHECK(w.disjoint_holds);
    CHECK(w.non_orthogonal_holds);
    CHECK(w.incompatible_holds);
    CHECK(w.double_relevance_holds);
    // Re-verify the primary pair from first principles.
    CHECK(meet(w.disjoint_a, w.disjoint_b).is_zero());
    CHECK_FALSE(ortho(w.disjoint_b).contains(w.disjoint_a));
    // And the double-relevance pair.
    CHECK(is_relevant(w.incompatible_b, w.incompatible_a));
    CHECK(is_relevant(ortho(w.incompatible_b), w.incompatible_a));
  }
  CHECK_THROWS_AS(boolean_failure_witness(1), DimensionError);
}

TEST_CASE("nested chain demo stays orthomodular at finite length") {
  const ChainDemo demo = nested_relevant_chain(5);
  CHECK(demo.chain.size() == 5);
  for (std::size_t k = 0; k < demo.chain.size(); ++k) CHECK(demo.chain[k].dim() == k + 1);
  CHECK(demo.orthomodular);
  CHECK(demo.relevance_monotone);
  CHECK(demo.max_residual < 1e-8);
  CHECK_FALSE(demo.note.empty());
}
