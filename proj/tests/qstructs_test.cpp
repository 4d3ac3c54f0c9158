#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qmt/qstructs.hpp"
#include "support.hpp"

using namespace qmt;
using namespace qmt::testing;

TEST_CASE("state validation accepts density operators and rejects defects") {
  CHECK_NOTHROW(State(ComplexMatrix(2, 2, {0.5, 0.25, 0.25, 0.5})));
  // trace != 1
  CHECK_THROWS_AS(State(ComplexMatrix(2, 2, {0.7, 0.0, 0.0, 0.7})), TraceError);
  // not Hermitian
  CHECK_THROWS_AS(State(ComplexMatrix(2, 2, {0.5, 0.5, -0.5, 0.5})), HermiticityError);
  // negative eigenvalue beyond slack
  CHECK_THROWS_AS(State(ComplexMatrix(2, 2, {1.1, 0.0, 0.0, -0.1})), PositivityError);
  // tiny negative eigenvalue within psd_tol is accepted as zero
  CHECK_NOTHROW(State(ComplexMatrix(2, 2, {1.0 + 5e-11, 0.0, 0.0, -5e-11})));
}

TEST_CASE("pure states and purity detection") {
  const State plus = plus_state();
  CHECK(plus.is_pure());
  CHECK(State::maximally_mixed(2).is_pure() == false);
  // pure() normalizes
  const State p2 = State::pure({2.0, 0.0});
  CHECK(max_abs_diff(p2.density(), ComplexMatrix(2, 2, {1.0, 0.0, 0.0, 0.0})) <= 1e-12);
  CHECK_THROWS_AS(State::pure({0.0, 0.0}), NormError);

  const CVector v = plus.pure_vector();
  CHECK(std::abs(inner(v, v) - Complex(1.0, 0.0)) <= 1e-12);
  CHECK_THROWS_AS(State::maximally_mixed(2).pure_vector(), ValidationError);
}

TEST_CASE("effect validation enforces the unit interval spectrum") {
  CHECK_NOTHROW(Effect(ComplexMatrix(2, 2, {0.5, 0.0, 0.0, 1.0})));
  CHECK_THROWS_AS(Effect(ComplexMatrix(2, 2, {1.2, 0.0, 0.0, 0.5})), EffectBoundError);
  CHECK_THROWS_AS(Effect(ComplexMatrix(2, 2, {-0.2, 0.0, 0.0, 0.5})), PositivityError);
  CHECK_THROWS_AS(Effect(ComplexMatrix(2, 2, {0.5, 0.5, -0.5, 0.5})), HermiticityError);
  CHECK(Effect(ComplexMatrix(2, 2, {1.0, 0.0, 0.0, 0.0})).is_projection());
  CHECK(Effect(ComplexMatrix(2, 2, {0.5, 0.0, 0.0, 0.5})).is_projection() == false);
}

TEST_CASE("observable validation") {
  // effects must sum to the identity
  const Effect half(ComplexMatrix(2, 2, {0.5, 0.0, 0.0, 0.5}));
  const Effect short_half(half.op() * Complex(0.9, 0.0));
  CHECK_THROWS_AS(DiscreteObservable({"a", "b"}, {half, short_half}), CompletenessError);
  CHECK_THROWS_AS(DiscreteObservable({"a", "a"}, {half, half}), LabelError);
  CHECK_NOTHROW(DiscreteObservable({"a", "b"}, {half, half}));

  const DiscreteObservable sz = sigma_z_observable();
  CHECK(sz.is_sharp());
  CHECK(trine_povm().is_sharp() == false);
  CHECK_THROWS_AS(sz.effect_of("missing"), LabelError);
}

TEST_CASE("trine POVM effects sum to identity and are strictly unsharp") {
  const DiscreteObservable trine = trine_povm();
  ComplexMatrix sum(2, 2);
  for (std::size_t i = 0; i < 3; ++i) sum = sum + trine.effect(i).op();
  CHECK(max_abs_diff(sum, ComplexMatrix::identity(2)) <= 1e-12);
  for (std::size_t i = 0; i < 3; ++i) CHECK(trine.effect(i).is_projection() == false);
}

TEST_CASE("probability matches a direct trace oracle") {
  SplitMix64 rng(201);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t dim = 2 + (rng.next_u64() % 3);
    const DiscreteObservable povm = random_povm(rng, dim, 2 + (rng.next_u64() % 3));
    const State rho = random_state(rng, dim);
    for (std::size_t k = 0; k < povm.n_outcomes(); ++k) {
      // oracle: explicit loops, no shared matrix code
      Complex tr = 0.0;
      const ComplexMatrix& r = rho.density();
      const ComplexMatrix& e = povm.effect(k).op();
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) tr += r(i, j) * e(j, i);
      const double p = probability(povm, rho, {povm.outcomes()[k]});
      CHECK(std::abs(p - tr.real()) <= 1e-11);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("probabilities over a full scale sum to one") {
  SplitMix64 rng(202);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t dim = 2 + (rng.next_u64() % 3);
    const DiscreteObservable povm = random_povm(rng, dim, 3);
    const State rho = random_state(rng, dim);
    double total = 0.0;
    for (const std::string& w : povm.outcomes()) total += probability(povm, rho, {w});
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("trine POVM on the maximally mixed state is uniform") {
  const DiscreteObservable trine = trine_povm();
  const State mixed = State::maximally_mixed(2);
  for (const std::string& w : trine.outcomes())
    CHECK(probability(trine, mixed, {w}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("reading scales validate and coarse-grain") {
  const DiscreteObservable trine = trine_povm();
  const ReadingScale fine = ReadingScale::singletons(trine);
  CHECK(fine.n_bins() == 3);
  CHECK_NOTHROW(fine.validate_against(trine));

  const ReadingScale merged({Bin{"first", {"t0"}}, Bin{"rest", {"t1", "t2"}}});
  CHECK_NOTHROW(merged.validate_against(trine));
  const DiscreteObservable coarse = coarse_grain(trine, merged);
  CHECK(coarse.n_outcomes() == 2);
  CHECK(coarse.outcomes()[0] == "first");
  // coarse effect = sum of members
  const ComplexMatrix expect = trine.effect(1).op() + trine.effect(2).op();
  CHECK(max_abs_diff(coarse.effect(1).op(), expect) <= 1e-12);

  // scale errors: non-partition
  CHECK_THROWS_AS(ReadingScale({Bin{"x", {"t0"}}, Bin{"y", {"t0", "t1"}}}), ScaleError);
  const ReadingScale incomplete({Bin{"x", {"t0"}}});
  CHECK_THROWS_AS(incomplete.validate_against(trine), ScaleError);
  const ReadingScale unknown({Bin{"x", {"t0", "zz"}}, Bin{"y", {"t1", "t2"}}});
  CHECK_THROWS_AS(unknown.validate_against(trine), LabelError);
}

TEST_CASE("coarse-graining preserves probabilities additively") {
  SplitMix64 rng(203);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteObservable povm = random_povm(rng, 3, 4);
    const State rho = random_state(rng, 3);
    const ReadingScale scale({Bin{"lo", {"w0", "w1"}}, Bin{"hi", {"w2", "w3"}}});
    const DiscreteObservable coarse = coarse_grain(povm, scale);
    const double direct =
        probability(povm, rho, {"w0"}) + probability(povm, rho, {"w1"});
    CHECK(probability(coarse, rho, {"lo"}) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("objectivity detects definite effect values") {
  const State zero = basis_state(2, 0);
  const DiscreteObservable sz = sigma_z_observable();
  CHECK(is_objective(sz.effect_of("+1"), zero));
  CHECK(is_objective(sz.effect_of("-1"), zero));
  CHECK(is_objective(sz.effect_of("+1"), plus_state()) == false);
}

TEST_CASE("dimension mismatches are reported") {
  const DiscreteObservable sz = sigma_z_observable();
  const State big = State::maximally_mixed(3);
  CHECK_THROWS_AS(probability(sz, big, {"+1"}), DimensionError);
  CHECK_THROWS_AS(is_objective(sz.effect_of("+1"), big), DimensionError);
}
