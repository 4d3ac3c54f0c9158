#pragma once

// Shared helpers for the unit and acceptance suites: deterministic random
// object generators (seeded, reproducible) and a few frozen reference
// objects that several suites check against.

#include <string>
#include <utility>
#include <vector>

#include "qmt/linalg.hpp"
#include "qmt/qstructs.hpp"
#include "qmt/rng.hpp"

namespace qmt::testing {

// Standard normal via Box-Muller on splitmix64 uniforms.
double random_normal(SplitMix64& rng);
Complex random_complex(SplitMix64& rng);

ComplexMatrix random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols);
ComplexMatrix random_hermitian(SplitMix64& rng, std::size_t n);
ComplexMatrix random_psd(SplitMix64& rng, std::size_t n);
// Gram-Schmidt of a random square matrix; deterministic given the rng state.
ComplexMatrix random_unitary(SplitMix64& rng, std::size_t n);
CVector random_unit_vector(SplitMix64& rng, std::size_t n);
State random_state(SplitMix64& rng, std::size_t n);
State random_pure_state(SplitMix64& rng, std::size_t n);

// Random POVM with `n_outcomes` effects: draws positive G_i and normalizes
// with S^(-1/2) G_i S^(-1/2), S = sum G_i.  Outcome labels "w0", "w1", ...
DiscreteObservable random_povm(SplitMix64& rng, std::size_t dim, std::size_t n_outcomes);

// ---- frozen reference objects ------------------------------------------

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();

// Spin-z observable on a qubit, outcomes "+1" (projector on |0>) and "-1".
DiscreteObservable sigma_z_observable();
// Spin-x observable, outcomes "+1" (projector on |+>) and "-1".
DiscreteObservable sigma_x_observable();
// Three-outcome qubit POVM (2/3)|u_k><u_k| at Bloch angles 0, 120, 240
// degrees; strictly unsharp, informationally symmetric.
DiscreteObservable trine_povm();

State plus_state();                       // |+><+|
State basis_state(std::size_t dim, std::size_t k);
CVector bell_vector();                    // (|00> + |11>)/sqrt(2)

// Hermitian basis of d x d matrices: E_kk, (E_kl + E_lk)/sqrt(2),
// (iE_kl - iE_lk)/sqrt(2).  Spans all Hermitian operators; handy for
// verifying identities that are linear in the state.
std::vector<ComplexMatrix> hermitian_basis(std::size_t dim);

// Reorders a joint operator on H_A (x) H_B to one on H_B (x) H_A.
ComplexMatrix swap_subsystems(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qmt::testing
