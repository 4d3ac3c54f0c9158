#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qmt/linalg.hpp"
#include "qmt/qstructs.hpp"

namespace qmt {

// Measurement scheme: an ancilla space of dimension anc_dim prepared in the
// ready state, a unitary coupling on system (x) ancilla (system is the
// first Kronecker factor), and a pointer observable read on the ancilla.
// The scheme induces an observable on the system alone; outcome labels are
// inherited from the pointer.
class MeasurementScheme {
 public:
  MeasurementScheme(std::size_t sys_dim, std::size_t anc_dim, ComplexMatrix unitary,
                    State ready, DiscreteObservable pointer,
                    const Tolerances& tol = default_tolerances());

  std::size_t sys_dim() const { return sys_dim_; }
  std::size_t anc_dim() const { return anc_dim_; }
  const ComplexMatrix& unitary() const { return unitary_; }
  const State& ready() const { return ready_; }
  const DiscreteObservable& pointer() const { return pointer_; }

  // U (rho (x) ready) U^dagger on the composite space.
  ComplexMatrix post_interaction(const State& rho) const;

 private:
  std::size_t sys_dim_, anc_dim_;
  ComplexMatrix unitary_;
  State ready_;
  DiscreteObservable pointer_;
};

// Outcome-indexed collection of completely positive maps in Kraus form,
// summing to a trace-preserving channel.
class Instrument {
 public:
  Instrument(std::size_t sys_dim, std::vector<std::string> outcomes,
             std::vector<std::vector<ComplexMatrix>> kraus_sets,
             const Tolerances& tol = default_tolerances());

  std::size_t sys_dim() const { return sys_dim_; }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const std::vector<ComplexMatrix>& kraus(std::size_t i) const { return kraus_sets_[i]; }
  std::size_t index_of(const std::string& outcome) const;

  // sum_k A_k rho A_k^dagger over the Kraus set of one outcome.
  ComplexMatrix apply(std::size_t outcome, const ComplexMatrix& rho) const;
  // Union over a set of outcomes (an event).
  ComplexMatrix apply_event(const std::vector<std::string>& outcomes,
                            const ComplexMatrix& rho) const;
  // Total channel (all outcomes).
  ComplexMatrix apply_total(const ComplexMatrix& rho) const;

  // Dual (Heisenberg) maps: sum_k A_k^dagger F A_k.
  ComplexMatrix dual_apply(std::size_t outcome, const ComplexMatrix& effect_op) const;
  ComplexMatrix dual_apply_event(const std::vector<std::string>& outcomes,
                                 const ComplexMatrix& effect_op) const;
  ComplexMatrix dual_apply_total(const ComplexMatrix& effect_op) const;

 private:
  std::size_t sys_dim_;
  std::vector<std::string> outcomes_;
  std::vector<std::vector<ComplexMatrix>> kraus_sets_;
};

// Observable with two outcome indices (a sequential pair).  Row marginal is
// the first observable measured; the column marginal is the distorted
// second one.
class BiObservable {
 public:
  BiObservable(std::size_t dim, std::vector<std::string> row_bins,
               std::vector<std::string> col_bins, std::vector<std::vector<Effect>> effects,
               const Tolerances& tol = default_tolerances());

  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& row_bins() const { return row_bins_; }
  const std::vector<std::string>& col_bins() const { return col_bins_; }
  const Effect& at(std::size_t i, std::size_t j) const { return effects_[i][j]; }

  DiscreteObservable row_marginal(const Tolerances& tol = default_tolerances()) const;
  DiscreteObservable col_marginal(const Tolerances& tol = default_tolerances()) const;

 private:
  std::size_t dim_;
  std::vector<std::string> row_bins_, col_bins_;
  std::vector<std::vector<Effect>> effects_;
};

// ---- scheme-level operations ----------------------------------------------

// The system observable measured by the scheme:
//   E_w = tr_anc[ U^dagger (1 (x) Z_w) U (1 (x) ready) ]
// so that tr(rho E_w) = tr[U(rho (x) ready)U^dagger (1 (x) Z_w)] for every
// rho.  That identity is re-verified on a basis of matrix units after
// construction; a violation raises InternalError.
DiscreteObservable induced_observable(const MeasurementScheme& m,
                                      const Tolerances& tol = default_tolerances());

// Unnormalized conditional pair obtained by sandwiching the post-interaction
// state with 1 (x) Z_X and tracing out one side:
//   sys = tr_anc[(1 (x) Z_X) U(rho (x) ready)U^dagger (1 (x) Z_X)],
//   anc = tr_sys[ same ].
// For a projection-valued pointer the sys part also equals the instrument
// output tr_anc[U(rho (x) ready)U^dagger (1 (x) Z_X)].
std::pair<ComplexMatrix, ComplexMatrix> unnormalized_conditional_pair(
    const MeasurementScheme& m, const State& rho, const std::vector<std::string>& bin,
    const Tolerances& tol = default_tolerances());

// Normalized system / ancilla parts of the pair above.  Throws
// NullEventError when the event probability is at or below eq_tol.
State conditional_state(const MeasurementScheme& m, const State& rho,
                        const std::vector<std::string>& bin,
                        const Tolerances& tol = default_tolerances());
State apparatus_conditional_state(const MeasurementScheme& m, const State& rho,
                                  const std::vector<std::string>& bin,
                                  const Tolerances& tol = default_tolerances());

// Unconditioned final states: partial traces of U(rho (x) ready)U^dagger.
std::pair<State, State> final_states(const MeasurementScheme& m, const State& rho,
                                     const Tolerances& tol = default_tolerances());

// The instrument of the scheme with respect to a reading scale: one Kraus
// set per bin, built from the blocks sqrt(w_m nu_k) (1 (x) <z_k|) U (1 (x) |phi_m>)
// over the spectral decompositions ready = sum_m w_m |phi_m><phi_m| and
// Z_bin = sum_k nu_k |z_k><z_k|.  For a pure ready state and a sharp pointer
// this reduces to one block per pointer eigenvector.
Instrument instrument_of(const MeasurementScheme& m, const ReadingScale& scale,
                         const Tolerances& tol = default_tolerances());

// Measurement dilation of a sharp observable with the identity-conditioned
// update rule (Kraus operators = the projections themselves): ancilla
// dimension = number of outcomes, ready state = first ancilla basis vector,
// pointer = ancilla basis observable, and the unitary extends
//   phi (x) e_0  |->  sum_i (E_i phi) (x) e_i
// by deterministic Gram-Schmidt completion over canonical basis vectors in
// index order.  Throws SharpnessError if the observable is not sharp.
MeasurementScheme build_lueders_scheme(const DiscreteObservable& obs,
                                       const Tolerances& tol = default_tolerances());

// Same dilation for an arbitrary (possibly unsharp) observable, with
// sqrt(E_i) in place of E_i.  The induced observable is the POVM itself.
MeasurementScheme build_naimark_scheme(const DiscreteObservable& povm,
                                       const Tolerances& tol = default_tolerances());

// The measured observable is unchanged by one run of the measurement:
// dual-total-channel(E_X) = E_X for every bin of the scale.
bool is_first_kind(const MeasurementScheme& m, const ReadingScale& scale,
                   const Tolerances& tol = default_tolerances());

// A repeated run confirms the registered bin with certainty:
// dual-bin-map(E_X) = E_X for every bin X.
bool is_repeatable(const MeasurementScheme& m, const ReadingScale& scale,
                   const Tolerances& tol = default_tolerances());

// The dual total channel separates effects (is injective): its matrix on
// operator space has full rank sys_dim^2.
bool is_nondegenerate(const MeasurementScheme& m,
                      const Tolerances& tol = default_tolerances());

// States lying entirely inside the eigenvalue-1 eigenspace of a bin effect
// pass the measurement of that bin undisturbed.  Checked on the eigenspace
// basis and on pairwise equal-weight superpositions (real and imaginary), a
// spanning family for operators supported there.
bool is_d_ideal(const MeasurementScheme& m, const ReadingScale& scale,
                const Tolerances& tol = default_tolerances());

// Decomposition of the final states as probability mixtures of the
// conditional states, and orthogonality of the conditional components.
// `system_mixture_holds` must come out true for every scheme with a
// projection-valued pointer; `apparatus_mixture_holds` together with
// `components_orthogonal` characterizes when the conditional decomposition
// of the final states is consistent on both sides.
struct MixtureCheck {
  bool system_mixture_holds = false;
  bool apparatus_mixture_holds = false;
  bool components_orthogonal = false;
  double system_residual = 0.0;
  double apparatus_residual = 0.0;
  double max_overlap = 0.0;  // largest |rho_i rho_j| between components
};

MixtureCheck mixture_decomposition_check(const MeasurementScheme& m, const State& rho,
                                         const ReadingScale& scale,
                                         const Tolerances& tol = default_tolerances());

// Biobservable of two schemes run in succession on the same system:
//   E12(X, Y) = dual-bin-map-of-first(X)( E2(Y) )
// with E2 the (coarse-grained) observable induced by the second scheme.
BiObservable sequential_biobservable(const MeasurementScheme& first,
                                     const ReadingScale& first_scale,
                                     const MeasurementScheme& second,
                                     const ReadingScale& second_scale,
                                     const Tolerances& tol = default_tolerances());

}  // namespace qmt
