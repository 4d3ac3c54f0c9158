#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmt/linalg.hpp"
#include "qmt/qstructs.hpp"

namespace qmt {

// Joint probability distribution ("coupling") over two finite outcome sets.
// Entries are non-negative and sum to 1 within eq_tol; marginals are read
// off by summing rows/columns.
class Coupling {
 public:
  Coupling(std::vector<std::string> row_outcomes, std::vector<std::string> col_outcomes,
           std::vector<std::vector<double>> gamma,
           const Tolerances& tol = default_tolerances());

  const std::vector<std::string>& row_outcomes() const { return rows_; }
  const std::vector<std::string>& col_outcomes() const { return cols_; }
  double gamma(std::size_t i, std::size_t j) const { return gamma_[i][j]; }
  std::vector<double> row_marginal() const;  // mu
  std::vector<double> col_marginal() const;  // nu

 private:
  std::vector<std::string> rows_, cols_;
  std::vector<std::vector<double>> gamma_;
};

// Pearson correlation coefficient of a coupling with numeric values attached
// to the outcomes: (E[xy] - E[x]E[y]) / (std_x std_y).  When either marginal
// is a point measure the coefficient has no meaning; `defined` is false and
// only the covariance (then 0 up to roundoff) is reported.
struct CorrelationCoefficient {
  bool defined = false;
  double value = 0.0;
  double covariance = 0.0;
};

CorrelationCoefficient correlation_coefficient(const Coupling& c,
                                               const std::vector<double>& row_values,
                                               const std::vector<double>& col_values);

// 2x2 coupling of a pair of effects (e on factor A, f on factor B) in a
// joint state: gamma(a,b) = tr[rho (E_a (x) F_b)] with E_1 = e, E_0 = 1 - e.
// Row/column outcome labels are "0" and "1".
Coupling coupling_from_joint_state(const State& joint, std::size_t dim_a, std::size_t dim_b,
                                   const Effect& e, const Effect& f,
                                   const Tolerances& tol = default_tolerances());

// Coupling of two coarse-grained observables in a joint state:
// gamma(i,j) = tr[rho (E_i (x) F_j)] over the bins of the two scales.
Coupling coupling_from_observables(const State& joint, std::size_t dim_a, std::size_t dim_b,
                                   const DiscreteObservable& obs_a, const ReadingScale& scale_a,
                                   const DiscreteObservable& obs_b, const ReadingScale& scale_b,
                                   const Tolerances& tol = default_tolerances());

// The three numbers tr(rho_A e), tr(rho_B f), tr(rho e (x) f) agree within
// eq_tol, where rho_A and rho_B are the reduced states of the joint.  This
// is the strongest sense in which the two effects carry the same value in
// the joint state: each marginal probability equals the joint probability.
bool strongly_correlated_effects(const State& joint, std::size_t dim_a, std::size_t dim_b,
                                 const Effect& e, const Effect& f,
                                 const Tolerances& tol = default_tolerances());

// Injective assignment of bins of A to bins of B such that every matched
// pair is strongly correlated; std::nullopt when none exists.  The search
// is exhaustive (depth-first over bins in order, columns tried ascending),
// so the returned assignment is the lexicographically first one and ties
// resolve to the lowest column index.
std::optional<std::vector<std::size_t>> strongly_correlated_observables(
    const State& joint, std::size_t dim_a, std::size_t dim_b,
    const DiscreteObservable& obs_a, const ReadingScale& scale_a,
    const DiscreteObservable& obs_b, const ReadingScale& scale_b,
    const Tolerances& tol = default_tolerances());

// Schmidt decomposition of a unit vector on H_A (x) H_B with the singular
// values grouped into degenerate multiplets:
//   v = sum_i lambda_i sum_m xi_im (x) eta_im
// where distinct lambda_i differ by more than degeneracy_tol relative to
// the larger one.  P_i projects onto span{xi_im}, R_i onto span{eta_im};
// the reduced states are sum_i lambda_i^2 P_i and sum_i lambda_i^2 R_i.
struct SchmidtGroup {
  double lambda = 0.0;            // common singular value of the group
  std::size_t multiplicity = 0;
  std::vector<CVector> left_vectors;   // xi_im, orthonormal
  std::vector<CVector> right_vectors;  // eta_im, orthonormal
  ComplexMatrix left_projection;       // P_i
  ComplexMatrix right_projection;      // R_i
};

struct SchmidtDecomposition {
  std::size_t dim_a = 0, dim_b = 0;
  CVector vector;  // the decomposed vector itself
  std::vector<SchmidtGroup> groups;
};

// Throws NormError unless |v| = 1 within eq_tol.
SchmidtDecomposition schmidt(const CVector& v, std::size_t dim_a, std::size_t dim_b,
                             const Tolerances& tol = default_tolerances());

// Pairs of projections that are strongly correlated in the pure state P[v]:
// one (P_i, R_i) pair per Schmidt group, plus, for every group listed in
// `refinements`, the rank-1 pairs (P[sum_n u_nm xi_in], P[sum_n conj(u_nm) eta_in])
// obtained by rotating inside the group with the given multiplicity-sized
// unitary u.  A refinement whose shape does not match the group, or that is
// not unitary, leaves the group subspace and raises SubspaceError.  Every
// returned pair is re-verified against strongly_correlated_effects; a
// violation raises InternalError.
std::vector<std::pair<Effect, Effect>> correlated_projection_pairs(
    const SchmidtDecomposition& sd,
    const std::map<std::size_t, ComplexMatrix>& refinements = {},
    const Tolerances& tol = default_tolerances());

}  // namespace qmt
