#include "qmt/correl.hpp"

#include <algorithm>
#include <cmath>

namespace qmt {

namespace {

// Marginal standard deviations below this are treated as point measures:
// dividing by them would amplify pure roundoff into a meaningless
// coefficient.
constexpr double kPointMeasureStd = 1e-12;

void check_joint_dims(const State& joint, std::size_t dim_a, std::size_t dim_b,
                      const char* what) {
  if (joint.dim() != dim_a * dim_b) {
    throw DimensionError(std::string(what) + ": joint state dimension " +
                         std::to_string(joint.dim()) + " does not factor as " +
                         std::to_string(dim_a) + "*" + std::to_string(dim_b));
  }
}

double joint_probability(const State& joint, std::size_t dim_a, std::size_t dim_b,
                         const ComplexMatrix& a_op, const ComplexMatrix& b_op) {
  (void)dim_a;
  (void)dim_b;
  const Complex t = (joint.density() * kron(a_op, b_op)).trace();
  return clip_probability(t.real(), "joint probability");
}

}  // namespace

// ---- Coupling ------------------------------------------------------------

Coupling::Coupling(std::vector<std::string> row_outcomes, std::vector<std::string> col_outcomes,
                   std::vector<std::vector<double>> gamma, const Tolerances& tol)
    : rows_(std::move(row_outcomes)), cols_(std::move(col_outcomes)), gamma_(std::move(gamma)) {
  if (rows_.empty() || cols_.empty())
    throw DimensionError("coupling: outcome sets must be non-empty");
  if (gamma_.size() != rows_.size())
    throw DimensionError("coupling: row count does not match row outcomes");
  double total = 0.0;
  for (const auto& row : gamma_) {
    if (row.size() != cols_.size())
      throw DimensionError("coupling: column count does not match column outcomes");
    for (double g : row) {
      if (g < -tol.psd_tol)
        throw PositivityError("coupling: negative mass " + std::to_string(g));
      total += g;
    }
  }
  if (std::abs(total - 1.0) > tol.eq_tol)
    throw TraceError("coupling: total mass deviates from 1 beyond eq_tol");
}

std::vector<double> Coupling::row_marginal() const {
  std::vector<double> mu(rows_.size(), 0.0);
  for (std::size_t i = 0; i < rows_.size(); ++i)
    for (std::size_t j = 0; j < cols_.size(); ++j) mu[i] += gamma_[i][j];
  return mu;
}

std::vector<double> Coupling::col_marginal() const {
  std::vector<double> nu(cols_.size(), 0.0);
  for (std::size_t i = 0; i < rows_.size(); ++i)
    for (std::size_t j = 0; j < cols_.size(); ++j) nu[j] += gamma_[i][j];
  return nu;
}

// ---- correlation coefficient ----------------------------------------------

CorrelationCoefficient correlation_coefficient(const Coupling& c,
                                               const std::vector<double>& row_values,
                                               const std::vector<double>& col_values) {
  if (row_values.size() != c.row_outcomes().size() ||
      col_values.size() != c.col_outcomes().size()) {
    throw DimensionError("correlation_coefficient: value lists must match the outcome sets");
  }
  const std::vector<double> mu = c.row_marginal();
  const std::vector<double> nu = c.col_marginal();
  double ex = 0.0, ey = 0.0, exx = 0.0, eyy = 0.0, exy = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    ex += mu[i] * row_values[i];
    exx += mu[i] * row_values[i] * row_values[i];
  }
  for (std::size_t j = 0; j < nu.size(); ++j) {
    ey += nu[j] * col_values[j];
    eyy += nu[j] * col_values[j] * col_values[j];
  }
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      exy += c.gamma(i, j) * row_values[i] * col_values[j];

  CorrelationCoefficient out;
  out.covariance = exy - ex * ey;
  const double sx = std::sqrt(std::max(exx - ex * ex, 0.0));
  const double sy = std::sqrt(std::max(eyy - ey * ey, 0.0));
  if (sx <= kPointMeasureStd || sy <= kPointMeasureStd) {
    out.defined = false;  // point-measure marginal: coefficient undefined
    return out;
  }
  out.defined = true;
  out.value = out.covariance / (sx * sy);
  return out;
}

// ---- couplings from joint states -------------------------------------------

Coupling coupling_from_joint_state(const State& joint, std::size_t dim_a, std::size_t dim_b,
                                   const Effect& e, const Effect& f, const Tolerances& tol) {
  check_joint_dims(joint, dim_a, dim_b, "coupling_from_joint_state");
  if (e.dim() != dim_a || f.dim() != dim_b)
    throw DimensionError("coupling_from_joint_state: effect dimensions do not match factors");
  const ComplexMatrix ia = ComplexMatrix::identity(dim_a);
  const ComplexMatrix ib = ComplexMatrix::identity(dim_b);
  const ComplexMatrix e0 = ia - e.op(), f0 = ib - f.op();
  std::vector<std::vector<double>> gamma(2, std::vector<double>(2, 0.0));
  gamma[0][0] = joint_probability(joint, dim_a, dim_b, e0, f0);
  gamma[0][1] = joint_probability(joint, dim_a, dim_b, e0, f.op());
  gamma[1][0] = joint_probability(joint, dim_a, dim_b, e.op(), f0);
  gamma[1][1] = joint_probability(joint, dim_a, dim_b, e.op(), f.op());
  return Coupling({"0", "1"}, {"0", "1"}, std::move(gamma), tol);
}

Coupling coupling_from_observables(const State& joint, std::size_t dim_a, std::size_t dim_b,
                                   const DiscreteObservable& obs_a, const ReadingScale& scale_a,
                                   const DiscreteObservable& obs_b, const ReadingScale& scale_b,
                                   const Tolerances& tol) {
  check_joint_dims(joint, dim_a, dim_b, "coupling_from_observables");
  const DiscreteObservable ca = coarse_grain(obs_a, scale_a, tol);
  const DiscreteObservable cb = coarse_grain(obs_b, scale_b, tol);
  if (ca.dim() != dim_a || cb.dim() != dim_b)
    throw DimensionError("coupling_from_observables: observable dimensions do not match factors");
  std::vector<std::vector<double>> gamma(ca.n_outcomes(),
                                         std::vector<double>(cb.n_outcomes(), 0.0));
  for (std::size_t i = 0; i < ca.n_outcomes(); ++i)
    for (std::size_t j = 0; j < cb.n_outcomes(); ++j)
      gamma[i][j] = joint_probability(joint, dim_a, dim_b, ca.effect(i).op(), cb.effect(j).op());
  return Coupling(ca.outcomes(), cb.outcomes(), std::move(gamma), tol);
}

// ---- strong correlation -----------------------------------------------------

bool strongly_correlated_effects(const State& joint, std::size_t dim_a, std::size_t dim_b,
                                 const Effect& e, const Effect& f, const Tolerances& tol) {
  check_joint_dims(joint, dim_a, dim_b, "strongly_correlated_effects");
  if (e.dim() != dim_a || f.dim() != dim_b)
    throw DimensionError("strongly_correlated_effects: effect dimensions do not match factors");
  const ComplexMatrix rho_a = partial_trace(joint.density(), dim_a, dim_b, Subsystem::B);
  const ComplexMatrix rho_b = partial_trace(joint.density(), dim_a, dim_b, Subsystem::A);
  const double pa = clip_probability((rho_a * e.op()).trace().real(), "marginal probability");
  const double pb = clip_probability((rho_b * f.op()).trace().real(), "marginal probability");
  const double pj = joint_probability(joint, dim_a, dim_b, e.op(), f.op());
  return std::abs(pa - pb) <= tol.eq_tol && std::abs(pa - pj) <= tol.eq_tol &&
         std::abs(pb - pj) <= tol.eq_tol;
}

namespace {

bool assign_rows(const std::vector<std::vector<bool>>& ok, std::size_t row,
                 std::vector<bool>& used, std::vector<std::size_t>& pick) {
  if (row == ok.size()) return true;
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (used[j] || !ok[row][j]) continue;
    used[j] = true;
    pick[row] = j;
    if (assign_rows(ok, row + 1, used, pick)) return true;
    used[j] = false;
  }
  return false;
}

}  // namespace

std::optional<std::vector<std::size_t>> strongly_correlated_observables(
    const State& joint, std::size_t dim_a, std::size_t dim_b,
    const DiscreteObservable& obs_a, const ReadingScale& scale_a,
    const DiscreteObservable& obs_b, const ReadingScale& scale_b, const Tolerances& tol) {
  check_joint_dims(joint, dim_a, dim_b, "strongly_correlated_observables");
  const DiscreteObservable ca = coarse_grain(obs_a, scale_a, tol);
  const DiscreteObservable cb = coarse_grain(obs_b, scale_b, tol);
  if (ca.n_outcomes() > cb.n_outcomes()) return std::nullopt;  // no injective assignment

  std::vector<std::vector<bool>> ok(ca.n_outcomes(), std::vector<bool>(cb.n_outcomes(), false));
  for (std::size_t i = 0; i < ca.n_outcomes(); ++i)
    for (std::size_t j = 0; j < cb.n_outcomes(); ++j)
      ok[i][j] = strongly_correlated_effects(joint, dim_a, dim_b, ca.effect(i), cb.effect(j), tol);

  // Depth-first over rows with columns tried ascending: returns the
  // lexicographically first complete assignment, exhaustively.
  std::vector<bool> used(cb.n_outcomes(), false);
  std::vector<std::size_t> pick(ca.n_outcomes(), 0);
  if (!assign_rows(ok, 0, used, pick)) return std::nullopt;
  return pick;
}

// ---- Schmidt decomposition ---------------------------------------------------

SchmidtDecomposition schmidt(const CVector& v, std::size_t dim_a, std::size_t dim_b,
                             const Tolerances& tol) {
  if (std::abs(vec_norm(v) - 1.0) > tol.eq_tol)
    throw NormError("schmidt: vector is not normalized within eq_tol");
  const BipartiteSvd svd = svd_bipartite(v, dim_a, dim_b, tol);

  SchmidtDecomposition sd;
  sd.dim_a = dim_a;
  sd.dim_b = dim_b;
  sd.vector = v;

  // Group consecutive singular values (they arrive descending) whenever the
  // gap is below degeneracy_tol relative to the larger value.
  std::size_t k = 0;
  while (k < svd.values.size()) {
    std::size_t end = k + 1;
    while (end < svd.values.size() &&
           svd.values[end - 1] - svd.values[end] <=
               tol.degeneracy_tol * std::max(svd.values[end - 1], svd.values[end])) {
      ++end;
    }
    SchmidtGroup g;
    g.multiplicity = end - k;
    double mean = 0.0;
    for (std::size_t m = k; m < end; ++m) mean += svd.values[m];
    g.lambda = mean / static_cast<double>(g.multiplicity);
    g.left_projection = ComplexMatrix(dim_a, dim_a);
    g.right_projection = ComplexMatrix(dim_b, dim_b);
    for (std::size_t m = k; m < end; ++m) {
      const CVector xi = svd.left.column(m);
      // The decomposition pairs v with conj(right): v = sum s xi (x) eta,
      // eta = conj(w).
      CVector eta = svd.right.column(m);
      for (Complex& z : eta) z = std::conj(z);
      g.left_vectors.push_back(xi);
      g.right_vectors.push_back(eta);
      g.left_projection = g.left_projection + ComplexMatrix::outer(xi, xi);
      g.right_projection = g.right_projection + ComplexMatrix::outer(eta, eta);
    }
    g.left_projection = hermitian_part(g.left_projection);
    g.right_projection = hermitian_part(g.right_projection);
    sd.groups.push_back(std::move(g));
    k = end;
  }
  return sd;
}

std::vector<std::pair<Effect, Effect>> correlated_projection_pairs(
    const SchmidtDecomposition& sd, const std::map<std::size_t, ComplexMatrix>& refinements,
    const Tolerances& tol) {
  for (const auto& [index, u] : refinements) {
    if (index >= sd.groups.size())
      throw SubspaceError("correlated_projection_pairs: refinement for group " +
                          std::to_string(index) + " of " + std::to_string(sd.groups.size()));
    const std::size_t n = sd.groups[index].multiplicity;
    if (u.rows() != n || u.cols() != n)
      throw SubspaceError("correlated_projection_pairs: refinement shape does not match group "
                          "multiplicity " + std::to_string(n));
    if (!approx_equal(u.adjoint() * u, ComplexMatrix::identity(n), tol.eq_tol))
      throw SubspaceError("correlated_projection_pairs: refinement is not unitary");
  }

  const State joint = State::pure(sd.vector, tol);
  std::vector<std::pair<Effect, Effect>> pairs;
  auto emit = [&](const ComplexMatrix& a, const ComplexMatrix& b) {
    Effect ea(a, tol), eb(b, tol);
    if (!strongly_correlated_effects(joint, sd.dim_a, sd.dim_b, ea, eb, tol))
      throw InternalError("correlated_projection_pairs: emitted pair is not strongly correlated");
    pairs.emplace_back(std::move(ea), std::move(eb));
  };

  for (std::size_t i = 0; i < sd.groups.size(); ++i) {
    const SchmidtGroup& g = sd.groups[i];
    emit(g.left_projection, g.right_projection);
    const auto it = refinements.find(i);
    if (it == refinements.end()) continue;
    const ComplexMatrix& u = it->second;
    // Rotate inside the group: xi'_m = sum_n u(n,m) xi_n and the conjugate
    // rotation on the eta side keeps each Schmidt term invariant.
    for (std::size_t m = 0; m < g.multiplicity; ++m) {
      CVector xi(sd.dim_a, Complex(0.0, 0.0));
      CVector eta(sd.dim_b, Complex(0.0, 0.0));
      for (std::size_t n = 0; n < g.multiplicity; ++n) {
        for (std::size_t r = 0; r < sd.dim_a; ++r) xi[r] += u(n, m) * g.left_vectors[n][r];
        for (std::size_t r = 0; r < sd.dim_b; ++r)
          eta[r] += std::conj(u(n, m)) * g.right_vectors[n][r];
      }
      emit(ComplexMatrix::outer(xi, xi), ComplexMatrix::outer(eta, eta));
    }
  }
  return pairs;
}

}  // namespace qmt
