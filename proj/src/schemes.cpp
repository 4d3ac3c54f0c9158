#include "qmt/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qmt {

namespace {

// Residual norm below which a candidate vector is considered dependent
// during unitary completion.
constexpr double kCompletionCutoff = 1e-8;

ComplexMatrix embed_anc(std::size_t sys_dim, const ComplexMatrix& b) {
  return kron(ComplexMatrix::identity(sys_dim), b);
}

// (1 (x) <z|) U (1 (x) |phi>): the sys_dim x sys_dim block of U between
// ancilla vectors phi (in) and z (out).
ComplexMatrix sandwich_block(const ComplexMatrix& u, const CVector& z, const CVector& phi,
                             std::size_t sys_dim, std::size_t anc_dim) {
  ComplexMatrix block(sys_dim, sys_dim);
  for (std::size_t i = 0; i < sys_dim; ++i) {
    for (std::size_t a = 0; a < anc_dim; ++a) {
      const Complex za = std::conj(z[a]);
      if (za == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < sys_dim; ++j) {
        Complex s = 0.0;
        for (std::size_t b = 0; b < anc_dim; ++b)
          s += u(i * anc_dim + a, j * anc_dim + b) * phi[b];
        block(i, j) += za * s;
      }
    }
  }
  return block;
}

}  // namespace

// ---- MeasurementScheme ------------------------------------------------------

MeasurementScheme::MeasurementScheme(std::size_t sys_dim, std::size_t anc_dim,
                                     ComplexMatrix unitary, State ready,
                                     DiscreteObservable pointer, const Tolerances& tol)
    : sys_dim_(sys_dim),
      anc_dim_(anc_dim),
      unitary_(std::move(unitary)),
      ready_(std::move(ready)),
      pointer_(std::move(pointer)) {
  if (sys_dim_ == 0 || anc_dim_ == 0)
    throw DimensionError("scheme: zero-dimensional factor");
  const std::size_t d = sys_dim_ * anc_dim_;
  if (unitary_.rows() != d || unitary_.cols() != d)
    throw DimensionError("scheme: unitary must act on the " + std::to_string(d) +
                         "-dimensional composite space");
  unitary_.ensure_finite("scheme unitary");
  if (!approx_equal(unitary_.adjoint() * unitary_, ComplexMatrix::identity(d), tol.eq_tol))
    throw UnitarityError("scheme: coupling matrix is not unitary within eq_tol");
  if (ready_.dim() != anc_dim_)
    throw DimensionError("scheme: ready state dimension " + std::to_string(ready_.dim()) +
                         " does not match ancilla dimension " + std::to_string(anc_dim_));
  if (pointer_.dim() != anc_dim_)
    throw DimensionError("scheme: pointer dimension " + std::to_string(pointer_.dim()) +
                         " does not match ancilla dimension " + std::to_string(anc_dim_));
}

ComplexMatrix MeasurementScheme::post_interaction(const State& rho) const {
  if (rho.dim() != sys_dim_)
    throw DimensionError("scheme: input state dimension " + std::to_string(rho.dim()) +
                         " does not match system dimension " + std::to_string(sys_dim_));
  return hermitian_part(unitary_ * kron(rho.density(), ready_.density()) * unitary_.adjoint());
}

// ---- Instrument -------------------------------------------------------------

Instrument::Instrument(std::size_t sys_dim, std::vector<std::string> outcomes,
                       std::vector<std::vector<ComplexMatrix>> kraus_sets, const Tolerances& tol)
    : sys_dim_(sys_dim), outcomes_(std::move(outcomes)), kraus_sets_(std::move(kraus_sets)) {
  if (outcomes_.empty() || outcomes_.size() != kraus_sets_.size())
    throw DimensionError("instrument: need one Kraus set per outcome");
  ComplexMatrix total(sys_dim_, sys_dim_);
  for (const auto& set : kraus_sets_) {
    for (const ComplexMatrix& a : set) {
      if (a.rows() != sys_dim_ || a.cols() != sys_dim_)
        throw DimensionError("instrument: Kraus operator shape mismatch");
      a.ensure_finite("instrument Kraus operator");
      total = total + a.adjoint() * a;
    }
  }
  if (!approx_equal(total, ComplexMatrix::identity(sys_dim_), tol.eq_tol))
    throw CompletenessError("instrument: Kraus operators do not satisfy the completeness relation");
}

std::size_t Instrument::index_of(const std::string& outcome) const {
  for (std::size_t i = 0; i < outcomes_.size(); ++i)
    if (outcomes_[i] == outcome) return i;
  throw LabelError("instrument: unknown outcome label '" + outcome + "'");
}

ComplexMatrix Instrument::apply(std::size_t outcome, const ComplexMatrix& rho) const {
  ComplexMatrix out(sys_dim_, sys_dim_);
  for (const ComplexMatrix& a : kraus_sets_[outcome]) out = out + a * rho * a.adjoint();
  return out;
}

ComplexMatrix Instrument::apply_event(const std::vector<std::string>& outcomes,
                                      const ComplexMatrix& rho) const {
  ComplexMatrix out(sys_dim_, sys_dim_);
  for (const std::string& w : outcomes) out = out + apply(index_of(w), rho);
  return out;
}

ComplexMatrix Instrument::apply_total(const ComplexMatrix& rho) const {
  ComplexMatrix out(sys_dim_, sys_dim_);
  for (std::size_t i = 0; i < outcomes_.size(); ++i) out = out + apply(i, rho);
  return out;
}

ComplexMatrix Instrument::dual_apply(std::size_t outcome, const ComplexMatrix& effect_op) const {
  ComplexMatrix out(sys_dim_, sys_dim_);
  for (const ComplexMatrix& a : kraus_sets_[outcome]) out = out + a.adjoint() * effect_op * a;
  return out;
}

ComplexMatrix Instrument::dual_apply_event(const std::vector<std::string>& outcomes,
                                           const ComplexMatrix& effect_op) const {
  ComplexMatrix out(sys_dim_, sys_dim_);
  for (const std::string& w : outcomes) out = out + dual_apply(index_of(w), effect_op);
  return out;
}

ComplexMatrix Instrument::dual_apply_total(const ComplexMatrix& effect_op) const {
  ComplexMatrix out(sys_dim_, sys_dim_);
  for (std::size_t i = 0; i < outcomes_.size(); ++i) out = out + dual_apply(i, effect_op);
  return out;
}

// ---- BiObservable -------------------------------------------------------------

BiObservable::BiObservable(std::size_t dim, std::vector<std::string> row_bins,
                           std::vector<std::string> col_bins,
                           std::vector<std::vector<Effect>> effects, const Tolerances& tol)
    : dim_(dim), row_bins_(std::move(row_bins)), col_bins_(std::move(col_bins)),
      effects_(std::move(effects)) {
  if (row_bins_.empty() || col_bins_.empty())
    throw DimensionError("biobservable: empty outcome sets");
  if (effects_.size() != row_bins_.size())
    throw DimensionError("biobservable: row count mismatch");
  ComplexMatrix total(dim_, dim_);
  for (const auto& row : effects_) {
    if (row.size() != col_bins_.size())
      throw DimensionError("biobservable: column count mismatch");
    for (const Effect& e : row) {
      if (e.dim() != dim_) throw DimensionError("biobservable: effect dimension mismatch");
      total = total + e.op();
    }
  }
  if (!approx_equal(total, ComplexMatrix::identity(dim_), tol.eq_tol))
    throw CompletenessError("biobservable: effects do not sum to the identity");
}

DiscreteObservable BiObservable::row_marginal(const Tolerances& tol) const {
  std::vector<Effect> effects;
  for (std::size_t i = 0; i < row_bins_.size(); ++i) {
    ComplexMatrix sum(dim_, dim_);
    for (std::size_t j = 0; j < col_bins_.size(); ++j) sum = sum + effects_[i][j].op();
    effects.emplace_back(hermitian_part(sum), tol);
  }
  return DiscreteObservable(row_bins_, std::move(effects), tol);
}

DiscreteObservable BiObservable::col_marginal(const Tolerances& tol) const {
  std::vector<Effect> effects;
  for (std::size_t j = 0; j < col_bins_.size(); ++j) {
    ComplexMatrix sum(dim_, dim_);
    for (std::size_t i = 0; i < row_bins_.size(); ++i) sum = sum + effects_[i][j].op();
    effects.emplace_back(hermitian_part(sum), tol);
  }
  return DiscreteObservable(col_bins_, std::move(effects), tol);
}

// ---- induced observable --------------------------------------------------------

DiscreteObservable induced_observable(const MeasurementScheme& m, const Tolerances& tol) {
  const std::size_t d = m.sys_dim(), n = m.anc_dim();
  const ComplexMatrix& u = m.unitary();
  const ComplexMatrix ready_embedded = embed_anc(d, m.ready().density());

  std::vector<Effect> effects;
  std::vector<ComplexMatrix> ops;
  for (std::size_t w = 0; w < m.pointer().n_outcomes(); ++w) {
    const ComplexMatrix z_embedded = embed_anc(d, m.pointer().effect(w).op());
    const ComplexMatrix op =
        hermitian_part(partial_trace(u.adjoint() * z_embedded * u * ready_embedded,
                                     d, n, Subsystem::B));
    ops.push_back(op);
    effects.emplace_back(op, tol);
  }
  DiscreteObservable induced(m.pointer().outcomes(), std::move(effects), tol);

  // Post-hoc check of tr(rho E_w) = tr[U(rho (x) ready)U^dagger (1 (x) Z_w)]
  // on the matrix-unit basis; both sides are linear in rho, so equality on
  // the basis is equality everywhere.
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < d; ++l) {
      ComplexMatrix unit(d, d);
      unit(k, l) = 1.0;
      const ComplexMatrix moved =
          u * kron(unit, m.ready().density()) * u.adjoint();
      for (std::size_t w = 0; w < m.pointer().n_outcomes(); ++w) {
        const Complex direct = (moved * embed_anc(d, m.pointer().effect(w).op())).trace();
        const Complex closed = (unit * ops[w]).trace();
        if (std::abs(direct - closed) > tol.eq_tol)
          throw InternalError("induced_observable: closed form disagrees with the dilation");
      }
    }
  }
  return induced;
}

// ---- conditional states ----------------------------------------------------------

std::pair<ComplexMatrix, ComplexMatrix> unnormalized_conditional_pair(
    const MeasurementScheme& m, const State& rho, const std::vector<std::string>& bin,
    const Tolerances& tol) {
  const ComplexMatrix z = m.pointer().bin_effect(bin, tol).op();
  const ComplexMatrix q = embed_anc(m.sys_dim(), z);
  const ComplexMatrix sandwiched = hermitian_part(q * m.post_interaction(rho) * q);
  return {partial_trace(sandwiched, m.sys_dim(), m.anc_dim(), Subsystem::B),
          partial_trace(sandwiched, m.sys_dim(), m.anc_dim(), Subsystem::A)};
}

namespace {

State normalize_conditional(const ComplexMatrix& unnormalized, const Tolerances& tol,
                            const char* what) {
  const double p = unnormalized.trace().real();
  if (p <= tol.eq_tol)
    throw NullEventError(std::string(what) + ": conditioning on an event of probability " +
                         std::to_string(p));
  return State(unnormalized * Complex(1.0 / p, 0.0), tol);
}

}  // namespace

State conditional_state(const MeasurementScheme& m, const State& rho,
                        const std::vector<std::string>& bin, const Tolerances& tol) {
  return normalize_conditional(unnormalized_conditional_pair(m, rho, bin, tol).first, tol,
                               "conditional_state");
}

State apparatus_conditional_state(const MeasurementScheme& m, const State& rho,
                                  const std::vector<std::string>& bin, const Tolerances& tol) {
  return normalize_conditional(unnormalized_conditional_pair(m, rho, bin, tol).second, tol,
                               "apparatus_conditional_state");
}

std::pair<State, State> final_states(const MeasurementScheme& m, const State& rho,
                                     const Tolerances& tol) {
  const ComplexMatrix joint = m.post_interaction(rho);
  return {State(partial_trace(joint, m.sys_dim(), m.anc_dim(), Subsystem::B), tol),
          State(partial_trace(joint, m.sys_dim(), m.anc_dim(), Subsystem::A), tol)};
}

// ---- instrument ---------------------------------------------------------------------

Instrument instrument_of(const MeasurementScheme& m, const ReadingScale& scale,
                         const Tolerances& tol) {
  scale.validate_against(m.pointer());
  const std::size_t d = m.sys_dim(), n = m.anc_dim();

  // Spectral pieces of the ready state (weights > psd_tol survive).
  const Eigh ready = eigh(m.ready().density(), tol);
  std::vector<std::pair<double, CVector>> ready_parts;
  for (std::size_t i = 0; i < ready.values.size(); ++i)
    if (ready.values[i] > tol.psd_tol)
      ready_parts.emplace_back(ready.values[i], ready.vectors.column(i));

  std::vector<std::string> outcomes;
  std::vector<std::vector<ComplexMatrix>> kraus_sets;
  for (const Bin& bin : scale.bins()) {
    outcomes.push_back(bin.label);
    const Eigh zs = eigh(m.pointer().bin_effect(bin.members, tol).op(), tol);
    std::vector<ComplexMatrix> set;
    for (std::size_t k = 0; k < zs.values.size(); ++k) {
      if (zs.values[k] <= tol.psd_tol) continue;
      for (const auto& [weight, phi] : ready_parts) {
        const double scalefac = std::sqrt(zs.values[k] * weight);
        set.push_back(sandwich_block(m.unitary(), zs.vectors.column(k), phi, d, n) *
                      Complex(scalefac, 0.0));
      }
    }
    kraus_sets.push_back(std::move(set));
  }
  return Instrument(d, std::move(outcomes), std::move(kraus_sets), tol);
}

// ---- dilation constructions ----------------------------------------------------------

namespace {

// Shared dilation builder: blocks[i] must satisfy sum_i blocks[i]^dagger
// blocks[i] = 1.  The isometry phi (x) e_0 |-> sum_i (blocks[i] phi) (x) e_i
// occupies the columns with ancilla index 0; the remaining columns are
// filled by Gram-Schmidt over canonical basis vectors in index order, which
// makes the completion deterministic.
MeasurementScheme dilation_scheme(const DiscreteObservable& obs,
                                  const std::vector<ComplexMatrix>& blocks,
                                  const Tolerances& tol) {
  const std::size_t d = obs.dim(), n = obs.n_outcomes(), dn = d * n;
  ComplexMatrix u(dn, dn);

  std::vector<CVector> accepted;
  for (std::size_t j = 0; j < d; ++j) {
    CVector col(dn, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < d; ++r) col[r * n + i] = blocks[i](r, j);
    accepted.push_back(std::move(col));
  }

  std::vector<CVector> completion;
  for (std::size_t k = 0; k < dn && accepted.size() + completion.size() < dn; ++k) {
    CVector v(dn, Complex(0.0, 0.0));
    v[k] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const CVector& w : accepted) {
        const Complex c = inner(w, v);
        for (std::size_t r = 0; r < dn; ++r) v[r] -= c * w[r];
      }
      for (const CVector& w : completion) {
        const Complex c = inner(w, v);
        for (std::size_t r = 0; r < dn; ++r) v[r] -= c * w[r];
      }
    }
    const double nv = vec_norm(v);
    if (nv <= kCompletionCutoff) continue;
    completion.push_back(scale_vec(v, Complex(1.0 / nv, 0.0)));
  }
  if (accepted.size() + completion.size() != dn)
    throw InternalError("dilation: unitary completion failed to span the composite space");

  std::size_t next = 0;
  for (std::size_t c = 0; c < dn; ++c) {
    const std::size_t anc_index = c % n;
    const std::size_t sys_index = c / n;
    if (anc_index == 0) {
      u.set_column(c, accepted[sys_index]);
    } else {
      u.set_column(c, completion[next++]);
    }
  }

  CVector e0(n, Complex(0.0, 0.0));
  e0[0] = 1.0;
  std::vector<Effect> pointer_effects;
  for (std::size_t i = 0; i < n; ++i) {
    ComplexMatrix p(n, n);
    p(i, i) = 1.0;
    pointer_effects.emplace_back(std::move(p), tol);
  }
  DiscreteObservable pointer(obs.outcomes(), std::move(pointer_effects), tol);
  return MeasurementScheme(d, n, std::move(u), State::pure(e0, tol), std::move(pointer), tol);
}

}  // namespace

MeasurementScheme build_lueders_scheme(const DiscreteObservable& obs, const Tolerances& tol) {
  if (!obs.is_sharp(tol))
    throw SharpnessError("lueders dilation: observable is not projection valued");
  std::vector<ComplexMatrix> blocks;
  for (std::size_t i = 0; i < obs.n_outcomes(); ++i) blocks.push_back(obs.effect(i).op());
  return dilation_scheme(obs, blocks, tol);
}

MeasurementScheme build_naimark_scheme(const DiscreteObservable& povm, const Tolerances& tol) {
  std::vector<ComplexMatrix> blocks;
  for (std::size_t i = 0; i < povm.n_outcomes(); ++i)
    blocks.push_back(psd_sqrt(povm.effect(i).op(), tol));
  return dilation_scheme(povm, blocks, tol);
}

// ---- scheme predicates ------------------------------------------------------------------

bool is_first_kind(const MeasurementScheme& m, const ReadingScale& scale, const Tolerances& tol) {
  const DiscreteObservable coarse = coarse_grain(induced_observable(m, tol), scale, tol);
  const Instrument inst = instrument_of(m, scale, tol);
  for (std::size_t i = 0; i < coarse.n_outcomes(); ++i) {
    const ComplexMatrix moved = inst.dual_apply_total(coarse.effect(i).op());
    if (op_distance(moved, coarse.effect(i).op(), tol) > tol.eq_tol) return false;
  }
  return true;
}

bool is_repeatable(const MeasurementScheme& m, const ReadingScale& scale, const Tolerances& tol) {
  const DiscreteObservable coarse = coarse_grain(induced_observable(m, tol), scale, tol);
  const Instrument inst = instrument_of(m, scale, tol);
  for (std::size_t i = 0; i < coarse.n_outcomes(); ++i) {
    const ComplexMatrix moved = inst.dual_apply(i, coarse.effect(i).op());
    if (op_distance(moved, coarse.effect(i).op(), tol) > tol.eq_tol) return false;
  }
  return true;
}

bool is_nondegenerate(const MeasurementScheme& m, const Tolerances& tol) {
  const std::size_t d = m.sys_dim();
  const Instrument inst = instrument_of(m, ReadingScale::singletons(m.pointer()), tol);

  // Matrix of the dual total channel on operator space (vec convention:
  // column index k*d+l is the matrix unit E_kl).
  ComplexMatrix superop(d * d, d * d);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < d; ++l) {
      ComplexMatrix unit(d, d);
      unit(k, l) = 1.0;
      const ComplexMatrix image = inst.dual_apply_total(unit);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          superop(i * d + j, k * d + l) = image(i, j);
    }
  }
  const Eigh gram = eigh(hermitian_part(superop.adjoint() * superop), tol);
  const double top = std::max(gram.values.front(), 0.0);
  std::size_t rank = 0;
  for (double lam : gram.values)
    if (lam > top * tol.eq_tol * tol.eq_tol) ++rank;
  return rank == d * d;
}

bool is_d_ideal(const MeasurementScheme& m, const ReadingScale& scale, const Tolerances& tol) {
  const DiscreteObservable coarse = coarse_grain(induced_observable(m, tol), scale, tol);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < coarse.n_outcomes(); ++i) {
    const Eigh e = eigh(coarse.effect(i).op(), tol);
    std::vector<CVector> top;
    for (std::size_t k = 0; k < e.values.size(); ++k)
      if (std::abs(e.values[k] - 1.0) <= tol.eq_tol) top.push_back(e.vectors.column(k));
    if (top.empty()) continue;  // empty eigenspace: nothing to preserve

    std::vector<CVector> probes = top;
    for (std::size_t a = 0; a < top.size(); ++a) {
      for (std::size_t b = a + 1; b < top.size(); ++b) {
        CVector re(top[a].size()), im(top[a].size());
        for (std::size_t r = 0; r < re.size(); ++r) {
          re[r] = inv_sqrt2 * (top[a][r] + top[b][r]);
          im[r] = inv_sqrt2 * (top[a][r] + Complex(0.0, 1.0) * top[b][r]);
        }
        probes.push_back(std::move(re));
        probes.push_back(std::move(im));
      }
    }
    const std::vector<std::string>& members = scale.bin(i).members;
    for (const CVector& probe : probes) {
      const State rho = State::pure(probe, tol);
      const State after = conditional_state(m, rho, members, tol);
      if (op_distance(after.density(), rho.density(), tol) > tol.eq_tol) return false;
    }
  }
  return true;
}

// ---- mixture decomposition ----------------------------------------------------------------

MixtureCheck mixture_decomposition_check(const MeasurementScheme& m, const State& rho,
                                         const ReadingScale& scale, const Tolerances& tol) {
  const DiscreteObservable coarse = coarse_grain(induced_observable(m, tol), scale, tol);
  const auto [rho_f, sigma_f] = final_states(m, rho, tol);

  const std::size_t d = m.sys_dim(), n = m.anc_dim();
  ComplexMatrix sys_mix(d, d), anc_mix(n, n);
  std::vector<ComplexMatrix> components;
  for (std::size_t i = 0; i < scale.n_bins(); ++i) {
    const auto [usys, uanc] = unnormalized_conditional_pair(m, rho, scale.bin(i).members, tol);
    const double p = usys.trace().real();
    if (p <= tol.eq_tol) continue;  // null outcome contributes nothing
    sys_mix = sys_mix + usys;
    anc_mix = anc_mix + uanc;
    components.push_back(usys * Complex(1.0 / p, 0.0));
  }

  MixtureCheck out;
  out.system_residual = op_distance(rho_f.density(), sys_mix, tol);
  out.apparatus_residual = op_distance(sigma_f.density(), anc_mix, tol);
  out.system_mixture_holds = out.system_residual <= tol.eq_tol;
  out.apparatus_mixture_holds = out.apparatus_residual <= tol.eq_tol;
  out.max_overlap = 0.0;
  const ComplexMatrix zero(d, d);
  for (std::size_t i = 0; i < components.size(); ++i)
    for (std::size_t j = i + 1; j < components.size(); ++j)
      out.max_overlap =
          std::max(out.max_overlap, op_distance(components[i] * components[j], zero, tol));
  out.components_orthogonal = out.max_overlap <= tol.eq_tol;
  return out;
}

// ---- sequential composition ----------------------------------------------------------------

BiObservable sequential_biobservable(const MeasurementScheme& first,
                                     const ReadingScale& first_scale,
                                     const MeasurementScheme& second,
                                     const ReadingScale& second_scale, const Tolerances& tol) {
  if (first.sys_dim() != second.sys_dim())
    throw DimensionError("sequential_biobservable: schemes act on different system dimensions");
  const Instrument inst1 = instrument_of(first, first_scale, tol);
  const DiscreteObservable e2 =
      coarse_grain(induced_observable(second, tol), second_scale, tol);

  std::vector<std::string> rows, cols;
  for (const Bin& b : first_scale.bins()) rows.push_back(b.label);
  for (const Bin& b : second_scale.bins()) cols.push_back(b.label);

  std::vector<std::vector<Effect>> effects;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<Effect> row;
    for (std::size_t j = 0; j < cols.size(); ++j)
      row.emplace_back(hermitian_part(inst1.dual_apply(i, e2.effect(j).op())), tol);
    effects.push_back(std::move(row));
  }
  return BiObservable(first.sys_dim(), std::move(rows), std::move(cols), std::move(effects), tol);
}

}  // namespace qmt
