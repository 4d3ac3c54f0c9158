#include "qmt/qstructs.hpp"

#include <cmath>
#include <set>
#include <string>

namespace qmt {

namespace {

// Excursions beyond this are treated as logic defects rather than roundoff.
constexpr double kProbabilitySlack = 1e-7;

}  // namespace

// ---- State ---------------------------------------------------------------

State::State(ComplexMatrix rho, const Tolerances& tol) : rho_(std::move(rho)) {
  if (!rho_.is_square() || rho_.rows() == 0)
    throw DimensionError("state: density matrix must be square and non-empty");
  rho_.ensure_finite("state");
  if (!is_hermitian(rho_, tol.eq_tol))
    throw HermiticityError("state: density matrix is not Hermitian within eq_tol");
  const Eigh e = eigh(rho_, tol);
  for (double lam : e.values) {
    if (lam < -tol.psd_tol)
      throw PositivityError("state: eigenvalue " + std::to_string(lam) + " below -psd_tol");
  }
  const Complex tr = rho_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol.eq_tol)
    throw TraceError("state: trace deviates from 1 beyond eq_tol");
}

State State::pure(const CVector& v, const Tolerances& tol) {
  const double n = vec_norm(v);
  if (n <= tol.eq_tol) throw NormError("pure state: zero vector");
  CVector u = scale_vec(v, Complex(1.0 / n, 0.0));
  return State(ComplexMatrix::outer(u, u), tol);
}

State State::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw DimensionError("maximally mixed state: dimension 0");
  ComplexMatrix m = ComplexMatrix::identity(dim) * Complex(1.0 / static_cast<double>(dim), 0.0);
  return State(std::move(m));
}

bool State::is_pure(const Tolerances& tol) const {
  const Complex purity = (rho_ * rho_).trace();
  return std::abs(purity - Complex(1.0, 0.0)) <= tol.eq_tol;
}

CVector State::pure_vector(const Tolerances& tol) const {
  const Eigh e = eigh(rho_, tol);
  if (std::abs(e.values.front() - 1.0) > tol.eq_tol)
    throw ValidationError("pure_vector: state is not pure (top eigenvalue " +
                          std::to_string(e.values.front()) + ")");
  return e.vectors.column(0);
}

// ---- Effect ----------------------------------------------------------------

Effect::Effect(ComplexMatrix op, const Tolerances& tol) : op_(std::move(op)) {
  if (!op_.is_square() || op_.rows() == 0)
    throw DimensionError("effect: operator must be square and non-empty");
  op_.ensure_finite("effect");
  if (!is_hermitian(op_, tol.eq_tol))
    throw HermiticityError("effect: operator is not Hermitian within eq_tol");
  const Eigh e = eigh(op_, tol);
  for (double lam : e.values) {
    if (lam < -tol.psd_tol)
      throw PositivityError("effect: eigenvalue " + std::to_string(lam) + " below -psd_tol");
    if (lam > 1.0 + tol.psd_tol)
      throw EffectBoundError("effect: eigenvalue " + std::to_string(lam) + " above 1 + psd_tol");
  }
}

bool Effect::is_projection(const Tolerances& tol) const {
  return approx_equal(op_ * op_, op_, tol.eq_tol);
}

// ---- DiscreteObservable ----------------------------------------------------

DiscreteObservable::DiscreteObservable(std::vector<std::string> outcomes,
                                       std::vector<Effect> effects, const Tolerances& tol)
    : outcomes_(std::move(outcomes)), effects_(std::move(effects)) {
  if (outcomes_.empty() || outcomes_.size() != effects_.size())
    throw DimensionError("observable: need one effect per outcome label");
  std::set<std::string> seen;
  for (const std::string& w : outcomes_) {
    if (!seen.insert(w).second)
      throw LabelError("observable: duplicate outcome label '" + w + "'");
  }
  const std::size_t d = effects_.front().dim();
  ComplexMatrix sum(d, d);
  for (const Effect& e : effects_) {
    if (e.dim() != d) throw DimensionError("observable: effects act on different spaces");
    sum = sum + e.op();
  }
  if (!approx_equal(sum, ComplexMatrix::identity(d), tol.eq_tol))
    throw CompletenessError("observable: effects do not sum to the identity within eq_tol");
}

const Effect& DiscreteObservable::effect_of(const std::string& outcome) const {
  return effects_[index_of(outcome)];
}

std::size_t DiscreteObservable::index_of(const std::string& outcome) const {
  for (std::size_t i = 0; i < outcomes_.size(); ++i)
    if (outcomes_[i] == outcome) return i;
  throw LabelError("observable: unknown outcome label '" + outcome + "'");
}

Effect DiscreteObservable::bin_effect(const std::vector<std::string>& outcomes,
                                      const Tolerances& tol) const {
  if (outcomes.empty()) throw LabelError("bin effect: empty outcome set");
  std::set<std::string> seen;
  ComplexMatrix sum(dim(), dim());
  for (const std::string& w : outcomes) {
    if (!seen.insert(w).second) throw LabelError("bin effect: repeated outcome label '" + w + "'");
    sum = sum + effect_of(w).op();
  }
  return Effect(hermitian_part(sum), tol);
}

bool DiscreteObservable::is_sharp(const Tolerances& tol) const {
  for (std::size_t i = 0; i < effects_.size(); ++i) {
    if (!effects_[i].is_projection(tol)) return false;
    for (std::size_t j = i + 1; j < effects_.size(); ++j) {
      const ComplexMatrix prod = effects_[i].op() * effects_[j].op();
      if (prod.max_abs() > tol.eq_tol) return false;
    }
  }
  return true;
}

// ---- ReadingScale ------------------------------------------------------------

ReadingScale::ReadingScale(std::vector<Bin> bins) : bins_(std::move(bins)) {
  if (bins_.empty()) throw ScaleError("reading scale: no bins");
  std::set<std::string> labels;
  std::set<std::string> members;
  for (const Bin& b : bins_) {
    if (b.members.empty()) throw ScaleError("reading scale: bin '" + b.label + "' is empty");
    if (!labels.insert(b.label).second)
      throw ScaleError("reading scale: duplicate bin label '" + b.label + "'");
    for (const std::string& m : b.members) {
      if (!members.insert(m).second)
        throw ScaleError("reading scale: outcome '" + m + "' appears in two bins");
    }
  }
}

ReadingScale ReadingScale::singletons(const DiscreteObservable& obs) {
  std::vector<Bin> bins;
  bins.reserve(obs.n_outcomes());
  for (const std::string& w : obs.outcomes()) bins.push_back(Bin{w, {w}});
  return ReadingScale(std::move(bins));
}

std::size_t ReadingScale::index_of(const std::string& bin_label) const {
  for (std::size_t i = 0; i < bins_.size(); ++i)
    if (bins_[i].label == bin_label) return i;
  throw LabelError("reading scale: unknown bin label '" + bin_label + "'");
}

void ReadingScale::validate_against(const DiscreteObservable& obs) const {
  std::set<std::string> covered;
  for (const Bin& b : bins_) {
    for (const std::string& m : b.members) {
      obs.index_of(m);  // throws LabelError if the outcome does not exist
      covered.insert(m);
    }
  }
  if (covered.size() != obs.n_outcomes())
    throw ScaleError("reading scale: bins do not exhaust the outcome set");
}

// ---- probability ----------------------------------------------------------

double clip_probability(double value, const char* what) {
  constexpr double lo = -kProbabilitySlack, hi = 1.0 + kProbabilitySlack;
  if (!(value >= lo && value <= hi))
    throw InternalError(std::string(what) + ": probability " + std::to_string(value) +
                        " outside [0,1] beyond slack");
  if (value < 0.0) return 0.0;
  if (value > 1.0) return 1.0;
  return value;
}

double probability(const DiscreteObservable& obs, const State& rho,
                   const std::vector<std::string>& bin, const Tolerances& tol) {
  if (obs.dim() != rho.dim())
    throw DimensionError("probability: observable dimension " + std::to_string(obs.dim()) +
                         " vs state dimension " + std::to_string(rho.dim()));
  const Effect e = obs.bin_effect(bin, tol);
  const Complex t = (rho.density() * e.op()).trace();
  if (std::abs(t.imag()) > kProbabilitySlack)
    throw InternalError("probability: trace has imaginary part beyond slack");
  return clip_probability(t.real(), "probability");
}

DiscreteObservable coarse_grain(const DiscreteObservable& obs, const ReadingScale& scale,
                                const Tolerances& tol) {
  scale.validate_against(obs);
  std::vector<std::string> outcomes;
  std::vector<Effect> effects;
  for (const Bin& b : scale.bins()) {
    outcomes.push_back(b.label);
    effects.push_back(obs.bin_effect(b.members, tol));
  }
  return DiscreteObservable(std::move(outcomes), std::move(effects), tol);
}

bool is_objective(const Effect& e, const State& rho, const Tolerances& tol) {
  if (e.dim() != rho.dim())
    throw DimensionError("is_objective: effect dimension " + std::to_string(e.dim()) +
                         " vs state dimension " + std::to_string(rho.dim()));
  const double p = (rho.density() * e.op()).trace().real();
  return std::abs(p) <= tol.eq_tol || std::abs(p - 1.0) <= tol.eq_tol;
}

}  // namespace qmt
