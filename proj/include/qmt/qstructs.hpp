#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qmt/linalg.hpp"

namespace qmt {

// Density operator.  Validated at construction: Hermitian within eq_tol,
// eigenvalues >= -psd_tol (values in [-psd_tol, 0) are accepted as zero),
// trace 1 within eq_tol.  Immutable afterwards.
class State {
 public:
  explicit State(ComplexMatrix rho, const Tolerances& tol = default_tolerances());

  // Projection onto v / |v|.  Throws NormError on a zero vector.
  static State pure(const CVector& v, const Tolerances& tol = default_tolerances());
  static State maximally_mixed(std::size_t dim);

  std::size_t dim() const { return rho_.rows(); }
  const ComplexMatrix& density() const { return rho_; }

  // tr(rho^2) = 1 within eq_tol.
  bool is_pure(const Tolerances& tol = default_tolerances()) const;
  // Unit eigenvector of a pure state (top eigenvalue 1 within eq_tol; throws
  // ValidationError for mixed states).  Phase-fixed, so deterministic.
  CVector pure_vector(const Tolerances& tol = default_tolerances()) const;

 private:
  ComplexMatrix rho_;
};

// Effect: Hermitian with spectrum inside [0, 1] (slack psd_tol on both ends).
class Effect {
 public:
  explicit Effect(ComplexMatrix op, const Tolerances& tol = default_tolerances());

  std::size_t dim() const { return op_.rows(); }
  const ComplexMatrix& op() const { return op_; }

  // E^2 = E within eq_tol.
  bool is_projection(const Tolerances& tol = default_tolerances()) const;

 private:
  ComplexMatrix op_;
};

// Discrete observable: finitely many outcomes, identified by opaque string
// labels, one effect per outcome, effects summing to the identity.
class DiscreteObservable {
 public:
  DiscreteObservable(std::vector<std::string> outcomes, std::vector<Effect> effects,
                     const Tolerances& tol = default_tolerances());

  std::size_t dim() const { return effects_.front().dim(); }
  std::size_t n_outcomes() const { return outcomes_.size(); }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const Effect& effect(std::size_t i) const { return effects_[i]; }
  const Effect& effect_of(const std::string& outcome) const;
  std::size_t index_of(const std::string& outcome) const;  // LabelError if unknown

  // Sum of the effects named in `outcomes`; throws LabelError on an unknown
  // or repeated label.
  Effect bin_effect(const std::vector<std::string>& outcomes,
                    const Tolerances& tol = default_tolerances()) const;

  // Every effect is a projection and distinct effects are orthogonal.
  bool is_sharp(const Tolerances& tol = default_tolerances()) const;

 private:
  std::vector<std::string> outcomes_;
  std::vector<Effect> effects_;
};

// Reading scale: an ordered partition of an observable's outcome set into
// labeled bins.  Construction checks only local sanity (non-empty bins, no
// duplicate members); validate_against checks the partition property with
// respect to a concrete observable.
struct Bin {
  std::string label;
  std::vector<std::string> members;
};

class ReadingScale {
 public:
  explicit ReadingScale(std::vector<Bin> bins);

  // One singleton bin per outcome, bin label = outcome label.
  static ReadingScale singletons(const DiscreteObservable& obs);

  std::size_t n_bins() const { return bins_.size(); }
  const Bin& bin(std::size_t i) const { return bins_[i]; }
  const std::vector<Bin>& bins() const { return bins_; }
  std::size_t index_of(const std::string& bin_label) const;  // LabelError

  // Bins must partition the outcome set of `obs` exactly; throws ScaleError.
  void validate_against(const DiscreteObservable& obs) const;

 private:
  std::vector<Bin> bins_;
};

// Outcome probability tr(rho E_bin).  The imaginary part and any excursion
// outside [0,1] beyond 1e-7 raise InternalError (an excursion that large is
// a logic defect, not roundoff); smaller excursions are clipped to [0,1].
double probability(const DiscreteObservable& obs, const State& rho,
                   const std::vector<std::string>& bin,
                   const Tolerances& tol = default_tolerances());

// Same clipping policy for a raw trace value; shared by every probability
// computation in the toolkit.
double clip_probability(double value, const char* what);

// New observable with one outcome per bin of the scale.
DiscreteObservable coarse_grain(const DiscreteObservable& obs, const ReadingScale& scale,
                                const Tolerances& tol = default_tolerances());

// tr(rho E) is 0 or 1 within eq_tol: the effect has a definite value in rho.
bool is_objective(const Effect& e, const State& rho,
                  const Tolerances& tol = default_tolerances());

}  // namespace qmt
