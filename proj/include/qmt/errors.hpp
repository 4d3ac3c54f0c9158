#pragma once

#include <stdexcept>
#include <string>

namespace qmt {

// Base class for every error raised by the toolkit.  All validation and
// runtime failures carry a human-readable message naming the offending
// quantity (and its dimensions / labels where that helps).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch: wrong matrix/vector dimensions, non-square where square is
// required, factor dimensions that do not divide a composite dimension.
class DimensionError : public Error { public: using Error::Error; };

// Matrix expected to be Hermitian deviates from its adjoint beyond tolerance.
class HermiticityError : public Error { public: using Error::Error; };

// Operator has an eigenvalue below the accepted negative slack.
class PositivityError : public Error { public: using Error::Error; };

// Effect has an eigenvalue above 1 beyond the accepted slack.
class EffectBoundError : public Error { public: using Error::Error; };

// Density operator trace differs from 1 beyond tolerance.
class TraceError : public Error { public: using Error::Error; };

// Effects of an observable do not sum to the identity, or an instrument's
// Kraus operators do not satisfy the completeness relation.
class CompletenessError : public Error { public: using Error::Error; };

// Unknown or duplicated outcome label.
class LabelError : public Error { public: using Error::Error; };

// Reading scale is not a partition of the outcome set of the observable it
// is applied to, or two scales expected to agree do not.
class ScaleError : public Error { public: using Error::Error; };

// Observable required to be projection valued is not.
class SharpnessError : public Error { public: using Error::Error; };

// Matrix expected to be unitary is not.
class UnitarityError : public Error { public: using Error::Error; };

// Conditioning on an event of (numerically) zero probability.
class NullEventError : public Error { public: using Error::Error; };

// Sampling from an all-zero weight vector.
class DegenerateDistributionError : public Error { public: using Error::Error; };

// Ledger lookup for a system/perspective pair that has no state.
class UnknownPerspectiveError : public Error { public: using Error::Error; };

// Vector expected to be normalized is not.
class NormError : public Error { public: using Error::Error; };

// Subspace basis is not orthonormal, or a refinement does not fit inside the
// subspace it is supposed to refine.
class SubspaceError : public Error { public: using Error::Error; };

// Pair of projections expected to be nested (a below b) is not.
class OrderError : public Error { public: using Error::Error; };

// Scenario text is not syntactically valid; message carries the position.
class ParseError : public Error { public: using Error::Error; };

// Scenario is syntactically valid but semantically inconsistent (undefined
// names, wrong dimensions, missing seed, ...).
class ValidationError : public Error { public: using Error::Error; };

// A mathematical identity that must hold for any valid input failed beyond
// tolerance.  Distinguishes implementation defects from bad input.
class InternalError : public Error { public: using Error::Error; };

}  // namespace qmt
