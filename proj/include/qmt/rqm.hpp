#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qmt/errors.hpp"
#include "qmt/linalg.hpp"
#include "qmt/qstructs.hpp"
#include "qmt/rng.hpp"
#include "qmt/schemes.hpp"

namespace qmt {

// The relational layer: states are bookkept per (system, perspective) pair.
// A measurement collapses the record held by the interaction partner; every
// third party keeps the uncollapsed unitary image until it interacts itself.

// One sampled outcome in a record's history.
struct HistoryEntry {
  std::uint64_t interaction_id = 0;
  std::string bin_label;
  double probability = 0.0;  // must lie in (0, 1]
};

// State of `system_id` as held from the perspective `relative_to_id`.
// relative_to_id == "*" means "relative to anyone" (used when a collapse is
// promoted to every perspective at once).
struct RelationalRecord {
  std::string system_id;
  std::string relative_to_id;
  State state;
  std::vector<HistoryEntry> history;
  std::uint64_t stamp = 0;  // monotone update counter, larger = newer
};

// Joint state of the pair (system_a, system_b) as held by third parties.
struct JointRecord {
  std::string system_a;
  std::string system_b;
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  State state;  // on H_a (x) H_b
  std::uint64_t stamp = 0;
};

enum class CollapseMode { LOCAL, GLOBAL };

// LOCAL: an outcome is a fact only for the interaction partner.
// GLOBAL: the partner's collapse is promoted to every perspective.
// collapse_pointer controls whether the apparatus side is collapsed too;
// it defaults off under LOCAL and on under GLOBAL.
struct CollapseSemantics {
  CollapseMode mode = CollapseMode::LOCAL;
  bool collapse_pointer = false;

  static CollapseSemantics local() { return {CollapseMode::LOCAL, false}; }
  static CollapseSemantics global() { return {CollapseMode::GLOBAL, true}; }
};

class PerspectiveLedger {
 public:
  PerspectiveLedger() = default;

  // States before any interaction.
  void set_initial_state(const std::string& system_id, const State& s);
  bool has_initial_state(const std::string& system_id) const;

  // Resolution order: exact (system, perspective) record, then a
  // (system, "*") record, then the partial trace of the newest joint record
  // containing the system, then the initial state.  Anything else is an
  // UnknownPerspectiveError.
  State relative_state(const std::string& system_id, const std::string& perspective_id,
                       const Tolerances& tol = default_tolerances()) const;

  const std::vector<RelationalRecord>& records() const { return records_; }
  const std::vector<JointRecord>& joint_records() const { return joints_; }

  // Bookkeeping used by the interaction operations.
  std::uint64_t next_interaction_id() { return ++last_interaction_id_; }
  void upsert_record(const std::string& system_id, const std::string& relative_to_id,
                     State state, const HistoryEntry& entry);
  void upsert_joint(const std::string& system_a, const std::string& system_b,
                    std::size_t dim_a, std::size_t dim_b, State state);

 private:
  std::uint64_t next_stamp() { return ++last_stamp_; }

  std::vector<std::pair<std::string, State>> initial_states_;
  std::vector<RelationalRecord> records_;
  std::vector<JointRecord> joints_;
  std::uint64_t last_stamp_ = 0;
  std::uint64_t last_interaction_id_ = 0;
};

// Result of one measurement interaction.
struct InteractionResult {
  std::uint64_t interaction_id = 0;
  std::vector<std::string> bins;     // scale order
  std::vector<double> distribution;  // sampling probabilities, same order
  std::string outcome_bin;
  double probability = 0.0;
  PerspectiveLedger ledger;  // updated copy (value semantics)
};

// Runs one measurement of `target_system` by `observer_system` with the
// given scheme and scale, on input state rho.  Samples the outcome bin from
// the induced-observable distribution with the caller's generator, then
// updates the ledger: the partner record gets the collapsed conditional
// state, third parties get the uncollapsed joint.  Under GLOBAL semantics
// the joint itself is collapsed and the pointer state is promoted to every
// perspective.
InteractionResult apply_interaction(PerspectiveLedger ledger, const MeasurementScheme& scheme,
                                    const ReadingScale& scale, const std::string& target_system,
                                    const std::string& observer_system, const State& rho,
                                    const CollapseSemantics& semantics, SplitMix64& rng,
                                    const Tolerances& tol = default_tolerances());

// Probability table p(X_i, X_j) = tr[U(rho (x) ready)U^dagger E(X_i) (x) Z(X_j)]
// over system-observable bin and pointer bin.  For repeatable schemes the
// table is diagonal with the outcome distribution on the diagonal.
struct JointValueSpectrum {
  std::vector<std::string> bins;
  std::vector<std::vector<double>> table;
  double max_off_diagonal = 0.0;
  bool repeatable = false;  // advisory: whether the diagonal law is expected
};

JointValueSpectrum joint_value_spectrum(const MeasurementScheme& scheme,
                                        const ReadingScale& scale, const State& rho,
                                        const Tolerances& tol = default_tolerances());

// Probability that a second observer, measuring the first apparatus's
// pointer observable on the apparatus, obtains the same bin the first
// observer recorded.  LOCAL semantics: the second observer holds the
// uncollapsed apparatus state, so the match probability is sum_i p_i q_i
// (= sum_i p_i^2 when probabilities are reproduced).  GLOBAL semantics: the
// second observer holds the conditional apparatus state, so the match
// probability is sum_i p_i tr(sigma^f(X_i) Z(X_i)) (= 1 for repeatable
// schemes).  A custom scheme for the second observer may be supplied; its
// induced observable must match the pointer observable (ScaleError).
double cpl_match_probability(const MeasurementScheme& alice, const ReadingScale& scale,
                             const State& rho, const CollapseSemantics& semantics,
                             const MeasurementScheme* bob = nullptr,
                             const Tolerances& tol = default_tolerances());

// One stage of a sequential run: a scheme, its reading scale, and the id of
// the observer that performs it.
struct SequentialStage {
  MeasurementScheme scheme;
  ReadingScale scale;
  std::string observer_id;
};

// Trace entry for one stage.  sampling_distribution is computed from the
// uncollapsed chain state (the view of the incoming apparatus, a third
// party to all earlier interactions); partner_view is the distribution the
// PREVIOUS observer predicts from its collapsed record (empty at the first
// stage).  The two disagree in general and both are reported.
struct StageTrace {
  std::uint64_t interaction_id = 0;
  std::string observer_id;
  std::vector<std::string> bins;
  std::vector<double> sampling_distribution;
  std::vector<double> partner_view;
  std::string outcome_bin;
  double probability = 0.0;
};

struct SequentialTrace {
  std::vector<StageTrace> stages;
  PerspectiveLedger ledger;
  // Joint two-stage outcome table tr(rho E12(i,j)), present when the run
  // has exactly two stages.
  bool has_biobservable = false;
  std::vector<std::string> bi_rows;
  std::vector<std::string> bi_cols;
  std::vector<std::vector<double>> bi_table;
};

// Runs the stages in order on `target_system`, feeding each stage the
// uncollapsed final state of the previous one; each stage's observer gets
// the collapsed partner record through apply_interaction.
SequentialTrace sequential_perspectives_run(PerspectiveLedger ledger,
                                            const std::vector<SequentialStage>& stages,
                                            const std::string& target_system, const State& rho,
                                            const CollapseSemantics& semantics, SplitMix64& rng,
                                            const Tolerances& tol = default_tolerances());

}  // namespace qmt
