#include "qmt/rqm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qmt {

// ---- sampling ---------------------------------------------------------------

std::size_t sample_index(std::span<const double> weights, SplitMix64& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DegenerateDistributionError("sample_index: negative weight");
    total += w;
  }
  if (!(total > 0.0))
    throw DegenerateDistributionError("sample_index: weights sum to nothing");
  double r = rng.next_unit() * total;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    r -= weights[i];
    if (r < 0.0) return i;
  }
  return last_positive;  // guard against roundoff at the top of the CDF
}

// ---- PerspectiveLedger ------------------------------------------------------

void PerspectiveLedger::set_initial_state(const std::string& system_id, const State& s) {
  for (auto& [id, state] : initial_states_) {
    if (id == system_id) {
      state = s;
      return;
    }
  }
  initial_states_.emplace_back(system_id, s);
}

bool PerspectiveLedger::has_initial_state(const std::string& system_id) const {
  for (const auto& [id, state] : initial_states_)
    if (id == system_id) return true;
  return false;
}

void PerspectiveLedger::upsert_record(const std::string& system_id,
                                      const std::string& relative_to_id, State state,
                                      const HistoryEntry& entry) {
  if (entry.probability <= 0.0 || entry.probability > 1.0)
    throw ValidationError("relational record: recorded probability must lie in (0, 1]");
  for (RelationalRecord& r : records_) {
    if (r.system_id == system_id && r.relative_to_id == relative_to_id) {
      r.state = std::move(state);
      r.history.push_back(entry);
      r.stamp = next_stamp();
      return;
    }
  }
  RelationalRecord r{system_id, relative_to_id, std::move(state), {entry}, next_stamp()};
  records_.push_back(std::move(r));
}

void PerspectiveLedger::upsert_joint(const std::string& system_a, const std::string& system_b,
                                     std::size_t dim_a, std::size_t dim_b, State state) {
  for (JointRecord& j : joints_) {
    if (j.system_a == system_a && j.system_b == system_b) {
      j.dim_a = dim_a;
      j.dim_b = dim_b;
      j.state = std::move(state);
      j.stamp = next_stamp();
      return;
    }
  }
  JointRecord j{system_a, system_b, dim_a, dim_b, std::move(state), next_stamp()};
  joints_.push_back(std::move(j));
}

State PerspectiveLedger::relative_state(const std::string& system_id,
                                        const std::string& perspective_id,
                                        const Tolerances& tol) const {
  const RelationalRecord* exact = nullptr;
  const RelationalRecord* wildcard = nullptr;
  for (const RelationalRecord& r : records_) {
    if (r.system_id != system_id) continue;
    if (r.relative_to_id == perspective_id && (!exact || r.stamp > exact->stamp)) exact = &r;
    if (r.relative_to_id == "*" && (!wildcard || r.stamp > wildcard->stamp)) wildcard = &r;
  }
  if (exact) return exact->state;
  if (wildcard) return wildcard->state;

  const JointRecord* joint = nullptr;
  for (const JointRecord& j : joints_)
    if ((j.system_a == system_id || j.system_b == system_id) && (!joint || j.stamp > joint->stamp))
      joint = &j;
  if (joint) {
    const bool first = joint->system_a == system_id;
    return State(partial_trace(joint->state.density(), joint->dim_a, joint->dim_b,
                               first ? Subsystem::B : Subsystem::A),
                 tol);
  }

  for (const auto& [id, state] : initial_states_)
    if (id == system_id) return state;
  throw UnknownPerspectiveError("relative_state: no record of '" + system_id +
                                "' relative to '" + perspective_id + "'");
}

// ---- apply_interaction ------------------------------------------------------

InteractionResult apply_interaction(PerspectiveLedger ledger, const MeasurementScheme& scheme,
                                    const ReadingScale& scale, const std::string& target_system,
                                    const std::string& observer_system, const State& rho,
                                    const CollapseSemantics& semantics, SplitMix64& rng,
                                    const Tolerances& tol) {
  const DiscreteObservable coarse = coarse_grain(induced_observable(scheme, tol), scale, tol);

  InteractionResult out;
  for (std::size_t i = 0; i < scale.n_bins(); ++i) {
    out.bins.push_back(scale.bin(i).label);
    out.distribution.push_back(probability(coarse, rho, {scale.bin(i).label}, tol));
  }
  const std::size_t k = sample_index(out.distribution, rng);
  out.outcome_bin = out.bins[k];
  out.probability = out.distribution[k];
  out.interaction_id = ledger.next_interaction_id();

  if (!ledger.has_initial_state(target_system)) ledger.set_initial_state(target_system, rho);
  if (!ledger.has_initial_state(observer_system))
    ledger.set_initial_state(observer_system, scheme.ready());

  const HistoryEntry entry{out.interaction_id, out.outcome_bin, out.probability};
  const std::vector<std::string>& members = scale.bin(k).members;
  const auto [usys, uanc] = unnormalized_conditional_pair(scheme, rho, members, tol);
  const double p = usys.trace().real();
  if (p <= tol.eq_tol)
    throw InternalError("apply_interaction: sampled an outcome of vanishing probability");
  const State sys_cond(usys * Complex(1.0 / p, 0.0), tol);
  const State anc_cond(uanc * Complex(1.0 / uanc.trace().real(), 0.0), tol);

  // Partner record: the outcome is a fact for the observer.
  ledger.upsert_record(target_system, observer_system, sys_cond, entry);

  if (semantics.mode == CollapseMode::LOCAL) {
    // Third parties keep the uncollapsed unitary image.
    ledger.upsert_joint(target_system, observer_system, scheme.sys_dim(), scheme.anc_dim(),
                        State(scheme.post_interaction(rho), tol));
    if (semantics.collapse_pointer)
      ledger.upsert_record(observer_system, target_system, anc_cond, entry);
  } else {
    // GLOBAL: the collapse is a fact for everyone; the joint held by third
    // parties is conditioned as well.
    const ComplexMatrix z = scheme.pointer().bin_effect(members, tol).op();
    const ComplexMatrix q = kron(ComplexMatrix::identity(scheme.sys_dim()), z);
    const ComplexMatrix sandwiched =
        hermitian_part(q * scheme.post_interaction(rho) * q);
    ledger.upsert_joint(target_system, observer_system, scheme.sys_dim(), scheme.anc_dim(),
                        State(sandwiched * Complex(1.0 / sandwiched.trace().real(), 0.0), tol));
    ledger.upsert_record(target_system, "*", sys_cond, entry);
    if (semantics.collapse_pointer)
      ledger.upsert_record(observer_system, "*", anc_cond, entry);
  }

  out.ledger = std::move(ledger);
  return out;
}

// ---- joint value spectrum ---------------------------------------------------

JointValueSpectrum joint_value_spectrum(const MeasurementScheme& scheme,
                                        const ReadingScale& scale, const State& rho,
                                        const Tolerances& tol) {
  const DiscreteObservable coarse = coarse_grain(induced_observable(scheme, tol), scale, tol);
  const ComplexMatrix joint = scheme.post_interaction(rho);

  JointValueSpectrum out;
  out.repeatable = is_repeatable(scheme, scale, tol);
  for (std::size_t i = 0; i < scale.n_bins(); ++i) out.bins.push_back(scale.bin(i).label);
  for (std::size_t i = 0; i < scale.n_bins(); ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < scale.n_bins(); ++j) {
      const ComplexMatrix window =
          kron(coarse.effect(i).op(), scheme.pointer().bin_effect(scale.bin(j).members, tol).op());
      const double p = clip_probability((joint * window).trace().real(), "joint value spectrum");
      row.push_back(p);
      if (i != j) out.max_off_diagonal = std::max(out.max_off_diagonal, p);
    }
    out.table.push_back(std::move(row));
  }
  return out;
}

// ---- cross-perspective match probability ------------------------------------

double cpl_match_probability(const MeasurementScheme& alice, const ReadingScale& scale,
                             const State& rho, const CollapseSemantics& semantics,
                             const MeasurementScheme* bob, const Tolerances& tol) {
  if (bob) {
    // The second observer must measure the first apparatus's pointer
    // observable on the apparatus space.
    if (bob->sys_dim() != alice.anc_dim())
      throw ScaleError("cpl_match_probability: second scheme does not act on the apparatus");
    const DiscreteObservable bob_induced = induced_observable(*bob, tol);
    const DiscreteObservable& pointer = alice.pointer();
    if (bob_induced.n_outcomes() != pointer.n_outcomes())
      throw ScaleError("cpl_match_probability: second scheme has a different outcome set");
    for (std::size_t i = 0; i < pointer.n_outcomes(); ++i) {
      if (bob_induced.outcomes()[i] != pointer.outcomes()[i])
        throw ScaleError("cpl_match_probability: second scheme relabels the pointer outcomes");
      if (op_distance(bob_induced.effect(i).op(), pointer.effect(i).op(), tol) > tol.eq_tol)
        throw ScaleError("cpl_match_probability: second scheme does not measure the pointer");
    }
  }

  const DiscreteObservable coarse = coarse_grain(induced_observable(alice, tol), scale, tol);
  double match = 0.0;
  if (semantics.mode == CollapseMode::LOCAL) {
    // The second observer holds the uncollapsed apparatus state sigma^f.
    const State sigma_f = final_states(alice, rho, tol).second;
    for (std::size_t i = 0; i < scale.n_bins(); ++i) {
      const double p = probability(coarse, rho, {scale.bin(i).label}, tol);
      const double q = clip_probability(
          (sigma_f.density() * alice.pointer().bin_effect(scale.bin(i).members, tol).op())
              .trace()
              .real(),
          "pointer distribution");
      match += p * q;
    }
  } else {
    // The second observer holds the conditional state sigma^f(X_i) when the
    // first recorded X_i.
    for (std::size_t i = 0; i < scale.n_bins(); ++i) {
      const double p = probability(coarse, rho, {scale.bin(i).label}, tol);
      if (p <= tol.eq_tol) continue;
      const State cond = apparatus_conditional_state(alice, rho, scale.bin(i).members, tol);
      const double q = clip_probability(
          (cond.density() * alice.pointer().bin_effect(scale.bin(i).members, tol).op())
              .trace()
              .real(),
          "conditional pointer distribution");
      match += p * q;
    }
  }
  return clip_probability(match, "match probability");
}

// ---- sequential run ----------------------------------------------------------

SequentialTrace sequential_perspectives_run(PerspectiveLedger ledger,
                                            const std::vector<SequentialStage>& stages,
                                            const std::string& target_system, const State& rho,
                                            const CollapseSemantics& semantics, SplitMix64& rng,
                                            const Tolerances& tol) {
  if (stages.empty()) throw ValidationError("sequential run: no stages given");
  for (const SequentialStage& s : stages)
    if (s.scheme.sys_dim() != rho.dim())
      throw DimensionError("sequential run: stage does not act on the target system");

  SequentialTrace out;
  State chain = rho;  // uncollapsed view carried between stages
  for (std::size_t n = 0; n < stages.size(); ++n) {
    const SequentialStage& stage = stages[n];
    InteractionResult step =
        apply_interaction(std::move(ledger), stage.scheme, stage.scale, target_system,
                          stage.observer_id, chain, semantics, rng, tol);
    ledger = std::move(step.ledger);

    StageTrace t;
    t.interaction_id = step.interaction_id;
    t.observer_id = stage.observer_id;
    t.bins = step.bins;
    t.sampling_distribution = step.distribution;
    t.outcome_bin = step.outcome_bin;
    t.probability = step.probability;
    if (n > 0) {
      // What the previous observer, holding its collapsed record, predicts
      // for this stage.
      const State held = ledger.relative_state(target_system, stages[n - 1].observer_id, tol);
      const DiscreteObservable coarse =
          coarse_grain(induced_observable(stage.scheme, tol), stage.scale, tol);
      for (const Bin& b : stage.scale.bins())
        t.partner_view.push_back(probability(coarse, held, {b.label}, tol));
    }
    out.stages.push_back(std::move(t));

    chain = final_states(stage.scheme, chain, tol).first;
  }

  if (stages.size() == 2) {
    const BiObservable seq = sequential_biobservable(stages[0].scheme, stages[0].scale,
                                                     stages[1].scheme, stages[1].scale, tol);
    out.has_biobservable = true;
    out.bi_rows = seq.row_bins();
    out.bi_cols = seq.col_bins();
    for (std::size_t i = 0; i < out.bi_rows.size(); ++i) {
      std::vector<double> row;
      for (std::size_t j = 0; j < out.bi_cols.size(); ++j)
        row.push_back(clip_probability((rho.density() * seq.at(i, j).op()).trace().real(),
                                       "sequential outcome table"));
      out.bi_table.push_back(std::move(row));
    }
  }

  out.ledger = std::move(ledger);
  return out;
}

}  // namespace qmt
