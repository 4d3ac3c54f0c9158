#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qmt/errors.hpp"
#include "qmt/linalg.hpp"
#include "qmt/qstructs.hpp"
#include "qmt/report.hpp"
#include "qmt/rqm.hpp"
#include "qmt/schemes.hpp"

namespace qmt {

// Scenario files are JSON documents.  Complex entries are two-element
// arrays [re, im] (a bare number is accepted as a real entry); matrices are
// row-major nested arrays.  Directive fields reference earlier definitions
// by name; an empty scale name means the singleton scale of the scheme's
// pointer.

struct InteractDirective {
  std::string scheme;
  std::string scale;  // optional
  std::string target;
  std::string observer;
  std::string state;
  std::vector<std::pair<std::string, std::string>> report_states;  // (system, perspective)
};

struct SequentialDirective {
  struct Stage {
    std::string scheme;
    std::string scale;  // optional
    std::string observer;
  };
  std::vector<Stage> stages;
  std::string target;
  std::string state;
};

struct JointSpectrumDirective {
  std::string scheme;
  std::string scale;  // optional
  std::string state;
};

struct CplDirective {
  std::string scheme;
  std::string scale;      // optional
  std::string state;
  std::string bob;        // optional second scheme
  std::string semantics;  // optional override: "local" | "global"
};

struct CorrelateDirective {
  std::string state;  // joint state on dim_a * dim_b
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  std::string first;         // observable on factor A
  std::string second;        // observable on factor B
  std::string first_scale;   // optional
  std::string second_scale;  // optional
};

struct SchmidtDirective {
  std::string state;  // must be pure
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  bool emit_pairs = false;
};

struct LatticeDirective {
  std::size_t dim = 0;
  std::size_t nested_pairs = 0;
  bool witness = false;
  std::size_t chain_dim = 0;  // 0 = skip the chain demo
};

struct Directive {
  std::string op;
  std::variant<InteractDirective, SequentialDirective, JointSpectrumDirective, CplDirective,
               CorrelateDirective, SchmidtDirective, LatticeDirective>
      body;
};

struct Scenario {
  std::string version;
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::string semantics_name = "local";  // "local" | "global"
  CollapseSemantics semantics = CollapseSemantics::local();

  std::vector<std::pair<std::string, std::size_t>> spaces;
  std::vector<std::pair<std::string, State>> states;
  std::vector<std::pair<std::string, ComplexMatrix>> unitaries;
  std::vector<std::pair<std::string, DiscreteObservable>> observables;
  std::vector<std::pair<std::string, ReadingScale>> scales;
  std::vector<std::pair<std::string, std::string>> scale_observables;  // scale -> observable
  std::vector<std::pair<std::string, MeasurementScheme>> schemes;
  std::vector<Directive> program;
};

// Parses and fully validates scenario text.  Malformed JSON raises
// ParseError (with the position reported by the parser); a well-formed
// document with bad contents raises ValidationError naming the offending
// field, or the specific structural error (UnitarityError etc.) prefixed
// with the entity name.
Scenario parse_scenario(const std::string& text, const Tolerances& tol = default_tolerances());

// Reads the file (ValidationError when unreadable) and parses it.
Scenario load_scenario(const std::string& path, const Tolerances& tol = default_tolerances());

// Serializes a scenario back to JSON text that parses to an equivalent
// scenario (constructor shorthands are expanded to literals).
std::string serialize_scenario(const Scenario& s);

// Executes the program against one ledger and one generator and returns the
// report document.  Errors raised by a directive are rethrown as the base
// Error type tagged with the directive index and op.
report::Value run_scenario(const Scenario& s, const Tolerances& tol = default_tolerances());

// Tolerance-file support for the optional environment override: a JSON
// object with any of eq_tol, psd_tol, degeneracy_tol.
Tolerances load_tolerances_file(const std::string& path);

}  // namespace qmt
