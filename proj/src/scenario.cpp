#include "qmt/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "qmt/correl.hpp"
#include "qmt/lattice.hpp"
#include "qmt/version.hpp"

namespace qmt {

namespace {

using Json = nlohmann::ordered_json;

// ---- JSON access helpers ------------------------------------------------------

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const Json& obj, const char* key, const std::string& where) {
  const Json& j = require(obj, key, where);
  if (!j.is_string()) fail(where, std::string("field '") + key + "' must be a string");
  return j.get<std::string>();
}

std::string get_string_or(const Json& obj, const char* key, const std::string& fallback) {
  if (!obj.is_object()) return fallback;
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string())
    throw ValidationError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::size_t get_index(const Json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    fail(where, "expected a non-negative integer");
  if (j.is_number_unsigned() &&
      j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
    fail(where, "integer out of range");
  const std::int64_t v = j.get<std::int64_t>();
  if (v < 0) fail(where, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::size_t get_dim(const Json& j, const std::string& where) {
  const std::size_t v = get_index(j, where);
  if (v < 1) fail(where, "expected a positive integer");
  return v;
}

bool get_bool_or(const Json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.is_object()) return fallback;
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) fail(where, std::string("field '") + key + "' must be a boolean");
  return it->get<bool>();
}

Complex parse_complex(const Json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  fail(where, "complex entries are numbers or [re, im] pairs");
}

CVector parse_cvector(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of complex entries");
  CVector v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(parse_complex(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

ComplexMatrix parse_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  ComplexMatrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || row.empty()) fail(where, "matrix rows must be non-empty arrays");
    if (r == 0) {
      cols = row.size();
      m = ComplexMatrix(rows, cols);
    } else if (row.size() != cols) {
      fail(where, "matrix rows have inconsistent lengths");
    }
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = parse_complex(row[c], where + "[" + std::to_string(r) + "][" +
                                          std::to_string(c) + "]");
  }
  m.ensure_finite(where.c_str());
  return m;
}

// ---- named lookups -----------------------------------------------------------

template <typename T>
const T& lookup(const std::vector<std::pair<std::string, T>>& table, const std::string& name,
                const char* what, const std::string& where) {
  for (const auto& [key, value] : table)
    if (key == name) return value;
  throw ValidationError(where + ": unknown " + what + " '" + name + "'");
}

template <typename T>
bool has_name(const std::vector<std::pair<std::string, T>>& table, const std::string& name) {
  for (const auto& [key, value] : table)
    if (key == name) return true;
  return false;
}

std::size_t resolve_dim(const Json& j, const Scenario& sc, const std::string& where) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    return lookup(sc.spaces, name, "space", where);
  }
  return get_dim(j, where);
}

// ---- entity constructors -------------------------------------------------------

State parse_state_spec(const Json& j, const Scenario& sc, const std::string& where,
                       const Tolerances& tol) {
  if (j.is_string()) return lookup(sc.states, j.get<std::string>(), "state", where);
  if (!j.is_object()) fail(where, "state must be a name or an object");
  if (j.contains("matrix")) return State(parse_matrix(j.at("matrix"), where + ".matrix"), tol);
  if (j.contains("pure")) return State::pure(parse_cvector(j.at("pure"), where + ".pure"), tol);
  if (j.contains("maximally_mixed"))
    return State::maximally_mixed(get_dim(j.at("maximally_mixed"), where + ".maximally_mixed"));
  fail(where, "state needs one of: matrix, pure, maximally_mixed");
}

ComplexMatrix cnot_matrix() {
  ComplexMatrix u(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(2, 3) = 1.0;
  u(3, 2) = 1.0;
  return u;
}

ComplexMatrix hadamard_on_factor(std::size_t dim_a, std::size_t dim_b, std::size_t factor,
                                 const std::string& where) {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix h(2, 2);
  h(0, 0) = s;
  h(0, 1) = s;
  h(1, 0) = s;
  h(1, 1) = -s;
  if (factor == 0) {
    if (dim_a != 2) fail(where, "factor 0 must have dimension 2");
    return kron(h, ComplexMatrix::identity(dim_b));
  }
  if (factor != 1) fail(where, "factor must be 0 or 1");
  if (dim_b != 2) fail(where, "factor 1 must have dimension 2");
  return kron(ComplexMatrix::identity(dim_a), h);
}

ComplexMatrix parse_unitary_spec(const Json& j, const Scenario& sc, const std::string& where,
                                 const Tolerances& tol) {
  if (j.is_string()) return lookup(sc.unitaries, j.get<std::string>(), "unitary", where);
  if (!j.is_object()) fail(where, "unitary must be a name or an object");
  ComplexMatrix u;
  if (j.contains("matrix")) {
    u = parse_matrix(j.at("matrix"), where + ".matrix");
  } else if (j.contains("cnot")) {
    u = cnot_matrix();
  } else if (j.contains("hadamard_on_factor")) {
    const Json& spec = j.at("hadamard_on_factor");
    const Json& dims = require(spec, "dims", where + ".hadamard_on_factor");
    if (!dims.is_array() || dims.size() != 2)
      fail(where + ".hadamard_on_factor", "dims must be a two-element array");
    u = hadamard_on_factor(get_dim(dims[0], where), get_dim(dims[1], where),
                           get_index(require(spec, "factor", where + ".hadamard_on_factor"),
                                     where + ".factor"),
                           where + ".hadamard_on_factor");
  } else if (j.contains("lueders_dilation_of")) {
    const std::string obs = j.at("lueders_dilation_of").get<std::string>();
    u = build_lueders_scheme(lookup(sc.observables, obs, "observable", where), tol).unitary();
  } else if (j.contains("naimark_dilation_of")) {
    const std::string obs = j.at("naimark_dilation_of").get<std::string>();
    u = build_naimark_scheme(lookup(sc.observables, obs, "observable", where), tol).unitary();
  } else {
    fail(where,
         "unitary needs one of: matrix, cnot, hadamard_on_factor, lueders_dilation_of, "
         "naimark_dilation_of");
  }
  if (!u.is_square() ||
      !approx_equal(u.adjoint() * u, ComplexMatrix::identity(u.rows()), tol.eq_tol))
    throw UnitarityError(where + ": matrix is not unitary within eq_tol");
  return u;
}

DiscreteObservable parse_observable_spec(const Json& j, const Scenario& sc,
                                         const std::string& where, const Tolerances& tol) {
  if (j.is_string()) return lookup(sc.observables, j.get<std::string>(), "observable", where);
  if (!j.is_object()) fail(where, "observable must be a name or an object");
  const Json& outcomes = require(j, "outcomes", where);
  const Json& effects = require(j, "effects", where);
  if (!outcomes.is_array() || !effects.is_array() || outcomes.size() != effects.size())
    fail(where, "outcomes and effects must be arrays of equal length");
  std::vector<std::string> labels;
  std::vector<Effect> ops;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].is_string()) fail(where, "outcome labels must be strings");
    labels.push_back(outcomes[i].get<std::string>());
    ops.emplace_back(parse_matrix(effects[i], where + ".effects[" + std::to_string(i) + "]"),
                     tol);
  }
  return DiscreteObservable(std::move(labels), std::move(ops), tol);
}

ReadingScale parse_scale_spec(const Json& j, const std::string& where) {
  const Json& bins = require(j, "bins", where);
  if (!bins.is_array() || bins.empty()) fail(where, "bins must be a non-empty array");
  std::vector<Bin> parsed;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const std::string bin_where = where + ".bins[" + std::to_string(i) + "]";
    const Json& b = bins[i];
    Bin bin;
    bin.label = get_string(b, "label", bin_where);
    const Json& members = require(b, "members", bin_where);
    if (!members.is_array() || members.empty())
      fail(bin_where, "members must be a non-empty array of outcome labels");
    for (const Json& m : members) {
      if (!m.is_string()) fail(bin_where, "members must be strings");
      bin.members.push_back(m.get<std::string>());
    }
    parsed.push_back(std::move(bin));
  }
  return ReadingScale(std::move(parsed));
}

MeasurementScheme parse_scheme_spec(const Json& j, const Scenario& sc, const std::string& where,
                                    const Tolerances& tol) {
  if (!j.is_object()) fail(where, "scheme must be an object");
  if (j.contains("lueders_of")) {
    const std::string obs = j.at("lueders_of").get<std::string>();
    return build_lueders_scheme(lookup(sc.observables, obs, "observable", where), tol);
  }
  if (j.contains("naimark_of")) {
    const std::string obs = j.at("naimark_of").get<std::string>();
    return build_naimark_scheme(lookup(sc.observables, obs, "observable", where), tol);
  }
  const std::size_t sys_dim = resolve_dim(require(j, "system", where), sc, where + ".system");
  const std::size_t anc_dim = resolve_dim(require(j, "ancilla", where), sc, where + ".ancilla");
  ComplexMatrix u = parse_unitary_spec(require(j, "unitary", where), sc, where + ".unitary", tol);
  State ready = parse_state_spec(require(j, "ready", where), sc, where + ".ready", tol);
  DiscreteObservable pointer =
      parse_observable_spec(require(j, "pointer", where), sc, where + ".pointer", tol);
  return MeasurementScheme(sys_dim, anc_dim, std::move(u), std::move(ready), std::move(pointer),
                           tol);
}

// ---- directive parsing -----------------------------------------------------------

const ReadingScale& scale_by_name(const Scenario& sc, const std::string& name,
                                  const std::string& where) {
  return lookup(sc.scales, name, "scale", where);
}

void check_scheme_scale(const Scenario& sc, const std::string& scheme_name,
                        const std::string& scale_name, const std::string& where) {
  const MeasurementScheme& m = lookup(sc.schemes, scheme_name, "scheme", where);
  if (scale_name.empty()) return;
  const ReadingScale& scale = scale_by_name(sc, scale_name, where);
  try {
    scale.validate_against(m.pointer());
  } catch (const Error& e) {
    fail(where, std::string("scale '") + scale_name + "' does not fit scheme '" + scheme_name +
                    "': " + e.what());
  }
}

Directive parse_directive(const Json& j, const Scenario& sc, std::size_t index,
                          const Tolerances& tol) {
  const std::string where = "program[" + std::to_string(index) + "]";
  const std::string op = get_string(j, "op", where);
  Directive d;
  d.op = op;

  if (op == "interact") {
    InteractDirective body;
    body.scheme = get_string(j, "scheme", where);
    body.scale = get_string_or(j, "scale", "");
    body.target = get_string(j, "target", where);
    body.observer = get_string(j, "observer", where);
    body.state = get_string(j, "state", where);
    check_scheme_scale(sc, body.scheme, body.scale, where);
    const MeasurementScheme& m = lookup(sc.schemes, body.scheme, "scheme", where);
    if (lookup(sc.states, body.state, "state", where).dim() != m.sys_dim())
      fail(where, "state dimension does not match the scheme's system");
    if (j.contains("report_states")) {
      const Json& pairs = j.at("report_states");
      if (!pairs.is_array()) fail(where, "report_states must be an array of [system, perspective]");
      for (const Json& p : pairs) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
          fail(where, "report_states entries must be [system, perspective] string pairs");
        body.report_states.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
      }
    }
    d.body = std::move(body);
  } else if (op == "sequential") {
    SequentialDirective body;
    body.target = get_string(j, "target", where);
    body.state = get_string(j, "state", where);
    const Json& stages = require(j, "stages", where);
    if (!stages.is_array() || stages.empty()) fail(where, "stages must be a non-empty array");
    for (std::size_t s = 0; s < stages.size(); ++s) {
      const std::string stage_where = where + ".stages[" + std::to_string(s) + "]";
      SequentialDirective::Stage stage;
      stage.scheme = get_string(stages[s], "scheme", stage_where);
      stage.scale = get_string_or(stages[s], "scale", "");
      stage.observer = get_string(stages[s], "observer", stage_where);
      check_scheme_scale(sc, stage.scheme, stage.scale, stage_where);
      const MeasurementScheme& m = lookup(sc.schemes, stage.scheme, "scheme", stage_where);
      if (lookup(sc.states, body.state, "state", where).dim() != m.sys_dim())
        fail(stage_where, "stage scheme does not act on the target state's space");
      body.stages.push_back(std::move(stage));
    }
    d.body = std::move(body);
  } else if (op == "joint-spectrum") {
    JointSpectrumDirective body;
    body.scheme = get_string(j, "scheme", where);
    body.scale = get_string_or(j, "scale", "");
    body.state = get_string(j, "state", where);
    check_scheme_scale(sc, body.scheme, body.scale, where);
    const MeasurementScheme& m = lookup(sc.schemes, body.scheme, "scheme", where);
    if (lookup(sc.states, body.state, "state", where).dim() != m.sys_dim())
      fail(where, "state dimension does not match the scheme's system");
    d.body = std::move(body);
  } else if (op == "cpl-check") {
    CplDirective body;
    body.scheme = get_string(j, "scheme", where);
    body.scale = get_string_or(j, "scale", "");
    body.state = get_string(j, "state", where);
    body.bob = get_string_or(j, "bob", "");
    body.semantics = get_string_or(j, "semantics", "");
    if (!body.semantics.empty() && body.semantics != "local" && body.semantics != "global")
      fail(where, "semantics must be 'local' or 'global'");
    check_scheme_scale(sc, body.scheme, body.scale, where);
    const MeasurementScheme& m = lookup(sc.schemes, body.scheme, "scheme", where);
    if (lookup(sc.states, body.state, "state", where).dim() != m.sys_dim())
      fail(where, "state dimension does not match the scheme's system");
    if (!body.bob.empty()) lookup(sc.schemes, body.bob, "scheme", where);
    d.body = std::move(body);
  } else if (op == "correlate") {
    CorrelateDirective body;
    body.state = get_string(j, "state", where);
    const Json& dims = require(j, "dims", where);
    if (!dims.is_array() || dims.size() != 2) fail(where, "dims must be [dim_a, dim_b]");
    body.dim_a = get_dim(dims[0], where + ".dims[0]");
    body.dim_b = get_dim(dims[1], where + ".dims[1]");
    body.first = get_string(j, "first", where);
    body.second = get_string(j, "second", where);
    body.first_scale = get_string_or(j, "first_scale", "");
    body.second_scale = get_string_or(j, "second_scale", "");
    const State& joint = lookup(sc.states, body.state, "state", where);
    if (joint.dim() != body.dim_a * body.dim_b)
      fail(where, "state dimension does not equal dim_a * dim_b");
    if (lookup(sc.observables, body.first, "observable", where).dim() != body.dim_a)
      fail(where, "first observable does not act on factor A");
    if (lookup(sc.observables, body.second, "observable", where).dim() != body.dim_b)
      fail(where, "second observable does not act on factor B");
    for (const auto& [scale_name, obs_name] :
         {std::pair{body.first_scale, body.first}, std::pair{body.second_scale, body.second}}) {
      if (scale_name.empty()) continue;
      try {
        scale_by_name(sc, scale_name, where)
            .validate_against(lookup(sc.observables, obs_name, "observable", where));
      } catch (const Error& e) {
        fail(where, std::string("scale '") + scale_name + "': " + e.what());
      }
    }
    d.body = std::move(body);
  } else if (op == "schmidt") {
    SchmidtDirective body;
    body.state = get_string(j, "state", where);
    const Json& dims = require(j, "dims", where);
    if (!dims.is_array() || dims.size() != 2) fail(where, "dims must be [dim_a, dim_b]");
    body.dim_a = get_dim(dims[0], where + ".dims[0]");
    body.dim_b = get_dim(dims[1], where + ".dims[1]");
    body.emit_pairs = get_bool_or(j, "pairs", false, where);
    const State& s = lookup(sc.states, body.state, "state", where);
    if (s.dim() != body.dim_a * body.dim_b)
      fail(where, "state dimension does not equal dim_a * dim_b");
    if (!s.is_pure(tol)) fail(where, "state '" + body.state + "' is not pure");
    d.body = std::move(body);
  } else if (op == "lattice-check") {
    LatticeDirective body;
    body.dim = get_dim(require(j, "dim", where), where + ".dim");
    if (j.contains("nested_pairs"))
      body.nested_pairs = get_dim(j.at("nested_pairs"), where + ".nested_pairs");
    body.witness = get_bool_or(j, "witness", false, where);
    if (j.contains("chain")) body.chain_dim = get_dim(j.at("chain"), where + ".chain");
    if (body.witness && body.dim < 2) fail(where, "witness needs dim >= 2");
    d.body = std::move(body);
  } else {
    fail(where, "unknown op '" + op + "'");
  }
  return d;
}

bool directive_samples(const Directive& d) {
  return d.op == "interact" || d.op == "sequential" ||
         (d.op == "lattice-check" && std::get<LatticeDirective>(d.body).nested_pairs > 0);
}

}  // namespace

// ---- parsing ------------------------------------------------------------------

Scenario parse_scenario(const std::string& text, const Tolerances& tol) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("scenario: top level must be an object");

  Scenario sc;
  sc.version = get_string(doc, "version", "scenario");
  if (sc.version != kScenarioVersion)
    fail("scenario.version", std::string("unsupported version (expected '") + kScenarioVersion +
                                 "')");

  if (doc.contains("seed")) {
    sc.seed = static_cast<std::uint64_t>(get_index(doc.at("seed"), "scenario.seed"));
    sc.has_seed = true;
  }

  sc.semantics_name = get_string_or(doc, "semantics", "local");
  if (sc.semantics_name == "local") {
    sc.semantics = CollapseSemantics::local();
  } else if (sc.semantics_name == "global") {
    sc.semantics = CollapseSemantics::global();
  } else {
    fail("scenario.semantics", "must be 'local' or 'global'");
  }
  if (doc.contains("collapse_pointer"))
    sc.semantics.collapse_pointer =
        get_bool_or(doc, "collapse_pointer", sc.semantics.collapse_pointer, "scenario");

  if (doc.contains("spaces")) {
    const Json& spaces = doc.at("spaces");
    if (!spaces.is_object()) fail("scenario.spaces", "must be an object of name -> dimension");
    for (const auto& [name, dim] : spaces.items())
      sc.spaces.emplace_back(name, get_dim(dim, "spaces." + name));
  }
  if (doc.contains("states")) {
    for (const auto& [name, spec] : doc.at("states").items()) {
      try {
        sc.states.emplace_back(name, parse_state_spec(spec, sc, "states." + name, tol));
      } catch (const ValidationError&) {
        throw;
      } catch (const Error& e) {
        throw ValidationError("states." + name + ": " + e.what());
      }
    }
  }
  if (doc.contains("observables")) {
    for (const auto& [name, spec] : doc.at("observables").items()) {
      try {
        sc.observables.emplace_back(
            name, parse_observable_spec(spec, sc, "observables." + name, tol));
      } catch (const ValidationError&) {
        throw;
      } catch (const Error& e) {
        throw ValidationError("observables." + name + ": " + e.what());
      }
    }
  }
  if (doc.contains("unitaries")) {
    for (const auto& [name, spec] : doc.at("unitaries").items())
      sc.unitaries.emplace_back(name,
                                parse_unitary_spec(spec, sc, "unitaries." + name, tol));
  }
  if (doc.contains("scales")) {
    for (const auto& [name, spec] : doc.at("scales").items()) {
      const std::string where = "scales." + name;
      const std::string obs_name = get_string(spec, "observable", where);
      const DiscreteObservable& obs = lookup(sc.observables, obs_name, "observable", where);
      try {
        ReadingScale scale = parse_scale_spec(spec, where);
        scale.validate_against(obs);
        sc.scales.emplace_back(name, std::move(scale));
        sc.scale_observables.emplace_back(name, obs_name);
      } catch (const ValidationError&) {
        throw;
      } catch (const Error& e) {
        throw ValidationError(where + ": " + e.what());
      }
    }
  }
  if (doc.contains("schemes")) {
    for (const auto& [name, spec] : doc.at("schemes").items()) {
      try {
        sc.schemes.emplace_back(name, parse_scheme_spec(spec, sc, "schemes." + name, tol));
      } catch (const ValidationError&) {
        throw;
      } catch (const UnitarityError&) {
        throw;
      } catch (const Error& e) {
        throw ValidationError("schemes." + name + ": " + e.what());
      }
    }
  }

  if (doc.contains("program")) {
    const Json& program = doc.at("program");
    if (!program.is_array()) fail("scenario.program", "must be an array of directives");
    for (std::size_t i = 0; i < program.size(); ++i)
      sc.program.push_back(parse_directive(program[i], sc, i, tol));
  }

  for (const Directive& d : sc.program) {
    if (directive_samples(d) && !sc.has_seed)
      fail("scenario.seed", "a seed is required because the program samples outcomes");
  }
  return sc;
}

Scenario load_scenario(const std::string& path, const Tolerances& tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("scenario: cannot read file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), tol);
}

Tolerances load_tolerances_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("tolerances: cannot read file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Json doc;
  try {
    doc = Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("tolerances: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("tolerances: top level must be an object");
  Tolerances tol = default_tolerances();
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number() || value.get<double>() <= 0.0)
      throw ValidationError("tolerances." + key + ": must be a positive number");
    if (key == "eq_tol")
      tol.eq_tol = value.get<double>();
    else if (key == "psd_tol")
      tol.psd_tol = value.get<double>();
    else if (key == "degeneracy_tol")
      tol.degeneracy_tol = value.get<double>();
    else
      throw ValidationError("tolerances." + key + ": unknown key");
  }
  return tol;
}

// ---- serialization ----------------------------------------------------------------

namespace {

report::Value state_to_value(const State& s) {
  report::Value v = report::Value::object();
  v.set("matrix", report::matrix_value(s.density()));
  return v;
}

report::Value observable_to_value(const DiscreteObservable& obs) {
  report::Value v = report::Value::object();
  v.set("outcomes", report::string_vector_value(obs.outcomes()));
  report::Value effects = report::Value::array();
  for (std::size_t i = 0; i < obs.n_outcomes(); ++i)
    effects.push(report::matrix_value(obs.effect(i).op()));
  v.set("effects", std::move(effects));
  return v;
}

}  // namespace

std::string serialize_scenario(const Scenario& sc) {
  using report::Value;
  Value doc = Value::object();
  doc.set("version", Value::str(sc.version));
  if (sc.has_seed) doc.set("seed", Value::integer(static_cast<std::int64_t>(sc.seed)));
  doc.set("semantics", Value::str(sc.semantics_name));
  doc.set("collapse_pointer", Value::boolean(sc.semantics.collapse_pointer));

  if (!sc.spaces.empty()) {
    Value spaces = Value::object();
    for (const auto& [name, dim] : sc.spaces)
      spaces.set(name, Value::integer(static_cast<std::int64_t>(dim)));
    doc.set("spaces", std::move(spaces));
  }
  if (!sc.states.empty()) {
    Value states = Value::object();
    for (const auto& [name, s] : sc.states) states.set(name, state_to_value(s));
    doc.set("states", std::move(states));
  }
  if (!sc.observables.empty()) {
    Value observables = Value::object();
    for (const auto& [name, obs] : sc.observables)
      observables.set(name, observable_to_value(obs));
    doc.set("observables", std::move(observables));
  }
  if (!sc.unitaries.empty()) {
    Value unitaries = Value::object();
    for (const auto& [name, u] : sc.unitaries) {
      Value spec = Value::object();
      spec.set("matrix", report::matrix_value(u));
      unitaries.set(name, std::move(spec));
    }
    doc.set("unitaries", std::move(unitaries));
  }
  if (!sc.scales.empty()) {
    Value scales = Value::object();
    for (std::size_t i = 0; i < sc.scales.size(); ++i) {
      Value spec = Value::object();
      spec.set("observable", Value::str(sc.scale_observables[i].second));
      Value bins = Value::array();
      for (const Bin& b : sc.scales[i].second.bins()) {
        Value bin = Value::object();
        bin.set("label", Value::str(b.label));
        bin.set("members", report::string_vector_value(b.members));
        bins.push(std::move(bin));
      }
      spec.set("bins", std::move(bins));
      scales.set(sc.scales[i].first, std::move(spec));
    }
    doc.set("scales", std::move(scales));
  }
  if (!sc.schemes.empty()) {
    Value schemes = Value::object();
    for (const auto& [name, m] : sc.schemes) {
      Value spec = Value::object();
      spec.set("system", Value::integer(static_cast<std::int64_t>(m.sys_dim())));
      spec.set("ancilla", Value::integer(static_cast<std::int64_t>(m.anc_dim())));
      Value u = Value::object();
      u.set("matrix", report::matrix_value(m.unitary()));
      spec.set("unitary", std::move(u));
      spec.set("ready", state_to_value(m.ready()));
      spec.set("pointer", observable_to_value(m.pointer()));
      schemes.set(name, std::move(spec));
    }
    doc.set("schemes", std::move(schemes));
  }

  Value program = Value::array();
  for (const Directive& d : sc.program) {
    Value j = Value::object();
    j.set("op", Value::str(d.op));
    if (const auto* body = std::get_if<InteractDirective>(&d.body)) {
      j.set("scheme", Value::str(body->scheme));
      if (!body->scale.empty()) j.set("scale", Value::str(body->scale));
      j.set("target", Value::str(body->target));
      j.set("observer", Value::str(body->observer));
      j.set("state", Value::str(body->state));
      if (!body->report_states.empty()) {
        Value pairs = Value::array();
        for (const auto& [s, p] : body->report_states) {
          Value pair = Value::array();
          pair.push(Value::str(s));
          pair.push(Value::str(p));
          pairs.push(std::move(pair));
        }
        j.set("report_states", std::move(pairs));
      }
    } else if (const auto* body = std::get_if<SequentialDirective>(&d.body)) {
      j.set("target", Value::str(body->target));
      j.set("state", Value::str(body->state));
      Value stages = Value::array();
      for (const auto& stage : body->stages) {
        Value s = Value::object();
        s.set("scheme", Value::str(stage.scheme));
        if (!stage.scale.empty()) s.set("scale", Value::str(stage.scale));
        s.set("observer", Value::str(stage.observer));
        stages.push(std::move(s));
      }
      j.set("stages", std::move(stages));
    } else if (const auto* body = std::get_if<JointSpectrumDirective>(&d.body)) {
      j.set("scheme", Value::str(body->scheme));
      if (!body->scale.empty()) j.set("scale", Value::str(body->scale));
      j.set("state", Value::str(body->state));
    } else if (const auto* body = std::get_if<CplDirective>(&d.body)) {
      j.set("scheme", Value::str(body->scheme));
      if (!body->scale.empty()) j.set("scale", Value::str(body->scale));
      j.set("state", Value::str(body->state));
      if (!body->bob.empty()) j.set("bob", Value::str(body->bob));
      if (!body->semantics.empty()) j.set("semantics", Value::str(body->semantics));
    } else if (const auto* body = std::get_if<CorrelateDirective>(&d.body)) {
      j.set("state", Value::str(body->state));
      Value dims = Value::array();
      dims.push(Value::integer(static_cast<std::int64_t>(body->dim_a)));
      dims.push(Value::integer(static_cast<std::int64_t>(body->dim_b)));
      j.set("dims", std::move(dims));
      j.set("first", Value::str(body->first));
      j.set("second", Value::str(body->second));
      if (!body->first_scale.empty()) j.set("first_scale", Value::str(body->first_scale));
      if (!body->second_scale.empty()) j.set("second_scale", Value::str(body->second_scale));
    } else if (const auto* body = std::get_if<SchmidtDirective>(&d.body)) {
      j.set("state", Value::str(body->state));
      Value dims = Value::array();
      dims.push(Value::integer(static_cast<std::int64_t>(body->dim_a)));
      dims.push(Value::integer(static_cast<std::int64_t>(body->dim_b)));
      j.set("dims", std::move(dims));
      if (body->emit_pairs) j.set("pairs", Value::boolean(true));
    } else if (const auto* body = std::get_if<LatticeDirective>(&d.body)) {
      j.set("dim", Value::integer(static_cast<std::int64_t>(body->dim)));
      if (body->nested_pairs)
        j.set("nested_pairs", Value::integer(static_cast<std::int64_t>(body->nested_pairs)));
      if (body->witness) j.set("witness", Value::boolean(true));
      if (body->chain_dim)
        j.set("chain", Value::integer(static_cast<std::int64_t>(body->chain_dim)));
    }
    program.push(std::move(j));
  }
  doc.set("program", std::move(program));
  return report::to_json(doc);
}

// ---- execution --------------------------------------------------------------------

namespace {

using report::Value;

ReadingScale effective_scale(const Scenario& sc, const MeasurementScheme& m,
                             const std::string& scale_name, const std::string& where) {
  if (scale_name.empty()) return ReadingScale::singletons(m.pointer());
  return scale_by_name(sc, scale_name, where);
}

Value table_value(const std::vector<std::vector<double>>& t) {
  Value rows = Value::array();
  for (const auto& row : t) rows.push(report::real_vector_value(row));
  return rows;
}

// Gaussian vector from the run generator (Box-Muller).
CVector gaussian_vector(SplitMix64& rng, std::size_t dim) {
  CVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double u1 = 1.0 - rng.next_unit();  // (0, 1]
    const double u2 = rng.next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    v[i] = Complex(r * std::cos(theta), r * std::sin(theta));
  }
  return v;
}

Subspace random_subspace(SplitMix64& rng, std::size_t dim, std::size_t rank,
                         const Tolerances& tol) {
  while (true) {
    std::vector<CVector> vecs;
    for (std::size_t i = 0; i < rank; ++i) vecs.push_back(gaussian_vector(rng, dim));
    Subspace s = Subspace::span(dim, vecs, tol);
    if (s.dim() == rank) return s;  // dependent draws are measure zero; retry
  }
}

Value run_interact(const Scenario& sc, const InteractDirective& d, PerspectiveLedger& ledger,
                   SplitMix64& rng, const std::string& where, const Tolerances& tol) {
  const MeasurementScheme& m = lookup(sc.schemes, d.scheme, "scheme", where);
  const ReadingScale scale = effective_scale(sc, m, d.scale, where);
  const State& rho = lookup(sc.states, d.state, "state", where);
  InteractionResult r = apply_interaction(std::move(ledger), m, scale, d.target, d.observer,
                                          rho, sc.semantics, rng, tol);
  ledger = std::move(r.ledger);

  Value block = Value::object();
  block.set("target", Value::str(d.target));
  block.set("observer", Value::str(d.observer));
  block.set("bins", report::string_vector_value(r.bins));
  block.set("distribution", report::real_vector_value(r.distribution));
  block.set("outcome", Value::str(r.outcome_bin));
  block.set("probability", Value::real(r.probability));
  if (!d.report_states.empty()) {
    Value states = Value::array();
    for (const auto& [system, perspective] : d.report_states) {
      Value entry = Value::object();
      entry.set("system", Value::str(system));
      entry.set("perspective", Value::str(perspective));
      entry.set("state", report::matrix_value(ledger.relative_state(system, perspective, tol)
                                                  .density()));
      states.push(std::move(entry));
    }
    block.set("relative_states", std::move(states));
  }
  return block;
}

Value run_sequential(const Scenario& sc, const SequentialDirective& d, PerspectiveLedger& ledger,
                     SplitMix64& rng, const std::string& where, const Tolerances& tol) {
  std::vector<SequentialStage> stages;
  for (const auto& stage : d.stages) {
    const MeasurementScheme& m = lookup(sc.schemes, stage.scheme, "scheme", where);
    stages.push_back(
        SequentialStage{m, effective_scale(sc, m, stage.scale, where), stage.observer});
  }
  const State& rho = lookup(sc.states, d.state, "state", where);
  SequentialTrace trace = sequential_perspectives_run(std::move(ledger), stages, d.target, rho,
                                                      sc.semantics, rng, tol);
  ledger = std::move(trace.ledger);

  Value block = Value::object();
  block.set("target", Value::str(d.target));
  Value stage_blocks = Value::array();
  for (const StageTrace& st : trace.stages) {
    Value s = Value::object();
    s.set("observer", Value::str(st.observer_id));
    s.set("bins", report::string_vector_value(st.bins));
    s.set("sampling_distribution", report::real_vector_value(st.sampling_distribution));
    s.set("partner_view",
          st.partner_view.empty() ? Value() : report::real_vector_value(st.partner_view));
    s.set("outcome", Value::str(st.outcome_bin));
    s.set("probability", Value::real(st.probability));
    stage_blocks.push(std::move(s));
  }
  block.set("stages", std::move(stage_blocks));
  if (trace.has_biobservable) {
    Value joint = Value::object();
    joint.set("rows", report::string_vector_value(trace.bi_rows));
    joint.set("cols", report::string_vector_value(trace.bi_cols));
    joint.set("table", table_value(trace.bi_table));
    block.set("joint_table", std::move(joint));
  } else {
    block.set("joint_table", Value());
  }
  return block;
}

Value run_joint_spectrum(const Scenario& sc, const JointSpectrumDirective& d,
                         const std::string& where, const Tolerances& tol) {
  const MeasurementScheme& m = lookup(sc.schemes, d.scheme, "scheme", where);
  const JointValueSpectrum spectrum = joint_value_spectrum(
      m, effective_scale(sc, m, d.scale, where),
      lookup(sc.states, d.state, "state", where), tol);
  Value block = Value::object();
  block.set("bins", report::string_vector_value(spectrum.bins));
  block.set("table", table_value(spectrum.table));
  block.set("max_off_diagonal", Value::real(spectrum.max_off_diagonal));
  block.set("repeatable", Value::boolean(spectrum.repeatable));
  return block;
}

Value run_cpl(const Scenario& sc, const CplDirective& d, const std::string& where,
              const Tolerances& tol) {
  const MeasurementScheme& m = lookup(sc.schemes, d.scheme, "scheme", where);
  CollapseSemantics semantics = sc.semantics;
  std::string semantics_name = sc.semantics_name;
  if (!d.semantics.empty()) {
    semantics_name = d.semantics;
    semantics =
        d.semantics == "local" ? CollapseSemantics::local() : CollapseSemantics::global();
  }
  const MeasurementScheme* bob = nullptr;
  if (!d.bob.empty()) bob = &lookup(sc.schemes, d.bob, "scheme", where);
  const double match =
      cpl_match_probability(m, effective_scale(sc, m, d.scale, where),
                            lookup(sc.states, d.state, "state", where), semantics, bob, tol);
  Value block = Value::object();
  block.set("semantics", Value::str(semantics_name));
  block.set("match_probability", Value::real(match));
  return block;
}

Value run_correlate(const Scenario& sc, const CorrelateDirective& d, const std::string& where,
                    const Tolerances& tol) {
  const State& joint = lookup(sc.states, d.state, "state", where);
  const DiscreteObservable& first = lookup(sc.observables, d.first, "observable", where);
  const DiscreteObservable& second = lookup(sc.observables, d.second, "observable", where);
  const ReadingScale scale_a = d.first_scale.empty() ? ReadingScale::singletons(first)
                                                     : scale_by_name(sc, d.first_scale, where);
  const ReadingScale scale_b = d.second_scale.empty()
                                   ? ReadingScale::singletons(second)
                                   : scale_by_name(sc, d.second_scale, where);

  const Coupling coupling =
      coupling_from_observables(joint, d.dim_a, d.dim_b, first, scale_a, second, scale_b, tol);
  std::vector<std::vector<double>> gamma;
  for (std::size_t i = 0; i < coupling.row_outcomes().size(); ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < coupling.col_outcomes().size(); ++j)
      row.push_back(coupling.gamma(i, j));
    gamma.push_back(std::move(row));
  }

  Value block = Value::object();
  block.set("rows", report::string_vector_value(coupling.row_outcomes()));
  block.set("cols", report::string_vector_value(coupling.col_outcomes()));
  block.set("gamma", table_value(gamma));
  block.set("row_marginal", report::real_vector_value(coupling.row_marginal()));
  block.set("col_marginal", report::real_vector_value(coupling.col_marginal()));

  const auto pairing =
      strongly_correlated_observables(joint, d.dim_a, d.dim_b, first, scale_a, second, scale_b,
                                      tol);
  if (pairing) {
    Value cols = Value::array();
    for (std::size_t c : *pairing) cols.push(Value::integer(static_cast<std::int64_t>(c)));
    block.set("pairing", std::move(cols));
  } else {
    block.set("pairing", Value());
  }

  // Correlation coefficient when every bin label parses as a number.
  const auto parse_labels = [](const std::vector<std::string>& labels,
                               std::vector<double>& out) {
    for (const std::string& label : labels) {
      char* end = nullptr;
      const double v = std::strtod(label.c_str(), &end);
      if (end == label.c_str() || *end != '\0') return false;
      out.push_back(v);
    }
    return true;
  };
  std::vector<double> row_values, col_values;
  const bool numeric = parse_labels(coupling.row_outcomes(), row_values) &&
                       parse_labels(coupling.col_outcomes(), col_values);
  if (numeric) {
    const CorrelationCoefficient cc = correlation_coefficient(coupling, row_values, col_values);
    Value coeff = Value::object();
    coeff.set("defined", Value::boolean(cc.defined));
    coeff.set("value", Value::real(cc.value));
    coeff.set("covariance", Value::real(cc.covariance));
    block.set("coefficient", std::move(coeff));
  } else {
    block.set("coefficient", Value());
  }
  return block;
}

Value run_schmidt(const Scenario& sc, const SchmidtDirective& d, const std::string& where,
                  const Tolerances& tol) {
  const State& s = lookup(sc.states, d.state, "state", where);
  const CVector v = s.pure_vector(tol);
  const SchmidtDecomposition sd = schmidt(v, d.dim_a, d.dim_b, tol);

  Value block = Value::object();
  Value dims = Value::array();
  dims.push(Value::integer(static_cast<std::int64_t>(d.dim_a)));
  dims.push(Value::integer(static_cast<std::int64_t>(d.dim_b)));
  block.set("dims", std::move(dims));

  double sum_sq = 0.0;
  Value groups = Value::array();
  for (const SchmidtGroup& g : sd.groups) {
    Value gv = Value::object();
    gv.set("lambda", Value::real(g.lambda));
    gv.set("multiplicity", Value::integer(static_cast<std::int64_t>(g.multiplicity)));
    groups.push(std::move(gv));
    sum_sq += g.lambda * g.lambda * static_cast<double>(g.multiplicity);
  }
  block.set("groups", std::move(groups));
  block.set("sum_of_squares", Value::real(sum_sq));

  // Residuals of the defining identities.
  CVector rebuilt(v.size(), Complex(0.0, 0.0));
  ComplexMatrix left_mix(d.dim_a, d.dim_a), right_mix(d.dim_b, d.dim_b);
  for (const SchmidtGroup& g : sd.groups) {
    for (std::size_t m = 0; m < g.multiplicity; ++m) {
      const CVector prod = kron_vec(g.left_vectors[m], g.right_vectors[m]);
      for (std::size_t i = 0; i < rebuilt.size(); ++i)
        rebuilt[i] += Complex(g.lambda, 0.0) * prod[i];
    }
    left_mix = left_mix + g.left_projection * Complex(g.lambda * g.lambda, 0.0);
    right_mix = right_mix + g.right_projection * Complex(g.lambda * g.lambda, 0.0);
  }
  double rec = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) rec += std::norm(v[i] - rebuilt[i]);
  block.set("reconstruction_residual", Value::real(std::sqrt(rec)));
  const ComplexMatrix density = ComplexMatrix::outer(v, v);
  block.set("left_marginal_residual",
            Value::real(op_distance(partial_trace(density, d.dim_a, d.dim_b, Subsystem::B),
                                    left_mix, tol)));
  block.set("right_marginal_residual",
            Value::real(op_distance(partial_trace(density, d.dim_a, d.dim_b, Subsystem::A),
                                    right_mix, tol)));

  if (d.emit_pairs) {
    const auto pairs = correlated_projection_pairs(sd, {}, tol);
    Value pv = Value::array();
    for (const auto& [left, right] : pairs) {
      Value pair = Value::object();
      pair.set("left", report::matrix_value(left.op()));
      pair.set("right", report::matrix_value(right.op()));
      pv.push(std::move(pair));
    }
    block.set("group_pairs", std::move(pv));
  }
  return block;
}

Value run_lattice(const LatticeDirective& d, SplitMix64& rng, const Tolerances& tol) {
  Value block = Value::object();
  block.set("dim", Value::integer(static_cast<std::int64_t>(d.dim)));

  if (d.nested_pairs > 0) {
    std::vector<std::pair<Subspace, Subspace>> pairs;
    bool monotone = true;
    for (std::size_t i = 0; i < d.nested_pairs; ++i) {
      const std::size_t ra = rng.next_u64() % d.dim;  // rank 0..dim-1
      const std::size_t extra = 1 + rng.next_u64() % (d.dim - ra);
      const Subspace a = ra == 0 ? Subspace::zero(d.dim) : random_subspace(rng, d.dim, ra, tol);
      const Subspace b = join(a, random_subspace(rng, d.dim, extra, tol), tol);
      if (!is_relevant(a, b, tol)) monotone = false;
      pairs.emplace_back(a, b);
    }
    const LawCheck law = check_orthomodularity(pairs, 1e-8, tol);
    Value lv = Value::object();
    lv.set("pairs_checked", Value::integer(static_cast<std::int64_t>(law.pairs_checked)));
    lv.set("holds", Value::boolean(law.holds));
    lv.set("max_residual", Value::real(law.max_residual));
    lv.set("relevance_monotone", Value::boolean(monotone));
    block.set("orthomodularity", std::move(lv));
  } else {
    block.set("orthomodularity", Value());
  }

  if (d.witness) {
    const BooleanFailureWitness w = boolean_failure_witness(d.dim, tol);
    Value wv = Value::object();
    wv.set("disjoint_holds", Value::boolean(w.disjoint_holds));
    wv.set("non_orthogonal_holds", Value::boolean(w.non_orthogonal_holds));
    wv.set("incompatible_holds", Value::boolean(w.incompatible_holds));
    wv.set("double_relevance_holds", Value::boolean(w.double_relevance_holds));
    block.set("witness", std::move(wv));
  } else {
    block.set("witness", Value());
  }

  if (d.chain_dim > 0) {
    const ChainDemo chain = nested_relevant_chain(d.chain_dim, tol);
    Value cv = Value::object();
    cv.set("length", Value::integer(static_cast<std::int64_t>(chain.chain.size())));
    cv.set("orthomodular", Value::boolean(chain.orthomodular));
    cv.set("relevance_monotone", Value::boolean(chain.relevance_monotone));
    cv.set("max_residual", Value::real(chain.max_residual));
    cv.set("note", Value::str(chain.note));
    block.set("chain", std::move(cv));
  } else {
    block.set("chain", Value());
  }
  return block;
}

}  // namespace

report::Value run_scenario(const Scenario& sc, const Tolerances& tol) {
  using report::Value;
  Value root = Value::object();
  root.set("tool", Value::str(kToolName));
  root.set("tool_version", Value::str(kToolVersion));
  root.set("rng", Value::str(SplitMix64::algorithm()));
  root.set("seed",
           sc.has_seed ? Value::integer(static_cast<std::int64_t>(sc.seed)) : Value());
  root.set("semantics", Value::str(sc.semantics_name));
  root.set("collapse_pointer", Value::boolean(sc.semantics.collapse_pointer));
  Value tols = Value::object();
  tols.set("eq_tol", Value::real(tol.eq_tol));
  tols.set("psd_tol", Value::real(tol.psd_tol));
  tols.set("degeneracy_tol", Value::real(tol.degeneracy_tol));
  root.set("tolerances", std::move(tols));

  SplitMix64 rng(sc.has_seed ? sc.seed : 0);
  PerspectiveLedger ledger;

  Value results = Value::array();
  for (std::size_t i = 0; i < sc.program.size(); ++i) {
    const Directive& d = sc.program[i];
    const std::string where = "program[" + std::to_string(i) + "]";
    try {
      Value block = Value::object();
      block.set("directive", Value::integer(static_cast<std::int64_t>(i)));
      block.set("op", Value::str(d.op));
      Value payload = Value::object();
      if (const auto* body = std::get_if<InteractDirective>(&d.body)) {
        payload = run_interact(sc, *body, ledger, rng, where, tol);
      } else if (const auto* body = std::get_if<SequentialDirective>(&d.body)) {
        payload = run_sequential(sc, *body, ledger, rng, where, tol);
      } else if (const auto* body = std::get_if<JointSpectrumDirective>(&d.body)) {
        payload = run_joint_spectrum(sc, *body, where, tol);
      } else if (const auto* body = std::get_if<CplDirective>(&d.body)) {
        payload = run_cpl(sc, *body, where, tol);
      } else if (const auto* body = std::get_if<CorrelateDirective>(&d.body)) {
        payload = run_correlate(sc, *body, where, tol);
      } else if (const auto* body = std::get_if<SchmidtDirective>(&d.body)) {
        payload = run_schmidt(sc, *body, where, tol);
      } else if (const auto* body = std::get_if<LatticeDirective>(&d.body)) {
        payload = run_lattice(*body, rng, tol);
      }
      for (const auto& [key, value] : payload.members()) block.set(key, value);
      results.push(std::move(block));
    } catch (const Error& e) {
      throw Error("directive " + std::to_string(i) + " (" + d.op + "): " + e.what());
    }
  }
  root.set("results", std::move(results));
  return root;
}

}  // namespace qmt
