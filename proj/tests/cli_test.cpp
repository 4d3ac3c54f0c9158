#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "qmt/demos.hpp"
#include "qmt/errors.hpp"
#include "qmt/report.hpp"
#include "qmt/rqm.hpp"
#include "qmt/scenario.hpp"
#include "support.hpp"

using namespace qmt;

namespace {

const std::string kMinimal = R"({
  "version": "qmt/1",
  "seed": 11,
  "states": { "plus": { "matrix": [[0.5, 0.5], [0.5, 0.5]] } },
  "observables": {
    "Z": { "outcomes": ["up", "down"], "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]] }
  },
  "schemes": { "M": { "lueders_of": "Z" } },
  "program": [
    { "op": "interact", "scheme": "M", "target": "S", "observer": "F", "state": "plus" }
  ]
})";

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "/tmp/qmt_cli_test_" + name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

const report::Value& member(const report::Value& obj, const std::string& key) {
  const report::Value* v = obj.find(key);
  REQUIRE(v != nullptr);
  return *v;
}

}  // namespace

TEST_CASE("format_real emits 12 significant digits and normalizes -0") {
  CHECK(report::format_real(0.0) == "0");
  CHECK(report::format_real(-0.0) == "0");
  CHECK(report::format_real(1.0) == "1");
  CHECK(report::format_real(0.5) == "0.5");
  CHECK(report::format_real(1.0 / 3.0) == "0.333333333333");
  CHECK(report::format_real(1e-9) == "1e-09");
  CHECK(report::format_real(-2.25) == "-2.25");
  CHECK(report::format_real(1.0 / std::sqrt(2.0)) == "0.707106781187");
  CHECK_THROWS_AS(report::format_real(std::numeric_limits<double>::infinity()),
                  ValidationError);
  CHECK_THROWS_AS(report::format_real(std::nan("")), ValidationError);
}

TEST_CASE("json writer keeps insertion order and inlines scalar arrays") {
  report::Value doc = report::Value::object();
  doc.set("b", report::Value::integer(2));
  doc.set("a", report::Value::str("x\ty"));
  report::Value arr = report::Value::array();
  arr.push(report::Value::real(0.5));
  arr.push(report::Value::real(-0.0));
  doc.set("v", std::move(arr));
  report::Value nested = report::Value::array();
  report::Value inner = report::Value::object();
  inner.set("k", report::Value::boolean(true));
  nested.push(std::move(inner));
  doc.set("n", std::move(nested));
  doc.set("z", report::Value());

  const std::string json = report::to_json(doc);
  CHECK(json ==
        "{\n"
        "  \"b\": 2,\n"
        "  \"a\": \"x\\ty\",\n"
        "  \"v\": [0.5, 0],\n"
        "  \"n\": [\n"
        "    {\n"
        "      \"k\": true\n"
        "    }\n"
        "  ],\n"
        "  \"z\": null\n"
        "}\n");

  // replace-in-place keeps the original position
  doc.set("b", report::Value::integer(7));
  CHECK(doc.members().front().first == "b");
  CHECK(doc.members().front().second.as_int() == 7);
}

TEST_CASE("tsv writer flattens scalar leaves with dotted and indexed paths") {
  report::Value doc = report::Value::object();
  report::Value inner = report::Value::object();
  inner.set("p", report::Value::real(0.25));
  report::Value arr = report::Value::array();
  arr.push(report::Value::str("first"));
  report::Value element = report::Value::object();
  element.set("q", report::Value::boolean(false));
  arr.push(std::move(element));
  inner.set("list", std::move(arr));
  doc.set("top", std::move(inner));

  CHECK(report::to_tsv(doc) ==
        "top.p\t0.25\n"
        "top.list[0]\tfirst\n"
        "top.list[1].q\tfalse\n");
}

TEST_CASE("minimal scenario loads, validates, and runs") {
  const Scenario sc = parse_scenario(kMinimal);
  CHECK(sc.has_seed);
  CHECK(sc.seed == 11);
  CHECK(sc.semantics_name == "local");
  REQUIRE(sc.program.size() == 1);
  CHECK(sc.program[0].op == "interact");

  const report::Value doc = run_scenario(sc);
  CHECK(member(doc, "tool").as_str() == "qmt");
  CHECK(member(doc, "rng").as_str() == "splitmix64/1");
  CHECK(member(doc, "seed").as_int() == 11);
  const report::Value& results = member(doc, "results");
  REQUIRE(results.items().size() == 1);
  const report::Value& block = results.items()[0];
  CHECK(member(block, "op").as_str() == "interact");
  const auto& dist = member(block, "distribution").items();
  REQUIRE(dist.size() == 2);
  CHECK(dist[0].as_real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(member(block, "probability").as_real() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("empty program yields a header-only report") {
  const Scenario sc = parse_scenario(R"({ "version": "qmt/1" })");
  const report::Value doc = run_scenario(sc);
  CHECK(member(doc, "seed").kind() == report::Value::Kind::Null);
  CHECK(member(doc, "results").items().empty());
}

TEST_CASE("load failures carry position or field information") {
  CHECK_THROWS_AS(parse_scenario("{ not json"), ParseError);
  CHECK_THROWS_AS(parse_scenario(R"({ "version": "qmt/2" })"), ValidationError);

  // undefined observable name
  CHECK_THROWS_AS(parse_scenario(R"({
    "version": "qmt/1",
    "schemes": { "M": { "lueders_of": "missing" } }
  })"),
                  ValidationError);

  // non-unitary literal is surfaced with the matrix name
  try {
    parse_scenario(R"({
      "version": "qmt/1",
      "unitaries": { "U_bad": { "matrix": [[1, 0], [0, 2]] } }
    })");
    FAIL("expected UnitarityError");
  } catch (const UnitarityError& e) {
    CHECK(std::string(e.what()).find("U_bad") != std::string::npos);
  }

  // sampling directive without a seed
  const std::string no_seed = R"({
    "version": "qmt/1",
    "states": { "plus": { "matrix": [[0.5, 0.5], [0.5, 0.5]] } },
    "observables": {
      "Z": { "outcomes": ["up", "down"], "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]] }
    },
    "schemes": { "M": { "lueders_of": "Z" } },
    "program": [
      { "op": "interact", "scheme": "M", "target": "S", "observer": "F", "state": "plus" }
    ]
  })";
  CHECK_THROWS_AS(parse_scenario(no_seed), ValidationError);

  // state dimension mismatch against the scheme
  CHECK_THROWS_AS(parse_scenario(R"({
    "version": "qmt/1",
    "seed": 1,
    "states": { "big": { "maximally_mixed": 3 } },
    "observables": {
      "Z": { "outcomes": ["up", "down"], "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]] }
    },
    "schemes": { "M": { "lueders_of": "Z" } },
    "program": [
      { "op": "interact", "scheme": "M", "target": "S", "observer": "F", "state": "big" }
    ]
  })"),
                  ValidationError);

  CHECK_THROWS_AS(load_scenario("/tmp/qmt_cli_test_does_not_exist.json"), ValidationError);
}

TEST_CASE("scale definitions are validated against their observable at load") {
  const std::string bad_scale = R"({
    "version": "qmt/1",
    "observables": {
      "Z": { "outcomes": ["up", "down"], "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]] }
    },
    "scales": {
      "coarse": { "observable": "Z", "bins": [ { "label": "all", "members": ["up"] } ] }
    }
  })";
  CHECK_THROWS_AS(parse_scenario(bad_scale), ValidationError);

  const std::string good_scale = R"({
    "version": "qmt/1",
    "observables": {
      "Z": { "outcomes": ["up", "down"], "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]] }
    },
    "scales": {
      "all": { "observable": "Z", "bins": [ { "label": "any", "members": ["up", "down"] } ] }
    }
  })";
  const Scenario sc = parse_scenario(good_scale);
  REQUIRE(sc.scales.size() == 1);
  CHECK(sc.scales[0].second.n_bins() == 1);
}

TEST_CASE("serialize then parse reproduces an equivalent scenario") {
  const std::string text = R"({
    "version": "qmt/1",
    "seed": 3,
    "semantics": "global",
    "spaces": { "sys": 2 },
    "states": {
      "plus": { "matrix": [[0.5, 0.5], [0.5, 0.5]] },
      "up": { "pure": [1, 0] }
    },
    "observables": {
      "Z": { "outcomes": ["up", "down"], "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]] }
    },
    "unitaries": { "C": { "cnot": true } },
    "scales": {
      "all": { "observable": "Z", "bins": [ { "label": "any", "members": ["up", "down"] } ] }
    },
    "schemes": {
      "M": { "naimark_of": "Z" },
      "W": {
        "system": "sys", "ancilla": 2, "unitary": "C",
        "ready": "up", "pointer": "Z"
      }
    },
    "program": [
      { "op": "interact", "scheme": "M", "target": "S", "observer": "F", "state": "plus" },
      { "op": "joint-spectrum", "scheme": "W", "scale": "all", "state": "up" },
      { "op": "schmidt", "state": "plus", "dims": [1, 2] },
      { "op": "lattice-check", "dim": 3, "witness": true }
    ]
  })";
  const Scenario a = parse_scenario(text);
  const std::string round = serialize_scenario(a);
  const Scenario b = parse_scenario(round);

  CHECK(b.has_seed);
  CHECK(b.seed == a.seed);
  CHECK(b.semantics_name == "global");
  REQUIRE(b.states.size() == a.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    CHECK(b.states[i].first == a.states[i].first);
    CHECK(qmt::testing::max_abs_diff(b.states[i].second.density(), a.states[i].second.density()) < 1e-10);
  }
  REQUIRE(b.schemes.size() == a.schemes.size());
  for (std::size_t i = 0; i < a.schemes.size(); ++i) {
    CHECK(b.schemes[i].first == a.schemes[i].first);
    CHECK(qmt::testing::max_abs_diff(b.schemes[i].second.unitary(), a.schemes[i].second.unitary()) < 1e-10);
    CHECK(b.schemes[i].second.pointer().outcomes() == a.schemes[i].second.pointer().outcomes());
  }
  REQUIRE(b.program.size() == a.program.size());
  for (std::size_t i = 0; i < a.program.size(); ++i) CHECK(b.program[i].op == a.program[i].op);

  // and the round-tripped scenario runs to the identical report
  CHECK(report::to_json(run_scenario(a)) == report::to_json(run_scenario(b)));
}

TEST_CASE("reports are byte-stable across repeated runs") {
  const std::string path = write_temp("stable.json", kMinimal);
  const Scenario sc = load_scenario(path);
  const std::string first = report::to_json(run_scenario(sc));
  const std::string second = report::to_json(run_scenario(load_scenario(path)));
  CHECK(first == second);
  CHECK(!first.empty());
  CHECK(first.back() == '\n');
  std::remove(path.c_str());
}

TEST_CASE("tolerance files override individual entries and reject bad ones") {
  const std::string path =
      write_temp("tol.json", R"({ "eq_tol": 1e-6, "degeneracy_tol": 1e-5 })");
  const Tolerances tol = load_tolerances_file(path);
  CHECK(tol.eq_tol == doctest::Approx(1e-6));
  CHECK(tol.psd_tol == doctest::Approx(default_tolerances().psd_tol));
  CHECK(tol.degeneracy_tol == doctest::Approx(1e-5));
  std::remove(path.c_str());

  const std::string bad = write_temp("tol_bad.json", R"({ "eq_tol": -1 })");
  CHECK_THROWS_AS(load_tolerances_file(bad), ValidationError);
  std::remove(bad.c_str());
  const std::string unknown = write_temp("tol_unknown.json", R"({ "nope": 1 })");
  CHECK_THROWS_AS(load_tolerances_file(unknown), ValidationError);
  std::remove(unknown.c_str());
}

TEST_CASE("report tables re-validate against the producing operations") {
  const Scenario sc = parse_scenario(demos::scenario_text("lueders-repeat"));
  const report::Value doc = run_scenario(sc);
  const report::Value& spectrum_block = member(doc, "results").items()[1];
  REQUIRE(member(spectrum_block, "op").as_str() == "joint-spectrum");

  // recompute the joint value table straight from the module
  const MeasurementScheme& m = sc.schemes[0].second;
  const JointValueSpectrum direct = joint_value_spectrum(
      m, ReadingScale::singletons(m.pointer()), sc.states[0].second);
  const auto& table = member(spectrum_block, "table").items();
  REQUIRE(table.size() == direct.table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& row = table[i].items();
    REQUIRE(row.size() == direct.table[i].size());
    for (std::size_t j = 0; j < row.size(); ++j)
      CHECK(row[j].as_real() == doctest::Approx(direct.table[i][j]).epsilon(1e-12));
  }
  CHECK(member(spectrum_block, "repeatable").as_bool());
}

TEST_CASE("built-in demos parse and run") {
  const auto& names = demos::names();
  REQUIRE(names.size() == 4);
  CHECK_THROWS_AS(demos::scenario_text("nope"), ValidationError);

  for (const std::string& name : names) {
    const Scenario sc = parse_scenario(demos::scenario_text(name));
    const report::Value doc = run_scenario(sc);
    CHECK(!member(doc, "results").items().empty());
  }

  // spot values: cpl match probabilities and the Bell Schmidt block
  const report::Value cpl = run_scenario(parse_scenario(demos::scenario_text("cpl")));
  const auto& blocks = member(cpl, "results").items();
  REQUIRE(blocks.size() == 4);
  const double expected[] = {0.5, 1.0, 1.0, 1.0};
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(member(blocks[i], "match_probability").as_real() ==
          doctest::Approx(expected[i]).epsilon(1e-12));

  const report::Value bell = run_scenario(parse_scenario(demos::scenario_text("bell")));
  const report::Value& schmidt_block = member(bell, "results").items()[0];
  const auto& groups = member(schmidt_block, "groups").items();
  REQUIRE(groups.size() == 1);
  CHECK(member(groups[0], "lambda").as_real() ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(member(groups[0], "multiplicity").as_int() == 2);
  const report::Value& correlate_block = member(bell, "results").items()[1];
  const auto& pairing = member(correlate_block, "pairing").items();
  REQUIRE(pairing.size() == 2);
  CHECK(pairing[0].as_int() == 0);
  CHECK(pairing[1].as_int() == 1);
  CHECK(member(member(correlate_block, "coefficient"), "value").as_real() ==
        doctest::Approx(1.0).epsilon(1e-12));
}
