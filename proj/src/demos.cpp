#include "qmt/demos.hpp"

#include <utility>

#include "qmt/errors.hpp"

namespace qmt::demos {

namespace {

// Matrix entries in the demo texts are exactly representable in binary
// (0, 1, 0.5, 0.25, 0.75) or the closest double to 1/sqrt(2), so the demos
// produce identical reports on every platform.

const std::string kBell = R"({
  "version": "qmt/1",
  "states": {
    "bell": { "pure": [0.7071067811865476, 0, 0, 0.7071067811865476] }
  },
  "observables": {
    "za": {
      "outcomes": ["+1", "-1"],
      "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    },
    "zb": {
      "outcomes": ["+1", "-1"],
      "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    }
  },
  "program": [
    { "op": "schmidt", "state": "bell", "dims": [2, 2], "pairs": true },
    { "op": "correlate", "state": "bell", "dims": [2, 2], "first": "za", "second": "zb" }
  ]
})";

const std::string kLuedersRepeat = R"({
  "version": "qmt/1",
  "seed": 20260825,
  "states": {
    "plus": { "matrix": [[0.5, 0.5], [0.5, 0.5]] }
  },
  "observables": {
    "Z": {
      "outcomes": ["up", "down"],
      "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    }
  },
  "schemes": {
    "M": { "lueders_of": "Z" }
  },
  "program": [
    {
      "op": "sequential",
      "target": "S",
      "state": "plus",
      "stages": [
        { "scheme": "M", "observer": "F1" },
        { "scheme": "M", "observer": "F2" }
      ]
    },
    { "op": "joint-spectrum", "scheme": "M", "state": "plus" }
  ]
})";

const std::string kCpl = R"({
  "version": "qmt/1",
  "states": {
    "plus": { "matrix": [[0.5, 0.5], [0.5, 0.5]] },
    "up": { "pure": [1, 0] }
  },
  "observables": {
    "Z": {
      "outcomes": ["up", "down"],
      "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    }
  },
  "schemes": {
    "M": { "lueders_of": "Z" }
  },
  "program": [
    { "op": "cpl-check", "scheme": "M", "state": "plus", "semantics": "local" },
    { "op": "cpl-check", "scheme": "M", "state": "plus", "semantics": "global" },
    { "op": "cpl-check", "scheme": "M", "state": "up", "semantics": "local" },
    { "op": "cpl-check", "scheme": "M", "state": "up", "semantics": "global" }
  ]
})";

const std::string kLattice = R"({
  "version": "qmt/1",
  "seed": 4,
  "program": [
    { "op": "lattice-check", "dim": 4, "nested_pairs": 50, "witness": true, "chain": 4 }
  ]
})";

const std::vector<std::pair<std::string, const std::string*>>& table() {
  static const std::vector<std::pair<std::string, const std::string*>> demos = {
      {"bell", &kBell},
      {"lueders-repeat", &kLuedersRepeat},
      {"cpl", &kCpl},
      {"lattice", &kLattice},
  };
  return demos;
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> list = [] {
    std::vector<std::string> out;
    for (const auto& [name, text] : table()) out.push_back(name);
    return out;
  }();
  return list;
}

const std::string& scenario_text(const std::string& name) {
  for (const auto& [key, text] : table())
    if (key == name) return *text;
  throw ValidationError("unknown demo '" + name + "'");
}

}  // namespace qmt::demos
