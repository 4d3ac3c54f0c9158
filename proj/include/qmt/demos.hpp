#pragma once

#include <string>
#include <vector>

namespace qmt::demos {

// Names of the built-in demo scenarios, in presentation order.
const std::vector<std::string>& names();

// Scenario text for a built-in demo; ValidationError for an unknown name.
const std::string& scenario_text(const std::string& name);

}  // namespace qmt::demos
