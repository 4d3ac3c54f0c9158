#pragma once

namespace qmt {

inline constexpr const char* kToolName = "qmt";
inline constexpr const char* kToolVersion = "1.0.0";
// Accepted scenario format tag.
inline constexpr const char* kScenarioVersion = "qmt/1";

}  // namespace qmt
