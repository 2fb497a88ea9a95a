#pragma once

#include <nlohmann/json.hpp>

#include "modframe/theorems.hpp"

namespace modframe {

inline constexpr const char* kToolName = "modframe";
inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::json verdict_to_json(const Verdict& v);
nlohmann::json bounds_to_json(const BoundsReport& b);
nlohmann::json theorem_to_json(const TheoremReport& r);
nlohmann::json matrix_to_json(const CMat& m);
nlohmann::json vector_to_json(const CVec& v);

/// Common envelope: tool block, command name, instance digest.
nlohmann::json report_envelope(const std::string& command, const std::string& digest);

}  // namespace modframe
