#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>

#include "modframe/frame.hpp"

namespace modframe {

/// Raised on malformed instance files; message carries the JSON path of
/// the offending field.
struct InstanceFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json instance_to_json(const FrameInstance& inst);
FrameInstance instance_from_json(const nlohmann::json& j);

FrameInstance load_instance(const std::string& path);
void save_instance(const FrameInstance& inst, const std::string& path);

/// "fnv1a64:" + 16 hex digits over the compact canonical serialization.
std::string instance_digest(const FrameInstance& inst);

}  // namespace modframe
