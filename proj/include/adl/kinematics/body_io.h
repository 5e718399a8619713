#ifndef ADL_KINEMATICS_BODY_IO_H_
#define ADL_KINEMATICS_BODY_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "adl/kinematics/body.h"

namespace adl::kin {

// Body description schema (JSON), documented in docs/formats.md:
//   { "name": str,
//     "links": [ { "name": str, "parent": str|null,
//                  "joint": { "name", "type": "revolute"|"prismatic"|"fixed",
//                             "axis": [x,y,z], "origin": {"xyz": [..], "rpy": [..]},
//                             "limits": [lo, hi], "max_torque", "max_velocity" },
//                  "mass", "com": [..], "group": str,
//                  "capsules": [ {"a": [..], "b": [..], "radius"} ] } ] }
ArticulatedBody body_from_json(const nlohmann::json& j);
nlohmann::json body_to_json(const ArticulatedBody& body);
ArticulatedBody load_body_file(const std::filesystem::path& path);

std::uint32_t group_from_name(const std::string& name);
std::string group_name(std::uint32_t group);

// Directory holding the shipped body/config files. ADL_DATA_DIR in the
// environment overrides the compiled-in default.
std::filesystem::path data_dir();

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace adl::kin

#endif  // ADL_KINEMATICS_BODY_IO_H_
