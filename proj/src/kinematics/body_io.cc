#include "adl/kinematics/body_io.h"

#include <cstdlib>
#include <fstream>
#include <map>

#include "adl/core/error.h"

#ifndef ADL_DEFAULT_DATA_DIR
#define ADL_DEFAULT_DATA_DIR "data"
#endif

namespace adl::kin {
namespace {

using nlohmann::json;

const std::map<std::string, std::uint32_t>& group_table() {
  static const std::map<std::string, std::uint32_t> t = {
      {"robot", group::kRobot},           {"tool", group::kTool},
      {"human_trunk", group::kHumanTrunk}, {"human_arm", group::kHumanArm},
      {"human_head", group::kHumanHead},   {"human_leg", group::kHumanLeg},
      {"furniture", group::kFurniture},
  };
  return t;
}

Vec3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw LoadError(std::string("expected 3-vector for ") + what);
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_array(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

JointType joint_type(const std::string& s) {
  if (s == "revolute") return JointType::kRevolute;
  if (s == "prismatic") return JointType::kPrismatic;
  if (s == "fixed") return JointType::kFixed;
  throw LoadError("unknown joint type '" + s + "'");
}

std::string joint_type_name(JointType t) {
  switch (t) {
    case JointType::kRevolute: return "revolute";
    case JointType::kPrismatic: return "prismatic";
    case JointType::kFixed: break;
  }
  return "fixed";
}

}  // namespace

std::uint32_t group_from_name(const std::string& name) {
  const auto it = group_table().find(name);
  if (it == group_table().end()) throw LoadError("unknown collision group '" + name + "'");
  return it->second;
}

std::string group_name(std::uint32_t g) {
  for (const auto& [name, bits] : group_table()) {
    if (bits == g) return name;
  }
  return "robot";
}

ArticulatedBody body_from_json(const json& j) {
  try {
    std::vector<Link> links;
    std::map<std::string, int> index;
    for (const json& jl : j.at("links")) {
      Link l;
      l.name = jl.at("name").get<std::string>();
      if (index.count(l.name)) throw LoadError("duplicate link '" + l.name + "'");
      const json& parent = jl.value("parent", json());
      if (parent.is_null()) {
        l.parent = -1;
      } else {
        const auto it = index.find(parent.get<std::string>());
        if (it == index.end()) throw LoadError("link '" + l.name + "' names an unknown or later parent");
        l.parent = it->second;
      }
      if (jl.contains("joint")) {
        const json& jj = jl["joint"];
        l.joint.name = jj.value("name", l.name);
        l.joint.type = joint_type(jj.value("type", "fixed"));
        if (jj.contains("axis")) l.joint.axis = vec3(jj["axis"], "axis");
        if (jj.contains("origin")) {
          const json& o = jj["origin"];
          l.origin = Transform::from_xyz_rpy(o.contains("xyz") ? vec3(o["xyz"], "xyz") : Vec3::Zero(),
                                             o.contains("rpy") ? vec3(o["rpy"], "rpy") : Vec3::Zero());
        }
        if (jj.contains("limits")) {
          l.joint.lower = jj["limits"].at(0).get<double>();
          l.joint.upper = jj["limits"].at(1).get<double>();
        }
        l.joint.max_torque = jj.value("max_torque", 1.0);
        l.joint.max_velocity = jj.value("max_velocity", 1.0);
      } else {
        l.joint.name = l.name + "_fixed";
      }
      l.mass = jl.value("mass", 0.0);
      if (jl.contains("com")) l.com = vec3(jl["com"], "com");
      if (jl.contains("group")) l.group = group_from_name(jl["group"].get<std::string>());
      for (const json& jc : jl.value("capsules", json::array())) {
        l.capsules.push_back({vec3(jc.at("a"), "a"), vec3(jc.at("b"), "b"), jc.at("radius").get<double>()});
        if (!(l.capsules.back().radius > 0.0)) throw LoadError("capsule radius must be positive");
      }
      index[l.name] = static_cast<int>(links.size());
      links.push_back(std::move(l));
    }
    return ArticulatedBody(j.at("name").get<std::string>(), std::move(links));
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed body description: ") + e.what());
  } catch (const ParameterError& e) {
    throw LoadError(std::string("invalid body description: ") + e.what());
  }
}

json body_to_json(const ArticulatedBody& body) {
  json links = json::array();
  for (const Link& l : body.links()) {
    json jl;
    jl["name"] = l.name;
    jl["parent"] = l.parent < 0 ? json() : json(body.link(l.parent).name);
    const Vec3 rpy = l.origin.matrix().eulerAngles(2, 1, 0).reverse();
    jl["joint"] = {{"name", l.joint.name},
                   {"type", joint_type_name(l.joint.type)},
                   {"axis", to_array(l.joint.axis)},
                   {"origin", {{"xyz", to_array(l.origin.translation())}, {"rpy", to_array(rpy)}}},
                   {"limits", json::array({l.joint.lower, l.joint.upper})},
                   {"max_torque", l.joint.max_torque},
                   {"max_velocity", l.joint.max_velocity}};
    jl["mass"] = l.mass;
    jl["com"] = to_array(l.com);
    jl["group"] = group_name(l.group);
    json caps = json::array();
    for (const Capsule& c : l.capsules) {
      caps.push_back({{"a", to_array(c.a)}, {"b", to_array(c.b)}, {"radius", c.radius}});
    }
    jl["capsules"] = caps;
    links.push_back(jl);
  }
  return {{"name", body.name()}, {"links", links}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError("cannot parse '" + path.string() + "': " + e.what());
  }
}

ArticulatedBody load_body_file(const std::filesystem::path& path) { return body_from_json(read_json_file(path)); }

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("ADL_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return ADL_DEFAULT_DATA_DIR;
}

}  // namespace adl::kin
