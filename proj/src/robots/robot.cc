#include "adl/robots/robot.h"

#include <algorithm>

#include "adl/core/error.h"
#include "adl/kinematics/body_io.h"

namespace adl::robots {

std::vector<int> RobotModel::action_dofs() const {
  std::vector<int> out;
  for (const ArmInfo& a : arms) out.insert(out.end(), a.dofs.begin(), a.dofs.end());
  return out;
}

const std::vector<std::string>& robot_names() {
  static const std::vector<std::string> names = {"pr2", "jaco", "baxter", "sawyer"};
  return names;
}

RobotModel load_robot(const std::string& name) {
  const auto& names = robot_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ParameterError("unknown robot '" + name + "' (expected pr2, jaco, baxter or sawyer)");
  }
  const nlohmann::json j = kin::read_json_file(kin::data_dir() / "bodies" / (name + ".json"));
  RobotModel r;
  r.name = name;
  r.body = kin::body_from_json(j);
  try {
    const nlohmann::json& meta = j.at("robot");
    const std::string mobility = meta.at("mobility").get<std::string>();
    if (mobility == "mounted") {
      r.mobility = Mobility::kMounted;
    } else if (mobility == "wheeled") {
      r.mobility = Mobility::kWheeled;
    } else {
      throw LoadError("robot '" + name + "': unknown mobility '" + mobility + "'");
    }
    const std::string tool_arm = meta.at("tool_arm").get<std::string>();
    for (const auto& a : meta.at("arms")) {
      ArmInfo arm;
      arm.name = a.at("name").get<std::string>();
      const auto joints = a.at("joints").get<std::vector<std::string>>();
      if (joints.size() != kArmDof) throw LoadError("robot '" + name + "': arms need 7 joints");
      for (int i = 0; i < kArmDof; ++i) arm.dofs[i] = r.body.dof_index(joints[i]);
      arm.end_effector = r.body.link_index(a.at("end_effector").get<std::string>());
      const auto park = a.at("park").get<std::vector<double>>();
      if (park.size() != kArmDof) throw LoadError("robot '" + name + "': park pose needs 7 values");
      arm.park = Eigen::Map<const Eigen::VectorXd>(park.data(), kArmDof);
      // Straight-arm reach: flange distance from the second joint at q = 0.
      const auto frames = kin::forward_kinematics(r.body, Eigen::VectorXd::Zero(r.body.dof()));
      arm.reach = (frames[arm.end_effector].translation() -
                   frames[r.body.link_of_dof(arm.dofs[1])].translation())
                      .norm();
      if (arm.name == tool_arm) r.tool_arm = static_cast<int>(r.arms.size());
      r.arms.push_back(std::move(arm));
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("robot '" + name + "': " + e.what());
  } catch (const ParameterError& e) {
    throw LoadError("robot '" + name + "': " + e.what());
  }
  if (r.arms.empty() || r.arms.size() > 2) throw LoadError("robot '" + name + "' must have one or two arms");
  return r;
}

std::string to_string(ToolKind k) {
  switch (k) {
    case ToolKind::kScratcher: return "scratcher";
    case ToolKind::kWashcloth: return "washcloth";
    case ToolKind::kCup: return "cup";
    case ToolKind::kSpoon: return "spoon";
    case ToolKind::kGown: return "gown";
    case ToolKind::kScoop: return "scoop";
  }
  return "scratcher";
}

ToolModel make_tool(ToolKind kind) {
  ToolModel t;
  t.kind = kind;
  switch (kind) {
    case ToolKind::kScratcher:
      t.capsules = {{Vec3(0, 0, 0.02), Vec3(0, 0, 0.18), 0.012}};
      t.tip = Vec3(0, 0, 0.192);
      t.mass = 0.05;
      break;
    case ToolKind::kWashcloth:
      t.capsules = {{Vec3(0, 0, 0.02), Vec3(0, 0, 0.08), 0.012}, {Vec3(-0.05, 0, 0.1), Vec3(0.05, 0, 0.1), 0.02}};
      t.tip = Vec3(0, 0, 0.12);
      t.mass = 0.1;
      break;
    case ToolKind::kCup:
      // Cup axis along tool +x, opening at +x.
      t.capsules = {{Vec3(-0.04, 0, 0.06), Vec3(0.04, 0, 0.06), 0.035}};
      t.tip = Vec3(0.08, 0, 0.06);
      t.up = Vec3::UnitX();
      t.mass = 0.3;
      break;
    case ToolKind::kSpoon:
      // Bowl normal along tool +x.
      t.capsules = {{Vec3(0, 0, 0.02), Vec3(0, 0, 0.15), 0.006}, {Vec3(0, 0, 0.16), Vec3(0, 0, 0.19), 0.012}};
      t.tip = Vec3(0.01, 0, 0.175);
      t.up = Vec3::UnitX();
      t.mass = 0.05;
      break;
    case ToolKind::kGown:
      t.capsules = {{Vec3(0, 0, 0.02), Vec3(0, 0, 0.05), 0.015}};
      t.tip = Vec3(0, 0, 0.06);
      t.mass = 0.2;
      break;
    case ToolKind::kScoop:
      t.capsules = {{Vec3(0, 0, 0.02), Vec3(0, 0, 0.1), 0.012}, {Vec3(-0.07, 0, 0.12), Vec3(0.07, 0, 0.12), 0.025}};
      t.tip = Vec3(0, 0, 0.12);
      t.mass = 0.3;
      break;
  }
  return t;
}

ToolKind tool_for_task(Task task) {
  switch (task) {
    case Task::kScratchItch: return ToolKind::kScratcher;
    case Task::kBedBathing: return ToolKind::kWashcloth;
    case Task::kFeeding: return ToolKind::kSpoon;
    case Task::kDrinking: return ToolKind::kCup;
    case Task::kDressing: return ToolKind::kGown;
    case Task::kArmManipulation: return ToolKind::kScoop;
  }
  return ToolKind::kScratcher;
}

int attach_tool(RobotModel& robot, const ToolModel& tool) {
  const ArmInfo& arm = robot.tool_arm_info();
  const Vec3 com = tool.capsules.empty() ? Vec3::Zero() : Vec3(0.5 * (tool.capsules[0].a + tool.capsules[0].b));
  const int link = robot.body.add_fixed_link("tool_" + to_string(tool.kind), arm.end_effector, tool.grasp,
                                             tool.mass, com, tool.capsules, kin::group::kTool);
  robot.body.set_link_collision(link, kin::group::kTool, kin::group::kHuman | kin::group::kFurniture);
  return link;
}

std::string to_string(MountKind k) {
  switch (k) {
    case MountKind::kWheelchair: return "wheelchair";
    case MountKind::kNightstand: return "nightstand";
    case MountKind::kFreeBase: return "free_base";
  }
  return "free_base";
}

MountPlan mount_robot(const RobotModel& robot, Task task, const FurnitureSockets& sockets) {
  if (robot.mobility == Mobility::kMounted) {
    if (is_wheelchair_task(task)) return {MountKind::kWheelchair, sockets.wheelchair, false};
    return {MountKind::kNightstand, sockets.nightstand, true};
  }
  return {MountKind::kFreeBase, Transform::identity(), true};
}

}  // namespace adl::robots
