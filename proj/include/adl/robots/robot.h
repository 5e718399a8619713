#ifndef ADL_ROBOTS_ROBOT_H_
#define ADL_ROBOTS_ROBOT_H_

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adl/core/task.h"
#include "adl/core/transform.h"
#include "adl/kinematics/body.h"

namespace adl::robots {

inline constexpr int kArmDof = 7;

enum class Mobility { kWheeled, kMounted };

struct ArmInfo {
  std::string name;                // "right" or "left"
  std::array<int, kArmDof> dofs{};  // body dof indices, shoulder to wrist
  int end_effector = -1;           // link index
  Eigen::VectorXd park;            // 7-vector used when the arm is idle
  double reach = 0.0;              // shoulder-to-flange length when straight, m
};

struct RobotModel {
  std::string name;
  kin::ArticulatedBody body;
  std::vector<ArmInfo> arms;
  int tool_arm = 0;  // index into arms
  Mobility mobility = Mobility::kWheeled;

  int arm_count() const { return static_cast<int>(arms.size()); }
  int action_dim() const { return kArmDof * arm_count(); }
  const ArmInfo& tool_arm_info() const { return arms.at(tool_arm); }
  // Body dof indices of every arm, in arm order (the action ordering).
  std::vector<int> action_dofs() const;
};

// pr2, jaco, baxter, sawyer. Throws ParameterError for any other name.
RobotModel load_robot(const std::string& name);
const std::vector<std::string>& robot_names();

enum class ToolKind { kScratcher, kWashcloth, kCup, kSpoon, kGown, kScoop };
std::string to_string(ToolKind k);

// Rigid tool attached to the end-effector flange. Geometry is in the tool
// frame, which is the flange frame composed with `grasp`; the tool's +z
// continues the arm's approach axis.
struct ToolModel {
  ToolKind kind = ToolKind::kScratcher;
  std::vector<kin::Capsule> capsules;
  Transform grasp;
  double mass = 0.1;
  // Functional point in the tool frame: scratcher tip, spoon bowl, cup spout,
  // washcloth pad centre, gown grasp point, scoop centre.
  Vec3 tip = Vec3::Zero();
  // Functional "up" axis in the tool frame (spoon bowl normal, cup axis).
  Vec3 up = Vec3::UnitX();
};

ToolModel make_tool(ToolKind kind);
ToolKind tool_for_task(Task task);

// Adds the tool as a fixed link on the flange; returns the tool link index.
int attach_tool(RobotModel& robot, const ToolModel& tool);

enum class MountKind { kWheelchair, kNightstand, kFreeBase };
std::string to_string(MountKind k);

// Fixed sockets of the furniture layout.
struct FurnitureSockets {
  Transform wheelchair;  // Jaco mount on the wheelchair frame
  Transform nightstand;  // default nightstand top pose next to the bed
};

struct MountPlan {
  MountKind kind = MountKind::kFreeBase;
  Transform base;
  // True when the base (or the nightstand carrying it) is chosen by base
  // placement before each episode.
  bool optimize = true;
};

// Jaco: wheelchair socket for wheelchair tasks, nightstand (optimized) for bed
// tasks. Every other robot gets a free base that must be optimized.
MountPlan mount_robot(const RobotModel& robot, Task task, const FurnitureSockets& sockets);

}  // namespace adl::robots

#endif  // ADL_ROBOTS_ROBOT_H_
