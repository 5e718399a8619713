#ifndef ADL_HUMAN_HUMAN_H_
#define ADL_HUMAN_HUMAN_H_

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "adl/core/rng.h"
#include "adl/kinematics/body.h"
#include "adl/kinematics/scene.h"

namespace adl::human {

enum class Sex { kMale, kFemale };
std::string to_string(Sex s);
Sex sex_from_string(const std::string& s);

inline constexpr int kControllableJoints = 40;
inline constexpr int kArmJoints = 10;
inline constexpr int kHeadJoints = 4;

// Per-sex segment table plus the shared joint table, as read from the
// anthropometry config (data/human/anthropometry.json).
struct SegmentTable {
  std::map<std::string, double> lengths;
  std::map<std::string, double> radii;
  std::map<std::string, double> masses;
  double strength_scale = 1.0;

  double length(const std::string& k) const;
  double radius(const std::string& k) const;
  double mass(const std::string& k) const;
};

struct JointTableEntry {
  double lower_deg = 0.0;
  double upper_deg = 0.0;
  double max_torque = 1.0;
  double max_velocity = 1.0;
};

struct Anthropometry {
  SegmentTable male;
  SegmentTable female;
  std::map<std::string, JointTableEntry> joints;

  const SegmentTable& table(Sex s) const { return s == Sex::kMale ? male : female; }
};

Anthropometry anthropometry_from_json(const nlohmann::json& j);
Anthropometry load_anthropometry(const std::filesystem::path& path);
// Shipped default config.
const Anthropometry& default_anthropometry();

// Link and dof indices for one arm. dofs are ordered pecs_x, pecs_y, pecs_z,
// shoulder_x, shoulder_y, shoulder_z, elbow, forearm, wrist_x, wrist_y.
struct ArmChain {
  std::array<int, kArmJoints> dofs{};
  int clavicle = -1;
  int upper_arm = -1;
  int forearm = -1;
  int hand = -1;
  int shoulder_frame = -1;  // link whose origin is the shoulder joint centre
  int elbow_frame = -1;
  int wrist_frame = -1;
  double upper_arm_length = 0.0;
  double forearm_length = 0.0;
  double hand_length = 0.0;
};

struct HumanModel {
  Sex sex = Sex::kMale;
  kin::ArticulatedBody body;
  ArmChain right_arm;
  ArmChain left_arm;
  std::array<int, kHeadJoints> head_dofs{};  // neck_y, head_x, head_y, head_z
  int pelvis = 0;
  int chest = -1;
  int head = -1;
  int mouth = -1;  // fixed frame at the mouth opening
  double head_radius = 0.0;
  double torso_length = 0.0;
  // Self-collision pairs between limbs and trunk/head.
  std::vector<std::pair<int, int>> self_pairs;

  const ArmChain& arm(bool right) const { return right ? right_arm : left_arm; }
  int controllable_joints() const { return body.dof(); }
};

// Programmatic human body from the anthropometry table. Neutral pose
// (q = 0): standing, arms hanging, facing +x, z up, root at the pelvis.
HumanModel generate_human(Sex sex, const Anthropometry& table = default_anthropometry());

// Angle between the upper arm and the hanging direction, from the three
// shoulder joints of a 10-entry arm vector.
double shoulder_elevation(std::span<const double> q_arm);

}  // namespace adl::human

#endif  // ADL_HUMAN_HUMAN_H_
