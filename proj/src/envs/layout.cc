#include "adl/envs/layout.h"

#include <numbers>
#include <string>

namespace adl::envs {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr std::uint32_t kFurnitureMask = kin::group::kRobot | kin::group::kTool;

kin::Fixture fixture(const std::string& name, const Vec3& a, const Vec3& b, double r, const Vec3& origin) {
  return {name, {a + origin, b + origin, r}, kin::group::kFurniture, kFurnitureMask};
}

void set(const human::HumanModel& h, Eigen::VectorXd& q, const char* joint, double deg) {
  q[h.body.dof_index(joint)] = deg * kDeg;
}

void seated_legs(const human::HumanModel& h, Eigen::VectorXd& q) {
  for (const char* side : {"right_", "left_"}) {
    set(h, q, (std::string(side) + "hip_y").c_str(), 90.0);
    set(h, q, (std::string(side) + "knee").c_str(), 90.0);
  }
}

// Arms resting forward on the armrests.
void seated_arms(const human::HumanModel& h, Eigen::VectorXd& q) {
  for (const char* side : {"right_", "left_"}) {
    const std::string s(side);
    set(h, q, (s + "shoulder_x").c_str(), 12.0);
    set(h, q, (s + "shoulder_y").c_str(), 10.0);
    set(h, q, (s + "elbow").c_str(), 80.0);
  }
}

// Arms lying alongside the body, slightly abducted.
void lying_arms(const human::HumanModel& h, Eigen::VectorXd& q, double abduct_deg, double elbow_deg) {
  for (const char* side : {"right_", "left_"}) {
    const std::string s(side);
    set(h, q, (s + "shoulder_x").c_str(), abduct_deg);
    set(h, q, (s + "elbow").c_str(), elbow_deg);
  }
}

Eigen::VectorXd pose(const human::HumanModel& h, Task task, SeededRng* rng) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(h.body.dof());
  auto draw = [rng](double lo, double hi, double nominal) { return rng ? rng->uniform(lo, hi) : nominal; };
  switch (task) {
    case Task::kFeeding:
    case Task::kDrinking:
      seated_legs(h, q);
      seated_arms(h, q);
      set(h, q, "head_z", draw(-30.0, 30.0, 0.0));
      set(h, q, "head_y", draw(-30.0, 30.0, 0.0));
      break;
    case Task::kScratchItch:
      seated_legs(h, q);
      seated_arms(h, q);
      break;
    case Task::kDressing:
      seated_legs(h, q);
      seated_arms(h, q);
      // Left arm held out forward and toward the midline for the sleeve.
      set(h, q, "left_shoulder_x", -5.0);
      set(h, q, "left_shoulder_y", 75.0);
      set(h, q, "left_shoulder_z", 60.0);
      set(h, q, "left_elbow", 45.0);
      break;
    case Task::kBedBathing:
      lying_arms(h, q, draw(20.0, 35.0, 25.0), draw(0.0, 20.0, 10.0));
      break;
    case Task::kArmManipulation:
      lying_arms(h, q, 20.0, 10.0);
      // Right arm hanging over the bed edge.
      set(h, q, "right_shoulder_x", 85.0);
      set(h, q, "right_shoulder_y", -40.0);
      set(h, q, "right_elbow", draw(5.0, 25.0, 15.0));
      break;
  }
  return h.body.clamp(q);
}

}  // namespace

WorldLayout make_layout(Task task, const Vec3& origin) {
  WorldLayout w;
  w.floor_z = origin.z();
  if (is_wheelchair_task(task)) {
    w.lying = false;
    w.support_z = origin.z() + kSeatHeight;
    w.human_root = Transform::from_translation(origin + Vec3(0.0, 0.0, kSeatHeight + 0.12));
    const double s = kSeatHeight - 0.03;
    for (double y : {-0.15, 0.0, 0.15}) {
      w.fixtures.push_back(fixture("seat", Vec3(-0.2, y, s), Vec3(0.25, y, s), 0.03, origin));
    }
    for (double y : {-0.15, 0.0, 0.15}) {
      w.fixtures.push_back(fixture("backrest", Vec3(-0.24, y, kSeatHeight), Vec3(-0.24, y, 1.0), 0.03, origin));
    }
    for (double y : {-0.3, 0.3}) {
      w.fixtures.push_back(fixture("armrest", Vec3(-0.2, y, 0.65), Vec3(0.2, y, 0.65), 0.03, origin));
      w.fixtures.push_back(fixture("wheel", Vec3(-0.05, y * 1.1, 0.0), Vec3(-0.05, y * 1.1, 0.6), 0.03, origin));
    }
    w.sockets.wheelchair = Transform::from_translation(origin + Vec3(0.1, -0.42, 0.55));
    w.sockets.nightstand = Transform::from_translation(origin + Vec3(0.2, -0.9, 0.6));
  } else {
    w.lying = true;
    w.support_z = origin.z() + kBedHeight;
    w.bed_center = origin + Vec3(0.0, 0.0, kBedHeight);
    w.bed_half_x = 1.1;
    w.bed_half_y = 0.45;
    // Lying supine, head toward -x: body +z maps to world -x, body +x (front)
    // to world +z.
    const double y = task == Task::kArmManipulation ? -0.15 : 0.0;
    w.human_root = Transform(quat_from_axis_angle(Vec3::UnitY(), -std::numbers::pi / 2),
                             origin + Vec3(0.1, y, kBedHeight + 0.14));
    constexpr double r = 0.05;
    for (int i = -4; i <= 4; ++i) {
      const double yy = 0.1 * i;
      w.fixtures.push_back(fixture("mattress", Vec3(-1.05, yy, kBedHeight - r), Vec3(1.05, yy, kBedHeight - r), r, origin));
    }
    w.sockets.nightstand = Transform::from_translation(origin + Vec3(0.1, -0.85, kBedHeight));
    w.sockets.wheelchair = w.sockets.nightstand;
  }
  return w;
}

Eigen::VectorXd resting_pose(const human::HumanModel& human, Task task, SeededRng& rng) {
  return pose(human, task, &rng);
}

Eigen::VectorXd nominal_resting_pose(const human::HumanModel& human, Task task) {
  return pose(human, task, nullptr);
}

}  // namespace adl::envs
