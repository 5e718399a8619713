#ifndef ADL_ENVS_LAYOUT_H_
#define ADL_ENVS_LAYOUT_H_

#include <vector>

#include <Eigen/Core>

#include "adl/core/rng.h"
#include "adl/core/task.h"
#include "adl/core/transform.h"
#include "adl/human/human.h"
#include "adl/kinematics/scene.h"
#include "adl/robots/robot.h"

namespace adl::envs {

// Furniture and human placement for one task. Every position is offset by
// `origin`, so translating the origin translates the whole world.
struct WorldLayout {
  Transform human_root;  // pelvis frame
  std::vector<kin::Fixture> fixtures;
  robots::FurnitureSockets sockets;
  double floor_z = 0.0;
  double support_z = 0.0;  // seat or mattress top
  bool lying = false;
  // Bed extent (lying tasks): |x - cx| <= half_x, |y - cy| <= half_y.
  Vec3 bed_center = Vec3::Zero();
  double bed_half_x = 0.0;
  double bed_half_y = 0.0;
};

inline constexpr double kSeatHeight = 0.45;
inline constexpr double kBedHeight = 0.6;

WorldLayout make_layout(Task task, const Vec3& origin = Vec3::Zero());

// Resting pose q_bar for the task (seated in the wheelchair or lying on the
// bed), with the task's random variation (head orientation for feeding and
// drinking, arm placement on the bed). Already clamped to the model limits.
Eigen::VectorXd resting_pose(const human::HumanModel& human, Task task, SeededRng& rng);

// Same pose without random variation.
Eigen::VectorXd nominal_resting_pose(const human::HumanModel& human, Task task);

}  // namespace adl::envs

#endif  // ADL_ENVS_LAYOUT_H_
