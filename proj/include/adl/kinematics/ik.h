#ifndef ADL_KINEMATICS_IK_H_
#define ADL_KINEMATICS_IK_H_

#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "adl/core/rng.h"
#include "adl/core/transform.h"
#include "adl/kinematics/body.h"

namespace adl::kin {

struct IkOptions {
  int max_restarts = 10;
  int iterations = 100;
  double damping = 0.05;
  double position_tolerance = 0.005;
  double orientation_tolerance = 5.0 * std::numbers::pi / 180.0;
  // Scales the orientation error rows; 0 solves for position only.
  double orientation_weight = 0.5;
  // Largest joint change per iteration (rad or m).
  double max_step = 0.3;
  // Dofs the solver may move; empty means every dof on the chain to `link`.
  std::vector<int> active_dofs;
  // Point in the link frame that should reach the target.
  Vec3 point = Vec3::Zero();
};

struct IkSolution {
  Eigen::VectorXd q;
  double position_residual = 0.0;
  double orientation_residual = 0.0;
  int iterations = 0;  // in the successful attempt
  int attempt = 0;     // 0 = seeded start, >0 = random restart
};

// Damped least squares from `seed`, then from random in-limit starts. Returns
// nullopt when no attempt converges. Inactive dofs keep their seed value.
std::optional<IkSolution> solve_ik(const ArticulatedBody& body, const Transform& base, int link,
                                   const Transform& target, const Eigen::VectorXd& seed,
                                   SeededRng& rng, const IkOptions& options = {});

}  // namespace adl::kin

#endif  // ADL_KINEMATICS_IK_H_
