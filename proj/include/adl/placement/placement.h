#ifndef ADL_PLACEMENT_PLACEMENT_H_
#define ADL_PLACEMENT_PLACEMENT_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "adl/core/rng.h"
#include "adl/core/transform.h"
#include "adl/kinematics/ik.h"
#include "adl/kinematics/scene.h"
#include "adl/robots/robot.h"

namespace adl::placement {

// Per-joint weight 1 - |2q - (u + l)| / (u - l): 1 at mid-range, 0 at a limit.
Eigen::VectorXd joint_limit_weights(const Eigen::VectorXd& q, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper);

// Joint-limit-weighted kinematic isotropy of an m x n task Jacobian:
// A = Jw Jw^T with Jw = J diag(w); score = det(A)^(1/m) / (tr(A) / m).
// Evaluated as geometric over arithmetic mean of A's eigenvalues, which is
// the same quantity and stays in [0, 1] under round-off. Eigenvalues at or
// below kSingularEigenvalueRatio times the largest count as zero, so singular
// and at-limit configurations score exactly 0.
inline constexpr double kSingularEigenvalueRatio = 1e-12;
double jlwki(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& q, const Eigen::VectorXd& lower,
             const Eigen::VectorXd& upper);

// Score of the 6-row Jacobian of `point` (in `link`'s frame) with respect to
// the listed dofs of `body`.
double jlwki(const kin::ArticulatedBody& body, const Transform& base, const Eigen::VectorXd& q, int link,
             std::span<const int> dofs, const Vec3& point = Vec3::Zero());

struct BasePose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Transform transform(double z) const;
};

struct PlacementCandidate {
  BasePose pose;
  int reached_goals = 0;
  double jlwki_sum = 0.0;
  // Per goal: full robot joint vector of the collision-free IK solution.
  std::vector<std::optional<Eigen::VectorXd>> ik_solutions;
};

// Lexicographic order: more reached goals first, then larger jlwki_sum.
bool better(const PlacementCandidate& a, const PlacementCandidate& b);

struct PlacementOptions {
  int samples = 100;
  double radius_min = 0.3;
  double radius_max = 1.2;
  double yaw_spread = 60.0 * 3.14159265358979323846 / 180.0;
  double base_height = 0.0;  // z of the base (or of the nightstand top)
  kin::IkOptions ik;
  int workers = 1;

  PlacementOptions() {
    ik.max_restarts = 3;
    ik.orientation_weight = 0.0;
  }
};

// What the robot must reach and what it must not hit. `obstacles` holds the
// other bodies and fixtures; the robot is inserted as an extra body per
// candidate. `seed_q` is the full robot joint vector IK starts from.
struct PlacementProblem {
  const robots::RobotModel* robot = nullptr;
  int link = -1;                 // usually the tool link
  Vec3 point = Vec3::Zero();     // point in `link`'s frame that must reach the goals
  std::vector<int> active_dofs;  // dofs IK may move (the tool arm)
  Eigen::VectorXd seed_q;
  std::vector<Transform> goals;
  Vec3 centroid = Vec3::Zero();
  kin::Scene obstacles;
};

struct PlacementResult {
  PlacementCandidate best;
  int best_index = 0;
  bool reached = false;  // false: no candidate reached any goal (best effort)
  std::vector<PlacementCandidate> candidates;  // all evaluated, in sample order
};

// Samples `options.samples` poses in an annulus around the goal centroid,
// facing it within +-yaw_spread, screens each goal with IK plus a collision
// check, and returns the lexicographic best. Candidate i draws from
// rng.fork(i) of a stream seeded once from `rng`, so the selection does not
// depend on the worker count.
PlacementResult optimize_base_pose(const PlacementProblem& problem, SeededRng& rng,
                                   const PlacementOptions& options = {});

// Evaluates a single candidate (exposed for exhaustive re-checks).
PlacementCandidate evaluate_candidate(const PlacementProblem& problem, const BasePose& pose, SeededRng& rng,
                                      const PlacementOptions& options);

// True when the robot at `base` with joints `q` clears every obstacle.
bool collision_free(const PlacementProblem& problem, const Transform& base, const Eigen::VectorXd& q);

}  // namespace adl::placement

#endif  // ADL_PLACEMENT_PLACEMENT_H_
