// Tests for the isotropy score and base-pose selection.

#include "adl/placement/placement.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "adl/core/error.h"
#include "adl/core/rng.h"
#include "adl/robots/robot.h"

namespace adl::placement {
namespace {

TEST(JointLimitWeightsTest, MidRangeAndLimits) {
  Eigen::VectorXd lo(3), hi(3), q(3);
  lo << -1.0, 0.0, -2.0;
  hi << 1.0, 2.0, 2.0;
  q << 0.0, 2.0, 1.0;
  const Eigen::VectorXd w = joint_limit_weights(q, lo, hi);
  EXPECT_DOUBLE_EQ(w[0], 1.0);
  EXPECT_DOUBLE_EQ(w[1], 0.0);
  EXPECT_DOUBLE_EQ(w[2], 0.5);
}

TEST(JlwkiTest, OrthonormalColumnsAtMidRangeScoreOne) {
  const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1.0), hi = Eigen::VectorXd::Constant(2, 1.0);
  EXPECT_NEAR(jlwki(j, Eigen::VectorXd::Zero(2), lo, hi), 1.0, 1e-12);
  // A rotated orthonormal pair is just as isotropic.
  Eigen::MatrixXd r(2, 2);
  r << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
  EXPECT_NEAR(jlwki(r, Eigen::VectorXd::Zero(2), lo, hi), 1.0, 1e-12);
}

TEST(JlwkiTest, JointAtLimitScoresZero) {
  const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1.0), hi = Eigen::VectorXd::Constant(2, 1.0);
  Eigen::VectorXd q(2);
  q << 1.0, 0.0;
  EXPECT_EQ(jlwki(j, q, lo, hi), 0.0);
}

TEST(JlwkiTest, SingularJacobianScoresZero) {
  Eigen::MatrixXd j(2, 2);
  j << 1.0, 2.0, 1.0, 2.0;
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1.0), hi = Eigen::VectorXd::Constant(2, 1.0);
  EXPECT_EQ(jlwki(j, Eigen::VectorXd::Zero(2), lo, hi), 0.0);
  // Rank-deficient up to round-off still counts as singular.
  SeededRng rng(3);
  Eigen::MatrixXd a(6, 5), b(5, 7);
  for (int r = 0; r < a.size(); ++r) a.data()[r] = rng.normal();
  for (int r = 0; r < b.size(); ++r) b.data()[r] = rng.normal();
  EXPECT_EQ(jlwki(a * b, Eigen::VectorXd::Zero(7), Eigen::VectorXd::Constant(7, -1.0), Eigen::VectorXd::Constant(7, 1.0)),
            0.0);
}

TEST(JlwkiTest, StaysInUnitIntervalOnRandomMatrices) {
  SeededRng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd j(6, 7);
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 7; ++c) j(r, c) = rng.normal();
    }
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(7, -2.0), hi = Eigen::VectorXd::Constant(7, 2.0);
    Eigen::VectorXd q(7);
    for (int i = 0; i < 7; ++i) q[i] = rng.uniform(-2.0, 2.0);
    const double s = jlwki(j, q, lo, hi);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(JlwkiTest, RejectsMismatchedSizes) {
  EXPECT_THROW(jlwki(Eigen::MatrixXd::Identity(2, 3), Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2),
                     Eigen::VectorXd::Ones(2)),
               ParameterError);
}

TEST(BetterTest, ReachedGoalsDominate) {
  PlacementCandidate a, b;
  a.reached_goals = 3;
  a.jlwki_sum = 0.1;
  b.reached_goals = 2;
  b.jlwki_sum = 1.9;
  EXPECT_TRUE(better(a, b));
  EXPECT_FALSE(better(b, a));
}

TEST(BetterTest, JlwkiBreaksTies) {
  PlacementCandidate a, b;
  a.reached_goals = b.reached_goals = 3;
  a.jlwki_sum = 2.1;
  b.jlwki_sum = 1.7;
  EXPECT_TRUE(better(a, b));
  EXPECT_FALSE(better(b, a));
}

PlacementProblem reach_problem(const robots::RobotModel& robot) {
  PlacementProblem p;
  p.robot = &robot;
  const robots::ArmInfo& arm = robot.tool_arm_info();
  p.link = arm.end_effector;
  p.active_dofs.assign(arm.dofs.begin(), arm.dofs.end());
  p.seed_q = Eigen::VectorXd::Zero(robot.body.dof());
  for (int i = 0; i < robots::kArmDof; ++i) p.seed_q[arm.dofs[i]] = arm.park[i];
  p.goals = {Transform::from_translation(Vec3(0.0, 0.0, 0.8)), Transform::from_translation(Vec3(0.1, 0.1, 0.9))};
  p.centroid = Vec3(0.05, 0.05, 0.85);
  return p;
}

TEST(OptimizeBasePoseTest, FixedSeedReplaysIdentically) {
  const robots::RobotModel robot = robots::load_robot("jaco");
  const PlacementProblem p = reach_problem(robot);
  PlacementOptions o;
  o.samples = 12;
  o.base_height = 0.4;
  SeededRng r1(5), r2(5);
  const PlacementResult a = optimize_base_pose(p, r1, o);
  const PlacementResult b = optimize_base_pose(p, r2, o);
  EXPECT_EQ(a.best_index, b.best_index);
  EXPECT_EQ(a.best.pose.x, b.best.pose.x);
  EXPECT_EQ(a.best.pose.y, b.best.pose.y);
  EXPECT_EQ(a.best.pose.yaw, b.best.pose.yaw);
  EXPECT_TRUE(a.reached);
}

TEST(OptimizeBasePoseTest, WorkerCountDoesNotChangeSelection) {
  const robots::RobotModel robot = robots::load_robot("jaco");
  const PlacementProblem p = reach_problem(robot);
  PlacementOptions o;
  o.samples = 12;
  o.base_height = 0.4;
  SeededRng r1(9), r2(9);
  const PlacementResult a = optimize_base_pose(p, r1, o);
  o.workers = 4;
  const PlacementResult b = optimize_base_pose(p, r2, o);
  ASSERT_EQ(a.candidates.size(), b.candidates.size());
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    EXPECT_EQ(a.candidates[i].reached_goals, b.candidates[i].reached_goals);
    EXPECT_EQ(a.candidates[i].jlwki_sum, b.candidates[i].jlwki_sum);
  }
  EXPECT_EQ(a.best_index, b.best_index);
}

// The selected candidate is at least as good as every other evaluated one.
TEST(OptimizeBasePoseTest, SelectionIsLexicographicMaximum) {
  const robots::RobotModel robot = robots::load_robot("jaco");
  const PlacementProblem p = reach_problem(robot);
  PlacementOptions o;
  o.samples = 16;
  o.base_height = 0.4;
  SeededRng rng(11);
  const PlacementResult r = optimize_base_pose(p, rng, o);
  for (const PlacementCandidate& c : r.candidates) EXPECT_FALSE(better(c, r.best));
}

TEST(OptimizeBasePoseTest, RejectsBadProblems) {
  const robots::RobotModel robot = robots::load_robot("jaco");
  PlacementProblem p = reach_problem(robot);
  SeededRng rng(1);
  PlacementOptions o;
  o.samples = 0;
  EXPECT_THROW(optimize_base_pose(p, rng, o), ParameterError);
  p.goals.clear();
  EXPECT_THROW(optimize_base_pose(p, rng), ParameterError);
}

}  // namespace
}  // namespace adl::placement
