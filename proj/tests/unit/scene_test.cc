// Tests for the quasi-static contact stepper.

#include "adl/kinematics/scene.h"

#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "adl/core/error.h"
#include "kin_fixtures.h"

namespace adl::kin {
namespace {

// A sphere of radius 0.05 sliding along x, 0.5 m/s top speed.
std::shared_ptr<const ArticulatedBody> slider() {
  std::vector<Link> links;
  links.push_back(testing::link("base", -1, Transform::identity(), JointSpec{}, 0.0));
  links.push_back(testing::link("puck", 0, Transform::identity(), testing::prismatic("x", Vec3::UnitX(), -1, 1, 0.5)));
  links.back().capsules.push_back({Vec3::Zero(), Vec3::Zero(), 0.05});
  return std::make_shared<const ArticulatedBody>("slider", std::move(links));
}

Scene wall_scene(double start_x) {
  Scene s;
  BodyState b;
  b.name = "slider";
  b.model = slider();
  b.q = Eigen::VectorXd::Constant(1, start_x);
  s.bodies.push_back(b);
  s.fixtures.push_back({"wall", {Vec3(0.3, -1, 0), Vec3(0.3, 1, 0), 0.05}});
  return s;
}

TEST(QuasiStaticTest, FreeMotionRespectsVelocityLimit) {
  Scene s = wall_scene(-0.5);
  const StepOutput out = step_quasistatic(s, {Eigen::VectorXd::Constant(1, -0.3)});
  // 0.5 m/s over 0.1 s.
  EXPECT_NEAR(out.scene.bodies[0].q[0], -0.55, 1e-12);
  EXPECT_TRUE(out.contacts.empty());
  EXPECT_EQ(out.scene.step, 1);
  EXPECT_EQ(s.step, 0);
}

TEST(QuasiStaticTest, ReachesSmallTargetsExactly) {
  Scene s = wall_scene(0.0);
  const StepOutput out = step_quasistatic(s, {Eigen::VectorXd::Constant(1, 0.01)});
  EXPECT_NEAR(out.scene.bodies[0].q[0], 0.01, 1e-12);
}

TEST(QuasiStaticTest, PushingIntoWallStopsWithBoundedPenetration) {
  Scene s = wall_scene(0.1);
  double last_force = 0.0;
  for (int i = 0; i < 6; ++i) {
    const StepOutput out = step_quasistatic(s, {Eigen::VectorXd::Constant(1, 0.05)});
    s = out.scene;
    EXPECT_LE(max_penetration(s), s.params.tolerance);
    for (const ContactReport& c : out.contacts) {
      EXPECT_LE(c.penetration, s.params.tolerance);
      EXPECT_NEAR(c.force, s.params.stiffness * c.depth, 1e-9);
      last_force = c.force;
    }
  }
  // Surfaces meet at x = 0.2.
  EXPECT_NEAR(s.bodies[0].q[0], 0.2, s.params.tolerance);
  EXPECT_GT(last_force, 0.0);
  ASSERT_EQ(detect_contacts(s, 0.01).size(), 1u);
  const ContactReport c = detect_contacts(s, 0.01)[0];
  EXPECT_EQ(c.body_b, kFixtureBody);
  EXPECT_NEAR(c.normal.x(), -1.0, 1e-9);
}

TEST(QuasiStaticTest, ZeroCommandHoldsStill) {
  Scene s = wall_scene(0.0);
  const StepOutput out = step_quasistatic(s, {Eigen::VectorXd()});
  EXPECT_EQ(out.scene.bodies[0].q, s.bodies[0].q);
}

TEST(QuasiStaticTest, RejectsBadCommandsWithoutMutation) {
  Scene s = wall_scene(0.0);
  EXPECT_THROW(step_quasistatic(s, {}), StepError);
  EXPECT_THROW(step_quasistatic(s, {Eigen::VectorXd::Zero(2)}), StepError);
  EXPECT_THROW(step_quasistatic(s, {Eigen::VectorXd::Constant(1, std::nan(""))}), StepError);
  EXPECT_EQ(s.step, 0);
}

TEST(QuasiStaticTest, ValidityConstraintRollsBack) {
  Scene s = wall_scene(0.0);
  s.validity.push_back({0, {0}, [](std::span<const double> q) { return q[0] < 0.02; }});
  const StepOutput out = step_quasistatic(s, {Eigen::VectorXd::Constant(1, 0.05)});
  EXPECT_LT(out.scene.bodies[0].q[0], 0.02);
  EXPECT_GT(out.scene.bodies[0].q[0], 0.01);
}

TEST(QuasiStaticTest, DeterministicAcrossRuns) {
  Scene a = wall_scene(0.1), b = wall_scene(0.1);
  for (int i = 0; i < 5; ++i) {
    a = step_quasistatic(a, {Eigen::VectorXd::Constant(1, 0.04)}).scene;
    b = step_quasistatic(b, {Eigen::VectorXd::Constant(1, 0.04)}).scene;
  }
  EXPECT_EQ(a.bodies[0].q, b.bodies[0].q);
}

TEST(StrengthScaleTest, WeakShoulderSlowsUnderGravity) {
  ArticulatedBody arm = testing::planar_arm(0.4, 0.3);
  // Rotate the plane to vertical so gravity loads the joints: axis y.
  std::vector<Link> links = arm.links();
  links[1].joint.axis = Vec3::UnitY();
  links[2].joint.axis = Vec3::UnitY();
  links[1].joint.max_torque = 1.0;
  ArticulatedBody vertical("vertical", links);
  const auto frames = forward_kinematics(vertical, Eigen::VectorXd::Zero(2));
  const Eigen::VectorXd s = strength_scale(vertical, frames, Vec3(0, 0, -9.81));
  // Load on joint 1: g * (1 kg * 0.2 m + 1 kg * 0.55 m) = 7.3575 N*m.
  EXPECT_NEAR(s[0], 1.0 / (9.81 * 0.75), 1e-12);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
}

TEST(SceneCollisionTest, MaskFiltersPairs) {
  Scene s = wall_scene(0.2);
  s.fixtures[0].mask = group::kHuman;  // wall ignores robots
  EXPECT_TRUE(detect_contacts(s, 0.01).empty());
}

}  // namespace
}  // namespace adl::kin
