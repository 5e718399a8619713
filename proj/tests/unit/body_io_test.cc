// Tests for body description files.

#include "adl/kinematics/body_io.h"

#include <gtest/gtest.h>

#include "adl/core/error.h"
#include "kin_fixtures.h"

namespace adl::kin {
namespace {

TEST(BodyIoTest, RoundTripsThroughJson) {
  ArticulatedBody body = testing::spatial_arm();
  body.add_capsule(2, {Vec3(0, 0, 0), Vec3(0.1, 0, 0), 0.03});
  body.set_link_collision(2, group::kTool, group::kHuman);
  const ArticulatedBody back = body_from_json(body_to_json(body));
  ASSERT_EQ(back.link_count(), body.link_count());
  ASSERT_EQ(back.dof(), body.dof());
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(body.dof(), 0.15);
  const auto fa = forward_kinematics(body, q);
  const auto fb = forward_kinematics(back, q);
  for (int l = 0; l < body.link_count(); ++l) {
    EXPECT_TRUE(fa[l].translation().isApprox(fb[l].translation(), 1e-12));
    EXPECT_LT(angular_distance(fa[l].rotation(), fb[l].rotation()), 1e-12);
  }
  EXPECT_EQ(back.link(2).group, group::kTool);
  EXPECT_EQ(back.link(2).capsules.size(), 1u);
}

TEST(BodyIoTest, RejectsUnknownParentAndType) {
  nlohmann::json j = body_to_json(testing::planar_arm(0.4, 0.3));
  j["links"][2]["parent"] = "ghost";
  EXPECT_THROW(body_from_json(j), LoadError);
  j = body_to_json(testing::planar_arm(0.4, 0.3));
  j["links"][1]["joint"]["type"] = "ball";
  EXPECT_THROW(body_from_json(j), LoadError);
}

TEST(BodyIoTest, ShippedRobotFilesLoad) {
  for (const char* name : {"jaco", "pr2", "baxter", "sawyer"}) {
    const ArticulatedBody b = load_body_file(data_dir() / "bodies" / (std::string(name) + ".json"));
    EXPECT_GE(b.dof(), 7) << name;
  }
  EXPECT_THROW(load_body_file(data_dir() / "bodies" / "missing.json"), LoadError);
}

TEST(BodyIoTest, GroupNamesRoundTrip) {
  for (std::uint32_t g : {group::kRobot, group::kTool, group::kHumanArm, group::kFurniture}) {
    EXPECT_EQ(group_from_name(group_name(g)), g);
  }
}

}  // namespace
}  // namespace adl::kin
