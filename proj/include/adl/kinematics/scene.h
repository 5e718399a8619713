#ifndef ADL_KINEMATICS_SCENE_H_
#define ADL_KINEMATICS_SCENE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adl/core/transform.h"
#include "adl/kinematics/body.h"
#include "adl/kinematics/collision.h"

namespace adl::kin {

// Pure predicate over a subset of a body's joint positions.
using PosePredicate = std::function<bool(std::span<const double>)>;

struct BodyState {
  std::string name;
  std::shared_ptr<const ArticulatedBody> model;
  Transform base;
  Eigen::VectorXd q;
  // Share of contact correction this body absorbs; 0 makes it immovable.
  double compliance = 1.0;
};

// Static world capsule (furniture).
struct Fixture {
  std::string name;
  Capsule capsule;
  std::uint32_t group = group::kFurniture;
  std::uint32_t mask = group::kAll;
};

struct SelfCollisionPair {
  int body = 0;
  int link_a = 0;
  int link_b = 0;
};

// After every sub-step the listed dofs must satisfy `predicate`; otherwise
// they roll back to their value at the start of the sub-step.
struct ValidityConstraint {
  int body = 0;
  std::vector<int> dofs;
  PosePredicate predicate;
};

struct ContactParams {
  double stiffness = 5000.0;     // N/m
  double tolerance = 0.001;      // max penetration left after a step, m
  double dt = 0.1;               // control period, s
  int substeps = 10;
  int resolve_iterations = 30;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
};

struct Scene {
  std::vector<BodyState> bodies;
  std::vector<Fixture> fixtures;
  std::vector<SelfCollisionPair> self_pairs;
  std::vector<ValidityConstraint> validity;
  ContactParams params;
  std::int64_t step = 0;
};

// Body index used for fixtures in contact reports.
inline constexpr int kFixtureBody = -1;

struct ContactReport {
  int body_a = 0;
  int link_a = 0;
  int capsule_a = 0;
  int body_b = 0;  // kFixtureBody for furniture; link_b is then the fixture index
  int link_b = 0;
  int capsule_b = 0;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // from b toward a
  double distance = 0.0;        // surface distance at the end of the step
  double penetration = 0.0;     // max(0, -distance) at the end of the step
  double depth = 0.0;           // deepest commanded overlap during the step
  double force = 0.0;           // stiffness * depth, N
  double area = 0.0;            // pi * r * depth, m^2
};

struct StepOutput {
  Scene scene;
  std::vector<ContactReport> contacts;
};

// Moves every body toward q + command[b] under velocity and strength limits,
// resolves penetrations by joint-space projection, and reports contacts.
// Throws StepError on non-finite or mis-sized commands; `scene` is unchanged.
StepOutput step_quasistatic(const Scene& scene, const std::vector<Eigen::VectorXd>& commands);

// Fraction of full speed a joint can move given its torque cap and the
// gravity torque on its subtree: min(1, max_torque / load).
Eigen::VectorXd strength_scale(const ArticulatedBody& body, const std::vector<Transform>& frames,
                               const Vec3& gravity);

// All capsule pairs within `margin` of touching, measured at the scene's
// current configuration. depth/force/area are zero.
std::vector<ContactReport> detect_contacts(const Scene& scene, double margin);

// Most negative surface distance among colliding pairs (0 if none overlap).
double max_penetration(const Scene& scene);

// World-frame capsules of a body, indexed [link][capsule].
std::vector<std::vector<Capsule>> world_capsules(const BodyState& body, const std::vector<Transform>& frames);

}  // namespace adl::kin

#endif  // ADL_KINEMATICS_SCENE_H_
