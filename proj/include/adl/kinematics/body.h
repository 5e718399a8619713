#ifndef ADL_KINEMATICS_BODY_H_
#define ADL_KINEMATICS_BODY_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "adl/core/transform.h"

namespace adl::kin {

enum class JointType { kFixed, kRevolute, kPrismatic };

// Collision groups. Two capsules on different bodies collide when each
// one's group is in the other's mask.
namespace group {
inline constexpr std::uint32_t kRobot = 1u << 0;
inline constexpr std::uint32_t kTool = 1u << 1;
inline constexpr std::uint32_t kHumanTrunk = 1u << 2;
inline constexpr std::uint32_t kHumanArm = 1u << 3;
inline constexpr std::uint32_t kHumanHead = 1u << 4;
inline constexpr std::uint32_t kHumanLeg = 1u << 5;
inline constexpr std::uint32_t kFurniture = 1u << 6;
inline constexpr std::uint32_t kAll = 0xFFFFFFFFu;
inline constexpr std::uint32_t kHuman = kHumanTrunk | kHumanArm | kHumanHead | kHumanLeg;
}  // namespace group

// Segment with radius, endpoints in the owning frame.
struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 0.0;
};

struct JointSpec {
  std::string name;
  JointType type = JointType::kFixed;
  Vec3 axis = Vec3::UnitZ();
  double lower = 0.0;
  double upper = 0.0;
  double max_torque = 1.0;    // N*m (N for prismatic)
  double max_velocity = 1.0;  // rad/s (m/s for prismatic)
};

// A link and the joint that connects it to its parent. The joint frame sits
// at `origin` in the parent link frame; the link frame is the joint frame
// after the joint motion.
struct Link {
  std::string name;
  int parent = -1;
  Transform origin;
  JointSpec joint;
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  std::vector<Capsule> capsules;
  std::uint32_t group = group::kRobot;
  std::uint32_t mask = group::kAll;
};

// Joint/link tree. Links are stored parents-first with link 0 as the single
// root; q holds one entry per non-fixed joint, in link order.
class ArticulatedBody {
 public:
  ArticulatedBody() = default;
  ArticulatedBody(std::string name, std::vector<Link> links);

  const std::string& name() const { return name_; }
  int link_count() const { return static_cast<int>(links_.size()); }
  int dof() const { return static_cast<int>(dof_links_.size()); }

  const Link& link(int i) const { return links_.at(i); }
  const std::vector<Link>& links() const { return links_; }
  // -1 when absent.
  int find_link(std::string_view name) const;
  int find_dof(std::string_view joint_name) const;
  int link_index(std::string_view name) const;  // throws ParameterError
  int dof_index(std::string_view joint_name) const;  // throws ParameterError

  // dof index of a link's joint, -1 for fixed joints.
  int dof_of_link(int link) const { return link_dofs_.at(link); }
  int link_of_dof(int dof) const { return dof_links_.at(dof); }
  const JointSpec& joint(int dof) const { return links_[dof_links_.at(dof)].joint; }

  bool is_ancestor_or_self(int ancestor, int link) const;
  // dof indices on the path root -> link.
  std::vector<int> chain_dofs(int link) const;

  Eigen::VectorXd lower_limits() const;
  Eigen::VectorXd upper_limits() const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& q) const;
  bool within_limits(const Eigen::VectorXd& q, double tol = 0.0) const;

  void set_limits(int dof, double lower, double upper);
  void set_max_torque(int dof, double torque);
  void set_link_collision(int link, std::uint32_t group, std::uint32_t mask);
  void add_capsule(int link, const Capsule& c);
  // Appends a fixed child link; returns its index.
  int add_fixed_link(const std::string& name, int parent, const Transform& origin, double mass,
                     const Vec3& com, std::vector<Capsule> capsules, std::uint32_t group);

 private:
  void index();

  std::string name_;
  std::vector<Link> links_;
  std::vector<int> link_dofs_;
  std::vector<int> dof_links_;
};

using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

// World transform of every link; root placed at `base`.
std::vector<Transform> forward_kinematics(const ArticulatedBody& body, const Transform& base,
                                          const Eigen::VectorXd& q);
std::vector<Transform> forward_kinematics(const ArticulatedBody& body, const Eigen::VectorXd& q);

// Geometric Jacobian of a point fixed in `link` (linear rows first, then
// angular), one column per dof.
Jacobian jacobian(const ArticulatedBody& body, const Transform& base, const Eigen::VectorXd& q,
                  int link, const Vec3& point_in_link = Vec3::Zero());
Jacobian jacobian(const ArticulatedBody& body, const Eigen::VectorXd& q, int link);

// Same as above from precomputed link frames; `point` is in world frame.
Eigen::Matrix<double, 3, Eigen::Dynamic> point_jacobian(const ArticulatedBody& body,
                                                        const std::vector<Transform>& frames,
                                                        int link, const Vec3& point);

}  // namespace adl::kin

#endif  // ADL_KINEMATICS_BODY_H_
