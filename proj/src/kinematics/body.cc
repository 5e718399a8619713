#include "adl/kinematics/body.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "adl/core/error.h"

namespace adl::kin {
namespace {

Transform joint_motion(const JointSpec& j, double q) {
  switch (j.type) {
    case JointType::kRevolute:
      return Transform::from_rotation(quat_from_axis_angle(j.axis, q));
    case JointType::kPrismatic:
      return Transform::from_translation(j.axis.normalized() * q);
    case JointType::kFixed:
      break;
  }
  return Transform::identity();
}

}  // namespace

ArticulatedBody::ArticulatedBody(std::string name, std::vector<Link> links)
    : name_(std::move(name)), links_(std::move(links)) {
  if (links_.empty()) throw ParameterError("body '" + name_ + "' has no links");
  if (links_[0].parent != -1) throw ParameterError("link 0 must be the root");
  if (links_[0].joint.type != JointType::kFixed) throw ParameterError("root link joint must be fixed");
  for (int i = 1; i < link_count(); ++i) {
    const Link& l = links_[i];
    if (l.parent < 0 || l.parent >= i) {
      throw ParameterError("link '" + l.name + "' must have an earlier parent (single-root tree)");
    }
    const JointSpec& j = l.joint;
    if (j.type != JointType::kFixed) {
      if (j.axis.norm() < 1e-12) throw ParameterError("joint '" + j.name + "' has a zero axis");
      if (!(j.lower <= j.upper)) throw ParameterError("joint '" + j.name + "' has lower > upper");
      if (!(j.max_torque > 0.0) || !(j.max_velocity > 0.0)) {
        throw ParameterError("joint '" + j.name + "' needs positive torque and velocity caps");
      }
    }
  }
  for (Link& l : links_) {
    if (l.joint.type != JointType::kFixed) l.joint.axis.normalize();
  }
  index();
}

void ArticulatedBody::index() {
  link_dofs_.assign(links_.size(), -1);
  dof_links_.clear();
  for (int i = 0; i < link_count(); ++i) {
    if (links_[i].joint.type != JointType::kFixed) {
      link_dofs_[i] = static_cast<int>(dof_links_.size());
      dof_links_.push_back(i);
    }
  }
}

int ArticulatedBody::find_link(std::string_view name) const {
  for (int i = 0; i < link_count(); ++i) {
    if (links_[i].name == name) return i;
  }
  return -1;
}

int ArticulatedBody::find_dof(std::string_view joint_name) const {
  for (int k = 0; k < dof(); ++k) {
    if (links_[dof_links_[k]].joint.name == joint_name) return k;
  }
  return -1;
}

int ArticulatedBody::link_index(std::string_view name) const {
  const int i = find_link(name);
  if (i < 0) throw ParameterError("unknown link '" + std::string(name) + "' in body '" + name_ + "'");
  return i;
}

int ArticulatedBody::dof_index(std::string_view joint_name) const {
  const int k = find_dof(joint_name);
  if (k < 0) {
    throw ParameterError("unknown joint '" + std::string(joint_name) + "' in body '" + name_ + "'");
  }
  return k;
}

bool ArticulatedBody::is_ancestor_or_self(int ancestor, int link) const {
  while (link > ancestor) link = links_[link].parent;
  return link == ancestor;
}

std::vector<int> ArticulatedBody::chain_dofs(int link) const {
  if (link < 0 || link >= link_count()) throw ParameterError("link index out of range");
  std::vector<int> out;
  for (int i = link; i >= 0; i = links_[i].parent) {
    if (link_dofs_[i] >= 0) out.push_back(link_dofs_[i]);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Eigen::VectorXd ArticulatedBody::lower_limits() const {
  Eigen::VectorXd v(dof());
  for (int k = 0; k < dof(); ++k) v[k] = joint(k).lower;
  return v;
}

Eigen::VectorXd ArticulatedBody::upper_limits() const {
  Eigen::VectorXd v(dof());
  for (int k = 0; k < dof(); ++k) v[k] = joint(k).upper;
  return v;
}

Eigen::VectorXd ArticulatedBody::clamp(const Eigen::VectorXd& q) const {
  Eigen::VectorXd out = q;
  for (int k = 0; k < dof(); ++k) out[k] = std::clamp(q[k], joint(k).lower, joint(k).upper);
  return out;
}

bool ArticulatedBody::within_limits(const Eigen::VectorXd& q, double tol) const {
  if (q.size() != dof()) return false;
  for (int k = 0; k < dof(); ++k) {
    if (q[k] < joint(k).lower - tol || q[k] > joint(k).upper + tol) return false;
  }
  return true;
}

void ArticulatedBody::set_limits(int dof, double lower, double upper) {
  if (!(lower <= upper)) throw ParameterError("set_limits: lower > upper");
  JointSpec& j = links_[dof_links_.at(dof)].joint;
  j.lower = lower;
  j.upper = upper;
}

void ArticulatedBody::set_max_torque(int dof, double torque) {
  if (!(torque > 0.0)) throw ParameterError("set_max_torque: torque must be positive");
  links_[dof_links_.at(dof)].joint.max_torque = torque;
}

void ArticulatedBody::set_link_collision(int link, std::uint32_t grp, std::uint32_t mask) {
  links_.at(link).group = grp;
  links_.at(link).mask = mask;
}

void ArticulatedBody::add_capsule(int link, const Capsule& c) { links_.at(link).capsules.push_back(c); }

int ArticulatedBody::add_fixed_link(const std::string& name, int parent, const Transform& origin,
                                    double mass, const Vec3& com, std::vector<Capsule> capsules,
                                    std::uint32_t grp) {
  if (parent < 0 || parent >= link_count()) throw ParameterError("add_fixed_link: bad parent");
  Link l;
  l.name = name;
  l.parent = parent;
  l.origin = origin;
  l.joint.name = name + "_fixed";
  l.mass = mass;
  l.com = com;
  l.capsules = std::move(capsules);
  l.group = grp;
  links_.push_back(std::move(l));
  index();
  return link_count() - 1;
}

std::vector<Transform> forward_kinematics(const ArticulatedBody& body, const Transform& base,
                                          const Eigen::VectorXd& q) {
  if (q.size() != body.dof()) {
    throw ParameterError("forward_kinematics: q has " + std::to_string(q.size()) +
                         " entries, body '" + body.name() + "' has " + std::to_string(body.dof()) +
                         " dofs");
  }
  std::vector<Transform> frames(body.link_count());
  for (int i = 0; i < body.link_count(); ++i) {
    const Link& l = body.link(i);
    const Transform& parent = i == 0 ? base : frames[l.parent];
    const int k = body.dof_of_link(i);
    frames[i] = k >= 0 ? parent * l.origin * joint_motion(l.joint, q[k]) : parent * l.origin;
  }
  return frames;
}

std::vector<Transform> forward_kinematics(const ArticulatedBody& body, const Eigen::VectorXd& q) {
  return forward_kinematics(body, Transform::identity(), q);
}

Eigen::Matrix<double, 3, Eigen::Dynamic> point_jacobian(const ArticulatedBody& body,
                                                        const std::vector<Transform>& frames,
                                                        int link, const Vec3& point) {
  Eigen::Matrix<double, 3, Eigen::Dynamic> j = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, body.dof());
  for (int i = link; i > 0; i = body.link(i).parent) {
    const int k = body.dof_of_link(i);
    if (k < 0) continue;
    const JointSpec& js = body.link(i).joint;
    // Joint motion is about/along the axis in the joint frame, which shares
    // its rotation-axis direction and origin with the post-motion link frame.
    const Vec3 axis = frames[i].rotation() * js.axis;
    if (js.type == JointType::kRevolute) {
      j.col(k) = axis.cross(point - frames[i].translation());
    } else {
      j.col(k) = axis;
    }
  }
  return j;
}

Jacobian jacobian(const ArticulatedBody& body, const Transform& base, const Eigen::VectorXd& q,
                  int link, const Vec3& point_in_link) {
  if (link < 0 || link >= body.link_count()) {
    throw ParameterError("jacobian: link id " + std::to_string(link) + " out of range");
  }
  const auto frames = forward_kinematics(body, base, q);
  const Vec3 p = frames[link].apply(point_in_link);
  Jacobian j = Jacobian::Zero(6, body.dof());
  j.topRows<3>() = point_jacobian(body, frames, link, p);
  for (int i = link; i > 0; i = body.link(i).parent) {
    const int k = body.dof_of_link(i);
    if (k < 0) continue;
    const JointSpec& js = body.link(i).joint;
    if (js.type == JointType::kRevolute) j.block<3, 1>(3, k) = frames[i].rotation() * js.axis;
  }
  return j;
}

Jacobian jacobian(const ArticulatedBody& body, const Eigen::VectorXd& q, int link) {
  return jacobian(body, Transform::identity(), q, link);
}

}  // namespace adl::kin
