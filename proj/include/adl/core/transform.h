#ifndef ADL_CORE_TRANSFORM_H_
#define ADL_CORE_TRANSFORM_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace adl {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

// Rigid transform: rotation followed by translation, p' = R p + t.
class Transform {
 public:
  Transform() : rotation_(Quat::Identity()), translation_(Vec3::Zero()) {}
  Transform(const Quat& rotation, const Vec3& translation);

  static Transform identity() { return {}; }
  static Transform from_translation(const Vec3& t) { return {Quat::Identity(), t}; }
  static Transform from_rotation(const Quat& q) { return {q, Vec3::Zero()}; }
  // Fixed-axis roll/pitch/yaw (URDF convention: R = Rz(yaw) Ry(pitch) Rx(roll)).
  static Transform from_xyz_rpy(const Vec3& xyz, const Vec3& rpy);

  const Quat& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat3 matrix() const { return rotation_.toRotationMatrix(); }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 apply_vector(const Vec3& v) const { return rotation_ * v; }

  Transform inverse() const;
  Transform operator*(const Transform& rhs) const;

 private:
  Quat rotation_;
  Vec3 translation_;
};

// Normalized copy with non-negative w; identity for a zero quaternion.
Quat normalized(const Quat& q);

Quat quat_from_axis_angle(const Vec3& axis, double angle);

// Rotation vector (axis * angle) taking `from` to `to`: to = exp(v) * from.
Vec3 rotation_error(const Quat& from, const Quat& to);

// Smallest angle (radians) between two orientations.
double angular_distance(const Quat& a, const Quat& b);

inline Vec3 transform_point(const Transform& t, const Vec3& p) { return t.apply(p); }

}  // namespace adl

#endif  // ADL_CORE_TRANSFORM_H_
