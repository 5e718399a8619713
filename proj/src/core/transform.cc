#include "adl/core/transform.h"

#include <algorithm>
#include <cmath>

namespace adl {

Transform::Transform(const Quat& rotation, const Vec3& translation)
    : rotation_(normalized(rotation)), translation_(translation) {}

Transform Transform::from_xyz_rpy(const Vec3& xyz, const Vec3& rpy) {
  const Quat q = Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
                 Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                 Eigen::AngleAxisd(rpy.x(), Vec3::UnitX());
  return {q, xyz};
}

Transform Transform::inverse() const {
  const Quat inv = rotation_.conjugate();
  return {inv, -(inv * translation_)};
}

Transform Transform::operator*(const Transform& rhs) const {
  return {rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_};
}

Quat normalized(const Quat& q) {
  const double n = q.norm();
  if (n == 0.0 || !std::isfinite(n)) return Quat::Identity();
  Quat out(q.w() / n, q.x() / n, q.y() / n, q.z() / n);
  if (out.w() < 0.0) out.coeffs() = -out.coeffs();
  return out;
}

Quat quat_from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) return Quat::Identity();
  return Quat(Eigen::AngleAxisd(angle, axis / n));
}

Vec3 rotation_error(const Quat& from, const Quat& to) {
  Quat d = to * from.conjugate();
  if (d.w() < 0.0) d.coeffs() = -d.coeffs();
  const Vec3 v = d.vec();
  const double s = v.norm();
  if (s < 1e-12) return 2.0 * v;
  const double angle = 2.0 * std::atan2(s, d.w());
  return v * (angle / s);
}

double angular_distance(const Quat& a, const Quat& b) {
  const double d = std::clamp(std::abs(a.dot(b)) / (a.norm() * b.norm()), 0.0, 1.0);
  return 2.0 * std::acos(d);
}

}  // namespace adl
