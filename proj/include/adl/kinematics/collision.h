#ifndef ADL_KINEMATICS_COLLISION_H_
#define ADL_KINEMATICS_COLLISION_H_

#include "adl/core/transform.h"
#include "adl/kinematics/body.h"

namespace adl::kin {

struct SegmentClosest {
  double s = 0.0;  // parameter on segment 1, [0, 1]
  double t = 0.0;  // parameter on segment 2, [0, 1]
  Vec3 p1 = Vec3::Zero();
  Vec3 p2 = Vec3::Zero();
  double distance_sq = 0.0;
};

SegmentClosest closest_points_segments(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1);

// Closest point on segment [a, b] to p.
Vec3 closest_point_on_segment(const Vec3& a, const Vec3& b, const Vec3& p);

struct CapsuleDistance {
  // Surface distance; negative means penetration.
  double distance = 0.0;
  // Closest points on the two axes.
  Vec3 axis_a = Vec3::Zero();
  Vec3 axis_b = Vec3::Zero();
  // Closest points on the two surfaces (equal to the axis points pushed out
  // along the normal by the radii).
  Vec3 surface_a = Vec3::Zero();
  Vec3 surface_b = Vec3::Zero();
  // Unit vector from b toward a.
  Vec3 normal = Vec3::UnitZ();
};

CapsuleDistance capsule_distance(const Capsule& a, const Capsule& b);

inline Capsule transformed(const Transform& t, const Capsule& c) {
  return {t.apply(c.a), t.apply(c.b), c.radius};
}

// Signed distance from a point to a capsule surface.
double point_capsule_distance(const Vec3& p, const Capsule& c);

}  // namespace adl::kin

#endif  // ADL_KINEMATICS_COLLISION_H_
