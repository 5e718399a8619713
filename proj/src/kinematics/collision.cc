#include "adl/kinematics/collision.h"

#include <algorithm>
#include <cmath>

namespace adl::kin {
namespace {

constexpr double kEps = 1e-14;

}  // namespace

Vec3 closest_point_on_segment(const Vec3& a, const Vec3& b, const Vec3& p) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= kEps) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

// Closest points between two segments, after Ericson, Real-Time Collision
// Detection, 5.1.9.
SegmentClosest closest_points_segments(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1) {
  const Vec3 d1 = a1 - a0;
  const Vec3 d2 = b1 - b0;
  const Vec3 r = a0 - b0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;

  if (a <= kEps && e <= kEps) {
    s = t = 0.0;
  } else if (a <= kEps) {
    s = 0.0;
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      t = 0.0;
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      // Parallel segments: any s works, pick 0 and let clamping fix t.
      s = denom > kEps * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  SegmentClosest out;
  out.s = s;
  out.t = t;
  out.p1 = a0 + d1 * s;
  out.p2 = b0 + d2 * t;
  out.distance_sq = (out.p1 - out.p2).squaredNorm();
  return out;
}

CapsuleDistance capsule_distance(const Capsule& a, const Capsule& b) {
  const SegmentClosest c = closest_points_segments(a.a, a.b, b.a, b.b);
  CapsuleDistance out;
  const double d = std::sqrt(c.distance_sq);
  out.axis_a = c.p1;
  out.axis_b = c.p2;
  if (d > 1e-12) {
    out.normal = (c.p1 - c.p2) / d;
  } else {
    // Axes intersect: pick any direction orthogonal to the first axis.
    const Vec3 axis = a.b - a.a;
    Vec3 n = axis.cross(Vec3::UnitX());
    if (n.norm() < 1e-9) n = axis.cross(Vec3::UnitY());
    out.normal = n.norm() < 1e-12 ? Vec3::UnitZ() : Vec3(n.normalized());
  }
  out.distance = d - a.radius - b.radius;
  out.surface_a = c.p1 - out.normal * a.radius;
  out.surface_b = c.p2 + out.normal * b.radius;
  return out;
}

double point_capsule_distance(const Vec3& p, const Capsule& c) {
  return (p - closest_point_on_segment(c.a, c.b, p)).norm() - c.radius;
}

}  // namespace adl::kin
