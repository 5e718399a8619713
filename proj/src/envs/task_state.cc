#include "adl/envs/task_state.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "adl/core/error.h"
#include "adl/kinematics/collision.h"

namespace adl::envs {
namespace {

constexpr double kOnPersonDistance = 0.15;

double nearest_human_distance(const Vec3& p, const std::vector<kin::Capsule>& human) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : human) best = std::min(best, kin::point_capsule_distance(p, c));
  return best;
}

bool in_sphere(const Vec3& p, const Vec3& c, double r) { return (p - c).squaredNorm() <= r * r; }

}  // namespace

std::string to_string(ParticleState s) {
  switch (s) {
    case ParticleState::kHeld: return "held";
    case ParticleState::kAirborne: return "airborne";
    case ParticleState::kCaptured: return "captured";
    case ParticleState::kSpilled: return "spilled";
  }
  return "held";
}

ParticleCounts ParticleSet::counts() const {
  ParticleCounts c;
  for (const auto& p : particles) {
    switch (p.state) {
      case ParticleState::kHeld: ++c.held; break;
      case ParticleState::kAirborne: ++c.airborne; break;
      case ParticleState::kCaptured: ++c.captured; break;
      case ParticleState::kSpilled:
        ++c.spilled;
        if (p.on_person) ++c.spilled_on_person;
        break;
    }
  }
  return c;
}

double container_tilt(const Transform& tool, const Vec3& tool_up) {
  const Vec3 up = tool.apply_vector(tool_up).normalized();
  return std::acos(std::clamp(up.z(), -1.0, 1.0));
}

ParticleSet make_particles(Container container, int count, const Vec3& tip, const Vec3& up,
                           const Transform& tool) {
  if (count < 0) throw ParameterError("make_particles: negative count");
  ParticleSet set;
  const Vec3 u = up.normalized();
  // Two in-plane axes perpendicular to `up`.
  Vec3 e1 = u.unitOrthogonal();
  Vec3 e2 = u.cross(e1);
  for (int i = 0; i < count; ++i) {
    Particle p;
    if (container == Container::kSpoon) {
      const double ang = 2.0 * std::numbers::pi * i / std::max(count, 1);
      p.offset = tip + 0.008 * (std::cos(ang) * e1 + std::sin(ang) * e2) + 0.006 * u;
    } else {
      // Column inside the cup below the rim, four per layer.
      const int layer = i / 4;
      const double ang = std::numbers::pi * 0.5 * (i % 4) + 0.25 * layer;
      p.offset = 0.015 * (std::cos(ang) * e1 + std::sin(ang) * e2) + (0.012 + 0.01 * layer) * u;
    }
    p.position = tool.apply(p.offset);
    set.particles.push_back(p);
  }
  return set;
}

ParticleEvents update_particles(ParticleSet& set, const ParticleContext& ctx) {
  if (ctx.substeps <= 0 || !(ctx.dt > 0.0)) throw ParameterError("update_particles: bad time step");
  ParticleEvents ev;
  const double tilt = container_tilt(ctx.tool, ctx.tool_up);

  // Held particles follow the container; the mouth can take them directly.
  for (auto& p : set.particles) {
    if (p.state != ParticleState::kHeld) continue;
    p.position = ctx.tool.apply(p.offset);
    p.velocity = ctx.tool_velocity;
    if (in_sphere(p.position, ctx.mouth, ctx.mouth_radius)) {
      p.state = ParticleState::kCaptured;
      ++ev.captured;
      ev.captured_speeds.push_back(ctx.tool_velocity.norm());
    }
  }

  // Release.
  if (tilt > kSpillTilt) {
    int release = std::numeric_limits<int>::max();
    if (ctx.container == Container::kCup) {
      release = static_cast<int>(std::ceil((tilt - kSpillTilt) / kPourStep));
    }
    for (auto& p : set.particles) {
      if (release <= 0) break;
      if (p.state != ParticleState::kHeld) continue;
      p.state = ParticleState::kAirborne;
      if (ctx.container == Container::kCup) p.position = ctx.tool.apply(ctx.spout);
      --release;
    }
  }

  // Ballistic flight.
  const double h = ctx.dt / ctx.substeps;
  for (auto& p : set.particles) {
    if (p.state != ParticleState::kAirborne) continue;
    for (int k = 0; k < ctx.substeps && p.state == ParticleState::kAirborne; ++k) {
      p.velocity += h * ctx.gravity;
      p.position += h * p.velocity;
      if (in_sphere(p.position, ctx.mouth, ctx.mouth_radius)) {
        p.state = ParticleState::kCaptured;
        ++ev.captured;
        ev.captured_speeds.push_back(p.velocity.norm());
      } else if (nearest_human_distance(p.position, ctx.human) <= set.radius) {
        p.state = ParticleState::kSpilled;
        p.on_person = true;
      } else if (p.position.z() <= ctx.floor_z) {
        p.state = ParticleState::kSpilled;
        p.on_person = nearest_human_distance(p.position, ctx.human) <= kOnPersonDistance;
      }
      if (p.state == ParticleState::kSpilled) {
        ++ev.spilled;
        if (p.on_person) ++ev.spilled_on_person;
      }
    }
  }
  return ev;
}

int WipeMarkerField::wiped_count() const {
  return static_cast<int>(std::count_if(markers.begin(), markers.end(), [](const WipeMarker& m) { return m.wiped; }));
}

WipeMarkerField make_markers(const kin::ArticulatedBody& body, std::span<const int> links, double spacing) {
  if (!(spacing > 0.0)) throw ParameterError("make_markers: spacing must be positive");
  WipeMarkerField field;
  for (int link : links) {
    for (const auto& c : body.link(link).capsules) {
      const Vec3 axis = c.b - c.a;
      const double len = axis.norm();
      const Vec3 dir = len > 1e-12 ? Vec3(axis / len) : Vec3::UnitZ();
      const Vec3 e1 = dir.unitOrthogonal();
      const Vec3 e2 = dir.cross(e1);
      const int along = std::max(1, static_cast<int>(std::floor(len / spacing)) + 1);
      const int around = std::max(3, static_cast<int>(std::round(2.0 * std::numbers::pi * c.radius / spacing)));
      for (int i = 0; i < along; ++i) {
        const double t = along == 1 ? 0.5 : static_cast<double>(i) / (along - 1);
        for (int j = 0; j < around; ++j) {
          const double ang = 2.0 * std::numbers::pi * j / around;
          WipeMarker m;
          m.link = link;
          m.local = c.a + t * axis + c.radius * (std::cos(ang) * e1 + std::sin(ang) * e2);
          field.markers.push_back(m);
        }
      }
    }
  }
  return field;
}

Vec3 marker_position(const WipeMarker& m, const std::vector<Transform>& frames) {
  return frames.at(m.link).apply(m.local);
}

int wipe_markers(WipeMarkerField& field, const std::vector<Transform>& human_frames,
                 const std::vector<kin::Capsule>& tool_capsules, bool tool_in_contact) {
  if (!tool_in_contact) return 0;
  int fresh = 0;
  for (auto& m : field.markers) {
    if (m.wiped) continue;
    const Vec3 p = marker_position(m, human_frames);
    for (const auto& c : tool_capsules) {
      if (kin::point_capsule_distance(p, c) <= kWipeDistance) {
        m.wiped = true;
        ++fresh;
        break;
      }
    }
  }
  return fresh;
}

std::pair<double, double> project_on_arm(const ArmAxis& axis, const Vec3& p) {
  // Polyline hand_tip -> wrist -> elbow -> shoulder with s = 0 at the wrist.
  const std::array<Vec3, 4> pts = {axis.hand_tip, axis.wrist, axis.elbow, axis.shoulder};
  double s0 = -(axis.wrist - axis.hand_tip).norm();
  double best_d = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3 a = pts[i], b = pts[i + 1];
    const double len = (b - a).norm();
    const Vec3 c = kin::closest_point_on_segment(a, b, p);
    const double d = (p - c).norm();
    if (d < best_d) {
      best_d = d;
      best_s = s0 + (c - a).norm();
    }
    s0 += len;
  }
  return {best_s, best_d};
}

double update_ring(SleeveRing& ring, const ArmAxis& axis, const Vec3& grasp) {
  const double length = axis.length();
  auto [s_proj, radial] = project_on_arm(axis, grasp);
  ring.radial = radial;
  const double before = ring.s;
  if (radial <= ring.capture_radius) {
    ring.s = std::clamp(std::max(ring.s, s_proj), 0.0, length);
    ring.force = 0.0;
  } else {
    ring.force = ring.stiffness * (radial - ring.capture_radius);
  }
  if (s_proj > length) ring.force += ring.stiffness * (s_proj - length);
  return ring.s - before;
}

double update_itch(ItchState& itch, const Vec3& target, const Vec3& normal, const Vec3& tip_prev,
                   const Vec3& tip_now, double tool_force) {
  if ((tip_now - target).norm() > kItchRadius) return 0.0;
  if (!(tool_force > 0.0 && tool_force <= kItchMaxForce)) return 0.0;
  const Vec3 n = normal.normalized();
  Vec3 move = tip_now - tip_prev;
  move -= move.dot(n) * n;
  const double inc = move.norm();
  itch.rub += inc;
  return inc;
}

}  // namespace adl::envs
