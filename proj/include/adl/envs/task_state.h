#ifndef ADL_ENVS_TASK_STATE_H_
#define ADL_ENVS_TASK_STATE_H_

#include <span>
#include <string>
#include <vector>

#include "adl/core/transform.h"
#include "adl/kinematics/body.h"

namespace adl::envs {

// ---------------------------------------------------------------- particles

enum class ParticleState { kHeld, kAirborne, kCaptured, kSpilled };
std::string to_string(ParticleState s);

struct Particle {
  Vec3 offset = Vec3::Zero();  // position in the tool frame while held
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  ParticleState state = ParticleState::kHeld;
  bool on_person = false;  // only meaningful once spilled
};

struct ParticleCounts {
  int held = 0;
  int airborne = 0;
  int captured = 0;
  int spilled = 0;
  int spilled_on_person = 0;
  int total() const { return held + airborne + captured + spilled; }
};

struct ParticleSet {
  std::vector<Particle> particles;
  double radius = 0.005;
  ParticleCounts counts() const;
};

enum class Container { kSpoon, kCup };

struct ParticleContext {
  Container container = Container::kSpoon;
  Transform tool;              // tool frame after the step
  Vec3 tool_up = Vec3::UnitX();  // container "up" axis in the tool frame
  Vec3 spout = Vec3::Zero();     // pour point in the tool frame (cup)
  Vec3 tool_velocity = Vec3::Zero();
  Vec3 mouth = Vec3::Zero();
  double mouth_radius = 0.04;
  std::vector<kin::Capsule> human;  // world-frame human capsules
  double floor_z = 0.0;
  double dt = 0.1;
  int substeps = 10;
  Vec3 gravity = Vec3(0, 0, -9.81);
};

struct ParticleEvents {
  int captured = 0;
  int spilled = 0;
  int spilled_on_person = 0;
  std::vector<double> captured_speeds;
};

inline constexpr double kSpillTilt = 45.0 * 3.14159265358979323846 / 180.0;
inline constexpr double kPourStep = 15.0 * 3.14159265358979323846 / 180.0;

// Angle between the container's up axis and world up.
double container_tilt(const Transform& tool, const Vec3& tool_up);

// Spoon/cup particle lifecycle for one control step. Held particles follow
// the tool and are captured inside the mouth sphere. A spoon tipped past
// 45 deg drops everything; a cup tipped past 45 deg pours
// ceil((tilt - 45 deg) / 15 deg) particles per step from the spout.
// Airborne particles fly ballistically; they are captured in the mouth
// sphere, spill on the person when they touch a human capsule, and spill
// when they fall below the floor (on the person if within 15 cm of one).
// Transitions only run held -> airborne -> captured|spilled.
ParticleEvents update_particles(ParticleSet& set, const ParticleContext& ctx);

// Places particles in the tool frame: a compact cluster on the spoon bowl or
// a column inside the cup.
ParticleSet make_particles(Container container, int count, const Vec3& tip, const Vec3& up, const Transform& tool);

// ------------------------------------------------------------- wipe markers

struct WipeMarker {
  int link = 0;
  Vec3 local = Vec3::Zero();  // in the link frame, on the capsule surface
  bool wiped = false;
};

struct WipeMarkerField {
  std::vector<WipeMarker> markers;
  int wiped_count() const;
};

inline constexpr double kMarkerSpacing = 0.03;
inline constexpr double kWipeDistance = 0.015;

// Markers ~3 cm apart along and around every capsule of the listed links.
WipeMarkerField make_markers(const kin::ArticulatedBody& body, std::span<const int> links,
                             double spacing = kMarkerSpacing);

Vec3 marker_position(const WipeMarker& m, const std::vector<Transform>& frames);

// Marks markers within kWipeDistance of any tool capsule surface, provided
// the tool touches the person this step. Returns the number newly wiped.
int wipe_markers(WipeMarkerField& field, const std::vector<Transform>& human_frames,
                 const std::vector<kin::Capsule>& tool_capsules, bool tool_in_contact);

// ------------------------------------------------------------- sleeve ring

struct ArmAxis {
  Vec3 hand_tip = Vec3::Zero();
  Vec3 wrist = Vec3::Zero();
  Vec3 elbow = Vec3::Zero();
  Vec3 shoulder = Vec3::Zero();
  double forearm_length() const { return (elbow - wrist).norm(); }
  double length() const { return forearm_length() + (shoulder - elbow).norm(); }
};

struct SleeveRing {
  double s = 0.0;             // arc length from the wrist toward the shoulder
  double radial = 0.0;        // grasp-point distance from the arm axis, m
  double force = 0.0;         // constraint force on the arm, N
  double capture_radius = 0.08;
  double stiffness = 200.0;   // N/m beyond capture radius or past the shoulder
};

// Arc-length coordinate (negative over the hand) and radial distance of a
// point projected onto hand_tip -> wrist -> elbow -> shoulder.
std::pair<double, double> project_on_arm(const ArmAxis& axis, const Vec3& p);

// Advances the ring toward the grasp point when it is within the capture
// radius (s never decreases and never exceeds the arm length); otherwise the
// ring drags on the arm. Returns the advance this step.
double update_ring(SleeveRing& ring, const ArmAxis& axis, const Vec3& grasp);

// ---------------------------------------------------------------- itch rub

struct ItchState {
  int link = 0;
  Vec3 local = Vec3::Zero();   // target on the arm surface, link frame
  Vec3 normal_local = Vec3::UnitX();
  double rub = 0.0;            // accumulated lateral rub, m
};

inline constexpr double kItchRadius = 0.025;
inline constexpr double kItchMaxForce = 10.0;

// Lateral tip travel counts while the tip is within 2.5 cm of the target and
// the tool pushes on the person with force in (0, 10] N. Returns the
// increment.
double update_itch(ItchState& itch, const Vec3& target, const Vec3& normal, const Vec3& tip_prev,
                   const Vec3& tip_now, double tool_force);

}  // namespace adl::envs

#endif  // ADL_ENVS_TASK_STATE_H_
