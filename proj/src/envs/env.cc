#include "adl/envs/env.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "adl/core/error.h"
#include "adl/kinematics/collision.h"
#include "adl/kinematics/ik.h"
#include "adl/placement/placement.h"

namespace adl::envs {
namespace {

constexpr double kRobotCompliance = 0.2;
constexpr double kHumanCompliance = 0.8;
constexpr int kFeedingParticles = 8;
constexpr int kDrinkingParticles = 16;
constexpr double kRingCaptureRadius = 0.08;
constexpr double kTorsoReach = 0.20;  // arm manipulation success radius
constexpr double kItchStandoff = 0.12;
const Vec3 kArmStartOffset(0.16, -0.05, -0.03);  // in front of the hanging forearm
constexpr double kItchClearance = 0.09;

// Task shaping coefficients.
constexpr double kCaptureBonus = 10.0;
constexpr double kWipeBonus = 5.0;
constexpr double kRubBonusPerMetre = 200.0;  // 2 per cm
constexpr double kRingProgressGain = 10.0;
constexpr double kRingAlignGain = 0.1;
constexpr double kTiltBonus = 0.5;
constexpr double kTiltBonusRadius = 0.1;
constexpr double kLiftGain = 5.0;

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

Transform frame_from_axes(const Vec3& x_axis, const Vec3& z_axis, const Vec3& origin) {
  Vec3 z = z_axis.normalized();
  Vec3 x = x_axis - x_axis.dot(z) * z;
  if (x.norm() < 1e-6) x = z.unitOrthogonal();
  x.normalize();
  Mat3 r;
  r.col(0) = x;
  r.col(1) = z.cross(x);
  r.col(2) = z;
  return {Quat(r), origin};
}

void append(Eigen::VectorXd& out, int& k, const Vec3& v) {
  out.segment<3>(k) = v;
  k += 3;
}

}  // namespace

std::string to_string(HumanMode m) { return m == HumanMode::kActive ? "active" : "static"; }

HumanMode human_mode_from_string(const std::string& s) {
  if (s == "static") return HumanMode::kStatic;
  if (s == "active") return HumanMode::kActive;
  throw ParameterError("unknown human mode '" + s + "' (expected static or active)");
}

EnvSpec EnvSpec::make(Task task, const std::string& robot, HumanMode human) {
  EnvSpec s;
  s.task = task;
  s.robot = robot;
  s.human = human;
  return s;
}

std::string EnvSpec::id() const { return to_string(task) + "/" + robot + "/" + to_string(human); }

namespace {

std::vector<std::string> task_point_names(Task task) {
  switch (task) {
    case Task::kScratchItch: return {"itch_target", "right_shoulder", "right_elbow", "right_wrist"};
    case Task::kBedBathing: return {"right_shoulder", "right_elbow", "right_wrist"};
    case Task::kFeeding:
    case Task::kDrinking: return {"mouth"};
    case Task::kDressing: return {"left_hand_tip", "left_wrist", "left_elbow", "left_shoulder"};
    case Task::kArmManipulation: return {"right_wrist", "right_elbow", "right_shoulder", "chest"};
  }
  return {};
}

bool has_head_pose(Task task) { return task == Task::kFeeding || task == Task::kDrinking; }

int human_chain_size(Task task) {
  return has_head_pose(task) ? human::kHeadJoints : human::kArmJoints;
}

}  // namespace

std::vector<ObservationField> robot_observation_layout(const EnvSpec& spec) {
  const robots::RobotModel robot = robots::load_robot(spec.robot);
  std::vector<ObservationField> f = {{"tool_position", 3},
                                     {"tool_orientation_wxyz", 4},
                                     {"arm_joint_positions", robot.action_dim()},
                                     {"tool_force", 3}};
  for (const auto& n : task_point_names(spec.task)) f.push_back({n, 3});
  if (has_head_pose(spec.task)) f.push_back({"head_pose_xyz_wxyz", 7});
  return f;
}

std::vector<ObservationField> human_observation_layout(const EnvSpec& spec) {
  return {{has_head_pose(spec.task) ? "head_joint_positions" : "arm_joint_positions", human_chain_size(spec.task)},
          {"tool_position_in_pelvis_frame", 3}};
}

AssistiveEnv::AssistiveEnv(EnvSpec spec) : spec_(std::move(spec)) {
  if (spec_.episode_length <= 0) throw ParameterError("episode_length must be positive");
  if (spec_.placement_samples <= 0) throw ParameterError("placement_samples must be positive");
  if (!spec_.world_origin.allFinite()) throw ParameterError("world_origin must be finite");
  robot_ = robots::load_robot(spec_.robot);
  tool_ = robots::make_tool(robots::tool_for_task(spec_.task));
  tool_link_ = robots::attach_tool(robot_, tool_);
  robot_body_ = std::make_shared<const kin::ArticulatedBody>(robot_.body);
  base_humans_ = {human::generate_human(human::Sex::kMale), human::generate_human(human::Sex::kFemale)};
  if (!spec_.pose_predicate.empty()) file_predicate_ = human::predicate_from_file(spec_.pose_predicate);
  if (spec_.fixed_limitation && !spec_.fixed_limitation->valid()) {
    throw ParameterError("fixed limitation profile out of range");
  }
  layout_ = make_layout(spec_.task, spec_.world_origin);
  prefs_ = spec_.preferences.value_or(reward::default_preferences(spec_.task));
  human_ = std::make_shared<const human::HumanModel>(base_humans_[0]);
}

std::unique_ptr<Environment> AssistiveEnv::clone() const { return std::make_unique<AssistiveEnv>(spec_); }

std::unique_ptr<Environment> make_environment(const EnvSpec& spec) { return std::make_unique<AssistiveEnv>(spec); }

int AssistiveEnv::observation_dim(int agent) const {
  if (agent == 0) {
    int n = 3 + 4 + robot_.action_dim() + 3 + 3 * static_cast<int>(task_point_names(spec_.task).size());
    if (has_head_pose(spec_.task)) n += 7;
    return n;
  }
  if (agent == 1 && spec_.human == HumanMode::kActive) return human_chain_size(spec_.task) + 3;
  throw ParameterError("observation_dim: no agent " + std::to_string(agent));
}

int AssistiveEnv::action_dim(int agent) const {
  if (agent == 0) return robot_.action_dim();
  if (agent == 1 && spec_.human == HumanMode::kActive) return human_chain_size(spec_.task);
  throw ParameterError("action_dim: no agent " + std::to_string(agent));
}

std::vector<int> AssistiveEnv::human_chain() const {
  const human::HumanModel& h = *human_;
  if (has_head_pose(spec_.task)) return {h.head_dofs.begin(), h.head_dofs.end()};
  const auto& arm = h.arm(spec_.task != Task::kDressing);
  return {arm.dofs.begin(), arm.dofs.end()};
}

std::vector<Transform> AssistiveEnv::human_frames() const {
  const kin::BodyState& b = state_.scene.bodies.at(1);
  return kin::forward_kinematics(*b.model, b.base, b.q);
}

std::vector<Transform> AssistiveEnv::robot_frames() const {
  const kin::BodyState& b = state_.scene.bodies.at(0);
  return kin::forward_kinematics(*b.model, b.base, b.q);
}

Transform AssistiveEnv::tool_frame() const { return robot_frames()[tool_link_]; }

Vec3 AssistiveEnv::tool_tip() const { return tool_frame().apply(tool_.tip); }

Vec3 AssistiveEnv::mouth() const { return human_frames()[human_->mouth].translation(); }

ArmAxis AssistiveEnv::arm_axis(bool right) const {
  const auto frames = human_frames();
  const auto& arm = human_->arm(right);
  ArmAxis a;
  a.shoulder = frames[arm.shoulder_frame].translation();
  a.elbow = frames[arm.elbow_frame].translation();
  a.wrist = frames[arm.wrist_frame].translation();
  a.hand_tip = frames[arm.hand].apply(Vec3(0, 0, -arm.hand_length));
  return a;
}

std::vector<Vec3> AssistiveEnv::force_targets() const {
  switch (spec_.task) {
    case Task::kScratchItch: {
      const auto frames = human_frames();
      return {frames[state_.itch.link].apply(state_.itch.local)};
    }
    case Task::kFeeding:
    case Task::kDrinking: return {mouth()};
    case Task::kBedBathing: {
      const auto frames = human_frames();
      std::vector<Vec3> out;
      out.reserve(state_.markers.markers.size());
      for (const auto& m : state_.markers.markers) out.push_back(marker_position(m, frames));
      return out;
    }
    case Task::kDressing: {
      const ArmAxis a = arm_axis(false);
      return {a.hand_tip, a.wrist, 0.5 * (a.wrist + a.elbow), a.elbow};
    }
    case Task::kArmManipulation: {
      const ArmAxis a = arm_axis(true);
      return {a.wrist, 0.5 * (a.wrist + a.elbow), a.elbow};
    }
  }
  return {};
}

double AssistiveEnv::arm_lift_potential() const {
  const auto frames = human_frames();
  const ArmAxis a = arm_axis(true);
  double phi = 0.0;
  for (const Vec3& p : {a.wrist, a.elbow}) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : human_->body.link(human_->chest).capsules) {
      d = std::min(d, kin::point_capsule_distance(p, kin::transformed(frames[human_->chest], c)));
    }
    phi += std::max(0.0, d - kTorsoReach) + std::max(0.0, layout_.support_z - p.z());
  }
  return phi;
}

bool AssistiveEnv::task_success() const {
  switch (spec_.task) {
    case Task::kScratchItch: return state_.itch.rub >= kItchSuccessRub;
    case Task::kBedBathing: {
      const auto n = static_cast<double>(state_.markers.markers.size());
      return n > 0 && state_.markers.wiped_count() >= kBathSuccessFraction * n;
    }
    case Task::kFeeding: {
      const ParticleCounts c = state_.particles.counts();
      const double n = c.total();
      return n > 0 && c.captured >= kFeedCaptureFraction * n && c.spilled_on_person <= kFeedSpillFraction * n;
    }
    case Task::kDrinking: {
      const ParticleCounts c = state_.particles.counts();
      return c.total() > 0 && c.captured >= kDrinkCaptureFraction * c.total();
    }
    case Task::kDressing: return state_.ring.s >= human_->left_arm.forearm_length;
    case Task::kArmManipulation: return arm_lift_potential() == 0.0;
  }
  return false;
}

Vec3 AssistiveEnv::nominal_start() const {
  const auto frames = human_frames();
  switch (spec_.task) {
    case Task::kScratchItch: {
      // First approach direction with room for the tool: along the surface
      // normal tilted up, straight up, outward, forward.
      const Vec3 p = frames[state_.itch.link].apply(state_.itch.local);
      const Vec3 n = frames[state_.itch.link].apply_vector(state_.itch.normal_local);
      const auto capsules = kin::world_capsules(state_.scene.bodies.at(1), frames);
      const std::array<Vec3, 4> dirs = {n + 0.8 * Vec3::UnitZ(), Vec3::UnitZ(), Vec3(0, -1, 0.5), Vec3(1, 0, 0.5)};
      for (const Vec3& d : dirs) {
        if (d.norm() < 1e-6) continue;
        const Vec3 start = p + kItchStandoff * d.normalized();
        bool clear = true;
        for (const auto& link : capsules) {
          for (const auto& c : link) clear = clear && kin::point_capsule_distance(start, c) >= kItchClearance;
        }
        if (clear) return start;
      }
      return p + kItchStandoff * Vec3::UnitZ();
    }
    case Task::kFeeding:
    case Task::kDrinking: return mouth() + Vec3(0.12, -0.12, -0.06);
    case Task::kBedBathing: {
      const ArmAxis a = arm_axis(true);
      return 0.5 * (a.wrist + a.elbow) + Vec3(0, 0, 0.12);
    }
    case Task::kDressing: {
      const ArmAxis a = arm_axis(false);
      return a.hand_tip + 0.05 * (a.hand_tip - a.wrist).normalized();
    }
    case Task::kArmManipulation: {
      const ArmAxis a = arm_axis(true);
      return 0.5 * (a.wrist + a.elbow) + kArmStartOffset;
    }
  }
  return Vec3::Zero();
}

Transform AssistiveEnv::start_orientation_target(const Vec3& tip, double heading) const {
  switch (spec_.task) {
    case Task::kFeeding:
    case Task::kDrinking: {
      Vec3 d = mouth() - tip;
      d.z() = 0.0;
      if (d.norm() < 1e-6) d = Vec3::UnitX();
      d = Eigen::AngleAxisd(heading, Vec3::UnitZ()) * d;
      // tool +x ("up" of spoon bowl / cup axis) along world z, tool +z toward the mouth.
      return frame_from_axes(Vec3::UnitZ(), d, tip);
    }
    default: return Transform::from_translation(tip);
  }
}

std::vector<Transform> AssistiveEnv::placement_goals() const {
  std::vector<Vec3> pts = {nominal_start()};
  switch (spec_.task) {
    case Task::kScratchItch: {
      const auto frames = human_frames();
      const Vec3 p = frames[state_.itch.link].apply(state_.itch.local);
      const Vec3 n = frames[state_.itch.link].apply_vector(state_.itch.normal_local);
      pts.push_back(p + 0.03 * n);
      break;
    }
    case Task::kFeeding:
    case Task::kDrinking: pts.push_back(mouth() + Vec3(0.04, 0, 0)); break;
    case Task::kBedBathing: {
      const ArmAxis a = arm_axis(true);
      pts.push_back(0.5 * (a.shoulder + a.elbow) + Vec3(0, 0, 0.08));
      pts.push_back(a.wrist + Vec3(0, 0, 0.08));
      break;
    }
    case Task::kDressing: {
      const ArmAxis a = arm_axis(false);
      pts.push_back(a.wrist + Vec3(0, 0, 0.07));
      pts.push_back(a.elbow + Vec3(0, 0, 0.07));
      break;
    }
    case Task::kArmManipulation: {
      const ArmAxis a = arm_axis(true);
      pts.push_back(a.wrist + kArmStartOffset);
      break;
    }
  }
  std::vector<Transform> goals;
  for (const Vec3& p : pts) goals.push_back(Transform::from_translation(p));
  return goals;
}

kin::Scene AssistiveEnv::scene_for_placement() const {
  kin::Scene s;
  s.bodies.push_back(state_.scene.bodies.at(1));
  s.fixtures = state_.scene.fixtures;
  s.params = state_.scene.params;
  return s;
}

std::vector<Eigen::VectorXd> AssistiveEnv::reset(std::uint64_t seed) {
  SeededRng rng(seed);
  state_ = EpisodeState{};
  state_.seed = seed;
  contacts_.clear();
  has_episode_ = false;

  // The person is drawn once; task randomization, base placement and the
  // perturbed tool start are re-drawn until a reachable, collision-free start
  // exists.
  SeededRng person_rng = rng.fork(1);
  state_.sex = spec_.fixed_sex.value_or(person_rng.bernoulli(0.5) ? human::Sex::kMale : human::Sex::kFemale);
  state_.limitation = spec_.fixed_limitation.value_or(human::sample_limitation(person_rng));
  const human::HumanModel& base = base_humans_[state_.sex == human::Sex::kMale ? 0 : 1];
  human_ = std::make_shared<const human::HumanModel>(human::apply_limitation(base, state_.limitation));

  bool ok = false;
  for (int attempt = 0; attempt < kResetAttempts && !ok; ++attempt) {
    state_.reset_attempts = attempt + 1;
    SeededRng attempt_rng = rng.fork(100 + static_cast<std::uint64_t>(attempt));
    ok = try_start(attempt_rng);
  }
  if (!ok) {
    throw ResetError("reset: no reachable collision-free tool start for " + spec_.id() + " after " +
                     std::to_string(kResetAttempts) + " attempts");
  }
  has_episode_ = true;
  return observations();
}

bool AssistiveEnv::try_start(SeededRng& rng) {
  const human::HumanModel& h = *human_;
  const human::HumanModel& base = base_humans_[state_.sex == human::Sex::kMale ? 0 : 1];
  SeededRng task_rng = rng.fork(2);
  state_.human_target = resting_pose(h, spec_.task, task_rng);

  kin::Scene& scene = state_.scene;
  scene = kin::Scene{};
  scene.params.dt = kControlDt;
  kin::BodyState robot;
  robot.name = robot_.name;
  robot.model = robot_body_;
  robot.q = Eigen::VectorXd::Zero(robot_.body.dof());
  for (const auto& arm : robot_.arms) {
    for (int i = 0; i < robots::kArmDof; ++i) robot.q[arm.dofs[i]] = arm.park[i];
  }
  robot.q = robot_.body.clamp(robot.q);
  robot.compliance = kRobotCompliance;
  kin::BodyState person;
  person.name = "human";
  person.model = std::shared_ptr<const kin::ArticulatedBody>(human_, &human_->body);
  person.base = layout_.human_root;
  person.q = state_.human_target;
  person.compliance = kHumanCompliance;
  scene.bodies = {robot, person};
  scene.fixtures = layout_.fixtures;
  for (auto [a, b] : h.self_pairs) scene.self_pairs.push_back({1, a, b});
  for (bool right : {true, false}) {
    const auto& arm = h.arm(right);
    const human::PoseValidityPredicate pred =
        file_predicate_ ? *file_predicate_ : human::default_pose_predicate(base, right);
    scene.validity.push_back({1, {arm.dofs.begin(), arm.dofs.end()}, pred.function()});
  }

  // Task state on the person.
  const auto frames = human_frames();
  switch (spec_.task) {
    case Task::kScratchItch: {
      // Uniform over the lateral surface of the right upper arm and forearm.
      const std::array<int, 2> links = {h.right_arm.upper_arm, h.right_arm.forearm};
      std::array<double, 2> area{};
      for (int i = 0; i < 2; ++i) {
        const auto& c = h.body.link(links[i]).capsules.at(0);
        area[i] = 2.0 * std::numbers::pi * c.radius * (c.b - c.a).norm();
      }
      const int pick = task_rng.uniform(0.0, area[0] + area[1]) < area[0] ? 0 : 1;
      const auto& c = h.body.link(links[pick]).capsules.at(0);
      const double t = task_rng.uniform(0.0, 1.0);
      const double ang = task_rng.uniform(0.0, 2.0 * std::numbers::pi);
      const Vec3 dir = (c.b - c.a).normalized();
      const Vec3 e1 = dir.unitOrthogonal();
      const Vec3 e2 = dir.cross(e1);
      const Vec3 n = std::cos(ang) * e1 + std::sin(ang) * e2;
      state_.itch.link = links[pick];
      state_.itch.local = c.a + t * (c.b - c.a) + c.radius * n;
      state_.itch.normal_local = n;
      break;
    }
    case Task::kBedBathing: {
      const std::array<int, 2> links = {h.right_arm.upper_arm, h.right_arm.forearm};
      state_.markers = make_markers(h.body, links);
      break;
    }
    case Task::kDressing:
      state_.ring = SleeveRing{};
      state_.ring.capture_radius = kRingCaptureRadius;
      break;
    default: break;
  }

  // Robot base.
  const robots::MountPlan plan = robots::mount_robot(robot_, spec_.task, layout_.sockets);
  state_.mount = plan.kind;
  state_.start_nominal = nominal_start();
  Transform base_pose = plan.base;
  std::optional<Eigen::VectorXd> nominal_q;
  if (plan.optimize) {
    placement::PlacementProblem problem;
    problem.robot = &robot_;
    problem.link = tool_link_;
    problem.point = tool_.tip;
    const auto& arm = robot_.tool_arm_info();
    problem.active_dofs.assign(arm.dofs.begin(), arm.dofs.end());
    problem.seed_q = scene.bodies[0].q;
    problem.goals = placement_goals();
    Vec3 centroid = Vec3::Zero();
    for (const auto& g : problem.goals) centroid += g.translation();
    problem.centroid = centroid / static_cast<double>(problem.goals.size());
    problem.obstacles = scene_for_placement();
    placement::PlacementOptions opt;
    opt.samples = spec_.placement_samples;
    opt.base_height = plan.kind == robots::MountKind::kNightstand ? plan.base.translation().z()
                                                                  : layout_.floor_z;
    SeededRng place_rng = rng.fork(3);
    const placement::PlacementResult result = placement::optimize_base_pose(problem, place_rng, opt);
    base_pose = result.best.pose.transform(opt.base_height);
    nominal_q = result.best.ik_solutions.front();  // goal 0 is the nominal start
  }
  scene.bodies[0].base = base_pose;

  // Tool start: perturbed nominal position; containers stay level and may
  // face any of several headings.
  SeededRng start_rng = rng.fork(4);
  kin::IkOptions ik;
  ik.max_restarts = 5;
  ik.position_tolerance = 0.002;
  ik.point = tool_.tip;
  const bool level = spec_.task == Task::kFeeding || spec_.task == Task::kDrinking;
  ik.orientation_weight = level ? 0.5 : 0.0;
  ik.orientation_tolerance = 10.0 * std::numbers::pi / 180.0;
  const auto& arm = robot_.tool_arm_info();
  ik.active_dofs.assign(arm.dofs.begin(), arm.dofs.end());
  placement::PlacementProblem check;
  check.robot = &robot_;
  check.obstacles = scene_for_placement();
  const Eigen::VectorXd ik_seed = nominal_q.value_or(scene.bodies[0].q);
  Vec3 offset;
  for (int i = 0; i < 3; ++i) offset[i] = start_rng.uniform(-kStartPerturbation, kStartPerturbation);
  const Vec3 goal = state_.start_nominal + offset;
  const std::vector<double> headings = level ? std::vector<double>{0.0, 45.0, -45.0, 90.0, -90.0, 135.0, -135.0, 180.0}
                                             : std::vector<double>{0.0};
  bool ok = false;
  for (double heading : headings) {
    const auto sol = kin::solve_ik(robot_.body, base_pose, tool_link_,
                                   start_orientation_target(goal, heading * std::numbers::pi / 180.0), ik_seed,
                                   start_rng, ik);
    if (!sol) continue;
    const Vec3 tip = kin::forward_kinematics(robot_.body, base_pose, sol->q)[tool_link_].apply(tool_.tip);
    const Vec3 realized = tip - state_.start_nominal;
    if (realized.cwiseAbs().maxCoeff() > kStartPerturbation) continue;
    if (!placement::collision_free(check, base_pose, sol->q)) continue;
    scene.bodies[0].q = sol->q;
    state_.start_offset = realized;
    ok = true;
    break;
  }
  if (!ok) return false;

  // Containers, velocities, potentials.
  const Transform tool = tool_frame();
  if (spec_.task == Task::kFeeding) {
    state_.particles = make_particles(Container::kSpoon, kFeedingParticles, tool_.tip, tool_.up, tool);
  } else if (spec_.task == Task::kDrinking) {
    state_.particles = make_particles(Container::kCup, kDrinkingParticles, tool_.tip, tool_.up, tool);
  }
  const auto rframes = robot_frames();
  state_.ee_prev.clear();
  for (const auto& a : robot_.arms) state_.ee_prev.push_back(rframes[a.end_effector].translation());
  state_.tip_prev = tool.apply(tool_.tip);
  state_.progress_prev = spec_.task == Task::kArmManipulation ? arm_lift_potential() : 0.0;
  state_.t = 0;
  state_.done = false;
  return true;
}

Transition AssistiveEnv::step(const std::vector<Eigen::VectorXd>& actions) {
  if (!has_episode_) throw StepError("step before reset");
  if (state_.done) throw StepError("episode finished");
  if (static_cast<int>(actions.size()) != agent_count()) {
    throw StepError("expected " + std::to_string(agent_count()) + " action vectors");
  }
  for (int a = 0; a < agent_count(); ++a) {
    if (actions[a].size() != action_dim(a)) {
      throw StepError("action " + std::to_string(a) + " has size " + std::to_string(actions[a].size()) +
                      ", expected " + std::to_string(action_dim(a)));
    }
    if (!finite(actions[a])) throw StepError("action contains a non-finite value");
  }
  const human::HumanModel& h = *human_;
  const std::vector<int> chain = human_chain();
  const bool passive_arm = spec_.task == Task::kArmManipulation && spec_.human == HumanMode::kStatic;

  // Robot position deltas.
  const Eigen::VectorXd ar = actions[0].cwiseMax(-1.0).cwiseMin(1.0);
  Eigen::VectorXd robot_cmd = Eigen::VectorXd::Zero(robot_.body.dof());
  const std::vector<int> dofs = robot_.action_dofs();
  for (std::size_t i = 0; i < dofs.size(); ++i) robot_cmd[dofs[i]] = kRobotActionScale * ar[i];

  // Person: resting target, policy deltas, tremor, passive arm.
  const Eigen::VectorXd& qh = state_.scene.bodies[1].q;
  if (spec_.human == HumanMode::kActive) {
    const Eigen::VectorXd ah = actions[1].cwiseMax(-1.0).cwiseMin(1.0);
    for (std::size_t i = 0; i < chain.size(); ++i) state_.human_target[chain[i]] += kHumanActionScale * ah[i];
    state_.human_target = h.body.clamp(state_.human_target);
  }
  Eigen::VectorXd target = state_.human_target;
  if (state_.limitation.kind == human::LimitationKind::kTremor) {
    for (int k : chain) {
      target[k] = human::tremor_offset(state_.human_target[k], state_.limitation.tremor_amplitude, state_.t);
    }
    target = h.body.clamp(target);
  }
  if (passive_arm) {
    for (int k : h.right_arm.dofs) target[k] = qh[k];
  }
  std::vector<int> all(h.body.dof());
  for (int k = 0; k < h.body.dof(); ++k) all[k] = k;
  const Eigen::VectorXd human_cmd = human::hold_command(qh, target, all);

  kin::StepOutput out = kin::step_quasistatic(state_.scene, {robot_cmd, human_cmd});
  state_.scene = std::move(out.scene);
  contacts_ = std::move(out.contacts);
  if (passive_arm) {
    for (int k : h.right_arm.dofs) state_.human_target[k] = state_.scene.bodies[1].q[k];
  }

  // Contacts between the robot and the person.
  std::vector<reward::HumanContact> touches;
  double tool_force = 0.0;
  bool tool_touch = false;
  for (const auto& c : contacts_) {
    const bool robot_a = c.body_a == 0, robot_b = c.body_b == 0;
    const bool human_a = c.body_a == 1, human_b = c.body_b == 1;
    if (!((robot_a && human_b) || (robot_b && human_a))) continue;
    touches.push_back({c.point, c.force, c.area});
    const int robot_link = robot_a ? c.link_a : c.link_b;
    if (robot_link == tool_link_) {
      tool_force += c.force;
      tool_touch = true;
    }
  }

  const auto rframes = robot_frames();
  const auto hframes = human_frames();
  const Transform tool = rframes[tool_link_];
  const Vec3 tip = tool.apply(tool_.tip);
  StepInfo info;
  double task_reward = 0.0;
  reward::CostInputs ci;
  ci.contacts = touches;
  ci.targets = force_targets();

  switch (spec_.task) {
    case Task::kFeeding:
    case Task::kDrinking: {
      ParticleContext ctx;
      ctx.container = spec_.task == Task::kFeeding ? Container::kSpoon : Container::kCup;
      ctx.tool = tool;
      ctx.tool_up = tool_.up;
      ctx.spout = tool_.tip;
      ctx.tool_velocity = (tip - state_.tip_prev) / kControlDt;
      ctx.mouth = hframes[h.mouth].translation();
      for (const auto& link : kin::world_capsules(state_.scene.bodies[1], hframes)) {
        ctx.human.insert(ctx.human.end(), link.begin(), link.end());
      }
      ctx.floor_z = layout_.floor_z;
      ctx.dt = kControlDt;
      const ParticleEvents ev = update_particles(state_.particles, ctx);
      info.captured = ev.captured;
      info.spilled = ev.spilled;
      info.spilled_on_person = ev.spilled_on_person;
      ci.spilled_on_person = ev.spilled_on_person;
      ci.captured_speeds = ev.captured_speeds;
      const double dist = (tip - ctx.mouth).norm();
      task_reward = -dist + kCaptureBonus * ev.captured;
      if (spec_.task == Task::kDrinking && dist < kTiltBonusRadius) {
        const double tilt = container_tilt(tool, tool_.up);
        task_reward += kTiltBonus * std::min(tilt, std::numbers::pi / 2) / (std::numbers::pi / 2);
      }
      break;
    }
    case Task::kBedBathing: {
      std::vector<kin::Capsule> tool_caps;
      for (const auto& c : robot_.body.link(tool_link_).capsules) tool_caps.push_back(kin::transformed(tool, c));
      info.markers_new = wipe_markers(state_.markers, hframes, tool_caps, tool_touch);
      double nearest = 0.0;
      bool any = false;
      for (const auto& m : state_.markers.markers) {
        if (m.wiped) continue;
        const double d = (marker_position(m, hframes) - tip).norm();
        nearest = any ? std::min(nearest, d) : d;
        any = true;
      }
      task_reward = -nearest + kWipeBonus * info.markers_new;
      break;
    }
    case Task::kScratchItch: {
      const Vec3 target_w = hframes[state_.itch.link].apply(state_.itch.local);
      const Vec3 normal_w = hframes[state_.itch.link].apply_vector(state_.itch.normal_local);
      const double inc = update_itch(state_.itch, target_w, normal_w, state_.tip_prev, tip, tool_force);
      task_reward = -(tip - target_w).norm() + kRubBonusPerMetre * inc;
      break;
    }
    case Task::kDressing: {
      const double ds = update_ring(state_.ring, arm_axis(false), tip);
      info.ring_advance = ds;
      ci.ring_force = state_.ring.force;
      const double align = std::max(0.0, 1.0 - state_.ring.radial / state_.ring.capture_radius);
      task_reward = kRingProgressGain * ds + kRingAlignGain * align;
      break;
    }
    case Task::kArmManipulation: {
      const ArmAxis a = arm_axis(true);
      double reach = 0.0;
      for (int i = 0; i < robot_.arm_count(); ++i) {
        const Vec3 p = i == robot_.tool_arm ? tip : rframes[robot_.arms[i].end_effector].translation();
        reach += (kin::closest_point_on_segment(a.wrist, a.elbow, p) - p).norm();
      }
      const double phi = arm_lift_potential();
      task_reward = -reach + kLiftGain * (state_.progress_prev - phi);
      state_.progress_prev = phi;
      break;
    }
  }

  // End-effector velocities; single-arm robots report the same arm twice.
  std::vector<Vec3> vel(robot_.arm_count());
  for (int i = 0; i < robot_.arm_count(); ++i) {
    const Vec3 p = rframes[robot_.arms[i].end_effector].translation();
    vel[i] = (p - state_.ee_prev[i]) / kControlDt;
    state_.ee_prev[i] = p;
  }
  if (robot_.arm_count() == 1) {
    ci.v_left = ci.v_right = vel[0];
  } else {
    for (int i = 0; i < robot_.arm_count(); ++i) (robot_.arms[i].name == "left" ? ci.v_left : ci.v_right) = vel[i];
  }

  Transition tr;
  tr.reward = reward::compose(task_reward, reward::compute_costs(ci), prefs_);
  state_.tip_prev = tip;
  ++state_.t;
  const bool success = task_success();
  state_.done = state_.t >= spec_.episode_length || (spec_.task == Task::kArmManipulation && success);
  info.t = state_.t;
  info.success = success;
  info.particles = state_.particles.counts();
  info.markers_wiped = state_.markers.wiped_count();
  info.markers_total = static_cast<int>(state_.markers.markers.size());
  info.ring_s = state_.ring.s;
  info.ring_force = state_.ring.force;
  info.rub = state_.itch.rub;
  info.tool_force = tool_force;
  info.contacts = static_cast<int>(touches.size());
  tr.info = info;
  tr.done = state_.done;
  tr.truncated = state_.done && !(spec_.task == Task::kArmManipulation && success);
  tr.observations = observations();
  return tr;
}

std::vector<Eigen::VectorXd> AssistiveEnv::observations() const {
  std::vector<Eigen::VectorXd> out = {robot_observation()};
  if (spec_.human == HumanMode::kActive) out.push_back(human_observation());
  return out;
}

Eigen::VectorXd AssistiveEnv::robot_observation() const {
  const auto rframes = robot_frames();
  const auto hframes = human_frames();
  const Transform inv = state_.scene.bodies[0].base.inverse();
  const Transform tool = rframes[tool_link_];
  Eigen::VectorXd o(observation_dim(0));
  int k = 0;
  append(o, k, inv.apply(tool.apply(tool_.tip)));
  const Quat qt = normalized(inv.rotation() * tool.rotation());
  o.segment<4>(k) << qt.w(), qt.x(), qt.y(), qt.z();
  k += 4;
  for (int d : robot_.action_dofs()) o[k++] = state_.scene.bodies[0].q[d];
  Vec3 force = Vec3::Zero();
  for (const auto& c : contacts_) {
    if (c.body_a == 0 && c.link_a == tool_link_) force += c.force * c.normal;
    if (c.body_b == 0 && c.link_b == tool_link_) force -= c.force * c.normal;
  }
  append(o, k, inv.apply_vector(force));
  const human::HumanModel& h = *human_;
  auto arm_pt = [&](bool right, int which) {
    const auto& arm = h.arm(right);
    switch (which) {
      case 0: return hframes[arm.shoulder_frame].translation();
      case 1: return hframes[arm.elbow_frame].translation();
      case 2: return hframes[arm.wrist_frame].translation();
      default: return Vec3(hframes[arm.hand].apply(Vec3(0, 0, -arm.hand_length)));
    }
  };
  for (const std::string& n : task_point_names(spec_.task)) {
    Vec3 p;
    if (n == "itch_target") p = hframes[state_.itch.link].apply(state_.itch.local);
    else if (n == "mouth") p = hframes[h.mouth].translation();
    else if (n == "chest") p = hframes[h.chest].translation();
    else {
      const bool right = n.rfind("right_", 0) == 0;
      const std::string part = n.substr(right ? 6 : 5);
      p = arm_pt(right, part == "shoulder" ? 0 : part == "elbow" ? 1 : part == "wrist" ? 2 : 3);
    }
    append(o, k, inv.apply(p));
  }
  if (has_head_pose(spec_.task)) {
    const Transform head = inv * hframes[h.head];
    append(o, k, head.translation());
    const Quat qh = normalized(head.rotation());
    o.segment<4>(k) << qh.w(), qh.x(), qh.y(), qh.z();
    k += 4;
  }
  return o;
}

Eigen::VectorXd AssistiveEnv::human_observation() const {
  const std::vector<int> chain = human_chain();
  Eigen::VectorXd o(static_cast<int>(chain.size()) + 3);
  for (std::size_t i = 0; i < chain.size(); ++i) o[i] = state_.scene.bodies[1].q[chain[i]];
  const Transform pelvis = human_frames()[human_->pelvis];
  o.tail<3>() = pelvis.inverse().apply(tool_tip());
  return o;
}

}  // namespace adl::envs
