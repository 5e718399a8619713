#ifndef ADL_ENVS_ENV_H_
#define ADL_ENVS_ENV_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adl/core/rng.h"
#include "adl/core/task.h"
#include "adl/envs/layout.h"
#include "adl/envs/task_state.h"
#include "adl/human/human.h"
#include "adl/human/limitation.h"
#include "adl/kinematics/scene.h"
#include "adl/reward/preference.h"
#include "adl/robots/robot.h"

namespace adl::envs {

inline constexpr int kEpisodeLength = 200;
inline constexpr double kControlDt = 0.1;
inline constexpr double kRobotActionScale = 0.05;   // rad per step at |a| = 1
inline constexpr double kHumanActionScale = 0.025;  // rad per step at |a| = 1
inline constexpr int kResetAttempts = 10;
inline constexpr double kStartPerturbation = 0.05;  // m per axis

// Success thresholds.
inline constexpr double kItchSuccessRub = 0.10;         // m of lateral rub
inline constexpr double kBathSuccessFraction = 0.60;    // markers wiped
inline constexpr double kFeedCaptureFraction = 0.75;    // particles in the mouth
inline constexpr double kFeedSpillFraction = 0.10;      // at most, on the person
inline constexpr double kDrinkCaptureFraction = 0.75;

// Per-step counters and success-so-far.
struct StepInfo {
  std::int64_t t = 0;
  bool success = false;
  ParticleCounts particles;
  int captured = 0;            // this step
  int spilled = 0;             // this step
  int spilled_on_person = 0;   // this step
  int markers_wiped = 0;       // total
  int markers_total = 0;
  int markers_new = 0;         // this step
  double ring_s = 0.0;
  double ring_advance = 0.0;   // this step
  double ring_force = 0.0;
  double rub = 0.0;            // total, m
  double tool_force = 0.0;     // tool-on-person force this step, N
  int contacts = 0;            // robot-person contacts this step
};

struct Transition {
  std::vector<Eigen::VectorXd> observations;  // one per agent
  reward::RewardBreakdown reward;             // shared by every agent
  bool done = false;
  // The episode ended only because of the step limit; learners may bootstrap
  // from the final observation.
  bool truncated = false;
  StepInfo info;
};

// Minimal episodic interface shared by the assistive environments and the
// toy reach task. Agent 0 is the robot; agent 1 (if any) the person.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::string id() const = 0;
  virtual int agent_count() const = 0;
  virtual int observation_dim(int agent) const = 0;
  virtual int action_dim(int agent) const = 0;
  virtual int episode_length() const = 0;
  virtual std::vector<Eigen::VectorXd> reset(std::uint64_t seed) = 0;
  // Throws StepError for NaN actions, wrong sizes, or a finished episode.
  virtual Transition step(const std::vector<Eigen::VectorXd>& actions) = 0;
  // Fresh instance with the same configuration.
  virtual std::unique_ptr<Environment> clone() const = 0;
};

enum class HumanMode { kStatic, kActive };
std::string to_string(HumanMode m);
HumanMode human_mode_from_string(const std::string& s);

struct EnvSpec {
  Task task = Task::kFeeding;
  std::string robot = "jaco";
  HumanMode human = HumanMode::kStatic;
  int episode_length = kEpisodeLength;
  Vec3 world_origin = Vec3::Zero();
  int placement_samples = 100;
  std::optional<reward::PreferenceConfig> preferences;  // task defaults when empty
  // Network container for the arm pose-validity predicate; the built-in rule
  // is used when empty.
  std::filesystem::path pose_predicate;
  // Test hooks: pin the sampled person instead of drawing it.
  std::optional<human::Sex> fixed_sex;
  std::optional<human::LimitationProfile> fixed_limitation;

  static EnvSpec make(Task task, const std::string& robot, HumanMode human = HumanMode::kStatic);
  std::string id() const;  // "<task>/<robot>/<static|active>"
};

// Ordered observation fields, for documentation and the wire protocol.
struct ObservationField {
  std::string name;
  int size = 0;
};
std::vector<ObservationField> robot_observation_layout(const EnvSpec& spec);
std::vector<ObservationField> human_observation_layout(const EnvSpec& spec);

// Everything that evolves during an episode. Bodies: 0 = robot, 1 = person.
struct EpisodeState {
  std::uint64_t seed = 0;
  kin::Scene scene;
  human::Sex sex = human::Sex::kMale;
  human::LimitationProfile limitation;
  Eigen::VectorXd human_target;  // q_bar
  robots::MountKind mount = robots::MountKind::kFreeBase;
  Vec3 start_offset = Vec3::Zero();  // sampled tool perturbation
  Vec3 start_nominal = Vec3::Zero();
  int reset_attempts = 0;
  std::int64_t t = 0;
  bool done = false;
  ParticleSet particles;
  WipeMarkerField markers;
  SleeveRing ring;
  ItchState itch;
  std::vector<Vec3> ee_prev;  // per robot arm, flange position
  Vec3 tip_prev = Vec3::Zero();
  double progress_prev = 0.0;  // arm manipulation lift potential
};

class AssistiveEnv : public Environment {
 public:
  explicit AssistiveEnv(EnvSpec spec);

  std::string id() const override { return spec_.id(); }
  int agent_count() const override { return spec_.human == HumanMode::kActive ? 2 : 1; }
  int observation_dim(int agent) const override;
  int action_dim(int agent) const override;
  int episode_length() const override { return spec_.episode_length; }
  std::vector<Eigen::VectorXd> reset(std::uint64_t seed) override;
  Transition step(const std::vector<Eigen::VectorXd>& actions) override;
  std::unique_ptr<Environment> clone() const override;

  const EnvSpec& spec() const { return spec_; }
  const EpisodeState& state() const { return state_; }
  // Direct state access for constructing test situations. Observations and
  // derived quantities are recomputed from it on the next step.
  EpisodeState& mutable_state() { return state_; }
  const robots::RobotModel& robot() const { return robot_; }
  const robots::ToolModel& tool() const { return tool_; }
  int tool_link() const { return tool_link_; }
  const human::HumanModel& human() const { return *human_; }
  const WorldLayout& layout() const { return layout_; }
  const reward::PreferenceConfig& preferences() const { return prefs_; }
  const std::vector<kin::ContactReport>& last_contacts() const { return contacts_; }

  // Human dofs the active policy drives and tremor shakes: the head for
  // feeding and drinking, the left arm for dressing, the right arm otherwise.
  std::vector<int> human_chain() const;

  // World-frame task quantities.
  Transform tool_frame() const;
  Vec3 tool_tip() const;
  Vec3 mouth() const;
  std::vector<Vec3> force_targets() const;
  bool task_success() const;
  std::vector<Eigen::VectorXd> observations() const;

 private:
  bool try_start(SeededRng& rng);
  Transform start_orientation_target(const Vec3& tip, double heading = 0.0) const;
  Vec3 nominal_start() const;
  std::vector<Transform> placement_goals() const;
  ArmAxis arm_axis(bool right) const;
  double arm_lift_potential() const;
  Eigen::VectorXd robot_observation() const;
  Eigen::VectorXd human_observation() const;
  kin::Scene scene_for_placement() const;
  std::vector<Transform> human_frames() const;
  std::vector<Transform> robot_frames() const;

  EnvSpec spec_;
  robots::RobotModel robot_;
  std::shared_ptr<const kin::ArticulatedBody> robot_body_;
  robots::ToolModel tool_;
  int tool_link_ = -1;
  std::array<human::HumanModel, 2> base_humans_;
  std::shared_ptr<const human::HumanModel> human_;
  std::optional<human::PoseValidityPredicate> file_predicate_;
  WorldLayout layout_;
  reward::PreferenceConfig prefs_;
  EpisodeState state_;
  std::vector<kin::ContactReport> contacts_;
  bool has_episode_ = false;
};

std::unique_ptr<Environment> make_environment(const EnvSpec& spec);

}  // namespace adl::envs

#endif  // ADL_ENVS_ENV_H_
