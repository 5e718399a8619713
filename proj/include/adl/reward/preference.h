#ifndef ADL_REWARD_PREFERENCE_H_
#define ADL_REWARD_PREFERENCE_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "adl/core/task.h"
#include "adl/core/transform.h"

namespace adl::reward {

inline constexpr int kCostCount = 7;
using CostArray = std::array<double, kCostCount>;

// Cost order: end-effector velocity, force away from the target, high force
// near the target, spilled food/water, fast intake, garment force, pressure.
enum CostIndex { kVelocity, kForce, kHighForce, kSpill, kFastIntake, kDressingForce, kPressure };
const std::array<std::string, kCostCount>& cost_names();

inline constexpr CostArray kDefaultWeights = {0.25, 0.01, 0.05, 1.0, 1.0, 0.01, 0.01};

inline constexpr double kHighForceThreshold = 10.0;   // N
inline constexpr double kPressureThreshold = 10.0;    // kPa
inline constexpr double kFastIntakeSpeed = 0.5;       // m/s
inline constexpr double kTargetRadius = 0.05;         // m
inline constexpr double kOnPersonDistance = 0.15;     // m, spill counts as on-person within this

struct PreferenceConfig {
  CostArray alpha = {1, 1, 1, 1, 1, 1, 1};
  CostArray omega = kDefaultWeights;
};

// Activations: velocity/force/high-force everywhere; spill and fast intake in
// feeding and drinking; garment force in dressing; pressure in arm
// manipulation and bed bathing.
CostArray task_activations(Task task);
PreferenceConfig default_preferences(Task task);

// One contact between the robot (or its tool) and the person.
struct HumanContact {
  Vec3 point = Vec3::Zero();
  double force = 0.0;  // N
  double area = 0.0;   // m^2
};

struct CostInputs {
  Vec3 v_left = Vec3::Zero();   // m/s; single-arm robots pass the same value twice
  Vec3 v_right = Vec3::Zero();
  std::vector<HumanContact> contacts;
  std::vector<Vec3> targets;    // task target points; forces within kTargetRadius count as "near"
  int spilled_on_person = 0;    // particles newly spilled on the person this step
  std::vector<double> captured_speeds;  // speeds of particles captured this step
  double ring_force = 0.0;      // garment constraint force on the arm, N
};

struct PreferenceCosts {
  CostArray values{};  // all >= 0

  double operator[](int i) const { return values[i]; }
};

PreferenceCosts compute_costs(const CostInputs& in);

// r_H = -sum_i alpha_i * omega_i * C_i, accumulated in index order.
double human_preference_reward(std::span<const double> costs, std::span<const double> alpha,
                               std::span<const double> omega);
double human_preference_reward(const PreferenceCosts& costs, const PreferenceConfig& config);

inline double total_reward(double task_reward, double preference_reward) {
  return task_reward + preference_reward;
}

struct RewardBreakdown {
  double task = 0.0;        // r_R
  PreferenceCosts costs;
  CostArray alpha{};
  CostArray omega{};
  double preference = 0.0;  // r_H
  double total = 0.0;       // r
};

RewardBreakdown compose(double task_reward, const PreferenceCosts& costs, const PreferenceConfig& config);

}  // namespace adl::reward

#endif  // ADL_REWARD_PREFERENCE_H_
