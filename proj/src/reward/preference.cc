#include "adl/reward/preference.h"

#include <algorithm>

#include "adl/core/error.h"

namespace adl::reward {

const std::array<std::string, kCostCount>& cost_names() {
  static const std::array<std::string, kCostCount> names = {"velocity",   "force",          "high_force", "spill",
                                                            "fast_intake", "dressing_force", "pressure"};
  return names;
}

CostArray task_activations(Task task) {
  CostArray a = {1, 1, 1, 0, 0, 0, 0};
  switch (task) {
    case Task::kFeeding:
    case Task::kDrinking:
      a[kSpill] = 1;
      a[kFastIntake] = 1;
      break;
    case Task::kDressing:
      a[kDressingForce] = 1;
      break;
    case Task::kArmManipulation:
    case Task::kBedBathing:
      a[kPressure] = 1;
      break;
    case Task::kScratchItch:
      break;
  }
  return a;
}

PreferenceConfig default_preferences(Task task) {
  PreferenceConfig c;
  c.alpha = task_activations(task);
  return c;
}

PreferenceCosts compute_costs(const CostInputs& in) {
  PreferenceCosts c;
  c.values[kVelocity] = in.v_left.norm() + in.v_right.norm();
  double far = 0.0, near = 0.0, pressure_kpa = 0.0;
  for (const HumanContact& h : in.contacts) {
    const bool is_near = std::any_of(in.targets.begin(), in.targets.end(),
                                     [&](const Vec3& t) { return (h.point - t).norm() <= kTargetRadius; });
    (is_near ? near : far) += h.force;
    if (h.area > 0.0) pressure_kpa = std::max(pressure_kpa, h.force / h.area / 1000.0);
  }
  c.values[kForce] = far;
  c.values[kHighForce] = std::max(0.0, near - kHighForceThreshold);
  c.values[kSpill] = static_cast<double>(in.spilled_on_person);
  double fast = 0.0;
  for (double s : in.captured_speeds) fast += std::max(0.0, s - kFastIntakeSpeed);
  c.values[kFastIntake] = fast;
  c.values[kDressingForce] = std::max(0.0, in.ring_force);
  c.values[kPressure] = std::max(0.0, pressure_kpa - kPressureThreshold);
  return c;
}

double human_preference_reward(std::span<const double> costs, std::span<const double> alpha,
                               std::span<const double> omega) {
  if (costs.size() != kCostCount || alpha.size() != kCostCount || omega.size() != kCostCount) {
    throw ParameterError("human_preference_reward: expected 7 costs, activations and weights");
  }
  double sum = 0.0;
  for (int i = 0; i < kCostCount; ++i) sum += alpha[i] * omega[i] * costs[i];
  return -sum;
}

double human_preference_reward(const PreferenceCosts& costs, const PreferenceConfig& config) {
  return human_preference_reward(costs.values, config.alpha, config.omega);
}

RewardBreakdown compose(double task_reward, const PreferenceCosts& costs, const PreferenceConfig& config) {
  RewardBreakdown r;
  r.task = task_reward;
  r.costs = costs;
  r.alpha = config.alpha;
  r.omega = config.omega;
  r.preference = human_preference_reward(costs, config);
  r.total = total_reward(r.task, r.preference);
  return r;
}

}  // namespace adl::reward
