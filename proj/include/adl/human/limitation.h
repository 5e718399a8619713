#ifndef ADL_HUMAN_LIMITATION_H_
#define ADL_HUMAN_LIMITATION_H_

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>

#include <Eigen/Core>

#include "adl/core/rng.h"
#include "adl/human/human.h"

namespace adl::human {

enum class LimitationKind { kTremor, kWeakness, kLimitedRom };
std::string to_string(LimitationKind k);
LimitationKind limitation_from_string(const std::string& s);

// All three parameters are always sampled; only `kind` takes effect.
struct LimitationProfile {
  LimitationKind kind = LimitationKind::kTremor;
  double tremor_amplitude = 0.0;  // epsilon, rad, in [0, 20 deg)
  double strength_scale = 1.0;    // beta, in [0.25, 1)
  double limit_scale = 1.0;       // gamma, in [0.5, 1)

  bool valid() const;
};

inline constexpr double kMaxTremorDeg = 20.0;
inline constexpr double kMinStrengthScale = 0.25;
inline constexpr double kMinLimitScale = 0.5;

LimitationProfile sample_limitation(SeededRng& rng);

// q_bar + epsilon * (-1)^(t mod 2).
double tremor_offset(double q_bar, double epsilon, std::int64_t t);
Eigen::VectorXd tremor_offset(const Eigen::VectorXd& q_bar, double epsilon, std::int64_t t);

// Weakness scales every joint's torque cap by beta; limited range of motion
// scales both limits of every joint by gamma; tremor changes nothing here.
HumanModel apply_limitation(const HumanModel& model, const LimitationProfile& profile);

// Arm pose validity C(q) over the 10 arm joints. Pure and deterministic.
class PoseValidityPredicate {
 public:
  using Fn = std::function<bool(std::span<const double>)>;
  PoseValidityPredicate(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  bool operator()(std::span<const double> q_arm) const { return fn_(q_arm); }
  const std::string& name() const { return name_; }
  const Fn& function() const { return fn_; }

  static PoseValidityPredicate always(bool value);

 private:
  std::string name_;
  Fn fn_;
};

inline constexpr double kCouplingElevationDeg = 120.0;
inline constexpr double kCouplingInternalRotationDeg = 60.0;

// Box limits (the arm's unscaled anthropometric limits) plus one coupling
// rule: shoulder elevation above 120 deg together with internal rotation
// above 60 deg is rejected.
PoseValidityPredicate default_pose_predicate(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);
PoseValidityPredicate default_pose_predicate(const HumanModel& model, bool right_arm);

// Network container file with a 10-input, 1-output net; valid iff output > 0.
PoseValidityPredicate predicate_from_file(const std::filesystem::path& path);

// q_new when it satisfies the predicate, q_prev otherwise.
Eigen::VectorXd enforce_pose_validity(const Eigen::VectorXd& q_prev, const Eigen::VectorXd& q_new,
                                      const PoseValidityPredicate& predicate);

// Static-pose holding: command toward the (tremor-offset) target for the
// listed dofs; other dofs get zero. Speed and strength limits are applied by
// the stepper.
Eigen::VectorXd hold_command(const Eigen::VectorXd& q, const Eigen::VectorXd& target,
                             std::span<const int> dofs);

}  // namespace adl::human

#endif  // ADL_HUMAN_LIMITATION_H_
