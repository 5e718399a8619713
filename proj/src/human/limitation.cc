#include "adl/human/limitation.h"

#include <cmath>
#include <numbers>

#include "adl/core/error.h"
#include "adl/learn/network_file.h"

namespace adl::human {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

std::string to_string(LimitationKind k) {
  switch (k) {
    case LimitationKind::kTremor: return "tremor";
    case LimitationKind::kWeakness: return "weakness";
    case LimitationKind::kLimitedRom: return "limited_rom";
  }
  return "tremor";
}

LimitationKind limitation_from_string(const std::string& s) {
  if (s == "tremor") return LimitationKind::kTremor;
  if (s == "weakness") return LimitationKind::kWeakness;
  if (s == "limited_rom") return LimitationKind::kLimitedRom;
  throw ParameterError("unknown limitation '" + s + "'");
}

bool LimitationProfile::valid() const {
  return tremor_amplitude >= 0.0 && tremor_amplitude < kMaxTremorDeg * kDeg &&
         strength_scale >= kMinStrengthScale && strength_scale < 1.0 &&
         limit_scale >= kMinLimitScale && limit_scale < 1.0;
}

LimitationProfile sample_limitation(SeededRng& rng) {
  LimitationProfile p;
  p.kind = static_cast<LimitationKind>(rng.below(3));
  p.tremor_amplitude = rng.uniform(0.0, kMaxTremorDeg * kDeg);
  p.strength_scale = rng.uniform(kMinStrengthScale, 1.0);
  p.limit_scale = rng.uniform(kMinLimitScale, 1.0);
  return p;
}

double tremor_offset(double q_bar, double epsilon, std::int64_t t) {
  if (t < 0) throw ParameterError("tremor_offset: t must be non-negative");
  return t % 2 == 0 ? q_bar + epsilon : q_bar - epsilon;
}

Eigen::VectorXd tremor_offset(const Eigen::VectorXd& q_bar, double epsilon, std::int64_t t) {
  if (t < 0) throw ParameterError("tremor_offset: t must be non-negative");
  const double sign = t % 2 == 0 ? 1.0 : -1.0;
  return (q_bar.array() + sign * epsilon).matrix();
}

HumanModel apply_limitation(const HumanModel& model, const LimitationProfile& profile) {
  if (!profile.valid()) throw ParameterError("apply_limitation: profile out of range");
  HumanModel out = model;
  for (int k = 0; k < out.body.dof(); ++k) {
    const kin::JointSpec& j = out.body.joint(k);
    switch (profile.kind) {
      case LimitationKind::kWeakness:
        out.body.set_max_torque(k, profile.strength_scale * j.max_torque);
        break;
      case LimitationKind::kLimitedRom:
        out.body.set_limits(k, profile.limit_scale * j.lower, profile.limit_scale * j.upper);
        break;
      case LimitationKind::kTremor:
        break;
    }
  }
  return out;
}

PoseValidityPredicate PoseValidityPredicate::always(bool value) {
  return {value ? "always_valid" : "always_invalid", [value](std::span<const double>) { return value; }};
}

PoseValidityPredicate default_pose_predicate(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (lower.size() != kArmJoints || upper.size() != kArmJoints) {
    throw ParameterError("default_pose_predicate: expected 10 arm limits");
  }
  return {"box_plus_shoulder_coupling", [lower, upper](std::span<const double> q) {
            if (q.size() != kArmJoints) return false;
            for (int i = 0; i < kArmJoints; ++i) {
              if (!(q[i] >= lower[i] && q[i] <= upper[i])) return false;
            }
            const bool high = shoulder_elevation(q) > kCouplingElevationDeg * kDeg;
            const bool rotated = q[5] > kCouplingInternalRotationDeg * kDeg;
            return !(high && rotated);
          }};
}

PoseValidityPredicate default_pose_predicate(const HumanModel& model, bool right_arm) {
  const ArmChain& arm = model.arm(right_arm);
  Eigen::VectorXd lo(kArmJoints), hi(kArmJoints);
  for (int i = 0; i < kArmJoints; ++i) {
    lo[i] = model.body.joint(arm.dofs[i]).lower;
    hi[i] = model.body.joint(arm.dofs[i]).upper;
  }
  return default_pose_predicate(lo, hi);
}

PoseValidityPredicate predicate_from_file(const std::filesystem::path& path) {
  learn::NetworkFile f = learn::read_network_file(path);
  if (f.net.input_dim() != kArmJoints || f.net.output_dim() != 1) {
    throw LoadError("pose predicate model must map 10 inputs to 1 output");
  }
  auto net = std::make_shared<const learn::Mlp>(std::move(f.net));
  return {"file:" + path.filename().string(), [net](std::span<const double> q) {
            if (q.size() != kArmJoints) return false;
            Eigen::VectorXd x(kArmJoints);
            for (int i = 0; i < kArmJoints; ++i) x[i] = q[i];
            return net->forward(x)[0] > 0.0;
          }};
}

Eigen::VectorXd enforce_pose_validity(const Eigen::VectorXd& q_prev, const Eigen::VectorXd& q_new,
                                      const PoseValidityPredicate& predicate) {
  if (q_prev.size() != q_new.size()) throw ParameterError("enforce_pose_validity: size mismatch");
  return predicate(std::span<const double>(q_new.data(), q_new.size())) ? q_new : q_prev;
}

Eigen::VectorXd hold_command(const Eigen::VectorXd& q, const Eigen::VectorXd& target, std::span<const int> dofs) {
  if (q.size() != target.size()) throw ParameterError("hold_command: size mismatch");
  Eigen::VectorXd cmd = Eigen::VectorXd::Zero(q.size());
  for (int k : dofs) cmd[k] = target[k] - q[k];
  return cmd;
}

}  // namespace adl::human
