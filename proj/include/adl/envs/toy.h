#ifndef ADL_ENVS_TOY_H_
#define ADL_ENVS_TOY_H_

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adl/envs/env.h"

namespace adl::envs {

// Planar two-link reaching task used to sanity-check the learner.
// Links of 0.5 m; the target is drawn uniformly by area in the annulus
// r in [0.2, 0.9]; joints start uniform in [-1, 1] rad. Action: joint deltas
// of action_scale * clip(a, -1, 1). Reward per step:
// distance_weight * (2 - distance), positive since the distance stays below
// 2 m, plus reach_bonus while the tip is within reach_radius. Success: within
// the radius at the final step.
// Observation: q1, q2, target xy, tip xy, target - tip.
inline constexpr double kToyLinkLength = 0.5;

struct ToyReachConfig {
  double action_scale = 0.2;  // rad per step at |a| = 1
  double reach_radius = 0.05;  // m
  double reach_bonus = 2.0;
  double distance_weight = 2.0;
  int episode_length = 50;
};

class ToyReachEnv : public Environment {
 public:
  ToyReachEnv() = default;
  explicit ToyReachEnv(const ToyReachConfig& config) : config_(config) {}

  std::string id() const override { return "toy_reach"; }
  int agent_count() const override { return 1; }
  int observation_dim(int agent) const override { return 8; }
  int action_dim(int agent) const override { return 2; }
  int episode_length() const override { return config_.episode_length; }
  std::vector<Eigen::VectorXd> reset(std::uint64_t seed) override;
  Transition step(const std::vector<Eigen::VectorXd>& actions) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<ToyReachEnv>(config_); }

  const ToyReachConfig& config() const { return config_; }
  Eigen::Vector2d tip() const;
  const Eigen::Vector2d& q() const { return q_; }
  const Eigen::Vector2d& target() const { return target_; }
  double distance() const { return (tip() - target_).norm(); }

 private:
  Eigen::VectorXd observation() const;

  ToyReachConfig config_;
  Eigen::Vector2d q_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d target_ = Eigen::Vector2d(0.5, 0.0);
  std::int64_t t_ = 0;
  bool started_ = false;
  bool done_ = false;
};

}  // namespace adl::envs

#endif  // ADL_ENVS_TOY_H_
