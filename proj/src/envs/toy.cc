#include "adl/envs/toy.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adl/core/error.h"
#include "adl/core/rng.h"

namespace adl::envs {

std::vector<Eigen::VectorXd> ToyReachEnv::reset(std::uint64_t seed) {
  SeededRng rng(seed);
  q_ = Eigen::Vector2d(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  // Uniform by area over the annulus.
  const double r = std::sqrt(rng.uniform(0.2 * 0.2, 0.9 * 0.9));
  const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
  target_ = Eigen::Vector2d(r * std::cos(a), r * std::sin(a));
  t_ = 0;
  started_ = true;
  done_ = false;
  return {observation()};
}

Eigen::Vector2d ToyReachEnv::tip() const {
  const double a1 = q_[0], a2 = q_[0] + q_[1];
  return kToyLinkLength * Eigen::Vector2d(std::cos(a1) + std::cos(a2), std::sin(a1) + std::sin(a2));
}

Eigen::VectorXd ToyReachEnv::observation() const {
  const Eigen::Vector2d p = tip();
  Eigen::VectorXd o(8);
  o << q_, target_, p, target_ - p;
  return o;
}

Transition ToyReachEnv::step(const std::vector<Eigen::VectorXd>& actions) {
  if (!started_) throw StepError("step before reset");
  if (done_) throw StepError("episode finished");
  if (actions.size() != 1 || actions[0].size() != 2) throw StepError("toy_reach expects one 2-vector action");
  if (!actions[0].allFinite()) throw StepError("action contains NaN or infinity");
  const Eigen::Vector2d a = actions[0].cwiseMax(-1.0).cwiseMin(1.0);
  q_ += config_.action_scale * a;
  for (int i = 0; i < 2; ++i) q_[i] = std::remainder(q_[i], 2.0 * std::numbers::pi);
  ++t_;
  const double d = distance();
  const bool near = d < config_.reach_radius;
  Transition tr;
  tr.reward.task = config_.distance_weight * (2.0 - d) + (near ? config_.reach_bonus : 0.0);
  tr.reward.preference = 0.0;
  tr.reward.total = reward::total_reward(tr.reward.task, tr.reward.preference);
  done_ = t_ >= config_.episode_length;
  tr.done = done_;
  tr.truncated = done_;
  tr.info.t = t_;
  tr.info.success = near;
  tr.observations = {observation()};
  return tr;
}

}  // namespace adl::envs
