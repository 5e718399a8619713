#ifndef ADL_LEARN_PPO_H_
#define ADL_LEARN_PPO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adl/core/rng.h"
#include "adl/learn/policy.h"

namespace adl::learn {

struct PpoConfig {
  double learning_rate = 3e-4;
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  int epochs = 10;
  int minibatches = 32;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double max_grad_norm = 0.5;  // per network; <= 0 disables clipping

  bool operator==(const PpoConfig&) const = default;
};

// Adaptive-moment gradient descent on a flat parameter vector.
class Adam {
 public:
  Adam() = default;
  explicit Adam(int size, double learning_rate = 3e-4, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  void set_learning_rate(double lr) { lr_ = lr; }
  std::int64_t steps() const { return t_; }

 private:
  double lr_ = 3e-4, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
  Eigen::VectorXd m_, v_;
  std::int64_t t_ = 0;
};

inline constexpr std::uint8_t kContinuing = 0;
inline constexpr std::uint8_t kTerminal = 1;
inline constexpr std::uint8_t kTruncated = 2;

// Transitions of one update, one column/entry per step, concatenated
// actor by actor. Observations are stored already normalized.
struct RolloutBatch {
  Eigen::MatrixXd observations;
  Eigen::MatrixXd actions;
  Eigen::VectorXd log_probs;
  Eigen::VectorXd values;
  Eigen::VectorXd rewards;
  std::vector<std::uint8_t> dones;  // kTerminal / kTruncated where an episode ended after this step
  Eigen::VectorXd truncation_values;  // V(final observation) at kTruncated steps, else 0
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;

  int size() const { return static_cast<int>(rewards.size()); }
  void resize(int obs_dim, int act_dim, int n);
  // Appends `other` after the current contents.
  void append(const RolloutBatch& other);
};

// Generalized advantage estimation over steps [begin, end) of one actor;
// `bootstrap_value` is V of the observation after step end-1 (ignored when
// that step ended an episode). Truncated steps bootstrap from their
// truncation value; the advantage recursion never crosses an episode end.
// Fills advantages and returns = adv + value.
void compute_gae(RolloutBatch& batch, int begin, int end, double bootstrap_value, double gamma, double lambda);

// In place: mean 0, unit (population) standard deviation.
void normalize_advantages(RolloutBatch& batch);

// min(r A, clip(r, 1 - eps, 1 + eps) A).
double clipped_surrogate(double ratio, double advantage, double clip);

struct LossTerms {
  double surrogate = 0.0;   // mean clipped surrogate (to maximize)
  double value_loss = 0.0;  // mean squared value error
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

// Loss over the listed samples. Policy loss = -surrogate - c_e * entropy,
// value loss = c_v * mean (V - R)^2. Gradients (optional) are with respect
// to policy_parameters() and critic().parameters().
LossTerms ppo_loss(const GaussianPolicy& policy, const RolloutBatch& batch, std::span<const int> samples,
                   const PpoConfig& config, Eigen::VectorXd* policy_grad, Eigen::VectorXd* value_grad);

struct PpoStats {
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;  // mean(log pi_old - log pi_new) over the batch
  double clip_fraction = 0.0;
  int gradient_steps = 0;
  bool aborted = false;
  std::string error;
};

// `epochs` passes of shuffled minibatches. On a non-finite loss the policy is
// restored to its state before the call and the stats report the abort.
PpoStats ppo_update(GaussianPolicy& policy, Adam& policy_opt, Adam& value_opt, const RolloutBatch& batch,
                    const PpoConfig& config, SeededRng& rng);

}  // namespace adl::learn

#endif  // ADL_LEARN_PPO_H_
