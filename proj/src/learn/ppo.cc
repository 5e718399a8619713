#include "adl/learn/ppo.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adl/core/error.h"

namespace adl::learn {
namespace {

void clip_norm(Eigen::VectorXd& g, double max_norm) {
  if (max_norm <= 0.0) return;
  const double n = g.norm();
  if (n > max_norm) g *= max_norm / n;
}

}  // namespace

Adam::Adam(int size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), b1_(beta1), b2_(beta2), eps_(epsilon),
      m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw ParameterError("Adam::step: size mismatch");
  ++t_;
  m_ = b1_ * m_ + (1.0 - b1_) * grad;
  v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

void RolloutBatch::resize(int obs_dim, int act_dim, int n) {
  observations.resize(obs_dim, n);
  actions.resize(act_dim, n);
  log_probs.resize(n);
  values.resize(n);
  rewards.resize(n);
  dones.assign(n, kContinuing);
  truncation_values = Eigen::VectorXd::Zero(n);
  advantages = Eigen::VectorXd::Zero(n);
  returns = Eigen::VectorXd::Zero(n);
}

void RolloutBatch::append(const RolloutBatch& o) {
  if (size() == 0) {
    *this = o;
    return;
  }
  auto cat_m = [](Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd c(a.rows(), a.cols() + b.cols());
    c << a, b;
    a = std::move(c);
  };
  auto cat_v = [](Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd c(a.size() + b.size());
    c << a, b;
    a = std::move(c);
  };
  cat_m(observations, o.observations);
  cat_m(actions, o.actions);
  cat_v(log_probs, o.log_probs);
  cat_v(values, o.values);
  cat_v(rewards, o.rewards);
  cat_v(truncation_values, o.truncation_values);
  dones.insert(dones.end(), o.dones.begin(), o.dones.end());
  cat_v(advantages, o.advantages);
  cat_v(returns, o.returns);
}

void compute_gae(RolloutBatch& b, int begin, int end, double bootstrap_value, double gamma, double lambda) {
  if (begin < 0 || end > b.size() || begin > end) throw ParameterError("compute_gae: bad range");
  double next_value = bootstrap_value;
  double gae = 0.0;
  for (int t = end - 1; t >= begin; --t) {
    double bootstrap = next_value;
    double carry = 1.0;
    if (b.dones[t] == kTerminal) {
      bootstrap = 0.0;
      carry = 0.0;
    } else if (b.dones[t] == kTruncated) {
      bootstrap = b.truncation_values[t];
      carry = 0.0;
    }
    const double delta = b.rewards[t] + gamma * bootstrap - b.values[t];
    gae = delta + gamma * lambda * carry * gae;
    b.advantages[t] = gae;
    b.returns[t] = gae + b.values[t];
    next_value = b.values[t];
  }
}

void normalize_advantages(RolloutBatch& b) {
  const int n = b.size();
  if (n == 0) return;
  const double mean = b.advantages.mean();
  const double var = (b.advantages.array() - mean).square().sum() / n;
  const double sd = std::sqrt(var);
  b.advantages = (b.advantages.array() - mean) / (sd > 1e-12 ? sd : 1.0);
}

double clipped_surrogate(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

LossTerms ppo_loss(const GaussianPolicy& policy, const RolloutBatch& batch, std::span<const int> samples,
                   const PpoConfig& config, Eigen::VectorXd* policy_grad, Eigen::VectorXd* value_grad) {
  const int m = static_cast<int>(samples.size());
  if (m == 0) throw ParameterError("ppo_loss: empty sample set");
  const int act = policy.action_dim();
  Eigen::MatrixXd x(policy.observation_dim(), m);
  for (int j = 0; j < m; ++j) x.col(j) = batch.observations.col(samples[j]);
  Mlp::Cache actor_cache, critic_cache;
  const Eigen::MatrixXd mean = policy.actor().forward(x, &actor_cache);
  const Eigen::MatrixXd value = policy.critic().forward(x, &critic_cache);
  const Eigen::VectorXd& log_std = policy.log_std();
  const Eigen::VectorXd inv_std = (-log_std.array()).exp();

  LossTerms out;
  Eigen::MatrixXd d_mean(act, m);
  Eigen::VectorXd d_log_std = Eigen::VectorXd::Zero(act);
  Eigen::MatrixXd d_value(1, m);
  int clipped = 0;
  for (int j = 0; j < m; ++j) {
    const int s = samples[j];
    const Eigen::VectorXd z = (batch.actions.col(s) - mean.col(j)).cwiseProduct(inv_std);
    const double logp = gaussian_log_prob(mean.col(j), log_std, batch.actions.col(s));
    const double ratio = std::exp(logp - batch.log_probs[s]);
    const double adv = batch.advantages[s];
    out.surrogate += clipped_surrogate(ratio, adv, config.clip);
    // Gradient flows only through the unclipped branch of the min.
    const bool flat = (adv >= 0.0 && ratio > 1.0 + config.clip) || (adv < 0.0 && ratio < 1.0 - config.clip);
    if (flat) ++clipped;
    const double d_logp = flat ? 0.0 : -ratio * adv / m;  // d(-surrogate)/d(log pi)
    d_mean.col(j) = d_logp * z.cwiseProduct(inv_std);
    d_log_std += d_logp * (z.cwiseAbs2().array() - 1.0).matrix();
    const double err = value(0, j) - batch.returns[s];
    out.value_loss += err * err;
    d_value(0, j) = 2.0 * config.value_coef * err / m;
  }
  out.surrogate /= m;
  out.value_loss /= m;
  out.entropy = gaussian_entropy(log_std);
  out.clip_fraction = static_cast<double>(clipped) / m;
  d_log_std.array() -= config.entropy_coef;

  if (policy_grad) {
    policy_grad->setZero(policy.policy_parameter_count());
    const int na = policy.actor().parameter_count();
    policy.actor().backward(actor_cache, d_mean, policy_grad->head(na));
    policy_grad->tail(act) = d_log_std;
  }
  if (value_grad) {
    value_grad->setZero(policy.critic().parameter_count());
    policy.critic().backward(critic_cache, d_value, *value_grad);
  }
  return out;
}

PpoStats ppo_update(GaussianPolicy& policy, Adam& policy_opt, Adam& value_opt, const RolloutBatch& batch,
                    const PpoConfig& config, SeededRng& rng) {
  const int n = batch.size();
  if (n == 0) throw ParameterError("ppo_update: empty batch");
  if (config.epochs <= 0 || config.minibatches <= 0) throw ParameterError("ppo_update: bad schedule");
  const GaussianPolicy before = policy;
  const int mb = std::min(config.minibatches, n);
  std::vector<int> order(n);
  PpoStats stats;
  Eigen::VectorXd gp, gv;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(order[i], order[k]);
    }
    for (int b = 0; b < mb; ++b) {
      const int lo = static_cast<int>(static_cast<std::int64_t>(b) * n / mb);
      const int hi = static_cast<int>(static_cast<std::int64_t>(b + 1) * n / mb);
      const std::span<const int> idx(order.data() + lo, hi - lo);
      const LossTerms l = ppo_loss(policy, batch, idx, config, &gp, &gv);
      if (!std::isfinite(l.surrogate) || !std::isfinite(l.value_loss) || !gp.allFinite() || !gv.allFinite()) {
        policy = before;
        stats.aborted = true;
        stats.error = "non-finite loss or gradient at epoch " + std::to_string(epoch);
        return stats;
      }
      clip_norm(gp, config.max_grad_norm);
      clip_norm(gv, config.max_grad_norm);
      Eigen::VectorXd p = policy.policy_parameters();
      policy_opt.step(p, gp);
      policy.set_policy_parameters(p);
      Eigen::VectorXd v = policy.critic().parameters();
      value_opt.step(v, gv);
      policy.critic().set_parameters(v);
      ++stats.gradient_steps;
    }
  }
  // Final statistics over the whole batch.
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const LossTerms l = ppo_loss(policy, batch, all, config, nullptr, nullptr);
  stats.surrogate = l.surrogate;
  stats.value_loss = l.value_loss;
  stats.entropy = l.entropy;
  stats.clip_fraction = l.clip_fraction;
  double kl = 0.0;
  const Eigen::MatrixXd mean = policy.actor().forward(batch.observations, nullptr);
  for (int j = 0; j < n; ++j) {
    kl += batch.log_probs[j] - gaussian_log_prob(mean.col(j), policy.log_std(), batch.actions.col(j));
  }
  stats.approx_kl = kl / n;
  if (!std::isfinite(stats.approx_kl)) {
    policy = before;
    stats.aborted = true;
    stats.error = "non-finite KL after update";
  }
  return stats;
}

}  // namespace adl::learn
