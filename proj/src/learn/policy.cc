#include "adl/learn/policy.h"

#include <cmath>
#include <numbers>

#include "adl/core/error.h"

namespace adl::learn {
namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

}  // namespace

GaussianPolicy::GaussianPolicy(int obs_dim, int act_dim, int hidden)
    : actor_({obs_dim, hidden, hidden, act_dim}),
      critic_({obs_dim, hidden, hidden, 1}),
      log_std_(Eigen::VectorXd::Zero(act_dim)),
      normalizer_(obs_dim) {
  if (obs_dim <= 0 || act_dim <= 0 || hidden <= 0) throw ParameterError("GaussianPolicy: dims must be positive");
}

void GaussianPolicy::initialize(SeededRng& rng, double initial_log_std) {
  actor_.initialize(rng, std::sqrt(2.0), 0.01);
  critic_.initialize(rng, std::sqrt(2.0), 1.0);
  log_std_.setConstant(initial_log_std);
}

Eigen::VectorXd GaussianPolicy::normalize(const Eigen::VectorXd& obs) const {
  if (obs.size() != observation_dim()) {
    throw ParameterError("policy expects " + std::to_string(observation_dim()) + " observations, got " +
                         std::to_string(obs.size()));
  }
  return normalizer_.count() > 0 ? normalizer_.normalize(obs) : obs;
}

GaussianPolicy::Output GaussianPolicy::forward(const Eigen::VectorXd& obs) const {
  const Eigen::VectorXd x = normalize(obs);
  return {actor_.forward(x), log_std_, critic_.forward(x)[0]};
}

Eigen::VectorXd GaussianPolicy::sample(const Output& out, SeededRng& rng) const {
  Eigen::VectorXd a(out.mean.size());
  for (int i = 0; i < a.size(); ++i) a[i] = out.mean[i] + std::exp(out.log_std[i]) * rng.normal();
  return a;
}

Eigen::VectorXd GaussianPolicy::policy_parameters() const {
  Eigen::VectorXd p(policy_parameter_count());
  p << actor_.parameters(), log_std_;
  return p;
}

void GaussianPolicy::set_policy_parameters(const Eigen::VectorXd& p) {
  if (p.size() != policy_parameter_count()) throw ParameterError("set_policy_parameters: size mismatch");
  actor_.set_parameters(p.head(actor_.parameter_count()));
  log_std_ = p.tail(action_dim());
}

NetworkFile GaussianPolicy::to_file(const std::string& tag) const {
  NetworkFile f;
  f.tag = tag;
  f.net = actor_;
  f.log_std = log_std_;
  f.value = critic_;
  f.normalizer = normalizer_;
  return f;
}

GaussianPolicy GaussianPolicy::from_file(const NetworkFile& f) {
  if (!f.log_std) throw LoadError("policy file has no log-std block");
  if (f.net.sizes().size() != 4) throw LoadError("policy network must have two hidden layers");
  GaussianPolicy p(f.net.input_dim(), f.net.output_dim(), f.net.sizes()[1]);
  p.actor_ = f.net;
  p.log_std_ = *f.log_std;
  if (f.value) {
    if (f.value->input_dim() != f.net.input_dim() || f.value->output_dim() != 1) {
      throw LoadError("policy file value network has the wrong shape");
    }
    p.critic_ = *f.value;
  }
  if (f.normalizer) p.normalizer_ = *f.normalizer;
  return p;
}

void GaussianPolicy::save(const std::filesystem::path& path, const std::string& tag) const {
  write_network_file(path, to_file(tag));
}

GaussianPolicy GaussianPolicy::load(const std::filesystem::path& path) { return from_file(read_network_file(path)); }

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std, const Eigen::VectorXd& action) {
  if (mean.size() != action.size() || log_std.size() != action.size()) {
    throw ParameterError("gaussian_log_prob: size mismatch");
  }
  double lp = 0.0;
  for (int i = 0; i < action.size(); ++i) {
    const double z = (action[i] - mean[i]) * std::exp(-log_std[i]);
    lp += -0.5 * z * z - log_std[i] - 0.5 * kLog2Pi;
  }
  return lp;
}

double gaussian_entropy(const Eigen::VectorXd& log_std) {
  return log_std.sum() + 0.5 * static_cast<double>(log_std.size()) * (1.0 + kLog2Pi);
}

}  // namespace adl::learn
