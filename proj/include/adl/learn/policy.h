#ifndef ADL_LEARN_POLICY_H_
#define ADL_LEARN_POLICY_H_

#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "adl/core/rng.h"
#include "adl/learn/mlp.h"
#include "adl/learn/network_file.h"

namespace adl::learn {

inline constexpr int kHiddenWidth = 64;

// Diagonal Gaussian policy: obs -> 64 -> 64 -> action mean (tanh hidden
// layers), state-independent log-std, and a separate value network of the
// same shape. Observations pass through a running normalizer first.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(int obs_dim, int act_dim, int hidden = kHiddenWidth);

  int observation_dim() const { return actor_.input_dim(); }
  int action_dim() const { return actor_.output_dim(); }

  // Hidden gain sqrt(2), policy output gain 0.01, value output gain 1.
  void initialize(SeededRng& rng, double initial_log_std = 0.0);

  Mlp& actor() { return actor_; }
  const Mlp& actor() const { return actor_; }
  Mlp& critic() { return critic_; }
  const Mlp& critic() const { return critic_; }
  Eigen::VectorXd& log_std() { return log_std_; }
  const Eigen::VectorXd& log_std() const { return log_std_; }
  RunningNormalizer& normalizer() { return normalizer_; }
  const RunningNormalizer& normalizer() const { return normalizer_; }

  struct Output {
    Eigen::VectorXd mean;
    Eigen::VectorXd log_std;
    double value = 0.0;
  };
  // Raw observation in; throws ParameterError on a size mismatch.
  Output forward(const Eigen::VectorXd& obs) const;
  Eigen::VectorXd normalize(const Eigen::VectorXd& obs) const;

  // mean + exp(log_std) * N(0, 1), one normal draw per dimension.
  Eigen::VectorXd sample(const Output& out, SeededRng& rng) const;

  // Actor parameters followed by log_std (the policy optimizer's vector).
  Eigen::VectorXd policy_parameters() const;
  void set_policy_parameters(const Eigen::VectorXd& p);
  int policy_parameter_count() const { return actor_.parameter_count() + action_dim(); }

  NetworkFile to_file(const std::string& tag) const;
  static GaussianPolicy from_file(const NetworkFile& f);
  void save(const std::filesystem::path& path, const std::string& tag) const;
  static GaussianPolicy load(const std::filesystem::path& path);

 private:
  Mlp actor_;
  Mlp critic_;
  Eigen::VectorXd log_std_;
  RunningNormalizer normalizer_;
};

// log N(action; mean, diag(exp(log_std)^2)).
double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std, const Eigen::VectorXd& action);
double gaussian_entropy(const Eigen::VectorXd& log_std);

}  // namespace adl::learn

#endif  // ADL_LEARN_POLICY_H_
