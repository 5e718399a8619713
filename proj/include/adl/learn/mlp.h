#ifndef ADL_LEARN_MLP_H_
#define ADL_LEARN_MLP_H_

#include <vector>

#include <Eigen/Core>

#include "adl/core/rng.h"

namespace adl::learn {

// Fully connected network with tanh hidden layers and a linear output.
// Batched calls take one sample per column.
class Mlp {
 public:
  Mlp() = default;
  // sizes = {input, hidden..., output}
  explicit Mlp(std::vector<int> sizes);

  int input_dim() const { return sizes_.empty() ? 0 : sizes_.front(); }
  int output_dim() const { return sizes_.empty() ? 0 : sizes_.back(); }
  int layer_count() const { return static_cast<int>(weights_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }

  Eigen::MatrixXd& weight(int layer) { return weights_.at(layer); }
  const Eigen::MatrixXd& weight(int layer) const { return weights_.at(layer); }
  Eigen::VectorXd& bias(int layer) { return biases_.at(layer); }
  const Eigen::VectorXd& bias(int layer) const { return biases_.at(layer); }

  // Orthogonal-ish init: Gaussian rows scaled by gain / sqrt(fan_in); zero bias.
  void initialize(SeededRng& rng, double hidden_gain, double output_gain);

  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // input, each hidden layer post-tanh
  };

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache) const;

  // Accumulates parameter gradients (same layout as parameters()) for
  // d(loss)/d(output) = grad_out, and returns d(loss)/d(input).
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& grad_out,
                           Eigen::Ref<Eigen::VectorXd> grad_params) const;

  int parameter_count() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& p);

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;  // out x in
  std::vector<Eigen::VectorXd> biases_;
};

// Running mean/variance of observations (parallel-merge form).
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  explicit RunningNormalizer(int dim, double clip = 10.0);

  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& variance() const { return var_; }
  double clip() const { return clip_; }

  // Merges a batch (one sample per column).
  void update(const Eigen::MatrixXd& batch);
  Eigen::VectorXd normalize(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd normalize(const Eigen::MatrixXd& x) const;

  void set_state(double count, Eigen::VectorXd mean, Eigen::VectorXd var);

 private:
  double count_ = 0.0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd var_;
  double clip_ = 10.0;
};

}  // namespace adl::learn

#endif  // ADL_LEARN_MLP_H_
