#include "adl/learn/mlp.h"

#include <cmath>

#include "adl/core/error.h"

namespace adl::learn {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ParameterError("Mlp needs at least input and output sizes");
  for (int s : sizes_) {
    if (s <= 0) throw ParameterError("Mlp layer sizes must be positive");
  }
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    weights_.push_back(Eigen::MatrixXd::Zero(sizes_[i + 1], sizes_[i]));
    biases_.push_back(Eigen::VectorXd::Zero(sizes_[i + 1]));
  }
}

void Mlp::initialize(SeededRng& rng, double hidden_gain, double output_gain) {
  for (int l = 0; l < layer_count(); ++l) {
    const double gain = l + 1 == layer_count() ? output_gain : hidden_gain;
    const double scale = gain / std::sqrt(static_cast<double>(weights_[l].cols()));
    for (int r = 0; r < weights_[l].rows(); ++r) {
      for (int c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = scale * rng.normal();
    }
    biases_[l].setZero();
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim()) {
    throw ParameterError("Mlp::forward: input has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(input_dim()));
  }
  Eigen::VectorXd h = x;
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::VectorXd z = weights_[l] * h + biases_[l];
    h = l + 1 == layer_count() ? z : Eigen::VectorXd(z.array().tanh());
  }
  return h;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  if (x.rows() != input_dim()) throw ParameterError("Mlp::forward: input dim mismatch");
  if (cache != nullptr) {
    cache->activations.clear();
    cache->activations.push_back(x);
  }
  Eigen::MatrixXd h = x;
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = weights_[l] * h;
    z.colwise() += biases_[l];
    if (l + 1 == layer_count()) return z;
    h = z.array().tanh();
    if (cache != nullptr) cache->activations.push_back(h);
  }
  return h;
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& grad_out,
                              Eigen::Ref<Eigen::VectorXd> grad_params) const {
  if (grad_params.size() != parameter_count()) throw ParameterError("Mlp::backward: gradient size mismatch");
  // Offsets of each layer's block in the flat parameter vector.
  std::vector<int> offset(layer_count());
  int o = 0;
  for (int l = 0; l < layer_count(); ++l) {
    offset[l] = o;
    o += static_cast<int>(weights_[l].size() + biases_[l].size());
  }
  Eigen::MatrixXd delta = grad_out;  // d loss / d z for the current layer
  for (int l = layer_count() - 1; l >= 0; --l) {
    const Eigen::MatrixXd& in = cache.activations[l];
    const int rows = static_cast<int>(weights_[l].rows());
    const int cols = static_cast<int>(weights_[l].cols());
    // Row-major weight layout in the flat vector.
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gw(
        grad_params.data() + offset[l], rows, cols);
    gw.noalias() += delta * in.transpose();
    grad_params.segment(offset[l] + rows * cols, rows) += delta.rowwise().sum();
    Eigen::MatrixXd back = weights_[l].transpose() * delta;
    if (l > 0) {
      back.array() *= 1.0 - in.array().square();
    }
    delta = std::move(back);
  }
  return delta;
}

int Mlp::parameter_count() const {
  int n = 0;
  for (int l = 0; l < layer_count(); ++l) n += static_cast<int>(weights_[l].size() + biases_[l].size());
  return n;
}

Eigen::VectorXd Mlp::parameters() const {
  Eigen::VectorXd p(parameter_count());
  int o = 0;
  for (int l = 0; l < layer_count(); ++l) {
    for (int r = 0; r < weights_[l].rows(); ++r) {
      for (int c = 0; c < weights_[l].cols(); ++c) p[o++] = weights_[l](r, c);
    }
    for (int r = 0; r < biases_[l].size(); ++r) p[o++] = biases_[l][r];
  }
  return p;
}

void Mlp::set_parameters(const Eigen::VectorXd& p) {
  if (p.size() != parameter_count()) throw ParameterError("Mlp::set_parameters: size mismatch");
  int o = 0;
  for (int l = 0; l < layer_count(); ++l) {
    for (int r = 0; r < weights_[l].rows(); ++r) {
      for (int c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = p[o++];
    }
    for (int r = 0; r < biases_[l].size(); ++r) biases_[l][r] = p[o++];
  }
}

RunningNormalizer::RunningNormalizer(int dim, double clip)
    : mean_(Eigen::VectorXd::Zero(dim)), var_(Eigen::VectorXd::Ones(dim)), clip_(clip) {}

void RunningNormalizer::update(const Eigen::MatrixXd& batch) {
  if (batch.rows() != dim()) throw ParameterError("RunningNormalizer::update: dim mismatch");
  const double n = static_cast<double>(batch.cols());
  if (n == 0) return;
  const Eigen::VectorXd bmean = batch.rowwise().mean();
  const Eigen::VectorXd bvar = (batch.colwise() - bmean).array().square().rowwise().sum() / n;
  if (count_ == 0.0) {
    mean_ = bmean;
    var_ = bvar;
    count_ = n;
    return;
  }
  const double total = count_ + n;
  const Eigen::VectorXd delta = bmean - mean_;
  mean_ += delta * (n / total);
  const Eigen::VectorXd m2 =
      var_ * count_ + bvar * n + delta.array().square().matrix() * (count_ * n / total);
  var_ = m2 / total;
  count_ = total;
}

Eigen::VectorXd RunningNormalizer::normalize(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw ParameterError("RunningNormalizer::normalize: dim mismatch");
  const Eigen::ArrayXd z = (x - mean_).array() / (var_.array() + 1e-8).sqrt();
  return z.cwiseMax(-clip_).cwiseMin(clip_).matrix();
}

Eigen::MatrixXd RunningNormalizer::normalize(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (int c = 0; c < x.cols(); ++c) out.col(c) = normalize(Eigen::VectorXd(x.col(c)));
  return out;
}

void RunningNormalizer::set_state(double count, Eigen::VectorXd mean, Eigen::VectorXd var) {
  if (mean.size() != var.size()) throw ParameterError("RunningNormalizer::set_state: size mismatch");
  count_ = count;
  mean_ = std::move(mean);
  var_ = std::move(var);
}

}  // namespace adl::learn
