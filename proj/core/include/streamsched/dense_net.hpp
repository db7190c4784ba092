#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "streamsched/rng.hpp"

namespace streamsched {

enum class Activation { kTanh, kIdentity };

struct Layer {
  Eigen::MatrixXd weights;  // output x input
  Eigen::VectorXd bias;
  Activation activation = Activation::kTanh;
};

/// Fully connected feed-forward network. Batched calls take one sample per
/// column.
class DenseNet {
 public:
  DenseNet() = default;
  explicit DenseNet(std::vector<Layer> layers);

  /// Hidden layers use tanh; weights and biases start uniform in
  /// [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static DenseNet make(int input_dim, const std::vector<int>& hidden, int output_dim,
                       Activation output_activation, Rng& rng);

  int input_dim() const;
  int output_dim() const;
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<Layer>& layers() noexcept { return layers_; }
  bool same_architecture(const DenseNet& other) const;
  std::size_t parameter_count() const;

  /// Continues a forward pass from the first layer's pre-activation, for
  /// callers that build it more cheaply than a dense product (one-hot inputs).
  Eigen::MatrixXd forward_from_first_preactivation(const Eigen::MatrixXd& z0) const;

 private:
  std::vector<Layer> layers_;
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Eigen::MatrixXd input;  // d(sum of upstream . output) / d(input), per column

  static Gradients zeros_like(const DenseNet& net);
  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double s);
  double max_abs() const;
};

struct SgdConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
};

Eigen::VectorXd forward(const DenseNet& net, const Eigen::VectorXd& input);
Eigen::MatrixXd forward_batch(const DenseNet& net, const Eigen::MatrixXd& inputs);

/// Backpropagates `upstream` (output_dim x batch). Parameter gradients are
/// summed over the batch; input gradients are kept per column.
Gradients backward(const DenseNet& net, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& upstream);

/// theta <- theta - lr * g. Throws kNonFiniteGradient before touching `net`.
void sgd_step(DenseNet& net, const Gradients& gradients, const SgdConfig& config);

/// target <- tau * source + (1 - tau) * target.
void soft_update(DenseNet& target, const DenseNet& source, double tau);

nlohmann::json to_json(const DenseNet& net);
DenseNet dense_net_from_json(const nlohmann::json& j);

void save_weights(const DenseNet& net, const std::filesystem::path& path);
/// Loads into `net`, which fixes the expected architecture.
void load_weights(DenseNet& net, const std::filesystem::path& path);

}  // namespace streamsched
