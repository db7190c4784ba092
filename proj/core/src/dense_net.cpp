#include "streamsched/dense_net.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "streamsched/error.hpp"

namespace streamsched {
namespace {

constexpr const char* kCheckpointFormat = "streamsched-densenet";
constexpr int kCheckpointVersion = 1;

void activate(Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::kTanh) z = z.array().tanh().matrix();
}

const char* activation_name(Activation a) { return a == Activation::kTanh ? "tanh" : "identity"; }

Activation activation_from_name(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "identity") return Activation::kIdentity;
  throw Error(ErrorCode::kCorruptCheckpoint, "unknown activation '" + s + "'");
}

void check_input(const DenseNet& net, Eigen::Index rows) {
  if (net.layers().empty()) throw Error(ErrorCode::kDimensionMismatch, "network has no layers");
  if (rows != net.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "input has " + std::to_string(rows) + " rows, network expects " +
                    std::to_string(net.input_dim()));
  }
}

}  // namespace

DenseNet::DenseNet(std::vector<Layer> layers) : layers_(std::move(layers)) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.bias.size() != l.weights.rows()) {
      throw Error(ErrorCode::kArchitectureMismatch, "layer " + std::to_string(i) +
                                                        " bias does not match weight rows");
    }
    if (i > 0 && layers_[i - 1].weights.rows() != l.weights.cols()) {
      throw Error(ErrorCode::kArchitectureMismatch,
                  "layer " + std::to_string(i) + " input does not chain with previous output");
    }
    if (!l.weights.allFinite() || !l.bias.allFinite()) {
      throw Error(ErrorCode::kArchitectureMismatch, "layer " + std::to_string(i) +
                                                        " has non-finite parameters");
    }
  }
}

DenseNet DenseNet::make(int input_dim, const std::vector<int>& hidden, int output_dim,
                        Activation output_activation, Rng& rng) {
  std::vector<Layer> layers;
  int fan_in = input_dim;
  auto init_layer = [&](int out, Activation act) {
    Layer l;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    l.weights.resize(out, fan_in);
    l.bias.resize(out);
    for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
      for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
        l.weights(r, c) = (2.0 * uniform01(rng) - 1.0) * bound;
      }
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = (2.0 * uniform01(rng) - 1.0) * bound;
    l.activation = act;
    layers.push_back(std::move(l));
    fan_in = out;
  };
  for (int h : hidden) init_layer(h, Activation::kTanh);
  init_layer(output_dim, output_activation);
  return DenseNet(std::move(layers));
}

int DenseNet::input_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weights.cols());
}

int DenseNet::output_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weights.rows());
}

bool DenseNet::same_architecture(const DenseNet& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].weights.rows() != other.layers_[i].weights.rows() ||
        layers_[i].weights.cols() != other.layers_[i].weights.cols() ||
        layers_[i].activation != other.layers_[i].activation) {
      return false;
    }
  }
  return true;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

Eigen::MatrixXd DenseNet::forward_from_first_preactivation(const Eigen::MatrixXd& z0) const {
  Eigen::MatrixXd h = z0;
  activate(h, layers_.front().activation);
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weights * h;
    z.colwise() += layers_[i].bias;
    activate(z, layers_[i].activation);
    h = std::move(z);
  }
  return h;
}

Gradients Gradients::zeros_like(const DenseNet& net) {
  Gradients g;
  for (const auto& l : net.layers()) {
    g.weights.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  return g;
}

Gradients& Gradients::operator+=(const Gradients& other) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] += other.weights[i];
    biases[i] += other.biases[i];
  }
  return *this;
}

Gradients& Gradients::operator*=(double s) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] *= s;
    biases[i] *= s;
  }
  input *= s;
  return *this;
}

double Gradients::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].size() > 0) m = std::max(m, weights[i].cwiseAbs().maxCoeff());
    if (biases[i].size() > 0) m = std::max(m, biases[i].cwiseAbs().maxCoeff());
  }
  return m;
}

Eigen::VectorXd forward(const DenseNet& net, const Eigen::VectorXd& input) {
  return forward_batch(net, input);
}

Eigen::MatrixXd forward_batch(const DenseNet& net, const Eigen::MatrixXd& inputs) {
  check_input(net, inputs.rows());
  Eigen::MatrixXd z0 = net.layers().front().weights * inputs;
  z0.colwise() += net.layers().front().bias;
  return net.forward_from_first_preactivation(z0);
}

Gradients backward(const DenseNet& net, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& upstream) {
  check_input(net, inputs.rows());
  const auto& layers = net.layers();
  if (upstream.rows() != net.output_dim() || upstream.cols() != inputs.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "upstream gradient shape does not match output");
  }

  std::vector<Eigen::MatrixXd> acts;  // acts[i] = input to layer i
  acts.reserve(layers.size() + 1);
  acts.push_back(inputs);
  for (const auto& l : layers) {
    Eigen::MatrixXd z = l.weights * acts.back();
    z.colwise() += l.bias;
    activate(z, l.activation);
    acts.push_back(std::move(z));
  }

  Gradients g = Gradients::zeros_like(net);
  Eigen::MatrixXd delta = upstream;
  for (std::size_t k = layers.size(); k-- > 0;) {
    const auto& l = layers[k];
    if (l.activation == Activation::kTanh) {
      delta.array() *= 1.0 - acts[k + 1].array().square();
    }
    g.weights[k].noalias() = delta * acts[k].transpose();
    g.biases[k] = delta.rowwise().sum();
    delta = l.weights.transpose() * delta;
  }
  g.input = std::move(delta);
  return g;
}

void sgd_step(DenseNet& net, const Gradients& gradients, const SgdConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "learning-rate must be positive");
  }
  auto& layers = net.layers();
  if (gradients.weights.size() != layers.size()) {
    throw Error(ErrorCode::kArchitectureMismatch, "gradient layer count differs from network");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (gradients.weights[i].rows() != layers[i].weights.rows() ||
        gradients.weights[i].cols() != layers[i].weights.cols() ||
        gradients.biases[i].size() != layers[i].bias.size()) {
      throw Error(ErrorCode::kArchitectureMismatch, "gradient shape differs at layer " +
                                                        std::to_string(i));
    }
    if (!gradients.weights[i].allFinite() || !gradients.biases[i].allFinite()) {
      throw Error(ErrorCode::kNonFiniteGradient, "layer " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weights -= config.learning_rate * gradients.weights[i];
    layers[i].bias -= config.learning_rate * gradients.biases[i];
  }
}

void soft_update(DenseNet& target, const DenseNet& source, double tau) {
  if (!target.same_architecture(source)) {
    throw Error(ErrorCode::kArchitectureMismatch, "soft update between different architectures");
  }
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "tau must be in (0, 1]");
  auto& t = target.layers();
  const auto& s = source.layers();
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i].weights = tau * s[i].weights + (1.0 - tau) * t[i].weights;
    t[i].bias = tau * s[i].bias + (1.0 - tau) * t[i].bias;
  }
}

nlohmann::json to_json(const DenseNet& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers()) {
    std::vector<double> w(static_cast<std::size_t>(l.weights.size()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
        w[static_cast<std::size_t>(r * l.weights.cols() + c)] = l.weights(r, c);
      }
    }
    std::vector<double> b(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back({{"output_dim", l.weights.rows()},
                      {"activation", activation_name(l.activation)},
                      {"weights", std::move(w)},
                      {"bias", std::move(b)}});
  }
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"input_dim", net.input_dim()},
          {"layers", std::move(layers)}};
}

DenseNet dense_net_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat ||
        j.at("version").get<int>() != kCheckpointVersion) {
      throw Error(ErrorCode::kCorruptCheckpoint, "unsupported checkpoint format or version");
    }
    Eigen::Index fan_in = j.at("input_dim").get<Eigen::Index>();
    std::vector<Layer> layers;
    for (const auto& jl : j.at("layers")) {
      const auto out = jl.at("output_dim").get<Eigen::Index>();
      const auto w = jl.at("weights").get<std::vector<double>>();
      const auto b = jl.at("bias").get<std::vector<double>>();
      if (out <= 0 || fan_in <= 0 || static_cast<Eigen::Index>(w.size()) != out * fan_in ||
          static_cast<Eigen::Index>(b.size()) != out) {
        throw Error(ErrorCode::kCorruptCheckpoint, "layer arrays do not match declared shape");
      }
      Layer l;
      l.weights.resize(out, fan_in);
      for (Eigen::Index r = 0; r < out; ++r) {
        for (Eigen::Index c = 0; c < fan_in; ++c) {
          l.weights(r, c) = w[static_cast<std::size_t>(r * fan_in + c)];
        }
      }
      l.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), out);
      l.activation = activation_from_name(jl.at("activation").get<std::string>());
      layers.push_back(std::move(l));
      fan_in = out;
    }
    if (layers.empty()) throw Error(ErrorCode::kCorruptCheckpoint, "no layers");
    return DenseNet(std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptCheckpoint, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptCheckpoint) throw;
    throw Error(ErrorCode::kCorruptCheckpoint, e.what());
  }
}

void save_weights(const DenseNet& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json(net).dump() << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

void load_weights(DenseNet& net, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptCheckpoint, path.string() + ": " + e.what());
  }
  DenseNet loaded = dense_net_from_json(j);
  if (!loaded.same_architecture(net)) {
    throw Error(ErrorCode::kArchitectureMismatch,
                path.string() + " holds a different network architecture");
  }
  net = std::move(loaded);
}

}  // namespace streamsched
