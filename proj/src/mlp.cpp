#include "wdistlab/mlp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace wdistlab {

std::size_t MlpNetwork::num_parameters() const {
  std::size_t n = 0;
  for (const auto& layer : params) n += layer.weight.size() + layer.bias.size();
  return n;
}

void MlpNetwork::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("network needs at least one layer");
  if (activations.size() + 1 != widths.size() || params.size() != activations.size()) {
    throw std::invalid_argument("network: layer count mismatch");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = params[k];
    if (widths[k] == 0 || widths[k + 1] == 0) throw std::invalid_argument("network: zero width");
    if (static_cast<std::size_t>(p.weight.rows()) != widths[k + 1] ||
        static_cast<std::size_t>(p.weight.cols()) != widths[k] ||
        static_cast<std::size_t>(p.bias.size()) != widths[k + 1]) {
      throw std::invalid_argument("network: layer " + std::to_string(k) + " shape mismatch");
    }
    if (!p.weight.allFinite() || !p.bias.allFinite()) {
      throw std::invalid_argument("network: non-finite parameter in layer " + std::to_string(k));
    }
  }
}

std::string_view activation_name(Activation act) {
  switch (act) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kLinear: return "linear";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "linear") return Activation::kLinear;
  throw std::invalid_argument("unknown activation: " + std::string(name));
}

MlpNetwork init_network(const std::vector<std::size_t>& widths,
                        const std::vector<Activation>& activations, Rng& rng) {
  MlpNetwork net{widths, activations, {}};
  if (widths.size() < 2 || activations.size() + 1 != widths.size()) {
    throw std::invalid_argument("init_network: need widths.size() == activations.size() + 1 >= 2");
  }
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    const auto fan_in = static_cast<Eigen::Index>(widths[k]);
    const auto fan_out = static_cast<Eigen::Index>(widths[k + 1]);
    if (fan_in == 0 || fan_out == 0) throw std::invalid_argument("init_network: zero width");
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    LayerParams layer{Matrix(fan_out, fan_in), Vector::Zero(fan_out)};
    for (Eigen::Index i = 0; i < fan_out; ++i) {
      for (Eigen::Index j = 0; j < fan_in; ++j) layer.weight(i, j) = rng.uniform(-s, s);
    }
    net.params.push_back(std::move(layer));
  }
  return net;
}

NetworkLeaves add_parameters(ad::Tape& tape, const MlpNetwork& net) {
  NetworkLeaves leaves;
  for (const auto& p : net.params) {
    leaves.weights.push_back(tape.leaf(p.weight));
    leaves.biases.push_back(tape.leaf(Matrix(p.bias)));
  }
  return leaves;
}

ad::Var apply_network(ad::Tape& tape, const MlpNetwork& net, const NetworkLeaves& leaves, ad::Var x) {
  if (static_cast<std::size_t>(tape.value(x).cols()) != net.input_dim()) {
    throw std::invalid_argument("network input has " + std::to_string(tape.value(x).cols()) +
                                " columns, expected " + std::to_string(net.input_dim()));
  }
  if (leaves.weights.size() != net.num_layers()) throw std::invalid_argument("apply_network: leaf count mismatch");
  ad::Var h = x;
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    h = tape.activate(tape.linear(h, leaves.weights[k], leaves.biases[k]), net.activations[k]);
  }
  return h;
}

NetworkGraph record_network(ad::Tape& tape, const MlpNetwork& net, ad::Var x) {
  NetworkGraph graph;
  graph.leaves = add_parameters(tape, net);
  graph.output = apply_network(tape, net, graph.leaves, x);
  return graph;
}

ParamSet collect_gradients(const ad::Tape& tape, const NetworkLeaves& leaves) {
  ParamSet grads;
  grads.reserve(leaves.weights.size());
  for (std::size_t k = 0; k < leaves.weights.size(); ++k) {
    grads.push_back({tape.grad(leaves.weights[k]), tape.grad(leaves.biases[k]).col(0)});
  }
  return grads;
}

ForwardPass forward(const MlpNetwork& net, const Matrix& x) {
  if (!x.allFinite()) throw std::invalid_argument("forward: non-finite input");
  ForwardPass pass;
  pass.input = pass.tape.leaf(x);
  pass.graph = record_network(pass.tape, net, pass.input);
  return pass;
}

Matrix evaluate(const MlpNetwork& net, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != net.input_dim()) {
    throw std::invalid_argument("evaluate: input dimension mismatch");
  }
  Matrix h = x;
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    Matrix z = h * net.params[k].weight.transpose();
    z.rowwise() += net.params[k].bias.transpose();
    h = ad::apply_activation(z, net.activations[k]);
  }
  return h;
}

ParamSet backward(ForwardPass& pass, const Matrix& seed) {
  pass.tape.backward(pass.graph.output, seed);
  return collect_gradients(pass.tape, pass.graph.leaves);
}

ParamSet zeros_like(const MlpNetwork& net) {
  ParamSet z;
  for (const auto& p : net.params) {
    z.push_back({Matrix::Zero(p.weight.rows(), p.weight.cols()), Vector::Zero(p.bias.size())});
  }
  return z;
}

void clip_weights_in_place(MlpNetwork& net, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("clip_weights: c must be positive");
  for (auto& p : net.params) {
    p.weight = p.weight.cwiseMax(-c).cwiseMin(c);
    p.bias = p.bias.cwiseMax(-c).cwiseMin(c);
  }
}

MlpNetwork clip_weights(MlpNetwork net, double c) {
  clip_weights_in_place(net, c);
  return net;
}

double max_abs_parameter(const MlpNetwork& net) {
  double m = 0.0;
  for (const auto& p : net.params) {
    if (p.weight.size() > 0) m = std::max(m, p.weight.cwiseAbs().maxCoeff());
    if (p.bias.size() > 0) m = std::max(m, p.bias.cwiseAbs().maxCoeff());
  }
  return m;
}

double lipschitz_upper_bound(const MlpNetwork& net) {
  double bound = 1.0;
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    Eigen::JacobiSVD<Matrix> svd(net.params[k].weight);
    bound *= svd.singularValues()(0) * ad::activation_lipschitz(net.activations[k]);
  }
  return bound;
}

double clipped_lipschitz_bound(const std::vector<std::size_t>& widths,
                               const std::vector<Activation>& activations, double c) {
  double bound = 1.0;
  for (std::size_t k = 0; k < activations.size(); ++k) {
    bound *= c * std::sqrt(static_cast<double>(widths[k] * widths[k + 1])) *
             ad::activation_lipschitz(activations[k]);
  }
  return bound;
}

std::string network_to_json(const MlpNetwork& net) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["widths"] = net.widths;
  j["activations"] = nlohmann::json::array();
  for (const auto a : net.activations) j["activations"].push_back(activation_name(a));
  j["layers"] = nlohmann::json::array();
  for (const auto& p : net.params) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(p.weight.size()));
    for (Eigen::Index r = 0; r < p.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.weight.cols(); ++c) w.push_back(p.weight(r, c));
    }
    j["layers"].push_back({{"weight", w}, {"bias", std::vector<double>(p.bias.begin(), p.bias.end())}});
  }
  return j.dump(2);
}

MlpNetwork network_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("schema_version", 0) != 1) throw std::invalid_argument("checkpoint: unsupported schema_version");
  MlpNetwork net;
  net.widths = j.at("widths").get<std::vector<std::size_t>>();
  for (const auto& a : j.at("activations")) net.activations.push_back(parse_activation(a.get<std::string>()));
  const auto& layers = j.at("layers");
  if (layers.size() != net.activations.size() || net.widths.size() != net.activations.size() + 1) {
    throw std::invalid_argument("checkpoint: layer count mismatch");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto rows = static_cast<Eigen::Index>(net.widths[k + 1]);
    const auto cols = static_cast<Eigen::Index>(net.widths[k]);
    const auto w = layers[k].at("weight").get<std::vector<double>>();
    const auto b = layers[k].at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
      throw std::invalid_argument("checkpoint: layer " + std::to_string(k) + " size mismatch");
    }
    LayerParams p{Matrix(rows, cols), Vector(rows)};
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) p.weight(r, c) = w[static_cast<std::size_t>(r * cols + c)];
      p.bias(r) = b[static_cast<std::size_t>(r)];
    }
    net.params.push_back(std::move(p));
  }
  net.validate();
  return net;
}

void save_network(const MlpNetwork& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << network_to_json(net) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

MlpNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return network_from_json(ss.str());
}

}  // namespace wdistlab
