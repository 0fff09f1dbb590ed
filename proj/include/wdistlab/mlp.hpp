#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "wdistlab/autodiff.hpp"
#include "wdistlab/rng.hpp"

namespace wdistlab {

struct LayerParams {
  Matrix weight;  // out x in
  Vector bias;    // out

  friend bool operator==(const LayerParams& a, const LayerParams& b) {
    return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
           a.bias.size() == b.bias.size() && a.weight == b.weight && a.bias == b.bias;
  }
};

/// Parameter-shaped container. Also used for gradients and optimizer
/// accumulators so that all three line up entry for entry.
using ParamSet = std::vector<LayerParams>;

/// Feed-forward network: layer k maps widths[k] -> widths[k+1] with an affine
/// map followed by activations[k].
struct MlpNetwork {
  std::vector<std::size_t> widths;
  std::vector<Activation> activations;
  ParamSet params;

  std::size_t input_dim() const { return widths.front(); }
  std::size_t output_dim() const { return widths.back(); }
  std::size_t num_layers() const { return activations.size(); }
  std::size_t num_parameters() const;

  /// Throws std::invalid_argument if dimensions disagree or any parameter is
  /// non-finite.
  void validate() const;

  bool operator==(const MlpNetwork&) const = default;
};

std::string_view activation_name(Activation act);
Activation parse_activation(std::string_view name);

/// Fan-balanced uniform init: weights ~ U(-s, s), s = sqrt(6 / (fan_in + fan_out)),
/// zero biases.
MlpNetwork init_network(const std::vector<std::size_t>& widths,
                        const std::vector<Activation>& activations, Rng& rng);

/// Network parameters laid onto a tape as leaves.
struct NetworkLeaves {
  std::vector<ad::Var> weights;
  std::vector<ad::Var> biases;
};

NetworkLeaves add_parameters(ad::Tape& tape, const MlpNetwork& net);

/// Applies the network to `x` using already-registered parameter leaves, so
/// several batches can share one set of parameters on the same tape.
ad::Var apply_network(ad::Tape& tape, const MlpNetwork& net, const NetworkLeaves& leaves, ad::Var x);

struct NetworkGraph {
  ad::Var output;
  NetworkLeaves leaves;
};

/// add_parameters + apply_network.
NetworkGraph record_network(ad::Tape& tape, const MlpNetwork& net, ad::Var x);

/// Gradients of the last backward() on `tape` w.r.t. the given leaves.
ParamSet collect_gradients(const ad::Tape& tape, const NetworkLeaves& leaves);

struct ForwardPass {
  ad::Tape tape;
  ad::Var input;
  NetworkGraph graph;

  const Matrix& output() const { return tape.value(graph.output); }
};

/// Batched forward evaluation with the computation recorded for backward().
ForwardPass forward(const MlpNetwork& net, const Matrix& x);

/// Output only, no tape.
Matrix evaluate(const MlpNetwork& net, const Matrix& x);

/// Reverse sweep seeded at the network output; returns parameter gradients.
/// Input gradients remain available as pass.tape.grad(pass.input).
ParamSet backward(ForwardPass& pass, const Matrix& seed);

ParamSet zeros_like(const MlpNetwork& net);

/// Every parameter mapped into [-c, c].
MlpNetwork clip_weights(MlpNetwork net, double c);
void clip_weights_in_place(MlpNetwork& net, double c);
double max_abs_parameter(const MlpNetwork& net);

/// Product of layer spectral norms and activation Lipschitz constants.
double lipschitz_upper_bound(const MlpNetwork& net);

/// Bound valid for any network of this architecture whose entries lie in
/// [-c, c]: each layer norm is at most c * sqrt(fan_in * fan_out).
double clipped_lipschitz_bound(const std::vector<std::size_t>& widths,
                               const std::vector<Activation>& activations, double c);

// Checkpoint format: JSON {schema_version, widths, activations, layers:[{weight (row-major), bias}]}.
std::string network_to_json(const MlpNetwork& net);
MlpNetwork network_from_json(std::string_view text);
void save_network(const MlpNetwork& net, const std::string& path);
MlpNetwork load_network(const std::string& path);

}  // namespace wdistlab
