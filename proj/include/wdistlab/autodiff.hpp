#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace wdistlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kRelu, kTanh, kSigmoid, kLinear };

namespace ad {

/// Handle to a node on a Tape. Only meaningful together with the tape that
/// produced it.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode tape over dense matrices. Rows are batch samples, columns
/// are features. Nodes are appended in evaluation order, so parents always
/// precede children and backward() is a single reverse sweep.
class Tape {
 public:
  Var leaf(Matrix value);

  const Matrix& value(Var v) const { return nodes_.at(v.id).value; }

  /// Accumulated gradient after backward(). Zero matrix for nodes the output
  /// does not depend on.
  Matrix grad(Var v) const;

  std::size_t size() const noexcept { return nodes_.size(); }

  /// Parent ids of a node, in operand order.
  std::vector<std::size_t> parents(Var v) const;

  // Differentiable operations.
  /// x * W^T + 1 b^T with W stored (out x in) and b an (out x 1) column.
  Var linear(Var x, Var weight, Var bias);
  Var activate(Var x, Activation act);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);
  /// Elementwise log(max(a, floor)); the floor keeps saturated sigmoid
  /// outputs finite. Gradient is zero where the floor is active.
  Var log(Var a, double floor);
  Var clamp(Var a, double lo, double hi);
  /// Elementwise max(a, 0).
  Var positive_part(Var a);
  /// Mean over all entries, 1x1 result.
  Var mean(Var a);
  Var sum(Var a);

  /// Reverse sweep from `output` seeded with `seed` (same shape as the output
  /// value). Clears previously accumulated gradients.
  void backward(Var output, const Matrix& seed);
  /// Scalar output convenience: seed = 1.
  void backward(Var output);

 private:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  struct Node {
    Matrix value;
    std::array<std::size_t, 3> parents{};
    std::size_t n_parents = 0;
    BackwardFn backward;
    Matrix grad;
    bool has_grad = false;
  };

  Var record(Matrix value, std::initializer_list<Var> parents, BackwardFn fn);
  void accumulate(std::size_t id, const Matrix& delta);
  const Matrix& node_grad(std::size_t id) const { return nodes_[id].grad; }

  std::vector<Node> nodes_;
};

/// Elementwise activation and its derivative expressed through the input.
Matrix apply_activation(const Matrix& x, Activation act);
Matrix activation_derivative(const Matrix& x, Activation act);
double activation_lipschitz(Activation act);

}  // namespace ad
}  // namespace wdistlab
