#include "wdistlab/autodiff.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace wdistlab::ad {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Matrix apply_activation(const Matrix& x, Activation act) {
  switch (act) {
    case Activation::kRelu:
      return x.cwiseMax(0.0);
    case Activation::kTanh:
      return x.array().tanh().matrix();
    case Activation::kSigmoid:
      // Split by sign so exp() never overflows.
      return x.unaryExpr([](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      });
    case Activation::kLinear:
      return x;
  }
  throw std::logic_error("unknown activation");
}

Matrix activation_derivative(const Matrix& x, Activation act) {
  switch (act) {
    case Activation::kRelu:
      // Subgradient at the kink is 0.
      return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::kTanh:
      return x.unaryExpr([](double v) {
        const double t = std::tanh(v);
        return 1.0 - t * t;
      });
    case Activation::kSigmoid: {
      const Matrix s = apply_activation(x, Activation::kSigmoid);
      return s.array() * (1.0 - s.array());
    }
    case Activation::kLinear:
      return Matrix::Ones(x.rows(), x.cols());
  }
  throw std::logic_error("unknown activation");
}

double activation_lipschitz(Activation act) {
  return act == Activation::kSigmoid ? 0.25 : 1.0;
}

Var Tape::leaf(Matrix value) { return record(std::move(value), {}, nullptr); }

Var Tape::record(Matrix value, std::initializer_list<Var> parents, BackwardFn fn) {
  Node node;
  node.value = std::move(value);
  for (const Var p : parents) {
    if (p.id >= nodes_.size()) throw std::out_of_range("tape: parent does not exist");
    node.parents[node.n_parents++] = p.id;
  }
  node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  if (!n.has_grad) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

std::vector<std::size_t> Tape::parents(Var v) const {
  const Node& n = nodes_.at(v.id);
  return {n.parents.begin(), n.parents.begin() + static_cast<std::ptrdiff_t>(n.n_parents)};
}

void Tape::accumulate(std::size_t id, const Matrix& delta) {
  Node& n = nodes_[id];
  if (n.has_grad) {
    n.grad += delta;
  } else {
    n.grad = delta;
    n.has_grad = true;
  }
}

void Tape::backward(Var output, const Matrix& seed) {
  if (output.id >= nodes_.size()) throw std::out_of_range("backward: unknown output node");
  require_same_shape(nodes_[output.id].value, seed, "backward seed");
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad.resize(0, 0);
  }
  accumulate(output.id, seed);
  for (std::size_t i = output.id + 1; i-- > 0;) {
    if (nodes_[i].has_grad && nodes_[i].backward) nodes_[i].backward(*this, i);
  }
}

void Tape::backward(Var output) {
  const Matrix& v = value(output);
  if (v.size() != 1) throw std::invalid_argument("backward: implicit seed needs a scalar output");
  backward(output, Matrix::Ones(1, 1));
}

Var Tape::linear(Var x, Var weight, Var bias) {
  const Matrix& xv = value(x);
  const Matrix& w = value(weight);
  const Matrix& b = value(bias);
  if (xv.cols() != w.cols() || b.rows() != w.rows() || b.cols() != 1) {
    throw std::invalid_argument("linear: dimension mismatch");
  }
  Matrix out = xv * w.transpose();
  out.rowwise() += b.col(0).transpose();
  return record(std::move(out), {x, weight, bias}, [x, weight, bias](Tape& t, std::size_t self) {
    const Matrix& g = t.node_grad(self);
    t.accumulate(x.id, g * t.value(weight));
    t.accumulate(weight.id, g.transpose() * t.value(x));
    t.accumulate(bias.id, g.colwise().sum().transpose());
  });
}

Var Tape::activate(Var x, Activation act) {
  return record(apply_activation(value(x), act), {x}, [x, act](Tape& t, std::size_t self) {
    if (act == Activation::kLinear) {
      t.accumulate(x.id, t.node_grad(self));
      return;
    }
    t.accumulate(x.id, t.node_grad(self).cwiseProduct(activation_derivative(t.value(x), act)));
  });
}

Var Tape::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  return record(value(a) + value(b), {a, b}, [a, b](Tape& t, std::size_t self) {
    t.accumulate(a.id, t.node_grad(self));
    t.accumulate(b.id, t.node_grad(self));
  });
}

Var Tape::sub(Var a, Var b) {
  require_same_shape(value(a), value(b), "sub");
  return record(value(a) - value(b), {a, b}, [a, b](Tape& t, std::size_t self) {
    t.accumulate(a.id, t.node_grad(self));
    t.accumulate(b.id, -t.node_grad(self));
  });
}

Var Tape::mul(Var a, Var b) {
  require_same_shape(value(a), value(b), "mul");
  return record(value(a).cwiseProduct(value(b)), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Matrix& g = t.node_grad(self);
    t.accumulate(a.id, g.cwiseProduct(t.value(b)));
    t.accumulate(b.id, g.cwiseProduct(t.value(a)));
  });
}

Var Tape::scale(Var a, double s) {
  return record(value(a) * s, {a}, [a, s](Tape& t, std::size_t self) {
    t.accumulate(a.id, t.node_grad(self) * s);
  });
}

Var Tape::add_scalar(Var a, double s) {
  return record(value(a).array() + s, {a}, [a](Tape& t, std::size_t self) {
    t.accumulate(a.id, t.node_grad(self));
  });
}

Var Tape::log(Var a, double floor) {
  return record(value(a).cwiseMax(floor).array().log().matrix(), {a},
                [a, floor](Tape& t, std::size_t self) {
                  const Matrix& av = t.value(a);
                  const Matrix local =
                      av.unaryExpr([floor](double v) { return v > floor ? 1.0 / v : 0.0; });
                  t.accumulate(a.id, t.node_grad(self).cwiseProduct(local));
                });
}

Var Tape::clamp(Var a, double lo, double hi) {
  return record(value(a).cwiseMax(lo).cwiseMin(hi), {a}, [a, lo, hi](Tape& t, std::size_t self) {
    const Matrix local = t.value(a).unaryExpr(
        [lo, hi](double v) { return (v > lo && v < hi) ? 1.0 : 0.0; });
    t.accumulate(a.id, t.node_grad(self).cwiseProduct(local));
  });
}

Var Tape::positive_part(Var a) { return activate(a, Activation::kRelu); }

Var Tape::mean(Var a) {
  const Matrix& av = value(a);
  if (av.size() == 0) throw std::invalid_argument("mean: empty operand");
  Matrix out(1, 1);
  out(0, 0) = av.mean();
  return record(std::move(out), {a}, [a](Tape& t, std::size_t self) {
    const Matrix& av = t.value(a);
    const double g = t.node_grad(self)(0, 0) / static_cast<double>(av.size());
    t.accumulate(a.id, Matrix::Constant(av.rows(), av.cols(), g));
  });
}

Var Tape::sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = value(a).sum();
  return record(std::move(out), {a}, [a](Tape& t, std::size_t self) {
    const Matrix& av = t.value(a);
    t.accumulate(a.id, Matrix::Constant(av.rows(), av.cols(), t.node_grad(self)(0, 0)));
  });
}

}  // namespace wdistlab::ad
