#include "wdistlab/optim.hpp"

#include <cmath>

namespace wdistlab {

namespace {

void check_shapes_and_finite(const ParamSet& params, const ParamSet& grads, const ParamSet& acc) {
  if (params.size() != grads.size() || params.size() != acc.size()) {
    throw std::invalid_argument("optimizer: layer count mismatch");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].weight.rows() != grads[k].weight.rows() ||
        params[k].weight.cols() != grads[k].weight.cols() ||
        params[k].bias.size() != grads[k].bias.size() ||
        acc[k].weight.rows() != params[k].weight.rows() ||
        acc[k].weight.cols() != params[k].weight.cols() ||
        acc[k].bias.size() != params[k].bias.size()) {
      throw std::invalid_argument("optimizer: shape mismatch in layer " + std::to_string(k));
    }
    if (!grads[k].weight.allFinite() || !grads[k].bias.allFinite()) {
      throw DivergedError("optimizer: non-finite gradient in layer " + std::to_string(k));
    }
  }
}

double sign_of(StepDirection d) { return d == StepDirection::kAscent ? 1.0 : -1.0; }

template <typename P, typename G, typename A>
void rmsprop_update(P& p, const G& g, A& a, double lr, double rho, double eps, double sign) {
  a.array() = rho * a.array() + (1.0 - rho) * g.array().square();
  p.array() += sign * lr * g.array() / (a.array().sqrt() + eps);
}

template <typename P, typename G, typename A>
void adam_update(P& p, const G& g, A& m, A& v, const OptimizerSettings& s, double bc1, double bc2,
                 double sign) {
  m.array() = s.beta1 * m.array() + (1.0 - s.beta1) * g.array();
  v.array() = s.beta2 * v.array() + (1.0 - s.beta2) * g.array().square();
  p.array() += sign * s.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + s.epsilon);
}

}  // namespace

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "rmsprop";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "rmsprop") return OptimizerKind::kRmsProp;
  if (name == "adam") return OptimizerKind::kAdam;
  throw std::invalid_argument("unknown optimizer: " + std::string(name));
}

OptimizerSettings OptimizerSettings::rmsprop(double lr, double rho, double eps) {
  OptimizerSettings s;
  s.kind = OptimizerKind::kRmsProp;
  s.learning_rate = lr;
  s.rho = rho;
  s.epsilon = eps;
  return s;
}

OptimizerSettings OptimizerSettings::adam(double lr, double beta1, double beta2, double eps) {
  OptimizerSettings s;
  s.kind = OptimizerKind::kAdam;
  s.learning_rate = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = eps;
  return s;
}

OptimizerState OptimizerState::make(const OptimizerSettings& settings, const MlpNetwork& net) {
  if (!(settings.learning_rate >= 0.0)) throw std::invalid_argument("optimizer: negative learning rate");
  return {settings, zeros_like(net), zeros_like(net), 0};
}

void rmsprop_step(ParamSet& params, const ParamSet& grads, OptimizerState& state,
                  StepDirection direction) {
  check_shapes_and_finite(params, grads, state.second_moment);
  const auto& s = state.settings;
  const double sign = sign_of(direction);
  for (std::size_t k = 0; k < params.size(); ++k) {
    rmsprop_update(params[k].weight, grads[k].weight, state.second_moment[k].weight,
                   s.learning_rate, s.rho, s.epsilon, sign);
    rmsprop_update(params[k].bias, grads[k].bias, state.second_moment[k].bias, s.learning_rate,
                   s.rho, s.epsilon, sign);
  }
  ++state.steps;
}

void adam_step(ParamSet& params, const ParamSet& grads, OptimizerState& state,
               StepDirection direction) {
  check_shapes_and_finite(params, grads, state.second_moment);
  check_shapes_and_finite(params, grads, state.first_moment);
  const auto& s = state.settings;
  ++state.steps;
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(state.steps));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(state.steps));
  const double sign = sign_of(direction);
  for (std::size_t k = 0; k < params.size(); ++k) {
    adam_update(params[k].weight, grads[k].weight, state.first_moment[k].weight,
                state.second_moment[k].weight, s, bc1, bc2, sign);
    adam_update(params[k].bias, grads[k].bias, state.first_moment[k].bias,
                state.second_moment[k].bias, s, bc1, bc2, sign);
  }
}

void optimizer_step(ParamSet& params, const ParamSet& grads, OptimizerState& state,
                    StepDirection direction) {
  if (state.settings.kind == OptimizerKind::kAdam) {
    adam_step(params, grads, state, direction);
  } else {
    rmsprop_step(params, grads, state, direction);
  }
}

}  // namespace wdistlab
