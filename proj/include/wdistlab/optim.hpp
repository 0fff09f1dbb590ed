#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "wdistlab/mlp.hpp"

namespace wdistlab {

enum class OptimizerKind { kRmsProp, kAdam };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::kRmsProp;
  double learning_rate = 5e-5;
  double rho = 0.9;  // RMSProp decay
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-10;

  static OptimizerSettings rmsprop(double lr, double rho = 0.9, double eps = 1e-10);
  static OptimizerSettings adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                                double eps = 1e-8);
};

/// Per-parameter accumulators. For RMSProp only `second_moment` is used.
struct OptimizerState {
  OptimizerSettings settings;
  ParamSet first_moment;
  ParamSet second_moment;
  std::int64_t steps = 0;

  static OptimizerState make(const OptimizerSettings& settings, const MlpNetwork& net);
};

enum class StepDirection { kAscent, kDescent };

/// Raised when an optimizer sees a non-finite gradient.
class DivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// a <- rho a + (1 - rho) g^2;  p <- p -/+ lr g / (sqrt(a) + eps).
void rmsprop_step(ParamSet& params, const ParamSet& grads, OptimizerState& state,
                  StepDirection direction);

/// Bias-corrected Adam.
void adam_step(ParamSet& params, const ParamSet& grads, OptimizerState& state,
               StepDirection direction);

/// Dispatches on state.settings.kind.
void optimizer_step(ParamSet& params, const ParamSet& grads, OptimizerState& state,
                    StepDirection direction);

}  // namespace wdistlab
