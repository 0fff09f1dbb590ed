#include "doctest.h"

#include <cmath>

#include "wdistlab/optim.hpp"

using namespace wdistlab;

namespace {

MlpNetwork scalar_net(double w) { return {{1, 1}, {Activation::kLinear}, {{Matrix{{w}}, Vector{{0.0}}}}}; }

ParamSet grad_of(double g, double gb = 0.0) { return {{Matrix{{g}}, Vector{{gb}}}}; }

}  // namespace

TEST_CASE("rmsprop zero gradient leaves parameters") {
  MlpNetwork n = scalar_net(0.3);
  auto st = OptimizerState::make(OptimizerSettings::rmsprop(0.1), n);
  optimizer_step(n.params, grad_of(0.0), st, StepDirection::kAscent);
  CHECK(n.params[0].weight(0, 0) == 0.3);
}

TEST_CASE("rmsprop first step by hand") {
  // a = 0.1 * 1^2 = 0.1; step = 0.1 / (sqrt(0.1) + 1e-10)
  const double want = 0.1 / (std::sqrt(0.1) + 1e-10);
  CHECK(want == doctest::Approx(0.31623).epsilon(1e-5));
  MlpNetwork n = scalar_net(0.0);
  auto st = OptimizerState::make(OptimizerSettings::rmsprop(0.1), n);
  rmsprop_step(n.params, grad_of(1.0), st, StepDirection::kAscent);
  CHECK(n.params[0].weight(0, 0) == doctest::Approx(want).epsilon(1e-14));
  CHECK(st.second_moment[0].weight(0, 0) == doctest::Approx(0.1).epsilon(1e-15));

  MlpNetwork d = scalar_net(0.0);
  auto sd = OptimizerState::make(OptimizerSettings::rmsprop(0.1), d);
  rmsprop_step(d.params, grad_of(1.0), sd, StepDirection::kDescent);
  CHECK(d.params[0].weight(0, 0) == doctest::Approx(-want).epsilon(1e-14));
}

TEST_CASE("rmsprop second identical step is smaller") {
  MlpNetwork n = scalar_net(0.0);
  auto st = OptimizerState::make(OptimizerSettings::rmsprop(0.1), n);
  rmsprop_step(n.params, grad_of(1.0), st, StepDirection::kAscent);
  const double first = n.params[0].weight(0, 0);
  rmsprop_step(n.params, grad_of(1.0), st, StepDirection::kAscent);
  const double second = n.params[0].weight(0, 0) - first;
  CHECK(second < first);
  CHECK(second == doctest::Approx(0.1 / std::sqrt(0.19)).epsilon(1e-9));
}

TEST_CASE("adam") {
  MlpNetwork n = scalar_net(1.0);
  auto st = OptimizerState::make(OptimizerSettings::adam(0.01), n);
  adam_step(n.params, grad_of(0.0), st, StepDirection::kDescent);
  CHECK(n.params[0].weight(0, 0) == 1.0);

  for (double g : {1e-3, 1.0, 250.0}) {
    MlpNetwork m = scalar_net(0.0);
    auto s = OptimizerState::make(OptimizerSettings::adam(0.01), m);
    adam_step(m.params, grad_of(g), s, StepDirection::kAscent);
    CHECK(m.params[0].weight(0, 0) == doctest::Approx(0.01).epsilon(1e-4));
  }
}

TEST_CASE("adam with beta1 = 0 is rmsprop up to bias correction") {
  const double lr = 0.05, b2 = 0.9, eps = 1e-8;
  MlpNetwork a = scalar_net(0.0);
  auto sa = OptimizerState::make(OptimizerSettings::adam(lr, 0.0, b2, eps), a);
  double v = 0, w = 0;
  const double grads[] = {0.5, -1.0, 2.0, 0.25};
  for (int t = 1; t <= 4; ++t) {
    const double g = grads[t - 1];
    adam_step(a.params, grad_of(g), sa, StepDirection::kDescent);
    v = b2 * v + (1 - b2) * g * g;
    w -= lr * g / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
    CHECK(a.params[0].weight(0, 0) == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("non-finite gradient signals divergence") {
  MlpNetwork n = scalar_net(0.0);
  auto st = OptimizerState::make(OptimizerSettings::rmsprop(0.1), n);
  CHECK_THROWS_AS(optimizer_step(n.params, grad_of(std::nan("")), st, StepDirection::kAscent), DivergedError);
  auto sa = OptimizerState::make(OptimizerSettings::adam(0.1), n);
  CHECK_THROWS_AS(optimizer_step(n.params, grad_of(INFINITY), sa, StepDirection::kAscent), DivergedError);
}

TEST_CASE("steps are pure functions of their inputs") {
  MlpNetwork a = scalar_net(0.2), b = scalar_net(0.2);
  auto sa = OptimizerState::make(OptimizerSettings::rmsprop(0.01), a);
  auto sb = OptimizerState::make(OptimizerSettings::rmsprop(0.01), b);
  for (int i = 0; i < 5; ++i) {
    optimizer_step(a.params, grad_of(0.3 * i, -0.1), sa, StepDirection::kAscent);
    optimizer_step(b.params, grad_of(0.3 * i, -0.1), sb, StepDirection::kAscent);
  }
  CHECK(a == b);
}

TEST_CASE("optimizer names") {
  CHECK(parse_optimizer("rmsprop") == OptimizerKind::kRmsProp);
  CHECK(parse_optimizer("adam") == OptimizerKind::kAdam);
  CHECK(optimizer_name(OptimizerKind::kAdam) == "adam");
  CHECK_THROWS(parse_optimizer("sgd"));
}
