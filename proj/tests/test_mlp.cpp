#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "net_oracle.hpp"
#include "wdistlab/distributions.hpp"
#include "wdistlab/mlp.hpp"

using namespace wdistlab;

TEST_CASE("single affine layer") {
  MlpNetwork net{{1, 1}, {Activation::kLinear}, {{Matrix{{2.0}}, Vector{{1.0}}}}};
  CHECK(evaluate(net, Matrix{{3.0}})(0, 0) == 7.0);
  CHECK(forward(net, Matrix{{3.0}}).output()(0, 0) == 7.0);
}

TEST_CASE("relu layer") {
  MlpNetwork net{{2, 2}, {Activation::kRelu}, {{Matrix::Identity(2, 2), Vector::Zero(2)}}};
  CHECK(evaluate(net, Matrix{{-1.0, 2.0}}) == Matrix{{0.0, 2.0}});
}

TEST_CASE("sigmoid output stays inside (0, 1)") {
  Rng r(1);
  MlpNetwork net = init_network({3, 16, 1}, {Activation::kRelu, Activation::kSigmoid}, r);
  for (auto& l : net.params) l.weight *= 3.0;
  Rng z(2);
  const Matrix x = sample_prior_points({PriorKind::kStandardNormal, 3}, 500, z);
  const Matrix out = evaluate(net, x);
  CHECK((out.array() > 0.0).all());
  CHECK((out.array() < 1.0).all());

  // in double precision the logistic saturates to exactly 0 or 1 for large logits
  for (auto& l : net.params) l.weight *= 100.0;
  const Matrix sat = evaluate(net, x);
  CHECK((sat.array() >= 0.0).all());
  CHECK((sat.array() <= 1.0).all());
}

TEST_CASE("forward rejects bad input") {
  Rng r(1);
  const MlpNetwork net = init_network({2, 4, 1}, {Activation::kRelu, Activation::kLinear}, r);
  CHECK_THROWS_AS(forward(net, Matrix::Zero(3, 3)), std::invalid_argument);
  Matrix bad = Matrix::Zero(1, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(forward(net, bad), std::invalid_argument);
}

TEST_CASE("init_network") {
  Rng a(5), b(5);
  const std::vector<std::size_t> w{3, 10, 4};
  const std::vector<Activation> acts{Activation::kRelu, Activation::kLinear};
  const MlpNetwork n1 = init_network(w, acts, a), n2 = init_network(w, acts, b);
  CHECK(n1 == n2);
  for (std::size_t k = 0; k < n1.num_layers(); ++k) {
    CHECK(n1.params[k].bias.isZero(0.0));
    const double s = std::sqrt(6.0 / static_cast<double>(w[k] + w[k + 1]));
    CHECK(n1.params[k].weight.cwiseAbs().maxCoeff() <= s);
  }
  CHECK(n1.num_parameters() == 3 * 10 + 10 + 10 * 4 + 4);
}

TEST_CASE("clip_weights") {
  MlpNetwork net{{1, 2}, {Activation::kLinear}, {{Matrix{{-0.02}, {0.005}}, Vector{{0.0, 0.0}}}}};
  const MlpNetwork c = clip_weights(net, 0.01);
  CHECK(c.params[0].weight(0, 0) == -0.01);
  CHECK(c.params[0].weight(1, 0) == 0.005);
  CHECK(clip_weights(c, 0.01) == c);
  CHECK_THROWS_AS(clip_weights(net, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(clip_weights(net, -1.0), std::invalid_argument);

  Rng r(3);
  const MlpNetwork big = init_network({4, 32, 32, 1}, {Activation::kRelu, Activation::kTanh, Activation::kLinear}, r);
  for (double cb : {0.001, 0.01, 0.1}) {
    const MlpNetwork cl = clip_weights(big, cb);
    CHECK(max_abs_parameter(cl) <= cb);
    CHECK(clip_weights(cl, cb) == cl);
  }
}

TEST_CASE("Lipschitz bounds dominate sampled slopes after clipping") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  const std::vector<Activation> all{Activation::kRelu, Activation::kTanh, Activation::kSigmoid, Activation::kLinear};
  for (int t = 0; t < 8; ++t) {
    const std::size_t in = 1 + gen() % 3;
    const std::vector<std::size_t> widths{in, 8 + gen() % 8, 8 + gen() % 8, 1};
    const std::vector<Activation> acts{all[gen() % 4], all[gen() % 4], all[gen() % 4]};
    Rng r(t);
    const double c = 0.05;
    const MlpNetwork net = clip_weights(init_network(widths, acts, r), c);
    const double bound = clipped_lipschitz_bound(widths, acts, c);
    const double spectral = lipschitz_upper_bound(net);
    CHECK(std::isfinite(bound));
    CHECK(spectral <= bound * (1 + 1e-12));
    for (int s = 0; s < 200; ++s) {
      Matrix x(2, in);
      for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = 3 * nd(gen);
      const Matrix y = evaluate(net, x);
      const double dist = (x.row(0) - x.row(1)).norm();
      if (dist == 0) continue;
      const double slope = std::abs(y(0, 0) - y(1, 0)) / dist;
      CHECK(slope <= spectral * (1 + 1e-9));
    }
  }
}

TEST_CASE("random networks: backward matches central differences") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  const std::vector<Activation> all{Activation::kRelu, Activation::kTanh, Activation::kSigmoid, Activation::kLinear};
  for (int cfg = 0; cfg < 12; ++cfg) {
    const std::size_t hidden = gen() % 4;
    std::vector<std::size_t> widths{1 + gen() % 3};
    std::vector<Activation> acts;
    for (std::size_t h = 0; h < hidden; ++h) {
      widths.push_back(2 + gen() % 6);
      acts.push_back(all[gen() % 4]);
    }
    widths.push_back(1 + gen() % 2);
    acts.push_back(all[gen() % 4]);
    Rng r(cfg + 100);
    const MlpNetwork net = init_network(widths, acts, r);
    const auto flat = flatten(net);
    int done = 0;
    while (done < 20) {
      std::vector<double> x(widths[0]);
      for (auto& v : x) v = nd(gen);
      double kink = 1e9;
      oracle::mlp_forward(oracle_layers(net, flat), x, &kink);
      if (kink < 1e-3) continue;
      ++done;
      Matrix xm(1, static_cast<Eigen::Index>(x.size()));
      for (std::size_t j = 0; j < x.size(); ++j) xm(0, j) = x[j];
      ForwardPass pass = forward(net, xm);
      const auto g = flatten(backward(pass, Matrix::Ones(1, widths.back())));
      const Matrix gx = pass.tape.grad(pass.input);
      auto sum_out = [&](const std::vector<double>& w, const std::vector<double>& in) {
        double s = 0;
        for (double v : oracle::mlp_forward(oracle_layers(net, w), in)) s += v;
        return s;
      };
      const auto fd = oracle::central_diff([&](const std::vector<double>& w) { return sum_out(w, x); }, flat, 1e-6);
      const auto fdx = oracle::central_diff([&](const std::vector<double>& in) { return sum_out(flat, in); }, x, 1e-6);
      for (std::size_t i = 0; i < fd.size(); ++i)
        CHECK(std::abs(g[i] - fd[i]) / std::max(std::abs(fd[i]), 1e-4) <= 1e-4);
      for (std::size_t i = 0; i < fdx.size(); ++i)
        CHECK(std::abs(gx(0, i) - fdx[i]) / std::max(std::abs(fdx[i]), 1e-4) <= 1e-4);
    }
  }
}

TEST_CASE("checkpoint round trip") {
  Rng r(9);
  const MlpNetwork net = init_network({2, 5, 3}, {Activation::kTanh, Activation::kSigmoid}, r);
  CHECK(network_from_json(network_to_json(net)) == net);
  const auto path = (std::filesystem::temp_directory_path() / "wdistlab_ckpt_test.json").string();
  save_network(net, path);
  CHECK(load_network(path) == net);
  std::filesystem::remove(path);
  CHECK_THROWS(network_from_json(R"({"schema_version": 2})"));
}
