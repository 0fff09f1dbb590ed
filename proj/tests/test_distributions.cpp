#include "doctest.h"

#include <sstream>

#include "oracles.hpp"
#include "wdistlab/distances.hpp"
#include "wdistlab/distributions.hpp"
#include "wdistlab/mlp.hpp"

using namespace wdistlab;

TEST_CASE("empirical measure invariants") {
  CHECK_NOTHROW(EmpiricalMeasure(Matrix::Zero(2, 1), Vector::Constant(2, 0.5)));
  CHECK_THROWS_AS(EmpiricalMeasure(Matrix::Zero(2, 1), Vector::Constant(2, 0.6)), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure(Matrix::Zero(2, 1), Vector{{1.5, -0.5}}), std::invalid_argument);
  Matrix bad = Matrix::Zero(2, 1);
  bad(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(EmpiricalMeasure::uniform(bad), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution({0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("uniform prior sample") {
  Rng r(1);
  const auto m = sample_prior({PriorKind::kUniformUnitCube, 1}, 4, r);
  CHECK(m.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(m.points()(i, 0) >= 0.0);
    CHECK(m.points()(i, 0) <= 1.0);
    CHECK(m.weights()(i) == 0.25);
  }
}

TEST_CASE("standard normal prior mean") {
  Rng r(2);
  const auto m = sample_prior({PriorKind::kStandardNormal, 2}, 10000, r);
  const Eigen::RowVectorXd mean = m.points().colwise().mean();
  CHECK(std::abs(mean(0)) < 0.05);
  CHECK(std::abs(mean(1)) < 0.05);
}

TEST_CASE("prior sampling is deterministic") {
  Rng a(9), b(9);
  CHECK(sample_prior_points({PriorKind::kStandardNormal, 3}, 50, a) ==
        sample_prior_points({PriorKind::kStandardNormal, 3}, 50, b));
}

TEST_CASE("pushforward") {
  const auto z = EmpiricalMeasure(Matrix{{0.0}, {0.5}}, Vector{{0.25, 0.75}});
  MlpNetwork affine{{1, 1}, {Activation::kLinear}, {{Matrix{{2.0}}, Vector{{1.0}}}}};
  const auto out = pushforward(affine, z);
  CHECK(out.points()(0, 0) == 1.0);
  CHECK(out.points()(1, 0) == 2.0);
  CHECK(out.weights() == z.weights());

  MlpNetwork identity{{1, 1}, {Activation::kLinear}, {{Matrix{{1.0}}, Vector{{0.0}}}}};
  CHECK(pushforward(identity, z).points() == z.points());

  MlpNetwork constant{{1, 1}, {Activation::kLinear}, {{Matrix{{0.0}}, Vector{{3.0}}}}};
  const auto c = pushforward(constant, z);
  CHECK(c.points()(0, 0) == 3.0);
  CHECK(c.points()(1, 0) == 3.0);

  MlpNetwork wrong{{2, 1}, {Activation::kLinear}, {{Matrix::Zero(1, 2), Vector::Zero(1)}}};
  CHECK_THROWS_AS(pushforward(wrong, z), std::invalid_argument);
}

TEST_CASE("parallel line atoms") {
  const auto l = make_parallel_line(0.0, 2);
  CHECK(l.measure.points() == Matrix{{0.0, 0.0}, {0.0, 1.0}});
  CHECK(l.probs[0] == 0.5);
  CHECK(l.probs[1] == 0.5);
  const auto h = make_parallel_line(0.5, 3);
  for (int i = 0; i < 3; ++i) CHECK(h.measure.points()(i, 0) == 0.5);
  CHECK_THROWS(make_parallel_line(0.0, 1));
}

TEST_CASE("lines at 0 and 1 are W1 distance 1 apart") {
  const auto a = make_parallel_line(0.0, 7), b = make_parallel_line(1.0, 7);
  const double brute = oracle::w1_permutations(oracle::rows(a.measure.points()), oracle::rows(b.measure.points()));
  CHECK(brute == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(w1_exact(a.measure, b.measure).cost - brute) < 1e-12);
}

TEST_CASE("ring mixture") {
  RingMixtureSpec one{1, 2.0, 1e-9};
  Rng r(3);
  const auto m = make_ring_mixture(one, 100, r);
  for (int i = 0; i < 100; ++i) CHECK((m.points().row(i) - Eigen::RowVector2d(2.0, 0.0)).norm() < 1e-6);

  RingMixtureSpec eight;
  Rng r2(4);
  const Matrix s = sample_ring_mixture_points(eight, 8000, r2);
  std::vector<int> counts(8, 0);
  for (int i = 0; i < s.rows(); ++i) {
    int best = 0;
    for (int k = 1; k < 8; ++k)
      if ((s.row(i).transpose() - eight.center(k)).norm() < (s.row(i).transpose() - eight.center(best)).norm()) best = k;
    ++counts[best];
  }
  for (int c : counts) {
    CHECK(c >= 0.08 * 8000);
    CHECK(c <= 0.17 * 8000);
  }

  Rng a(5), b(5);
  CHECK(make_ring_mixture(eight, 50, a).points() == make_ring_mixture(eight, 50, b).points());
  CHECK_THROWS(RingMixtureSpec{8, 1.0, 2.0}.validate());
}

TEST_CASE("measure csv round trip") {
  Rng r(6);
  const auto m = EmpiricalMeasure(sample_prior_points({PriorKind::kStandardNormal, 3}, 5, r),
                                  Vector{{0.1, 0.2, 0.3, 0.25, 0.15}});
  std::stringstream ss;
  write_measure_csv(m, ss);
  CHECK(ss.str().rfind("w,x0,x1,x2\n", 0) == 0);
  const auto back = read_measure_csv(ss);
  CHECK(back.points() == m.points());
  CHECK(back.weights() == m.weights());
}
