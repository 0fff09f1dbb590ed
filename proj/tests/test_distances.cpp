#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "wdistlab/distances.hpp"
#include "wdistlab/mlp.hpp"

using namespace wdistlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix random_points(std::size_t n, std::size_t d, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = nd(gen);
  return m;
}

Vector to_vec(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

void check_plan(const TransportPlan& plan, const EmpiricalMeasure& p, const EmpiricalMeasure& q) {
  CHECK((plan.coupling.array() >= 0).all());
  CHECK((plan.coupling.rowwise().sum() - p.weights()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((plan.coupling.colwise().sum().transpose() - q.weights()).cwiseAbs().maxCoeff() <= 1e-9);
  double cost = 0;
  for (Eigen::Index i = 0; i < plan.coupling.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.coupling.cols(); ++j)
      cost += plan.coupling(i, j) * (p.points().row(i) - q.points().row(j)).norm();
  CHECK(std::abs(cost - plan.cost) <= 1e-9);
}

}  // namespace

TEST_CASE("tv examples") {
  const DiscreteDistribution a({0.5, 0.5}), b({0.25, 0.75});
  CHECK(tv_discrete(a, a) == 0.0);
  CHECK(tv_discrete(DiscreteDistribution({1, 0}), DiscreteDistribution({0, 1})) == 1.0);
  CHECK(tv_discrete(a, b) == 0.25);
  CHECK(oracle::tv_subsets(a.probs(), b.probs()) == 0.25);
  CHECK_THROWS_AS(tv_discrete(a, DiscreteDistribution({1.0})), std::invalid_argument);
}

TEST_CASE("tv equals the subset supremum") {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + gen() % 12;
    const auto p = oracle::random_prob(n, gen), q = oracle::random_prob(n, gen);
    CHECK(std::abs(tv_discrete(DiscreteDistribution(p), DiscreteDistribution(q)) - oracle::tv_subsets(p, q)) <= 1e-12);
  }
}

TEST_CASE("kl examples") {
  const DiscreteDistribution a({0.5, 0.5}), b({0.25, 0.75});
  CHECK(kl_discrete(a, a) == 0.0);
  CHECK(kl_discrete(DiscreteDistribution({1, 0}), DiscreteDistribution({0, 1})) == kInf);
  CHECK(std::abs(kl_discrete(a, b) - 0.143841036225890463719609502997) <= 1e-15);
  // 0 log 0 = 0
  CHECK(kl_discrete(DiscreteDistribution({0, 1}), DiscreteDistribution({0.5, 0.5})) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("js examples and symmetry") {
  const DiscreteDistribution a({0.5, 0.5});
  CHECK(js_discrete(a, a) == 0.0);
  CHECK(std::abs(js_discrete(DiscreteDistribution({1, 0}), DiscreteDistribution({0, 1})) - std::numbers::ln2) <= 1e-15);
  std::mt19937_64 gen(2);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + gen() % 10;
    const DiscreteDistribution p(oracle::random_prob(n, gen)), q(oracle::random_prob(n, gen));
    const double js = js_discrete(p, q);
    CHECK(js == js_discrete(q, p));
    CHECK(js >= 0.0);
    CHECK(js <= std::numbers::ln2);
  }
}

TEST_CASE("w1_1d examples") {
  const auto a = EmpiricalMeasure::uniform(Matrix{{0.3}}), b = EmpiricalMeasure::uniform(Matrix{{-1.2}});
  CHECK(w1_1d(a, b) == doctest::Approx(1.5));
  const auto p = EmpiricalMeasure::uniform(Matrix{{1.0}, {2.0}, {5.0}});
  const auto q = EmpiricalMeasure::uniform(Matrix{{5.0}, {1.0}, {2.0}});
  CHECK(w1_1d(p, q) == 0.0);
  CHECK_THROWS_AS(w1_1d(EmpiricalMeasure::uniform(Matrix::Zero(2, 2)), EmpiricalMeasure::uniform(Matrix::Zero(2, 2))),
                  std::invalid_argument);
}

TEST_CASE("w1_1d agrees with w1_exact and the cdf formula") {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 50; ++t) {
    const Matrix x = random_points(16, 1, gen), y = random_points(16, 1, gen);
    const auto p = EmpiricalMeasure::uniform(x), q = EmpiricalMeasure::uniform(y);
    const double a = w1_1d(p, q), b = w1_exact(p, q).cost;
    CHECK(std::abs(a - b) <= 1e-9);
    std::vector<double> xs(x.data(), x.data() + 16), ys(y.data(), y.data() + 16), w(16, 1.0 / 16);
    CHECK(std::abs(a - oracle::w1_cdf_1d(xs, w, ys, w)) <= 1e-9);
  }
}

TEST_CASE("w1_exact examples") {
  std::mt19937_64 gen(4);
  const auto p = EmpiricalMeasure::uniform(random_points(6, 2, gen));
  const auto plan = w1_exact(p, p);
  CHECK(plan.cost == 0.0);
  CHECK((plan.coupling - Matrix::Identity(6, 6) / 6.0).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(w1_exact(make_parallel_line(0.0, 64).measure, make_parallel_line(0.5, 64).measure).cost ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("w1_exact equals the permutation minimum") {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 1 + gen() % 7, d = 1 + gen() % 3;
    const Matrix x = random_points(n, d, gen), y = random_points(n, d, gen);
    const auto p = EmpiricalMeasure::uniform(x), q = EmpiricalMeasure::uniform(y);
    const auto plan = w1_exact(p, q);
    CHECK(std::abs(plan.cost - oracle::w1_permutations(oracle::rows(x), oracle::rows(y))) <= 1e-9);
    check_plan(plan, p, q);
  }
}

TEST_CASE("weighted transport on the line matches the cdf integral") {
  std::mt19937_64 gen(6);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 1 + gen() % 9, m = 1 + gen() % 9;
    const Matrix x = random_points(n, 1, gen), y = random_points(m, 1, gen);
    const auto wx = oracle::random_prob(n, gen, false), wy = oracle::random_prob(m, gen, false);
    const EmpiricalMeasure p(x, to_vec(wx)), q(y, to_vec(wy));
    const auto plan = w1_exact(p, q);
    const double want = oracle::w1_cdf_1d({x.data(), x.data() + n}, wx, {y.data(), y.data() + m}, wy);
    CHECK(std::abs(plan.cost - want) <= 1e-9);
    check_plan(plan, p, q);
  }
}

TEST_CASE("weighted transport in the plane matches replicated-atom matching") {
  // Weights in multiples of 1/6: duplicating atoms turns the problem into an
  // equal-size matching that the permutation oracle can solve.
  std::mt19937_64 gen(7);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + gen() % 3, m = 2 + gen() % 3;
    const Matrix x = random_points(n, 2, gen), y = random_points(m, 2, gen);
    auto split6 = [&](std::size_t k) {
      std::vector<int> c(k, 1);
      for (std::size_t r = k; r < 6; ++r) ++c[gen() % k];
      return c;
    };
    const auto cx = split6(n), cy = split6(m);
    oracle::Points ex, ey;
    Vector wx(n), wy(m);
    for (std::size_t i = 0; i < n; ++i) {
      wx(i) = cx[i] / 6.0;
      for (int r = 0; r < cx[i]; ++r) ex.push_back(oracle::rows(x)[i]);
    }
    for (std::size_t j = 0; j < m; ++j) {
      wy(j) = cy[j] / 6.0;
      for (int r = 0; r < cy[j]; ++r) ey.push_back(oracle::rows(y)[j]);
    }
    const EmpiricalMeasure p(x, wx), q(y, wy);
    const auto plan = w1_exact(p, q);
    CHECK(std::abs(plan.cost - oracle::w1_permutations(ex, ey)) <= 1e-9);
    check_plan(plan, p, q);
  }
}

TEST_CASE("w1_exact rejects oversized problems and dimension mismatch") {
  const auto big = EmpiricalMeasure::uniform(Matrix::Zero(2100, 1));
  CHECK_THROWS_AS(w1_exact(big, big), std::invalid_argument);
  CHECK_THROWS_AS(w1_exact(EmpiricalMeasure::uniform(Matrix::Zero(2, 1)), EmpiricalMeasure::uniform(Matrix::Zero(2, 2))),
                  std::invalid_argument);
}

TEST_CASE("solve_assignment on a hand example") {
  const Matrix c{{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  const auto a = solve_assignment(c);
  double total = 0;
  for (std::size_t i = 0; i < 3; ++i) total += c(i, a[i]);
  CHECK(total == 5.0);
}

TEST_CASE("metric axioms on random triples") {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + gen() % 6;
    const DiscreteDistribution a(oracle::random_prob(n, gen)), b(oracle::random_prob(n, gen)),
        c(oracle::random_prob(n, gen));
    CHECK(tv_discrete(a, b) == tv_discrete(b, a));
    CHECK(tv_discrete(a, c) <= tv_discrete(a, b) + tv_discrete(b, c) + 1e-9);

    const Matrix pts = random_points(n, 2, gen);
    const EmpiricalMeasure pa(pts, to_vec(a.probs())), pb(pts, to_vec(b.probs())), pc(pts, to_vec(c.probs()));
    const double ab = w1_exact(pa, pb).cost, ba = w1_exact(pb, pa).cost;
    CHECK(std::abs(ab - ba) <= 1e-9);
    CHECK(w1_exact(pa, pc).cost <= ab + w1_exact(pb, pc).cost + 1e-9);
    CHECK(w1_exact(pa, pa).cost <= 1e-9);
  }
}

TEST_CASE("ipm examples and duality gap") {
  MlpNetwork ident{{1, 1}, {Activation::kLinear}, {{Matrix{{1.0}}, Vector{{0.0}}}}};
  const auto d1 = EmpiricalMeasure::uniform(Matrix{{1.0}}), d0 = EmpiricalMeasure::uniform(Matrix{{0.0}});
  CHECK(ipm_estimate(ident, d1, d0) == 1.0);
  CHECK(ipm_estimate(ident, d1, d1) == 0.0);
  MlpNetwork neg = ident;
  neg.params[0].weight(0, 0) = -1.0;
  CHECK(ipm_estimate(neg, d1, d0) == -1.0);

  // Piecewise-linear 1-D functions with total absolute slope <= 1 are
  // 1-Lipschitz by construction.
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 30; ++t) {
    Rng r(t);
    MlpNetwork f = init_network({1, 8, 1}, {Activation::kRelu, Activation::kLinear}, r);
    for (int k = 0; k < 8; ++k) f.params[0].bias(k) = u(gen);
    double total = 0;
    for (int k = 0; k < 8; ++k) total += std::abs(f.params[1].weight(0, k) * f.params[0].weight(k, 0));
    f.params[1].weight /= total;
    const Matrix x = random_points(10, 1, gen), y = random_points(10, 1, gen);
    const auto p = EmpiricalMeasure::uniform(x), q = EmpiricalMeasure::uniform(y);
    CHECK(ipm_estimate(f, p, q) <= w1_exact(p, q).cost + 1e-9);
  }
}

TEST_CASE("mmd examples") {
  const KernelSpec k{KernelKind::kGaussian, 1.0};
  const auto a = EmpiricalMeasure::uniform(Matrix{{0.0}}), b = EmpiricalMeasure::uniform(Matrix{{10.0}});
  CHECK(mmd_squared(a, b, k) == doctest::Approx(2 * (1 - std::exp(-50.0))));
  std::mt19937_64 gen(10);
  const auto p = EmpiricalMeasure::uniform(random_points(7, 3, gen));
  CHECK(std::abs(mmd_squared(p, p, k)) <= 1e-12);
  CHECK_THROWS_AS(mmd_squared(p, p, {KernelKind::kGaussian, 0.0}), std::invalid_argument);
}

TEST_CASE("mmd matches the double loop") {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + gen() % 10, m = 1 + gen() % 10, d = 1 + gen() % 3;
    const Matrix x = random_points(n, d, gen), y = random_points(m, d, gen);
    const auto wx = oracle::random_prob(n, gen, false), wy = oracle::random_prob(m, gen, false);
    const double h = 0.3 + (gen() % 100) / 50.0;
    const double got = mmd_squared(EmpiricalMeasure(x, to_vec(wx)), EmpiricalMeasure(y, to_vec(wy)), {KernelKind::kGaussian, h});
    const double want = oracle::mmd_loops(oracle::rows(x), wx, oracle::rows(y), wy, h);
    CHECK(std::abs(got - std::max(want, 0.0)) <= 1e-12);
  }
}

TEST_CASE("parallel lines closed form") {
  const auto z = parallel_lines_closed_form(0.0);
  CHECK(z.w1 == 0.0);
  CHECK(z.js == 0.0);
  CHECK(z.kl == 0.0);
  CHECK(z.tv == 0.0);
  const auto s = parallel_lines_closed_form(0.7);
  CHECK(s.w1 == 0.7);
  CHECK(s.js == std::numbers::ln2);
  CHECK(s.kl == kInf);
  CHECK(s.tv == 1.0);
  CHECK(parallel_lines_closed_form(-0.3).w1 == 0.3);
}

TEST_CASE("converging lines: W1 goes to zero, JS does not") {
  const auto base = make_parallel_line(0.0, 64);
  for (double th : {0.5, 0.1, 0.01, 0.001, 1e-6}) {
    const auto other = make_parallel_line(th, 64);
    const auto [p, q] = align_on_union_support(base.measure, other.measure);
    CHECK(w1_exact(base.measure, other.measure).cost == doctest::Approx(th).epsilon(1e-9));
    CHECK(js_discrete(p, q) >= std::numbers::ln2 - 1e-9);
  }
}

TEST_CASE("topology inequalities") {
  std::mt19937_64 gen(12);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + gen() % 8, d = 1 + gen() % 3;
    const auto pv = oracle::random_prob(n, gen), qv = oracle::random_prob(n, gen);
    const Matrix pts = random_points(n, d, gen);
    double diam = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) diam = std::max(diam, (pts.row(i) - pts.row(j)).norm());
    const DiscreteDistribution p(pv), q(qv);
    const double tv = tv_discrete(p, q), kl = kl_discrete(p, q), js = js_discrete(p, q);
    const double w = w1_exact(EmpiricalMeasure(pts, to_vec(pv)), EmpiricalMeasure(pts, to_vec(qv))).cost;
    CHECK(w <= diam * tv + 1e-9);
    if (std::isfinite(kl)) CHECK(tv <= std::sqrt(kl / 2) + 1e-9);
    CHECK(tv <= 2 * std::sqrt(js) + 1e-9);
  }
}

TEST_CASE("union support alignment") {
  const EmpiricalMeasure a(Matrix{{0.0}, {1.0}}, Vector{{0.5, 0.5}});
  const EmpiricalMeasure b(Matrix{{1.0}, {2.0}}, Vector{{0.25, 0.75}});
  const auto [p, q] = align_on_union_support(a, b);
  CHECK(p.size() == 3);
  CHECK(tv_discrete(p, q) == doctest::Approx(0.75));
}
