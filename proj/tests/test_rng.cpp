#include "doctest.h"

#include <cmath>

#include "wdistlab/rng.hpp"

using wdistlab::Rng;

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("split streams depend only on seed and stream id") {
  Rng a(7);
  const Rng s1 = a.split(3);
  for (int i = 0; i < 10; ++i) (void)a.next_u64();
  Rng s2 = a.split(3), s1c = s1;
  CHECK(s1c.next_u64() == s2.next_u64());
  Rng x = a.split(1), y = a.split(2);
  CHECK(x.next_u64() != y.next_u64());
}

TEST_CASE("uniform stays in [0,1) and has the right mean") {
  Rng r(1);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("below is unbiased enough and in range") {
  Rng r(3);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 30000; ++i) {
    const auto v = r.below(3);
    REQUIRE(v < 3);
    ++counts[v];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}

TEST_CASE("normal moments") {
  Rng r(5);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal(1.0, 2.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 1.0) < 0.02);
  CHECK(std::abs(var - 4.0) < 0.05);
}
