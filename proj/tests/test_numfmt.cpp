#include "doctest.h"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <limits>
#include <random>

#include "wdistlab/numfmt.hpp"

using namespace wdistlab;

TEST_CASE("0.1 round-trips exactly") {
  const std::string s = format_double(0.1);
  CHECK(parse_double(s) == 0.1);
}

TEST_CASE("1000 random doubles round-trip bit for bit") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 1000; ++i) {
    double x;
    do {
      x = std::bit_cast<double>(gen());
    } while (!std::isfinite(x));
    const double y = parse_double(format_double(x));
    REQUIRE(std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y));
  }
}

TEST_CASE("non-finite values") {
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::isinf(parse_double("inf")));
  CHECK(parse_double("-inf") < 0);
}

TEST_CASE("malformed numbers are rejected") {
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
  CHECK(parse_double("+2.5") == 2.5);
}

TEST_CASE("csv splitting honours quotes") {
  CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv_line("\"x,y\",z") == std::vector<std::string>{"x,y", "z"});
  CHECK(split_csv_line("\"he said \"\"hi\"\"\",") == std::vector<std::string>{"he said \"hi\"", ""});
}
