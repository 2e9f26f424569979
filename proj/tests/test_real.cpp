#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <thread>

#include "flatcircle/error.hpp"
#include "flatcircle/real.hpp"

using namespace flatcircle;

TEST_CASE("parse accepts decimal and scientific text") {
  CHECK(Real::parse("0.25") == Real(0.25));
  CHECK(Real::parse("  -3 ") == Real(-3));
  CHECK(Real::parse("1e-3").to_double() == doctest::Approx(0.001));
  CHECK(Real::parse("0.1", 128).precision() == 128);
}

TEST_CASE("parse rejects junk") {
  CHECK_THROWS_AS(Real::parse("abc"), ConfigError);
  CHECK_THROWS_AS(Real::parse(""), ConfigError);
  CHECK_THROWS_AS(Real::parse("0.5x"), ConfigError);
  CHECK_THROWS_AS(Real::parse("nan"), ConfigError);
}

TEST_CASE("precision scope is per thread and restores") {
  CHECK(default_precision() == 512);
  {
    PrecisionScope s(200);
    CHECK(Real(1).precision() == 200);
    unsigned seen = 0;
    std::thread t([&] { seen = default_precision(); });
    t.join();
    CHECK(seen == 512);
  }
  CHECK(default_precision() == 512);
  CHECK_THROWS_AS(PrecisionScope(32), DomainError);
}

TEST_CASE("binary operations take the larger precision") {
  Real a = Real::parse("1", 100), b = Real::parse("3", 300);
  CHECK((a / b).precision() == 300);
  CHECK((b - a).precision() == 300);
}

TEST_CASE("decimal rendering round-trips") {
  Real third = Real(1) / Real(3);
  CHECK(Real::parse(third.str()) == third);
  CHECK(Real::parse(Real::pow2(-700).str()) == Real::pow2(-700));
}

TEST_CASE("frac lands in [0, 1)") {
  CHECK(frac(Real::parse("2.75")) == Real(0.75));
  CHECK(frac(Real::parse("-0.25")) == Real(0.75));
  CHECK(frac(Real(-3)) == Real(0));
}

TEST_CASE("log_abs works far below the double range") {
  Real tiny = Real::pow2(-5000);
  CHECK(tiny.log_abs() == doctest::Approx(-5000 * std::log(2.0)));
  CHECK(Real(-8).log_abs() == doctest::Approx(std::log(8.0)));
}

TEST_CASE("elementary functions") {
  CHECK(sqrt(Real(2)) * sqrt(Real(2)) - Real(2) < Real::pow2(-500));
  CHECK(abs(log(exp(Real(1))) - Real(1)) < Real::pow2(-500));
  CHECK(pow(Real(2), Real(10)) == Real(1024));
  CHECK(floor(Real::parse("-1.5")) == Real(-2));
  CHECK(min(Real(1), Real(2)) == Real(1));
  CHECK(max(Real(1), Real(2)) == Real(2));
}
