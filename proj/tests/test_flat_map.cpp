#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "flatcircle/error.hpp"
#include "flatcircle/flat_map.hpp"

using namespace flatcircle;

namespace {

Real R(const char* s) { return Real::parse(s); }
const Real eps = Real::pow2(-500);

bool close(const Real& a, const Real& b, const Real& tol = eps) { return abs(a - b) <= tol; }

// Third-order central differences of the lift, used as an independent oracle.
struct Differences {
  Real d1, d2, d3;
};
Differences differences(const FlatMap& m, const Real& x) {
  const Real h = Real::pow2(-100);
  Real fm2 = m.lift(x - Real(2) * h), fm1 = m.lift(x - h), f0 = m.lift(x);
  Real fp1 = m.lift(x + h), fp2 = m.lift(x + Real(2) * h);
  return {(fp1 - fm1) / (Real(2) * h), (fp1 - Real(2) * f0 + fm1) / (h * h),
          (fp2 - Real(2) * fp1 + Real(2) * fm1 - fm2) / (Real(2) * h * h * h)};
}

}  // namespace

TEST_CASE("branch shape values") {
  CHECK(close(branch_shape(R("0.5"), R("2.7")), R("0.5")));
  CHECK(close(branch_shape(R("0.3"), Real(1)), R("0.3")));
  CHECK(close(branch_shape(R("0.25"), Real(2)), R("0.1")));
  CHECK(branch_shape(Real(0), Real(2)).is_zero());
  CHECK(branch_shape(Real(1), Real(2)) == Real(1));
}

TEST_CASE("branch shape inverse") {
  CHECK(close(branch_shape_inverse(R("0.5"), R("3")), R("0.5")));
  CHECK(close(branch_shape_inverse(branch_shape(R("0.3"), R("2.5")), R("2.5")), R("0.3"), Real::pow2(-504)));
  CHECK(close(branch_shape_inverse(R("0.1"), Real(2)), R("0.25")));
}

TEST_CASE("branch shape is increasing with power-law ends") {
  Real prev(0);
  for (int i = 1; i < 100; ++i) {
    Real y = branch_shape(Real(i) / Real(100), R("1.5"));
    CHECK(y > prev);
    prev = y;
  }
  Real t = Real::pow2(-60);
  CHECK(close(branch_shape(t, Real(3)) / pow(t, Real(3)), Real(1), Real::pow2(-50)));
}

TEST_CASE("constructor validates parameters") {
  CHECK_THROWS_AS(FlatMap(R("0.1"), R("0.5"), R("0.3")), DomainError);
  CHECK_THROWS_AS(FlatMap(R("1"), R("2"), R("0.3")), DomainError);
  CHECK_THROWS_AS(FlatMap(R("-0.1"), R("2"), R("0.3")), DomainError);
  FlatMap m(R("0.2"), R("2"), R("1.3"));
  CHECK(close(m.offset(), R("0.3")));
}

TEST_CASE("flat interval collapses to the offset and the map is continuous there") {
  FlatMap m(R("0.2"), R("2"), R("0.3"));
  CHECK(close(m.forward(CirclePoint(R("0.1"))).pos(), R("0.3")));
  CHECK(close(m.forward(CirclePoint(R("0.2"))).pos(), R("0.3")));
  CHECK(close(m.forward(CirclePoint(R("0.2") + Real::pow2(-200))).pos(), R("0.3"), Real::pow2(-300)));
  Real before_one = Real(1) - Real::pow2(-200);
  CHECK(circle_dist(m.forward(CirclePoint(before_one)), CirclePoint(R("0.3"))) < Real::pow2(-300));
}

TEST_CASE("lift is a degree-one monotone map") {
  FlatMap m(R("0.2"), R("3"), R("0.7"));
  CHECK(close(m.lift(R("1.45")), m.lift(R("0.45")) + Real(1)));
  CHECK(close(m.lift(R("-0.55")), m.lift(R("0.45")) - Real(1)));
  Real prev = m.lift(Real(0));
  for (int i = 1; i <= 200; ++i) {
    Real y = m.lift(Real(i) / Real(100));
    CHECK(y >= prev);
    prev = y;
  }
}

TEST_CASE("inverse arc round trips") {
  FlatMap m(R("0.2"), R("2"), R("0.3"));
  CircleArc b(CirclePoint(R("0.4")), R("0.05"));
  CircleArc img(m.forward(b.left), m.lift(b.right_unwrapped()) - m.lift(b.left.pos()));
  CircleArc back = m.inverse_arc(img);
  CHECK(close(back.left.pos(), R("0.4"), Real::pow2(-496)));
  CHECK(close(back.length, R("0.05"), Real::pow2(-496)));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Real lo = R("0.2") + R("0.7") * Real(unit(rng));
    Real len = R("0.09") * Real(unit(rng)) + Real::pow2(-40);
    CircleArc a(m.forward(CirclePoint(lo)), m.lift(lo + len) - m.lift(lo));
    CircleArc r = m.inverse_arc(a);
    CHECK(close(r.left.pos(), lo, Real::pow2(-496)));
    CHECK(close(r.length, len, Real::pow2(-496)));
  }
}

TEST_CASE("inverse arc rejects arcs around the offset") {
  FlatMap m(R("0.2"), R("2"), R("0.3"));
  CHECK_THROWS_AS(m.inverse_arc(CircleArc(CirclePoint(R("0.25")), R("0.1"))), DomainError);
}

TEST_CASE("derivative") {
  FlatMap m(R("0.2"), R("2"), R("0.3"));
  // Midpoint of the branch: the shape has slope l there, scaled by 1/(1-u).
  CHECK(close(m.derivative(R("0.6")), R("2.5"), Real::pow2(-496)));
  Real prev = m.derivative(R("0.3"));
  for (int k = 2; k <= 12; ++k) {
    Real d = m.derivative(R("0.2") + Real::pow2(-k * 4));
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < Real::pow2(-40));
  CHECK_THROWS_AS(m.derivative(R("0.1")), DomainError);
  for (const char* x : {"0.25", "0.5", "0.77", "0.99"}) {
    Differences d = differences(m, R(x));
    CHECK(close(m.derivative(R(x)), d.d1, Real::pow2(-150)));
  }
}

TEST_CASE("closed-form Schwarzian matches finite differences") {
  for (const char* l : {"1.5", "2", "3.7"}) {
    FlatMap m(R("0.2"), R(l), R("0.3"));
    for (const char* x : {"0.21", "0.4", "0.6", "0.93"}) {
      Differences d = differences(m, R(x));
      Real r = d.d2 / d.d1;
      Real fd = d.d3 / d.d1 - R("1.5") * r * r;
      Real cf = m.schwarzian(R(x));
      CHECK(abs(fd - cf) <= abs(cf) * Real::pow2(-60));
    }
  }
}

TEST_CASE("Schwarzian sign") {
  SchwarzianReport zero = schwarzian_sign_check(FlatMap(R("0.2"), Real(1), R("0.3")), 1000, 1);
  CHECK(zero.samples == 1000);
  CHECK(zero.max_value == 0.0);
  for (const char* l : {"1.5", "2", "3"}) {
    SchwarzianReport r = schwarzian_sign_check(FlatMap(R("0.2"), R(l), R("0.3")), 1000, 1);
    CHECK(r.samples == 1000);
    CHECK(r.nonnegative == 0);
  }
  // Near the boundary of U the magnitude grows like the inverse square distance.
  FlatMap m(R("0.2"), Real(3), R("0.3"));
  Real d = Real::pow2(-20);
  Real s1 = m.schwarzian(R("0.2") + d), s2 = m.schwarzian(R("0.2") + d / Real(2));
  CHECK(s1.sign() < 0);
  CHECK(abs(s2 / s1 - Real(4)) < Real::pow2(-15));
}
