#include <catch_amalgamated.hpp>

#include <cmath>

#include "eclab/errors.hpp"
#include "eclab/polynomial.hpp"
#include "eclab/quadrature.hpp"
#include "eclab/test_function.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace eclab;

TEST_CASE("polynomial parsing and evaluation") {
  Polynomial p = Polynomial::parse(2, "-w1^2 + 2*w1*w2 - (1+i)*w2^3 + 3");
  CVec w(2);
  w << Complex(0.5, -1.0), Complex(2.0, 0.25);
  Complex a = w(0), b = w(1);
  Complex want = -a * a + 2.0 * a * b - Complex(1, 1) * b * b * b + 3.0;
  CHECK(std::abs(p(w) - want) < 1e-13);
  CHECK(p.degree_in(1) == 3);
  CHECK(p.total_degree() == 3);
  Polynomial implicit = Polynomial::parse(1, "2w1(w1 - 1)");
  CHECK(std::abs(implicit(CVec(CVec::Constant(1, 3.0))) - 12.0) < 1e-14);
}

TEST_CASE("polynomial derivative matches finite differences") {
  Polynomial p = Polynomial::parse(2, "w1^3*w2 - 4*w2^2 + i*w1");
  Vec x{{0.7, -1.3}};
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Vec xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    Complex fd = (p(xp) - p(xm)) / (2 * h);
    CHECK(std::abs(p.derivative(j)(x) - fd) < 1e-7);
  }
}

TEST_CASE("polynomial parse errors") {
  CHECK_THROWS_AS(Polynomial::parse(1, "w2"), ParseError);
  CHECK_THROWS_AS(Polynomial::parse(1, "w1^"), ParseError);
  CHECK_THROWS_AS(Polynomial::parse(1, "(w1"), ParseError);
  CHECK_THROWS_AS(Polynomial::parse(1, "w1 $"), ParseError);
}

TEST_CASE("test function literal and evaluation") {
  auto f = TestFunction::parse("tf{dim=2, P=\"1\", Q=\"-w1^2 - w2^3\"}");
  CHECK(f.dim() == 2);
  CHECK(f.is_entire());
  CHECK_THAT(f(Vec{{0.0, 0.0}}).real(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(f(Vec{{1.0, 1.0}}).real(), WithinRel(std::exp(-2.0), 1e-14));
  CVec w(2);
  w << Complex(0.3, 0.2), Complex(-1.0, 0.5);
  CHECK_THAT(f.log_abs(w), WithinAbs(std::log(std::abs(f(w))), 1e-12));
  // log_abs stays finite where the value overflows.
  CVec far(2);
  far << 0.0, -30.0;
  CHECK_THAT(f.log_abs(far), WithinAbs(27000.0, 1e-9));
}

TEST_CASE("flat factors vanish outside the support") {
  auto f = TestFunction::parse("tf{dim=1, P=\"1\", Q=\"-w1^2\", flat=\"1:1.0\"}");
  CHECK_FALSE(f.is_entire());
  CHECK(f(Vec(Vec::Constant(1, 0.0))) == Complex(0.0));
  CHECK(f(Vec(Vec::Constant(1, 0.5))) == Complex(0.0));
  CHECK_THAT(f(Vec(Vec::Constant(1, -0.5))).real(), WithinRel(std::exp(-2.0 - 0.25), 1e-14));
  auto O = f.support();
  REQUIRE(O.negative_coords == std::vector<int>{0});
  CHECK_THAT(O.distance_to_complement(Vec(Vec::Constant(1, -0.3))), WithinAbs(0.3, 1e-15));
}

TEST_CASE("analytic gradient matches finite differences") {
  auto f = TestFunction::parse("tf{dim=2, P=\"1 + w1*w2\", Q=\"-w1^2 - 2*w2^2 + i*w2\", flat=\"1:0.5\"}");
  Vec x{{-0.8, 0.4}};
  CVec g = f.gradient(x);
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Vec xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    CHECK(std::abs(g(j) - (f(xp) - f(xm)) / (2 * h)) < 1e-7);
  }
}

TEST_CASE("sums, scaling and tensor products") {
  auto a = TestFunction::parse("tf{dim=1, P=\"w1\", Q=\"-w1^2\"}");
  auto b = TestFunction::parse("tf{dim=1, P=\"1\", Q=\"-2*w1^2\"}");
  Vec x = Vec(Vec::Constant(1, 0.7));
  CHECK(std::abs((a * 2.0 + b)(x) - (2.0 * a(x) + b(x))) < 1e-15);
  auto t = a.tensor(b);
  CHECK(t.dim() == 2);
  CHECK(std::abs(t(Vec{{0.7, -0.2}}) - a(x) * b(Vec(Vec::Constant(1, -0.2)))) < 1e-15);
  CHECK((a * 0.0).is_zero());
}

TEST_CASE("test function literal errors") {
  CHECK_THROWS_AS(TestFunction::parse("tf{P=\"1\"}"), ParseError);
  CHECK_THROWS_AS(TestFunction::parse("tf{dim=1, R=\"1\"}"), ParseError);
  CHECK_THROWS_AS(TestFunction::parse("tf{dim=1, Q=\"w1^5\"}"), InvalidInputError);
  CHECK_THROWS_AS(TestFunction::parse("tf{dim=1, flat=\"1:-1\"}"), InvalidInputError);
}

TEST_CASE("quadrature on standard integrals") {
  CHECK_THAT(quad::integrate_real([](double x) { return std::exp(-x * x); }, -INFINITY, INFINITY),
             WithinRel(std::sqrt(kPi), 1e-12));
  auto r = quad::integrate_negative_axis([](double x) { return Complex(std::exp(x), 0.0); });
  CHECK_THAT(r.value.real(), WithinRel(1.0, 1e-12));
  // ∫_{-∞}^0 exp(1/ξ - ξ^2)·... flat at 0 is handled by the exponential map.
  auto flat = quad::integrate_negative_axis([](double x) { return Complex(std::exp(1.0 / x + x), 0.0); });
  // = 2 K_1(2) by the modified Bessel integral representation.
  CHECK_THAT(flat.value.real(), WithinRel(2.0 * 0.13986588181652243, 1e-10));
  auto two = quad::integrate_nd([](const Vec& v) { return Complex(std::exp(-v(0) * v(0)) * std::exp(v(1)), 0.0); },
                                {quad::Axis::line(), quad::Axis::negative_half()});
  CHECK_THAT(two.value.real(), WithinRel(std::sqrt(kPi), 1e-10));
}
