#include <catch_amalgamated.hpp>

#include <cmath>

#include "eclab/errors.hpp"
#include "eclab/gs_spaces.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace eclab;

namespace {

// d^m/dx^m exp(-x^2) = (-1)^m H_m(x) exp(-x^2), physicists' Hermite recursion.
std::vector<double> hermite_derivatives(double x, int M) {
  std::vector<double> H{1.0, 2 * x};
  for (int k = 1; k < M; ++k) H.push_back(2 * x * H[k] - 2 * k * H[k - 1]);
  std::vector<double> d;
  for (int m = 0; m <= M; ++m) d.push_back((m % 2 ? -1.0 : 1.0) * H[m] * std::exp(-x * x));
  return d;
}

TestFunction gauss1() { return TestFunction::parse("tf{dim=1, P=\"1\", Q=\"-w1^2\"}"); }

Cone halfline(bool plus) { return Cone::from_generators(1, {Vec(Vec::Constant(1, plus ? 1.0 : -1.0))}); }

}  // namespace

TEST_CASE("contour derivatives of exp(-w^2) match the Hermite recursion") {
  auto f = gauss1();
  ComplexField F = [&](const CVec& w) { return f(w); };
  for (double x : {0.0, 0.3, 1.0}) {
    auto want = hermite_derivatives(x, 20);
    for (int m = 0; m <= 20; ++m) {
      double r = std::max(1.0, std::sqrt(double(m)));
      Complex got = cauchy_derivatives(F, Vec(Vec::Constant(1, x)), m, r)[0];
      // Rounding floor of the Cauchy sum: eps * m! * max|f| / r^m on the circle.
      double floor = 1e-14 * std::tgamma(m + 1.0) * std::exp((r + x) * (r + x)) / std::pow(r, m);
      CHECK(std::abs(got - want[m]) <= std::max(1e-8 * std::abs(want[m]), floor));
    }
  }
}

TEST_CASE("two-variable contour derivative factorizes") {
  auto f = TestFunction::gaussian(2);
  ComplexField F = [&](const CVec& w) { return f(w); };
  Vec x{{0.2, -0.4}};
  auto idx = multi_indices(2, 5);
  auto d = cauchy_derivatives(F, x, 5, 1.5, 64);
  auto hx = hermite_derivatives(0.2, 5), hy = hermite_derivatives(-0.4, 5);
  REQUIRE(idx.size() == d.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double want = hx[idx[i][0]] * hy[idx[i][1]];
    CHECK(std::abs(d[i] - want) < 1e-10 * std::max(1.0, std::abs(want)));
  }
  CHECK(idx.front() == std::vector<int>{5, 0});
}

TEST_CASE("real norm of the Gaussian") {
  Truncation t;
  t.M = 20;
  t.R = 10;
  t.points = 201;
  // Values from an independent 40-digit Hermite-recursion evaluation of the
  // same truncated sup (levels M,R = 5,2.5 / 10,5 / 20,10).
  auto small = real_norm(gauss1(), {0.5, 0.5, 0.5, 0.5}, t);
  REQUIRE(small.levels.size() == 3);
  CHECK_THAT(small.levels[0].log_value, WithinAbs(std::log(57.14144243234019), 1e-8));
  CHECK_THAT(small.levels[1].log_value, WithinAbs(std::log(2364.17808260997), 1e-8));
  CHECK_THAT(small.levels[2].log_value, WithinAbs(std::log(3628314.325997997), 1e-8));

  auto r = real_norm(gauss1(), {0.5, 0.5, 4.0, 4.0}, t);
  CHECK_THAT(r.value, WithinRel(1.0, 1e-10));  // attained at p = 0, λ = μ = 0
  CHECK_FALSE(r.diverges);
  CHECK(r.M == 20);
  CHECK(r.R == 10.0);
  CHECK(r.to_json().find("\"diverges\":false") != std::string::npos);
}

TEST_CASE("real norm of zero and of a growing function") {
  Truncation t;
  t.M = 10;
  t.R = 10;
  t.points = 81;
  CHECK(real_norm(TestFunction::zero(1), {0.5, 0.5, 1, 1}, t).value == 0.0);
  auto g = real_norm(TestFunction::parse("tf{dim=1, P=\"1\", Q=\"w1^2\"}"), {0.5, 0.5, 4, 4}, t);
  CHECK(g.diverges);
}

TEST_CASE("norms are nonincreasing in A and B") {
  const char* fs[] = {"tf{dim=1, P=\"1\", Q=\"-w1^2\"}", "tf{dim=1, P=\"w1\", Q=\"-w1^2\"}",
                      "tf{dim=1, P=\"1 + w1^2\", Q=\"-2*w1^2\"}", "tf{dim=1, P=\"1\", Q=\"-w1^2 + i*w1\"}",
                      "tf{dim=1, P=\"w1^3 - w1\", Q=\"-0.5*w1^2\"}"};
  Truncation t;
  t.M = 8;
  t.R = 6;
  t.points = 41;
  t.q_points = 21;
  t.Rq = 3;
  for (const char* s : fs) {
    auto f = TestFunction::parse(s);
    for (double A : {1.0, 2.0})
      for (double B : {1.0, 2.0}) {
        double base = real_norm(f, {0.5, 0.5, A, B}, t).log_value;
        CHECK(real_norm(f, {0.5, 0.5, 2 * A, B}, t).log_value <= base + 1e-12);
        CHECK(real_norm(f, {0.5, 0.5, A, 2 * B}, t).log_value <= base + 1e-12);
        double cb = cone_norm(f, Cone::origin(1), {0.5, 0.5, A, B}, t).log_value;
        CHECK(cone_norm(f, Cone::origin(1), {0.5, 0.5, 2 * A, B}, t).log_value <= cb + 1e-12);
        CHECK(cone_norm(f, Cone::origin(1), {0.5, 0.5, A, 2 * B}, t).log_value <= cb + 1e-12);
      }
  }
}

TEST_CASE("cone norm grows with the cone") {
  auto f = TestFunction::parse("tf{dim=1, P=\"1\", Q=\"-w1^2 + w1\"}");
  Truncation t;
  t.R = 6;
  t.points = 41;
  GSParams p{0.5, 0.5, 1.0, 2.0};
  double n0 = cone_norm(f, Cone::origin(1), p, t).log_value;
  double n1 = cone_norm(f, halfline(true), p, t).log_value;
  double n2 = cone_norm(f, Cone::full(1), p, t).log_value;
  CHECK(n0 <= n1 + 1e-12);
  CHECK(n1 <= n2 + 1e-12);
  CHECK(n0 < n2);
}

TEST_CASE("Example 1 test function: finite on R x R+, divergent on R^2") {
  auto f = TestFunction::parse("tf{dim=2, P=\"1\", Q=\"-w1^2 - w2^3\"}");
  GSParams p{2.0 / 3.0, 0.5, 2.0, 2.0};
  Truncation t;
  t.R = 20;
  t.points = 41;
  t.Rq = 4;
  t.q_points = 9;
  Cone half = parse_cone("cone{dim=1, kind=full} x cone{dim=1, kind=orthant}");
  auto fin = cone_norm(f, half, p, t);
  CHECK_FALSE(fin.diverges);
  CHECK(std::isfinite(fin.log_value));
  auto inf = cone_norm(f, Cone::full(2), p, t);
  CHECK(inf.diverges);
  for (std::size_t i = 1; i < inf.levels.size(); ++i) CHECK(inf.levels[i].log_value > inf.levels[i - 1].log_value);
  CHECK(cone_norm(TestFunction::zero(2), half, p, t).value == 0.0);
}

TEST_CASE("Example 1 integral") {
  // Independent 2-D adaptive quadrature (scipy dblquad, rel 1e-10).
  CHECK_THAT(example1_divergence(1.0), WithinRel(2.089311669609679, 1e-8));
  CHECK(example1_divergence(5.0) > example1_divergence(3.0));
}

TEST_CASE("decomposition on the line") {
  auto f = gauss1();
  Truncation t;
  t.R = 6;
  t.points = 25;
  t.Rq = 3;
  t.q_points = 13;
  GSParams p{0.5, 0.5, 1.0, 2.0};
  auto d = decompose(f, Cone::origin(1), std::nullopt, halfline(true), halfline(false), p, t);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double x = -10.0 + 20.0 * i / 999;
    CVec w = CVec(CVec::Constant(1, x));
    worst = std::max(worst, std::abs(d.f1(w) + d.f2(w) - f(w)));
    // g1 = ∫_{-∞}^0 g0(w - η) dη = erfc(w/√2)/2.
    CHECK(std::abs(d.g1(w) - 0.5 * std::erfc(x / std::sqrt(2.0))) < 1e-12);
  }
  CHECK(worst < 1e-10);
  CVec z = CVec(CVec::Constant(1, Complex(0.7, 1.3)));
  CHECK(std::abs(d.g1(z) + d.g2(z) - 1.0) < 1e-12);
  CHECK(std::abs(d.g1(CVec(CVec::Constant(1, -8.0))) - 1.0) < 1e-12);
  CHECK(std::abs(d.g1(CVec(CVec::Constant(1, 8.0)))) < 1e-12);

  const auto& c = d.certificate;
  CHECK_THAT(c.theta, WithinAbs(1.0, 1e-12));
  CHECK_THAT(c.A0, WithinRel(1 / std::sqrt(2.0), 1e-15));
  CHECK_THAT(c.A_prime, WithinRel(2 * (1 / std::sqrt(2.0) + 1.0) + 1.0, 1e-14));
  CHECK_FALSE(c.f_norm.diverges);
  CHECK_FALSE(c.f1_norm.diverges);
  CHECK_FALSE(c.f2_norm.diverges);
  CHECK(std::isfinite(c.f1_norm.value));
}

TEST_CASE("decomposition preconditions") {
  auto f = gauss1();
  Truncation t;
  t.R = 4;
  t.points = 9;
  CHECK_THROWS_AS(decompose(f, Cone::origin(1), std::nullopt, halfline(true), halfline(true), {0.5, 0.5, 1, 2}, t),
                  InvalidInputError);
  CHECK_THROWS_AS(decompose(f, Cone::origin(1), std::nullopt, halfline(true), halfline(false), {0.0, 1.5, 1, 2}, t),
                  UnsupportedError);
  CHECK_THROWS_AS(decompose(f, Cone::origin(1), std::nullopt, halfline(true), halfline(false), {0.6, 0.5, 1, 2}, t),
                  UnsupportedError);
}

TEST_CASE("decomposition in the plane partitions unity") {
  auto f = TestFunction::gaussian(2);
  Truncation t;
  t.R = 2;
  t.points = 3;
  t.q_points = 3;
  Cone q1 = Cone::nonnegative_orthant(2);
  Cone q3 = Cone::from_generators(2, {Vec{{-1, 0}}, Vec{{0, -1}}});
  auto d = decompose(f, Cone::origin(2), std::nullopt, q1, q3, {0.5, 0.5, 1.0, 2.0}, t);
  for (auto [a, b] : {std::pair<double, double>{0.3, -0.2}, {2.0, 1.5}, {-1.0, 0.4}}) {
    CVec w(2);
    w << Complex(a, 0.2), Complex(b, -0.1);
    CHECK(std::abs(d.g1(w) + d.g2(w) - 1.0) < 1e-9);
  }
  // Deep inside U2 the mass sits in g1.
  CHECK(std::abs(d.g1(CVec(Vec{{-6, -6}}.cast<Complex>())) - 1.0) < 1e-9);
  CHECK(d.certificate.theta > 0.0);
}

TEST_CASE("hyperfunction example") {
  Truncation t;
  t.R = 10;
  t.points = 81;
  t.q_points = 9;
  auto r = hyperfunction_example(3, 0.25, 3.0, 2.0, 1.0, t);
  CHECK_THAT(r.ray_sup, WithinRel(27.0 * std::exp(-3.0), 1e-14));
  CHECK(hyperfunction_example(0, 0.25, 3.0, 2.0, 1.0, t).ray_sup == 1.0);
  // Ray sup against a direct scan of (λ p)^n e^{-p}.
  double scan = 0;
  for (int i = 0; i <= 100000; ++i) {
    double q = 10.0 * i / 100000;
    scan = std::max(scan, std::pow(0.5 * q, 4) * std::exp(-q));
  }
  CHECK_THAT(hyperfunction_example(4, 0.25, 3.0, 2.0, 0.5, t).ray_sup, WithinRel(scan, 1e-8));
  // Sup sits at Re w1 = -(ε + 1/A), |w2| = ε + 1/A.
  double a = 0.25 + 1.0 / 3.0;
  CHECK_THAT(r.strip_norm.value, WithinRel(std::pow(a, 3) * std::exp(a * 1.5), 1e-9));
  double prev = INFINITY;
  for (int n = 1; n <= 20; ++n) {
    double v = hyperfunction_example(n, 0.25, 3.0, 2.0, 1.0, t).strip_norm.value;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("Gevrey infimum estimate") {
  for (double xi : {2.0, 10.0, 100.0}) {
    auto g = gevrey_infimum_check(1.0, xi, 200);
    CHECK(g.ok);
  }
  auto g = gevrey_infimum_check(1.0, 100.0, 200);
  CHECK(g.argmin == 37);  // near ξ/e
}

TEST_CASE("flatness bound near the boundary") {
  auto f = TestFunction::parse("tf{dim=1, P=\"1\", Q=\"0\", flat=\"1:1.0\"}");
  OpenSet O = f.support();
  GSParams p{0.5, 2.0, 1.0, 1.0};
  Truncation t;
  t.M = 12;
  t.R = 2;
  t.points = 41;
  auto cal = calibrate_flat_bound(f, O, p, t);
  CHECK(cal.C > 0);
  CHECK(std::isfinite(cal.C));
  CHECK_THAT(cal.A_prime, WithinRel(1.0 / (2 * kE) / (kE), 1e-14));
  for (double x : {-0.1, -0.01, -0.5, -1.9}) CHECK(taylor_flat_bound(f, O, p, Vec(Vec::Constant(1, x)), cal).ok);
  auto far = taylor_flat_bound(f, O, p, Vec(Vec::Constant(1, -50.0)), cal);
  CHECK(far.rhs >= cal.C * cal.norm * 0.9);
  CHECK_THROWS_AS(taylor_flat_bound(f, O, p, Vec(Vec::Constant(1, 0.5)), cal), InvalidInputError);
}
