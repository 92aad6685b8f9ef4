#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "eclab/errors.hpp"
#include "eclab/laplace.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace eclab;

namespace {

Cone ray(double s) { return Cone::from_generators(1, {Vec(Vec::Constant(1, s))}); }

CVec cz(std::initializer_list<Complex> v) {
  CVec z(static_cast<int>(v.size()));
  int i = 0;
  for (auto c : v) z(i++) = c;
  return z;
}

Functional exp_density() {
  return Functional::density(TestFunction::parse("tf{dim=1, P=\"1\", Q=\"-w1\"}"), ray(1));
}

}  // namespace

TEST_CASE("point masses evaluate the kernel") {
  auto form = PairingForm::euclidean(2);
  Vec p{{0.5, 1.5}};
  auto u = Functional::point_mass(p, Cone::nonnegative_orthant(2), 2.0);
  CVec z = cz({{0.3, 0.2}, {-1.0, 0.7}});
  CHECK(std::abs(laplace_transform(u, z, form) - 2.0 * std::exp(kI * (0.5 * z(0) + 1.5 * z(1)))) < 1e-15);
  CHECK_THROWS_AS(Functional::point_mass(Vec{{-1.0, 0.0}}, Cone::nonnegative_orthant(2)), InvalidInputError);
}

TEST_CASE("density e^{-p} on the half-line transforms to 1/(1 - iz)") {
  auto u = exp_density();
  auto form = PairingForm::euclidean(1);
  for (Complex z : {Complex(0.0, 0.5), Complex(2.0, 0.1), Complex(-3.0, 1e-3), Complex(0.7, 4.0)}) {
    Complex got = laplace_transform(u, cz({z}), form);
    Complex want = 1.0 / (1.0 - kI * z);
    CHECK(std::abs(got - want) < 1e-8 * std::abs(want));
  }
}

TEST_CASE("derivative point mass against a difference of point masses") {
  auto form = PairingForm::lorentz(2);
  Cone K = Cone::light_cone(2, true);
  Vec p{{1.0, 0.2}}, v{{0.6, -0.8}};
  CVec z = cz({{0.4, 0.9}, {-0.3, 0.1}});
  auto du = Functional::derivative_point_mass(p, v, K);
  const double h = 1e-4;
  Complex fd = (laplace_transform(Functional::point_mass(p + h * v, K), z, form) -
                laplace_transform(Functional::point_mass(p - h * v, K), z, form)) /
               (2 * h);
  CHECK(std::abs(laplace_transform(du, z, form) - fd) < 1e-7);
  // At the origin along e1 this is i<e1, z>.
  auto d0 = Functional::derivative_point_mass(Vec::Zero(2), Vec{{1.0, 0.0}}, K);
  CHECK(std::abs(laplace_transform(d0, z, form) - kI * z(0)) < 1e-15);
  // apply() of the same atom uses the difference stencil.
  auto phi = [&](const Vec& q) { return std::exp(kI * form(q, z)); };
  CHECK(std::abs(du.apply(phi) - laplace_transform(du, z, form)) < 1e-9);
}

TEST_CASE("two-dimensional densities") {
  CVec z = cz({{0.4, 0.5}, {-1.2, 0.25}});
  auto form = PairingForm::euclidean(2);
  Complex want = 1.0 / ((1.0 - kI * z(0)) * (1.0 - kI * z(1)));
  auto rho = TestFunction::parse("tf{dim=2, P=\"1\", Q=\"-w1 - w2\"}");
  auto direct = Functional::density(rho, Cone::nonnegative_orthant(2));
  CHECK(std::abs(laplace_transform(direct, z, form) - want) < 1e-8);
  auto tens = exp_density().tensor(exp_density());
  CHECK(tens.is_tensor());
  CHECK(std::abs(laplace_transform(tens, z, form) - want) < 1e-12);

  // Gaussian on the forward light cone, reconstruction pairing, y in the
  // backward cone. Oracle: 30-digit iterated quadrature in (p0, p1).
  auto g = Functional::density(TestFunction::gaussian(2), Cone::light_cone(2, true));
  auto tp = TubePoint::make(Vec{{0.3, -0.2}}, Vec{{-1.0, 0.4}}, Cone::light_cone(2, false));
  Complex L = laplace_transform(g, tp, PairingForm::reconstruction(2, 1));
  CHECK_THAT(L.real(), WithinAbs(0.37877087292451970318, 1e-9));
  CHECK_THAT(L.imag(), WithinAbs(-0.069769375812935382633, 1e-9));
}

TEST_CASE("three-dimensional fan triangulation") {
  // Pyramid {p0 >= |p1|, p0 >= |p2|}: ∫ e^{-|p|^2} = ∫_0^∞ e^{-t^2} (√π erf t)^2 dt.
  Cone pyr = Cone::from_generators(3, {Vec{{1, 1, 1}}, Vec{{1, -1, 1}}, Vec{{1, 1, -1}}, Vec{{1, -1, -1}}});
  auto u = Functional::density(TestFunction::gaussian(3), pyr);
  Complex v = laplace_transform(u, CVec::Zero(3), PairingForm::euclidean(3), {1e-9, 12});
  CHECK_THAT(v.real(), WithinRel(0.92805466613861797421, 1e-8));
}

TEST_CASE("tube and carrier preconditions") {
  CHECK_THROWS_AS(TubePoint::make(Vec{{0.0, 0.0}}, Vec{{-1.0, 1.0}}, Cone::light_cone(2, false)), TubeViolation);
  CHECK_THROWS_AS(TubePoint::make(Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}, Cone::light_cone(2, false)), TubeViolation);
  auto tp = TubePoint::make(Vec{{0.0, 0.0}}, Vec{{-1.0, 0.0}}, Cone::light_cone(2, false));
  auto wrong = Functional::point_mass(Vec{{-1.0, 0.0}}, Cone::light_cone(2, false));
  CHECK_THROWS_AS(laplace_transform(wrong, tp, PairingForm::reconstruction(2, 1)), InvalidInputError);
  CHECK_THROWS_AS(Functional::density(TestFunction::gaussian(2), Cone::from_generators(2, {Vec{{1.0, 0.0}}})),
                  UnsupportedError);
}

TEST_CASE("laplace transforms satisfy Cauchy-Riemann in the tube") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double h = 1e-5;
  // ∂/∂z̄ = (∂_x + i ∂_y)/2 by central differences in each variable.
  auto dbar = [&](const std::function<Complex(const CVec&)>& v, const CVec& z) {
    double w = 0.0;
    for (int j = 0; j < z.size(); ++j) {
      CVec ex = CVec::Zero(z.size()), ey = CVec::Zero(z.size());
      ex(j) = h;
      ey(j) = Complex(0.0, h);
      Complex dx = (v(z + ex) - v(z - ex)) / (2 * h);
      Complex dy = (v(z + ey) - v(z - ey)) / (2 * h);
      w = std::max(w, std::abs(0.5 * (dx + kI * dy)));
    }
    return w;
  };

  auto u1 = Functional::density(TestFunction::parse("tf{dim=1, P=\"1 + w1^2\", Q=\"-w1\"}"), ray(1));
  auto f1 = PairingForm::euclidean(1);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    CVec z = cz({{3 * U(rng), 0.05 + 2 * std::abs(U(rng))}});
    worst = std::max(worst, dbar([&](const CVec& w) { return laplace_transform(u1, w, f1); }, z));
  }
  CHECK(worst < 1e-6);

  auto u2 = Functional::density(TestFunction::parse("tf{dim=2, P=\"1 + w1\", Q=\"-w1^2 - w2^2\"}"),
                                Cone::light_cone(2, true));
  auto f2 = PairingForm::reconstruction(2, 1);
  worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    double y0 = -0.2 - std::abs(U(rng)), y1 = 0.9 * std::abs(y0) * U(rng);
    CVec z = cz({{2 * U(rng), y0}, {2 * U(rng), y1}});
    worst = std::max(worst, dbar([&](const CVec& w) { return laplace_transform(u2, w, f2); }, z));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("fourier transform of the Gaussian") {
  auto form = PairingForm::euclidean(2);
  Vec p{{0.7, -1.1}};
  double want = kPi * std::exp(-p.squaredNorm() / 4);
  CHECK(std::abs(fourier_transform(TestFunction::gaussian(2), p, form) - want) < 1e-10);
  // Two terms do not factorize; the iterated path must agree.
  auto two = TestFunction::gaussian(2) * 0.5 + TestFunction::gaussian(2) * 0.5;
  CHECK_FALSE(two.factorize().has_value());
  CHECK(std::abs(fourier_transform(two, p, form) - want) < 1e-10);
}

TEST_CASE("𝒜 norms") {
  ANormSpec spec;
  spec.epsilon = 1.0;
  spec.subcones = {ray(1)};
  ATruncation t;
  t.x_points = 21;
  t.t_points = 41;
  auto one = a_norm([](const CVec&) { return Complex(1.0); }, spec, 0.5, 2.0, t);
  CHECK(one.value <= 1.0);
  CHECK_FALSE(one.diverges);

  auto u = exp_density();
  auto form = PairingForm::euclidean(1);
  auto lap = a_norm([&](const CVec& z) { return 1.0 / (1.0 - kI * z(0)); }, spec, 0.5, 2.0, t);
  CHECK(std::isfinite(lap.value));
  CHECK_FALSE(lap.diverges);
  // Same through the quadrature route on a coarser grid.
  ATruncation c = t;
  c.x_points = 5;
  c.t_points = 9;
  auto lq = a_norm([&](const CVec& z) { return laplace_transform(u, z, form); }, spec, 0.5, 2.0, c);
  auto lc = a_norm([&](const CVec& z) { return 1.0 / (1.0 - kI * z(0)); }, spec, 0.5, 2.0, c);
  CHECK_THAT(lq.log_value, WithinAbs(lc.log_value, 1e-8));

  // exp(-1/z^2) = exp(1/y^2) on the imaginary axis, faster than exp(ε/y).
  auto blow = a_norm([](const CVec& z) { return std::exp(-1.0 / (z(0) * z(0))); }, spec, 0.5, 2.0, t);
  CHECK(blow.diverges);

  ANormSpec r = spec;
  r.R = 3.0;
  auto radial = a_norm([](const CVec& z) { return std::exp(z(0)); }, r, 0.0, 2.0, t);
  CHECK(std::isfinite(radial.value));
  CHECK(radial.value <= std::exp(3.0));
  CHECK_THROWS_AS(a_norm([](const CVec&) { return Complex(1.0); }, spec, 0.0, 2.0, t), InvalidInputError);

  ANormSpec bad = spec;
  bad.subcones = {Cone::light_cone(2, false)};
  bad.tube_cones = {Cone::light_cone(2, false)};
  CHECK_THROWS_AS(a_norm([](const CVec&) { return Complex(1.0); }, bad, 0.5, 2.0, t), InvalidInputError);
}

TEST_CASE("a_norm grows with the subcone") {
  auto v = [](const CVec& z) { return 1.0 / ((1.0 - kI * z(0)) * (1.0 - kI * z(1))); };
  ATruncation t;
  t.X = 4;
  t.x_points = 9;
  t.t_points = 13;
  t.directions = 5;
  ANormSpec narrow, wide;
  narrow.subcones = {Cone::from_generators(2, {Vec{{1.0, 0.8}}, Vec{{0.8, 1.0}}})};
  wide.subcones = {Cone::from_generators(2, {Vec{{1.0, 0.2}}, Vec{{0.2, 1.0}}})};
  double a = a_norm(v, narrow, 0.5, 2.0, t).log_value;
  double b = a_norm(v, wide, 0.5, 2.0, t).log_value;
  CHECK(a <= b + 1e-12);
}

TEST_CASE("boundary values of the density e^{-p}") {
  auto u = exp_density();
  auto f = TestFunction::parse("tf{dim=1, P=\"1\", Q=\"-w1^2\"}");
  std::vector<Vec> ys;
  for (double y : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) ys.push_back(Vec::Constant(1, y));
  auto rep = boundary_value_check(u, f, ys, PairingForm::euclidean(1));
  CHECK(rep.converged);
  CHECK(rep.monotone_tail);
  CHECK(rep.final_gap_limit < 1e-6);
  CHECK(rep.max_gap_identity < 1e-8);
  // First-order approach: the gap at y is ≈ y |u(p f^)|.
  CHECK(rep.steps[0].gap_limit > 10 * rep.steps[1].gap_limit * 0.5);
  CHECK(rep.to_json().find("\"converged\":true") != std::string::npos);
}

TEST_CASE("boundary values of point masses") {
  auto f = TestFunction::parse("tf{dim=1, P=\"1\", Q=\"-w1^2\"}");
  auto form = PairingForm::euclidean(1);
  std::vector<Vec> ys{Vec::Constant(1, 0.5), Vec::Constant(1, 0.1), Vec::Constant(1, 0.01)};
  auto d0 = boundary_value_check(Functional::point_mass(Vec::Zero(1), ray(1)), f, ys, form);
  for (const auto& s : d0.steps) CHECK(s.gap_limit < 1e-10);
  CHECK_THAT(d0.limit.real(), WithinRel(std::sqrt(kPi), 1e-12));

  const double p = 1.3;
  auto dp = boundary_value_check(Functional::point_mass(Vec::Constant(1, p), ray(1)), f, ys, form);
  const double fhat = std::sqrt(kPi) * std::exp(-p * p / 4);
  for (const auto& s : dp.steps) CHECK_THAT(s.gap_limit, WithinRel(std::abs(std::exp(-p * s.y(0)) - 1) * fhat, 1e-8));
}

TEST_CASE("check transform in one variable") {
  auto f = TestFunction::parse("tf{dim=1, P=\"1\", Q=\"-w1^2\", flat=\"1:1.0\"}");
  // 30-digit quadrature of (2π)^{-1} ∫_{-∞}^0 exp(1/ξ - ξ^2 + ξ) dξ.
  CHECK_THAT(check_transform(f, 1, 1, Vec::Constant(1, 1.0)).real(), WithinRel(0.0097074455932458431935, 1e-8));
  auto g = TestFunction::parse("tf{dim=1, P=\"w1\", Q=\"-2*w1^2\", flat=\"1:0.5\"}");
  Vec p = Vec::Constant(1, 0.8);
  Complex a(0.3, -1.0), b(2.0, 0.5);
  Complex lin = check_transform(f * a + g * b, 1, 1, p);
  CHECK(std::abs(lin - (a * check_transform(f, 1, 1, p) + b * check_transform(g, 1, 1, p))) < 1e-10);
  CHECK_THROWS_AS(check_transform(TestFunction::gaussian(1), 1, 1, p), InvalidInputError);
  CHECK_THROWS_AS(check_transform(f, 1, 1, Vec::Constant(1, -1.0)), InvalidInputError);
}

TEST_CASE("check transform against the Laplace side of δ_p") {
  // Spatially asymmetric, so the sign of the spatial kernel matters.
  auto f = TestFunction::parse("tf{dim=2, P=\"1 + w2\", Q=\"-w1^2 - (w2 - 0.5)^2\", flat=\"1:1.0\"}");
  auto form = PairingForm::reconstruction(2, 1);
  Vec p{{1.2, 0.7}};
  auto u = Functional::point_mass(p, Cone::light_cone(2, true));
  auto integrand = [&](const Vec& xi) { return laplace_transform(u, iota(xi, 2), form) * f(xi); };
  Complex lhs = quad::integrate_nd(integrand, {quad::Axis::negative_half(), quad::Axis::line()}).value /
                std::pow(2 * kPi, 2);
  Complex consistent = check_transform(f, 2, 1, p, SpatialSign::PairingConsistent);
  Complex written = check_transform(f, 2, 1, p, SpatialSign::AsWritten);
  CHECK(std::abs(lhs - consistent) < 1e-6);
  CHECK(std::abs(lhs - written) > 1e-3);
}

TEST_CASE("check transform of a tensor product factorizes") {
  auto ft = TestFunction::parse("tf{dim=1, P=\"1\", Q=\"-w1^2\", flat=\"1:1.0\"}");
  auto fs = TestFunction::parse("tf{dim=1, P=\"1 + w1\", Q=\"-(w1 - 0.3)^2\"}");
  Vec p{{0.9, -0.6}};
  Complex whole = check_transform(ft.tensor(fs), 2, 1, p);
  Complex time = check_transform(ft, 1, 1, Vec::Constant(1, p(0)));
  Complex space = quad::integrate([&](double x) { return fs(Vec(Vec::Constant(1, x))) * std::exp(kI * p(1) * x); },
                                  -INFINITY, INFINITY)
                      .value /
                  (2 * kPi);
  CHECK(std::abs(whole - time * space) < 1e-8 * std::abs(whole));
}

TEST_CASE("iota multiplies time components by i") {
  CVec z = iota(Vec{{1.0, 2.0, 3.0, 4.0}}, 2);
  CHECK(z(0) == Complex(0.0, 1.0));
  CHECK(z(1) == Complex(2.0, 0.0));
  CHECK(z(2) == Complex(0.0, 3.0));
  CHECK_THROWS_AS(iota(Vec::Zero(3), 2), DimensionError);
}
