#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "eclab/errors.hpp"
#include "eclab/models.hpp"
#include "eclab/wick.hpp"

using namespace eclab;
using Catch::Approx;

TEST_CASE("enumerate_K orders by total then decreasing lex", "[wick]") {
  auto two = enumerate_K(2, 3);
  REQUIRE(two.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(two[k].entries() == std::vector<int>{k});

  auto three = enumerate_K(3, 1);
  REQUIRE(three.size() == 4);
  CHECK(three[0].entries() == std::vector<int>{0, 0, 0});
  CHECK(three[1].entries() == std::vector<int>{1, 0, 0});
  CHECK(three[2].entries() == std::vector<int>{0, 1, 0});
  CHECK(three[3].entries() == std::vector<int>{0, 0, 1});

  auto level2 = enumerate_K(3, 2);
  std::vector<std::vector<int>> want{{2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(level2[4 + i].entries() == want[i]);

  CHECK(enumerate_K(3, 6).size() == 84);
  auto six = enumerate_K(4, 5);
  std::size_t total = 0;
  for (int s = 0; s <= 5; ++s) total += count_K(4, s).convert_to<std::size_t>();
  CHECK(six.size() == total);
  std::vector<MultiIndexK> sorted = six;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST_CASE("multi-index valences and slots", "[wick]") {
  MultiIndexK K(4, {1, 0, 2, 3, 0, 1});  // (01)(02)(03)(12)(13)(23)
  CHECK(K(0, 3) == 2);
  CHECK(K(3, 0) == 2);
  CHECK(K(1, 2) == 3);
  auto kappa = K.valences();
  CHECK(kappa == std::vector<int>{3, 4, 4, 3});
  int sum = 0;
  for (int v : kappa) sum += v;
  CHECK(sum == 2 * K.total());
  CHECK_THROWS_AS(MultiIndexK(3, {1, 2}), DimensionError);
}

TEST_CASE("parse_rational is exact", "[wick]") {
  CHECK(parse_rational("0.3") == Rational(3, 10));
  CHECK(parse_rational("-1.25e-2") == Rational(-1, 80));
  CHECK(parse_rational("6/4") == Rational(3, 2));
  CHECK(parse_rational("12") == Rational(12));
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
}

TEST_CASE("D_K examples", "[wick]") {
  auto d = CoefficientSequence::exponential(Rational(3, 10));
  for (int k = 0; k <= 6; ++k) {
    MultiIndexK K(2, {k});
    auto D = coefficient_D_K(K, d);
    REQUIRE(D.exact);
    CHECK(*D.exact == Rational(factorial(k)) * *d.exact(k) * *d.exact(k));
  }
  auto D111 = coefficient_D_K(MultiIndexK(3, {1, 1, 1}), d);
  CHECK(diagram_count(MultiIndexK(3, {1, 1, 1})) == 8);
  CHECK(*D111.exact == 8 * *d.exact(2) * *d.exact(2) * *d.exact(2));
  auto D0 = coefficient_D_K(MultiIndexK(4), d);
  CHECK(*D0.exact == 1);

  auto g = CoefficientSequence::gaussian_decay();
  auto Dg = coefficient_D_K(MultiIndexK(3, {1, 1, 1}), g);
  CHECK_FALSE(Dg.exact);
  CHECK(Dg.value == Approx(8.0 * std::exp(-12.0)).epsilon(1e-14));
}

TEST_CASE("D_K log branch agrees with the exact branch at the crossover", "[wick]") {
  auto d = CoefficientSequence::inverse_factorial();
  MultiIndexK K(3, {30, 20, 14});  // |K| = 64, exact
  MultiIndexK K2(3, {30, 20, 15});  // |K| = 65, log-domain
  auto a = coefficient_D_K(K, d);
  auto b = coefficient_D_K(K2, d);
  REQUIRE(a.exact);
  REQUIRE_FALSE(b.exact);
  // D_K2 / D_K = (κ'! / κ!) (K! / K'!) Π d ratios, computed exactly
  auto kb = K2.valences();
  Rational want = Rational(diagram_count(K2));
  for (int kj : kb) want *= *d.exact(kj);
  CHECK(b.log_abs == Approx(std::log(want.convert_to<double>())).epsilon(1e-13));
  CHECK(b.rel_error < 1e-11);
}

TEST_CASE("pairing oracle examples", "[wick]") {
  for (int k = 0; k <= 6; ++k) {
    auto m = pairing_oracle({k, k});
    REQUIRE(m.size() == 1);
    CHECK(m.begin()->first.entries() == std::vector<int>{k});
    CHECK(BigInt(m.begin()->second) == factorial(k));
  }
  auto m222 = pairing_oracle({2, 2, 2});
  REQUIRE(m222.size() == 1);
  CHECK(m222.at(MultiIndexK(3, {1, 1, 1})) == 8);

  auto m220 = pairing_oracle({2, 2, 0});
  REQUIRE(m220.size() == 1);
  CHECK(m220.at(MultiIndexK(3, {2, 0, 0})) == 2);

  CHECK(pairing_oracle({1, 1, 1}).empty());
  CHECK(pairing_oracle({4, 0}).empty());
  CHECK_THROWS_AS(pairing_oracle({9, 9}), InvalidInputError);
}

TEST_CASE("diagram counts match the oracle on a small range", "[wick]") {
  auto rep = wick_oracle_check(3, 8);
  CHECK(rep.mismatches == 0);
  CHECK(rep.kappas > 0);
  CHECK(rep.indices > 0);
}

TEST_CASE("coefficient condition", "[wick]") {
  auto inv = check_coefficient_condition(CoefficientSequence::inverse_factorial(), 64);
  CHECK(inv.ok);
  CHECK(inv.A == 1.0);
  CHECK(inv.h == 2.0);

  auto expo = CoefficientSequence::exponential(Rational(2));
  auto e = check_coefficient_condition(expo, 64);
  CHECK(e.ok);
  CHECK(e.A == 1.0);
  CHECK(e.h == 2.0);  // binomial bound; h = 2g is also valid
  CHECK(coefficient_condition_holds(expo, 1.0, 4.0, 64));

  auto gauss = check_coefficient_condition(CoefficientSequence::gaussian_decay(), 64);
  CHECK_FALSE(gauss.ok);
  REQUIRE(gauss.witness);
  CHECK(gauss.witness->first == 3);
  CHECK(gauss.witness->second == 3);
  // ratio e^{2kl} / (100 * 8^6) at k = l = 3
  CHECK(gauss.witness_log_ratio == Approx(18.0 - std::log(100.0) - 6.0 * std::log(8.0)).epsilon(1e-12));

  // a list with a zero in the middle cannot satisfy the condition
  auto holes = CoefficientSequence::custom({1.0, 0.0, 1.0});
  std::optional<std::pair<int, int>> w;
  CHECK_FALSE(coefficient_condition_holds(holes, 100, 8, 4, &w));
  REQUIRE(w);
  CHECK(*w == std::make_pair(2, 2));  // d_4 = 0 beyond the list
  CHECK_THROWS_AS(check_coefficient_condition(expo, 65), InvalidInputError);
}

TEST_CASE("majorant series and convergence bound", "[wick]") {
  auto inv = CoefficientSequence::inverse_factorial();
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(std::pow(10.0, -2.0 + 0.125 * i));
  const double L = 3.0;
  auto wIR = [](double r) { return std::log(2.0 + r); };
  for (double alpha : {0.5, 1.0, 2.0}) {
    auto rep = convergence_bound_check(inv, wIR, Envelope::IR, alpha, L, 0.1, grid);
    CHECK(rep.ok);
    CHECK(std::isfinite(rep.C));
    for (const auto& row : rep.rows) {
      // k!/(2k)! <= 1/k! gives the majorant e^{L w} = (2 + r)^L
      CHECK(row.lhs + row.tail <= std::pow(2.0 + row.r, L) * (1 + 1e-12));
      CHECK(row.lhs + row.tail <= rep.C * row.weight * (1 + 1e-12));
    }
  }
  // independent sum of the same series
  double direct = 0.0, w = std::log(2.0 + 5.0);
  for (int k = 0; k < 60; ++k) direct += std::exp(k * std::log(L * w) + std::lgamma(k + 1.0) - std::lgamma(2 * k + 1.0));
  auto s = majorant_series(inv, L, w);
  CHECK(s.converged);
  CHECK(s.value == Approx(direct).epsilon(1e-14));
  CHECK(s.tail <= 1e-16 * s.value);

  auto ones = CoefficientSequence::constant(Rational(1));
  auto bad = convergence_bound_check(ones, wIR, Envelope::IR, 1.0, L, 0.1, grid);
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.divergence_at);
  CHECK(bad.divergence_at == grid.front());

  auto uv = convergence_bound_check(inv, [](double t) { return std::log1p(1.0 / t); }, Envelope::UV, 2.0, L, 0.5, grid);
  CHECK(uv.ok);
  CHECK_THROWS_AS(convergence_bound_check(inv, wIR, Envelope::UV, 1.0, L, 0.1, grid), InvalidInputError);
}

TEST_CASE("factorial moment bound", "[wick]") {
  auto inv = CoefficientSequence::inverse_factorial();
  for (double L : {1.0, 4.0, 20.0}) {
    auto fm = factorial_moment_bound(inv, L, 200);
    CHECK(fm.decreasing_tail);
    for (int k = 0; k <= 200; ++k)
      CHECK(std::lgamma(k + 1.0) - std::lgamma(2 * k + 1.0) <= std::log(fm.C) - k * std::log(L) + 1e-12);
  }
  CHECK_FALSE(factorial_moment_bound(CoefficientSequence::constant(Rational(1)), 1.0, 50).decreasing_tail);
}

TEST_CASE("combinatorial inequalities hold exhaustively", "[wick]") {
  for (int n = 2; n <= 4; ++n) {
    auto rep = combinatorial_inequalities(n, 8);
    CHECK(rep.violations == 0);
    CHECK(rep.checked == enumerate_K(n, 8).size());
    CHECK(rep.worst_multinomial <= 1.0);
    CHECK(rep.worst_central <= 1.0);
  }
  // 3!/1 = 6 <= 15^3 at K = (1,1,1)
  MultiIndexK K(3, {1, 1, 1});
  CHECK(factorial(K.total()) == 6);
  CHECK(BigInt(6) <= boost::multiprecision::pow(BigInt(15), 3));
  CHECK(factorial(6) <= BigInt(64 * 36));
  CHECK_THROWS_AS(combinatorial_inequalities(5, 2), InvalidInputError);
}

TEST_CASE("lambda constant", "[wick]") {
  LambdaOptions opt;
  opt.samples = 20000;
  auto sup = lambda_constant(Cone::light_cone(2, false), 3, opt);
  CHECK(sup.lambda == Approx(1.0).margin(1e-6));
  CHECK(sup.certified);

  opt.norm = Norm::Euclidean;
  auto euc = lambda_constant(Cone::light_cone(2, false), 3, opt);
  CHECK(euc.lambda == Approx(1.0 / std::sqrt(2.0)).margin(1e-6));
  CHECK(euc.certified);

  opt.norm = Norm::Sup;
  auto half = lambda_constant(Cone::from_generators(1, {Vec::Constant(1, -1.0)}), 4, opt);
  CHECK(half.lambda == Approx(1.0).margin(1e-12));

  // 64-ray backward cone in R^4; Euclidean value from an SLSQP closest-point
  // oracle over the same rays (40 starts)
  LambdaOptions o4;
  o4.starts = 2;
  o4.samples = 20000;
  auto sup4 = lambda_constant(Cone::light_cone(4, false), 4, o4);
  CHECK(sup4.lambda == Approx(1.0).margin(1e-9));
  CHECK(sup4.certified);
  o4.norm = Norm::Euclidean;
  auto euc4 = lambda_constant(Cone::light_cone(4, false), 4, o4);
  CHECK(euc4.lambda == Approx(0.7071067811865472).margin(1e-9));
  CHECK(euc4.certified);
  for (double v : euc4.per_terms) CHECK(v >= euc4.lambda - 1e-12);

  auto plane = Cone::from_halfspaces(2, {Vec{{0.0, 1.0}}});
  CHECK_THROWS_AS(lambda_constant(plane, 2, opt), HypothesisViolated);
}

namespace {

CVec tube_point(std::mt19937_64& rng, int d, double rho) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), t(0.2, 2.0);
  CVec z(d);
  double s = t(rng);
  Vec v(d - 1);
  for (int k = 0; k < d - 1; ++k) v(k) = u(rng);
  if (v.norm() > 1) v /= v.norm();
  z(0) = Complex(2.0 * u(rng), -s);
  for (int k = 1; k < d; ++k) z(k) = Complex(2.0 * u(rng), s * rho * v(k - 1));
  return z;
}

}  // namespace

TEST_CASE("two-point models are analytic on the tube", "[models]") {
  std::mt19937_64 rng(11);
  for (const auto& name : TwoPointModel::registry()) {
    auto w = TwoPointModel::from_registry(name);
    CHECK(w.certified());
    for (int i = 0; i < 50; ++i) {
      CVec z = tube_point(rng, w.dim(), 0.9);
      CHECK(cauchy_riemann_residual(w, z) < 1e-6);
    }
  }
  // Euclidean points: -ζ² = |ξ|²
  auto dip = TwoPointModel::dipole(2, 1.0, 1.0);
  CVec e(2);
  e << Complex(0.0, -0.6), Complex(0.8, 0.0);
  CHECK(std::abs(dip(e)) < 1e-15);
  auto ml = TwoPointModel::massless(2, 2.0);
  CHECK(std::abs(ml(e) - 2.0) < 1e-15);
  CHECK_THROWS_AS(TwoPointModel::from_registry("massive2"), InvalidInputError);
}

TEST_CASE("certified bound and majorant probe", "[models]") {
  std::mt19937_64 rng(5);
  for (const auto& name : TwoPointModel::registry()) {
    auto w = TwoPointModel::from_registry(name);
    const int d = w.dim();
    int worst_bound = 0;
    double worst_ratio = 0.0;
    for (int i = 0; i < 400; ++i) {
      CVec z = tube_point(rng, d, w.subcone_rho());
      REQUIRE(w.in_subcone(z));
      double bound = w.C() * (1.0 + w.w_IR(2.0 * norm(z)) + w.w_UV(norm(Vec(z.imag()))));
      double r = std::abs(w(z)) / bound;
      worst_ratio = std::max(worst_ratio, r);
      if (r > 1.0) ++worst_bound;
    }
    INFO(name << " worst ratio " << worst_ratio);
    CHECK(worst_bound == 0);

    // |𝐰(x - x' - 2iy)|² <= |𝐰_maj(x - iy, x + iy)| |𝐰_maj(x' - iy, x' + iy)|
    std::uniform_real_distribution<double> u(-3.0, 3.0), t(0.05, 3.0);
    for (int i = 0; i < 400; ++i) {
      Vec x(d), xp(d), y(d);
      for (int k = 0; k < d; ++k) {
        x(k) = u(rng);
        xp(k) = u(rng);
      }
      y.setZero();
      y(0) = t(rng);
      CVec z = (x - xp).cast<Complex>() - 2.0 * kI * y.cast<Complex>();
      double lhs = std::norm(w(z));
      CHECK(lhs <= w.majorant(x, y) * w.majorant(xp, y));
    }
  }
}

TEST_CASE("truncated series against the exponential closed form", "[wightman]") {
  auto w = TwoPointModel::from_registry("dipole2");
  const double g = 0.3;
  auto d = CoefficientSequence::exponential(Rational(3, 10));
  std::mt19937_64 rng(2024);
  for (int n : {2, 3}) {
    WickSeries series(n, d, 20);
    auto tc = tail_constants(n, d, w);
    CHECK(tc.h_prime == Approx(4.0 * n * (2 * n - 1) * 4.0));
    for (int i = 0; i < 20; ++i) {
      std::vector<CVec> zeta;
      for (int j = 0; j < n - 1; ++j) zeta.push_back(tube_point(rng, 2, 0.5));
      auto res = wightman_eval(series, zeta, w, tc);
      Complex exact = exponential_closed_form(zeta, w, g);
      CHECK(std::abs(res.value - exact) <= 1e-8 * std::abs(exact));
      CHECK(std::abs(res.value - exact) <= res.tail);
    }
  }
}

TEST_CASE("N = 0 and n = 2 specializations", "[wightman]") {
  auto w = TwoPointModel::from_registry("dipole2");
  auto d = CoefficientSequence::custom_exact({Rational(1, 2), Rational(1, 3), Rational(1, 5)});
  std::mt19937_64 rng(3);
  std::vector<CVec> zeta{tube_point(rng, 2, 0.5), tube_point(rng, 2, 0.5)};
  WickSeries s0(3, d, 0);
  CHECK(std::abs(s0.sum(s0.pair_values(zeta, w)) - 0.125) < 1e-15);

  auto e = CoefficientSequence::exponential(Rational(1, 2));
  WickSeries s2(2, e, 30);
  std::vector<CVec> one{zeta[0]};
  Complex pw = w(zeta[0]);
  Complex direct = 0.0;
  for (int k = 0; k <= 30; ++k) direct += std::tgamma(k + 1.0) * std::pow(e.value(k), 2) * std::pow(pw, k);
  CHECK(std::abs(s2.sum(s2.pair_values(one, w)) - direct) < 1e-13 * std::abs(direct));
  CHECK(std::abs(direct - std::exp(0.25 * pw)) < 1e-12 * std::abs(direct));
}

TEST_CASE("tail bound is monotone and covers later partial sums", "[wightman]") {
  auto w = TwoPointModel::from_registry("dipole2");
  auto d = CoefficientSequence::exponential(Rational(3, 10));
  WickSeries series(3, d, 25);
  auto tc = tail_constants(3, d, w);
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    std::vector<CVec> zeta{tube_point(rng, 2, 0.5), tube_point(rng, 2, 0.5)};
    auto pairs = series.pair_values(zeta, w);
    double prev = std::numeric_limits<double>::infinity();
    for (int N = 0; N <= 20; N += 5) {
      double tail = std::exp(wightman_log_tail(3, zeta, w, d, N, tc));
      CHECK(tail <= prev);
      prev = tail;
      CHECK(std::abs(series.sum_to(pairs, N) - series.sum_to(pairs, N + 5)) <= tail);
    }
    // summation order does not matter beyond rounding
    std::vector<std::size_t> order(series.indices().size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    Complex a = series.sum(pairs), b = series.sum(pairs, &order);
    CHECK(std::abs(a - b) <= 2.0 * std::exp(wightman_log_tail(3, zeta, w, d, 25, tc)) + 1e-13 * std::abs(a));
  }
}

TEST_CASE("wightman preconditions", "[wightman]") {
  auto w = TwoPointModel::from_registry("dipole2");
  auto d = CoefficientSequence::exponential(Rational(3, 10));
  CVec out(2);
  out << Complex(0.1, 0.5), Complex(0.0, 0.0);  // Im ζ in the forward cone
  CHECK_THROWS_AS(wightman_eval(2, {out}, w, d, 5), TubeViolation);
  CVec wide(2);
  wide << Complex(0.1, -1.0), Complex(0.0, 0.95);  // in the tube, outside the subcone
  CHECK_THROWS_AS(wightman_eval(2, {wide}, w, d, 5), InvalidInputError);
  CVec ok(2);
  ok << Complex(0.1, -1.0), Complex(0.2, 0.1);
  CHECK_THROWS_AS(wightman_eval(3, {ok}, w, d, 5), DimensionError);
  CHECK_THROWS_AS(wightman_eval(2, {ok}, w, CoefficientSequence::constant(Rational(1)), 5), TruncationInsufficient);
  CHECK_THROWS_AS(wightman_eval(2, {ok}, w, CoefficientSequence::gaussian_decay(), 5), HypothesisViolated);
}
