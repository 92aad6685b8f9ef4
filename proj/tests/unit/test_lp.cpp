#include <catch_amalgamated.hpp>

#include "eclab/lp.hpp"

using Catch::Matchers::WithinAbs;
using eclab::Mat;
using eclab::Vec;
namespace lp = eclab::lp;

TEST_CASE("simplex solves a textbook program") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
  Mat A{{1, 0}, {0, 2}, {3, 2}};
  Vec b{{4, 12, 18}};
  Vec c{{3, 5}};
  auto s = lp::maximize(A, b, c);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK_THAT(s.objective, WithinAbs(36.0, 1e-12));
  CHECK_THAT(s.x(0), WithinAbs(2.0, 1e-12));
  CHECK_THAT(s.x(1), WithinAbs(6.0, 1e-12));
}

TEST_CASE("simplex handles a negative right-hand side") {
  // max -x - y, x + y >= 2 -> -2
  Mat A{{-1, -1}};
  Vec b{{-2}};
  Vec c{{-1, -1}};
  auto s = lp::maximize(A, b, c);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK_THAT(s.objective, WithinAbs(-2.0, 1e-12));
}

TEST_CASE("simplex reports infeasible and unbounded programs") {
  Mat A{{1}, {-1}};
  Vec b{{1, -2}};
  Vec c{{1}};
  CHECK(lp::maximize(A, b, c).status == lp::Status::Infeasible);

  Mat A2{{-1, 1}};
  Vec b2{{1}};
  Vec c2{{1, 0}};
  CHECK(lp::maximize(A2, b2, c2).status == lp::Status::Unbounded);
}

TEST_CASE("nnls clips to the nonnegative orthant") {
  Mat A = Mat::Identity(3, 3);
  Vec b{{1.0, -2.0, 0.5}};
  Vec x = lp::nnls(A, b);
  CHECK_THAT(x(0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(x(1), WithinAbs(0.0, 1e-12));
  CHECK_THAT(x(2), WithinAbs(0.5, 1e-12));
}

TEST_CASE("nnls satisfies the KKT conditions on a random instance") {
  Mat A = Mat::Random(6, 4);
  Vec b = Vec::Random(6);
  Vec x = lp::nnls(A, b);
  Vec grad = A.transpose() * (A * x - b);
  for (int i = 0; i < 4; ++i) {
    CHECK(x(i) >= 0.0);
    if (x(i) > 1e-10) CHECK_THAT(grad(i), WithinAbs(0.0, 1e-9));
    else CHECK(grad(i) >= -1e-9);
  }
}
