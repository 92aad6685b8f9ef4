#pragma once

#include "eclab/types.hpp"

namespace eclab::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  Vec x;
};

/// Dense two-phase simplex for
///   maximize c^T x  subject to  A x <= b,  x >= 0.
/// Bland's rule is used throughout, so the method terminates on degenerate
/// problems. Intended for the small programs that arise in cone geometry.
Solution maximize(const Mat& A, const Vec& b, const Vec& c, double eps = 1e-12);

/// Lawson–Hanson non-negative least squares: argmin_{x >= 0} |A x - b|_2.
Vec nnls(const Mat& A, const Vec& b, int max_iter = 500, double tol = 1e-12);

}  // namespace eclab::lp
