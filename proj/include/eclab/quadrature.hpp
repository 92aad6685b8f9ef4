#pragma once

#include <functional>
#include <vector>

#include "eclab/types.hpp"

namespace eclab::quad {

struct Options {
  double tol = 1e-10;   // relative tolerance passed to the adaptive rule
  int max_depth = 15;   // at most 2^max_depth panels per axis
  double abs_tol = 0.0; // absolute error floor
};

struct Result {
  Complex value{0.0, 0.0};
  double error = 0.0;   // estimated absolute error
  double l1 = 0.0;      // estimate of the integral of |f|
};

/// Global adaptive Gauss–Kronrod (61-point) on [a, b]; either limit may be
/// infinite. Stops when the error estimate is below max(tol·L1, abs_tol).
/// On infinite ranges nodes with |x| > 1e100 contribute nothing.
Result integrate(const std::function<Complex(double)>& f, double a, double b, const Options& opt = {});
double integrate_real(const std::function<double(double)>& f, double a, double b, const Options& opt = {});

/// Integral over (-inf, 0) through xi = -e^t, which spreads the region near
/// xi = 0 where flat factors exp(c/xi) live over the whole t-line.
Result integrate_negative_axis(const std::function<Complex(double)>& f, const Options& opt = {});

enum class AxisKind { Line, NegativeHalf, PositiveHalf, Interval };

struct Axis {
  AxisKind kind = AxisKind::Line;
  double a = 0.0, b = 0.0;  // used by Interval
  static Axis line() { return {AxisKind::Line}; }
  static Axis negative_half() { return {AxisKind::NegativeHalf}; }
  static Axis positive_half() { return {AxisKind::PositiveHalf}; }
  static Axis interval(double lo, double hi) { return {AxisKind::Interval, lo, hi}; }
};

/// Iterated one-dimensional adaptive quadrature over a product of axes.
/// Innermost axis is the last one.
Result integrate_nd(const std::function<Complex(const Vec&)>& f, const std::vector<Axis>& axes,
                    const Options& opt = {});

}  // namespace eclab::quad
