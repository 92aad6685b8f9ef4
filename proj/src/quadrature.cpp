#include "eclab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>

#include "eclab/errors.hpp"

namespace eclab::quad {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// Mapped nodes beyond this are dropped: polynomial factors overflow there
// while the integrands of interest have long since underflowed.
constexpr double kFar = 1e100;

// One 61-point Kronrod panel with the embedded Gauss estimate.
struct Panel {
  double a, b;
  Complex value;
  double error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel panel(const std::function<Complex(double)>& g, double a, double b) {
  double err = 0.0, l1 = 0.0;
  Complex v = GK::integrate(g, a, b, 0u, 0.0, &err, &l1);
  return {a, b, v, err, l1};
}

// Global adaptive rule: bisect the panel with the largest error estimate
// until the total error is below max(tol·L1, abs_tol). Infinite limits are
// mapped to (-1, 1) or [0, 1) first.
Result adaptive(const std::function<Complex(double)>& f, double a, double b, const Options& opt) {
  // Subnormal integrand values are far below anything that matters.
  auto clean = [](Complex v) {
    return std::abs(v.real()) + std::abs(v.imag()) < 1e-290 ? Complex(0.0) : v;
  };
  std::function<Complex(double)> g;
  double lo = a, hi = b;
  const bool ia = std::isinf(a), ib = std::isinf(b);
  if (ia && ib) {
    lo = -1.0, hi = 1.0;
    g = [&](double t) {
      const double d = 1.0 - t * t, x = t / d;
      if (!(std::abs(x) <= kFar) || d == 0.0) return Complex(0.0);
      return clean(f(x)) * ((1.0 + t * t) / (d * d));
    };
  } else if (ib) {
    lo = 0.0, hi = 1.0;
    g = [&](double t) {
      const double d = 1.0 - t, x = a + t / d;
      if (!(std::abs(x) <= kFar) || d == 0.0) return Complex(0.0);
      return clean(f(x)) / (d * d);
    };
  } else if (ia) {
    lo = 0.0, hi = 1.0;
    g = [&](double t) {
      const double d = 1.0 - t, x = b - t / d;
      if (!(std::abs(x) <= kFar) || d == 0.0) return Complex(0.0);
      return clean(f(x)) / (d * d);
    };
  } else {
    g = [&](double x) { return clean(f(x)); };
  }

  const std::size_t max_panels = std::size_t(1) << std::min(opt.max_depth, 20);
  std::priority_queue<Panel> heap;
  heap.push(panel(g, lo, hi));
  Complex value = heap.top().value;
  double error = heap.top().error, l1 = heap.top().l1;
  while (error > std::max(opt.tol * l1, opt.abs_tol) && heap.size() < max_panels) {
    Panel p = heap.top();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;
    heap.pop();
    Panel left = panel(g, p.a, mid), right = panel(g, mid, p.b);
    value += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    l1 += left.l1 + right.l1 - p.l1;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  Result r;
  r.value = 0.0;
  r.error = 0.0;
  r.l1 = 0.0;
  while (!heap.empty()) {
    r.value += heap.top().value;
    r.error += heap.top().error;
    r.l1 += heap.top().l1;
    heap.pop();
  }
  return r;
}

Result run(const std::function<Complex(double)>& f, double a, double b, const Options& opt) {
  Result r = adaptive(f, a, b, opt);
  if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
    throw NumericalFailure("quadrature produced a non-finite value");
  return r;
}

}  // namespace

Result integrate(const std::function<Complex(double)>& f, double a, double b, const Options& opt) {
  return run(f, a, b, opt);
}

double integrate_real(const std::function<double(double)>& f, double a, double b, const Options& opt) {
  return run([&](double x) { return Complex(f(x), 0.0); }, a, b, opt).value.real();
}

Result integrate_negative_axis(const std::function<Complex(double)>& f, const Options& opt) {
  auto g = [&](double t) -> Complex {
    double e = std::exp(t);
    if (e == 0.0 || !(e <= kFar)) return 0.0;
    return f(-e) * e;
  };
  return run(g, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), opt);
}

namespace {

Result nd(const std::function<Complex(const Vec&)>& f, const std::vector<Axis>& axes, const Options& opt,
          Vec& x, std::size_t level) {
  const double inf = std::numeric_limits<double>::infinity();
  auto inner = [&](double v) -> Complex {
    x(static_cast<int>(level)) = v;
    if (level + 1 == axes.size()) return f(x);
    // Inner integrals run tighter so their noise does not stall the outer rule.
    Options in = opt;
    in.tol = std::max(opt.tol * 1e-2, 1e-15);
    in.abs_tol = opt.abs_tol * 1e-2;
    return nd(f, axes, in, x, level + 1).value;
  };
  const Axis& ax = axes[level];
  switch (ax.kind) {
    case AxisKind::Line: return run(inner, -inf, inf, opt);
    case AxisKind::NegativeHalf: return integrate_negative_axis(inner, opt);
    case AxisKind::PositiveHalf: return run(inner, 0.0, inf, opt);
    case AxisKind::Interval: return run(inner, ax.a, ax.b, opt);
  }
  throw InvalidInputError("unknown axis kind");
}

}  // namespace

Result integrate_nd(const std::function<Complex(const Vec&)>& f, const std::vector<Axis>& axes,
                    const Options& opt) {
  if (axes.empty()) throw DimensionError("integration over zero axes");
  Vec x = Vec::Zero(static_cast<int>(axes.size()));
  return nd(f, axes, opt, x, 0);
}

}  // namespace eclab::quad
