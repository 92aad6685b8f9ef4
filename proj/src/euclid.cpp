#include "eclab/euclid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "eclab/errors.hpp"

namespace eclab {

namespace {

void check_points(const std::vector<Vec>& x, int d) {
  for (const auto& p : x)
    if (p.size() != d) throw DimensionError("point has the wrong dimension");
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if ((x[i] - x[j]).cwiseAbs().maxCoeff() == 0.0) throw InvalidInputError("coincident points");
}

double sup_norm_all(const std::vector<Vec>& v) {
  double m = 0.0;
  for (const auto& a : v) m = std::max(m, a.cwiseAbs().maxCoeff());
  return m;
}

// min_{i<j} |<u, a_ij>| for the pair differences a_ij.
double min_projection(const Vec& u, const std::vector<Vec>& a) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& v : a) m = std::min(m, std::abs(u.dot(v)));
  return m;
}

Vec cross3(const Vec& a, const Vec& b) {
  Vec c(3);
  c << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
  return c;
}

// Proper rotation T with T u = e_0: Householder reflection, then a sign flip
// of the last axis to restore det = +1.
Mat rotation_to_time_axis(const Vec& u) {
  const int d = static_cast<int>(u.size());
  Mat T = Mat::Identity(d, d);
  Vec e0 = Vec::Unit(d, 0);
  Vec v = u - e0;
  if (v.norm() < 1e-15) return T;
  T -= 2.0 * v * v.transpose() / v.squaredNorm();
  T.row(d - 1) *= -1.0;
  return T;
}

void orient(Vec& u) {
  for (int k = 0; k < u.size(); ++k) {
    if (std::abs(u(k)) > 1e-12) {
      if (u(k) < 0) u = -u;
      return;
    }
  }
}

}  // namespace

void EuclidConfig::validate() const {
  if (d < 2) throw DimensionError("spacetime dimension must be at least 2");
  if (n < 2) throw InvalidInputError("Schwinger functions need n >= 2");
  if (!model) throw InvalidInputError("no two-point model given");
  if (model->dim() != d) throw DimensionError("model dimension differs from d");
  if (!model->certified()) throw InvalidInputError("model is not certified");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidInputError("alpha must lie in [0, 1)");
  if (!(beta > 1.0)) throw InvalidInputError("beta must exceed 1");
}

std::vector<Vec> difference_variables(const std::vector<Vec>& x) {
  std::vector<Vec> xi;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) xi.push_back(x[j] - x[j + 1]);
  return xi;
}

bool in_past_tube(const std::vector<Vec>& xi) {
  for (const auto& v : xi)
    if (!(v.size() > 0 && v(0) < 0.0)) return false;
  return true;
}

// ------------------------------------------------------------------ Schwinger

Schwinger::Schwinger(EuclidConfig cfg, int N)
    : cfg_((cfg.validate(), std::move(cfg))),
      series_(cfg_.n, cfg_.coeffs, N),
      tc_(tail_constants(cfg_.n, cfg_.coeffs, *cfg_.model)) {}

SchwingerResult Schwinger::at_differences(const std::vector<Vec>& xi) const {
  if (static_cast<int>(xi.size()) != cfg_.n - 1) throw DimensionError("expected n - 1 difference variables");
  for (const auto& v : xi)
    if (v.size() != cfg_.d) throw DimensionError("difference variable has the wrong dimension");
  if (!in_past_tube(xi)) throw TubeViolation("a difference variable has nonnegative time component");
  std::vector<CVec> zeta;
  for (const auto& v : xi) zeta.push_back(iota(v, cfg_.d));
  auto w = wightman_eval(series_, zeta, *cfg_.model, tc_);
  SchwingerResult r;
  r.value = w.value;
  r.tail = w.tail;
  r.N = w.N;
  r.rotation = Mat::Identity(cfg_.d, cfg_.d);
  r.permutation.resize(cfg_.n);
  std::iota(r.permutation.begin(), r.permutation.end(), 0);
  return r;
}

SchwingerResult Schwinger::operator()(const std::vector<Vec>& x) const {
  if (static_cast<int>(x.size()) != cfg_.n) throw DimensionError("expected n points");
  check_points(x, cfg_.d);
  auto xi = difference_variables(x);
  if (in_past_tube(xi)) return at_differences(xi);

  auto ch = chronological_order(x, cfg_.d);
  std::vector<Vec> y;
  for (int j : ch.permutation) y.push_back(ch.rotation * x[j]);
  auto r = at_differences(difference_variables(y));
  r.reordered = true;
  r.rotation = ch.rotation;
  r.permutation = ch.permutation;
  return r;
}

SchwingerResult schwinger_eval(const EuclidConfig& cfg, const std::vector<Vec>& x, int N) {
  return Schwinger(cfg, N)(x);
}

// --------------------------------------------------------- chronological order

ChronoResult chronological_order(const std::vector<Vec>& x, int d) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw InvalidInputError("chronological ordering needs at least two points");
  check_points(x, d);

  std::vector<Vec> a;
  double dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a.push_back(x[i] - x[j]);
      dmin = std::min(dmin, a.back().norm());
    }
  const int P = static_cast<int>(a.size());

  Vec best;
  double best_val = -1.0;
  std::size_t count = 0;
  auto consider = [&](Vec u) {
    const double nu = u.norm();
    if (!(nu > 1e-300)) return;
    u /= nu;
    ++count;
    const double v = min_projection(u, a);
    if (v > best_val) {
      best_val = v;
      best = u;
    }
  };

  // Exact candidates: one active pair, two active pairs, three in d = 3.
  for (const auto& v : a) consider(v);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j) {
      if (i == j) continue;
      for (double s : {1.0, -1.0}) {
        Vec w = a[i] - s * a[j];
        const double ww = w.squaredNorm();
        if (ww < 1e-300) continue;
        consider(a[i] - (a[i].dot(w) / ww) * w);
      }
    }
  if (d == 3) {
    for (int i = 0; i < P; ++i)
      for (int j = i + 1; j < P; ++j)
        for (int k = j + 1; k < P; ++k)
          for (double sj : {1.0, -1.0})
            for (double sk : {1.0, -1.0}) consider(cross3(a[i] - sj * a[j], a[i] - sk * a[k]));
  }

  // Direction grid.
  if (d == 2) {
    const int m = static_cast<int>(std::ceil(kPi / 1e-3));
    for (int k = 0; k < m; ++k) {
      Vec u(2);
      u << std::cos(k * 1e-3), std::sin(k * 1e-3);
      consider(u);
    }
  } else if (d == 3) {
    const int m = 4000;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < m; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / m;
      const double r = std::sqrt(1.0 - z * z);
      Vec u(3);
      u << z, r * std::cos(golden * k), r * std::sin(golden * k);
      consider(u);
    }
  } else {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> N01;
    for (int k = 0; k < 20000; ++k) {
      Vec u(d);
      for (int c = 0; c < d; ++c) u(c) = N01(rng);
      consider(u);
    }
  }

  orient(best);
  ChronoResult r;
  r.direction = best;
  r.rotation = rotation_to_time_axis(best);
  r.permutation.resize(n);
  std::iota(r.permutation.begin(), r.permutation.end(), 0);
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = best.dot(x[i]);
  std::stable_sort(r.permutation.begin(), r.permutation.end(), [&](int i, int j) { return t[i] < t[j]; });
  r.min_gap = best_val;
  r.min_distance = dmin;
  r.ratio = best_val / dmin;
  r.floor = chronological_floor(n);
  r.above_floor = r.ratio >= r.floor;
  r.candidates = count;
  return r;
}

double chronological_floor(int n) {
  // calibrate_chronological(kChronoCalibrationSeed, 20000), rounded down at
  // 1e-6. The minima come from the equilateral triangle (1/2) and the square
  // (1/sqrt(10)); n = 2 is 1 up to rounding.
  switch (n) {
    case 2: return 0.999999;
    case 3: return 0.499999;
    case 4: return 0.316227;
    default: return 0.0;
  }
}

std::vector<std::vector<Vec>> chronological_corpus(std::uint64_t seed, std::size_t count, bool structured,
                                                    std::vector<int>* dims) {
  std::vector<std::vector<Vec>> out;
  std::vector<int> ds;
  auto push = [&](std::vector<Vec> cfg, int d) {
    out.push_back(std::move(cfg));
    ds.push_back(d);
  };
  if (structured) {
    for (int d = 2; d <= 3; ++d) {
      for (int n = 2; n <= 4; ++n) {
        std::vector<Vec> c;
        for (int k = 0; k < n; ++k) c.push_back(Vec::Unit(d, 1) * k);
        push(c, d);
      }
      for (int n = 3; n <= 4; ++n) {
        std::vector<Vec> c;
        for (int k = 0; k < n; ++k) {
          Vec v = Vec::Zero(d);
          v(0) = std::cos(2 * kPi * k / n);
          v(1) = std::sin(2 * kPi * k / n);
          c.push_back(v);
        }
        push(c, d);
      }
    }
    std::vector<Vec> tet;
    const double vt[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    for (const auto& s : vt) tet.push_back(Eigen::Vector3d(s[0], s[1], s[2]));
    push(tet, 3);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nd(2, 4), dd(2, 3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    const int n = nd(rng), d = dd(rng);
    std::vector<Vec> c;
    for (int i = 0; i < n; ++i) {
      Vec v(d);
      for (int j = 0; j < d; ++j) v(j) = U(rng);
      c.push_back(v);
    }
    push(c, d);
  }
  if (dims) *dims = ds;
  return out;
}

ChronoCalibration calibrate_chronological(std::uint64_t seed, std::size_t count, bool structured) {
  std::vector<int> dims;
  auto corpus = chronological_corpus(seed, count, structured, &dims);
  ChronoCalibration cal;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const int n = static_cast<int>(corpus[k].size());
    const double r = chronological_order(corpus[k], dims[k]).ratio;
    auto it = cal.c.find(n);
    if (it == cal.c.end() || r < it->second) cal.c[n] = r;
    ++cal.samples[n];
  }
  return cal;
}

// ------------------------------------------------------------------ bound fit

BoundGrid difference_grid(int d, double t_lo, double t_hi, double s, int t_points, int s_points) {
  if (!(t_lo < t_hi && t_hi < 0.0)) throw InvalidInputError("time range must be negative and increasing");
  if (d < 2 || t_points < 1 || s_points < 1) throw InvalidInputError("bad grid size");
  BoundGrid g;
  std::ostringstream os;
  os << "xi0 in [" << t_lo << ", " << t_hi << "] x " << t_points << ", xi1 in [" << -s << ", " << s << "] x "
     << s_points;
  g.description = os.str();
  for (int i = 0; i < t_points; ++i) {
    const double t = t_points == 1 ? t_lo : t_lo + (t_hi - t_lo) * i / (t_points - 1);
    for (int j = 0; j < s_points; ++j) {
      const double x = s_points == 1 ? 0.0 : -s + 2 * s * j / (s_points - 1);
      Vec v = Vec::Zero(d);
      v(0) = t;
      v(1) = x;
      g.points.push_back({v});
    }
  }
  return g;
}

BoundFit bound_fit_S(const Schwinger& s, const BoundGrid& grid, double epsilon, BoundForm form) {
  const auto& cfg = s.config();
  if (!(epsilon > 0.0)) throw InvalidInputError("epsilon must be positive");
  if (!(cfg.alpha > 0.0)) throw InvalidInputError("the bound fit needs alpha > 0");
  if (grid.points.empty()) throw InvalidInputError("empty grid");
  BoundFit fit;
  fit.epsilon = epsilon;
  fit.grid = grid.description;
  fit.points = grid.points.size();

  std::vector<double> lhs(grid.points.size()), lw(grid.points.size());
  double logC = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const auto& g = grid.points[k];
    SchwingerResult r;
    double gap;
    if (form == BoundForm::Differences) {
      r = s.at_differences(g);
      gap = std::numeric_limits<double>::infinity();
      for (const auto& v : g) gap = std::min(gap, std::abs(v(0)));
    } else {
      r = s(g);
      gap = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j) gap = std::min(gap, (g[i] - g[j]).cwiseAbs().maxCoeff());
    }
    const double mag = std::abs(r.value) + r.tail;
    lhs[k] = std::log(mag);
    lw[k] = epsilon * std::pow(sup_norm_all(g), 1.0 / cfg.alpha) + epsilon * std::pow(gap, -1.0 / (cfg.beta - 1.0));
    const double v = lhs[k] - lw[k];
    if (v > logC) {
      logC = v;
      fit.argmax = k;
    }
  }
  fit.log_C = logC;
  fit.log_lhs = lhs;
  fit.log_weight = lw;
  if (!std::isfinite(logC) || logC > 700.0) {
    fit.diverged = true;
    fit.C = std::numeric_limits<double>::infinity();
    fit.residual = std::numeric_limits<double>::infinity();
    return fit;
  }
  fit.C = std::exp(logC);
  // Violation in the log domain: log|S| - log(C·weight).
  double res = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < lhs.size(); ++k) res = std::max(res, lhs[k] - lw[k] - logC);
  fit.residual = res;
  return fit;
}

// ------------------------------------------------------------- reconstruction

ReconstructionResult reconstruction_check(const Functional& u, const TestFunction& f, int d, int n,
                                          const quad::Options& opt) {
  if (u.dim() != d * n || f.dim() != d * n) throw DimensionError("reconstruction dimension mismatch");
  const PairingForm form = PairingForm::reconstruction(d, n);
  // Axes in reverse order (time innermost), so the lhs does not retrace the
  // node set check_transform uses on the rhs.
  const int k = d * n;
  std::vector<quad::Axis> axes(k, quad::Axis::line());
  for (int j = 0; j < n; ++j) axes[k - 1 - j * d] = quad::Axis::negative_half();

  // Inner integrals run tighter than the outer rule, whose error estimate
  // would otherwise chase their noise down to the depth limit.
  quad::Options inner = opt;
  inner.tol = std::max(opt.tol * 1e-3, 1e-14);
  inner.abs_tol = opt.abs_tol * 1e-2;

  ReconstructionResult r;
  if (!f.is_zero()) {
    const LaplaceTable L(u, form);
    auto g = [&](const Vec& rev) -> Complex {
      Vec xi = rev.reverse();
      const Complex fv = f(xi);
      if (fv == 0.0) return 0.0;
      return L(iota(xi, d)) * fv;
    };
    r.lhs = quad::integrate_nd(g, axes, opt).value * std::pow(2 * kPi, -d * n);
    r.rhs = u.apply([&](const Vec& p) { return check_transform(f, d, n, p, SpatialSign::PairingConsistent, inner); },
                    opt);
  }
  r.gap = std::abs(r.lhs - r.rhs);
  return r;
}

// -------------------------------------------------------------------- boosts

std::function<Complex(const Vec&)> euclidean_rotation_generator(const TestFunction& f, int d, int l) {
  if (d < 2 || l < 1 || l >= d) throw InvalidInputError("spatial index out of range");
  if (f.dim() % d != 0) throw DimensionError("test function dimension is not a multiple of d");
  const int n = f.dim() / d;
  return [f, d, l, n](const Vec& xi) -> Complex {
    if (f.is_zero()) return 0.0;
    CVec g = f.gradient(xi);
    Complex acc = 0.0;
    for (int k = 0; k < n; ++k) acc += xi(k * d) * g(k * d + l) - xi(k * d + l) * g(k * d);
    return acc;
  };
}

BoostReport boost_intertwine_check(const TestFunction& f, int d, int n, int l, const std::vector<Vec>& probes,
                                   SpatialSign s, double h, const quad::Options& opt) {
  if (f.dim() != d * n) throw DimensionError("boost check dimension mismatch");
  auto Yf = euclidean_rotation_generator(f, d, l);
  auto F = [&](const Vec& p) -> Complex {
    if (f.is_zero()) return 0.0;
    return check_transform(f, d, n, p, s, opt);
  };
  BoostReport rep;
  rep.factor = Complex(0.0, -static_cast<double>(static_cast<int>(s)));
  for (const auto& p : probes) {
    if (p.size() != d * n) throw DimensionError("probe dimension mismatch");
    for (int k = 0; k < n; ++k)
      if (!(p(k * d) > 0.0)) throw InvalidInputError("probe outside positive time");
    Vec v = Vec::Zero(d * n);
    for (int k = 0; k < n; ++k) {
      v(k * d + l) += p(k * d);
      v(k * d) += p(k * d + l);
    }
    for (int k = 0; k < n; ++k)
      if (!(p(k * d) - h * std::abs(v(k * d)) > 0.0)) throw InvalidInputError("difference step leaves positive time");
    auto D = [&](double step) { return (F(p + step * v) - F(p - step * v)) / (2.0 * step); };
    const Complex Xf = (4.0 * D(h / 2) - D(h)) / 3.0;
    BoostProbe bp;
    bp.p = p;
    bp.lhs = f.is_zero() ? Complex(0.0) : check_transform(Yf, d, n, p, s, opt);
    bp.rhs = rep.factor * Xf;
    rep.max_abs = std::max(rep.max_abs, std::abs(bp.lhs - bp.rhs));
    rep.scale = std::max({rep.scale, std::abs(bp.lhs), std::abs(bp.rhs)});
    rep.probes.push_back(bp);
  }
  if (!(rep.scale > 1e-300)) rep.scale = 1.0;
  rep.residual = rep.max_abs / rep.scale;
  return rep;
}

std::vector<Vec> probe_grid(int d, double t_lo, double t_hi, double s, int t_points, int s_points) {
  if (!(t_lo > 0.0 && t_hi >= t_lo)) throw InvalidInputError("probe times must be positive");
  std::vector<Vec> out;
  for (int i = 0; i < t_points; ++i)
    for (int j = 0; j < s_points; ++j) {
      Vec p = Vec::Zero(d);
      p(0) = t_points == 1 ? t_lo : t_lo + (t_hi - t_lo) * i / (t_points - 1);
      p(1) = s_points == 1 ? 0.0 : -s + 2 * s * j / (s_points - 1);
      out.push_back(p);
    }
  return out;
}

}  // namespace eclab
