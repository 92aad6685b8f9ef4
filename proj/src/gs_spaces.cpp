#include "eclab/gs_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eclab/errors.hpp"
#include "eclab/quadrature.hpp"

namespace eclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogx_pow(double m, double idx) { return m > 0 ? idx * m * std::log(m) : 0.0; }  // log m^{idx m}, 0^0 = 1

double log_factorial(int n) { return std::lgamma(n + 1.0); }

// Odometer over {0..n-1}^k.
bool next_index(std::vector<int>& idx, int n) {
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (++idx[a] < n) return true;
    idx[a] = 0;
  }
  return false;
}

struct Grid {
  int k = 0;
  int n = 0;
  double R = 0.0;
  double h = 0.0;
  Grid(int k_, int n_, double R_) : k(k_), n(n_), R(R_) {
    if (n < 2) throw InvalidInputError("grid needs at least 2 points per axis");
    h = 2.0 * R / (n - 1);
  }
  std::vector<Vec> points() const {
    std::vector<Vec> out;
    std::vector<int> idx(k, 0);
    do {
      Vec x(k);
      for (int a = 0; a < k; ++a) x(a) = -R + h * idx[a];
      out.push_back(x);
    } while (next_index(idx, n));
    return out;
  }
};

int level_order(int M, double s) { return std::max(0, static_cast<int>(std::ceil(M * s - 1e-12))); }

void check_truncation(const Truncation& t) {
  if (t.M < 0 || !(t.R > 0) || t.points < 2 || t.levels.empty())
    throw InvalidInputError("invalid truncation");
  for (std::size_t i = 0; i < t.levels.size(); ++i)
    if (!(t.levels[i] > 0) || t.levels[i] > 1.0 || (i && t.levels[i] <= t.levels[i - 1]))
      throw InvalidInputError("truncation levels must increase within (0, 1]");
}

}  // namespace

bool GSParams::nontrivial() const { return alpha + beta > 1.0 || (alpha > 0.0 && std::abs(alpha + beta - 1.0) < 1e-12); }

void GSParams::validate() const {
  if (!(A > 0) || !(B > 0)) throw InvalidInputError("GS scales A and B must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidInputError("alpha must lie in [0, 1)");
  if (!(beta > 0)) throw InvalidInputError("beta must be positive");
}

std::string NormReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"value\":";
  if (std::isfinite(value)) os << value;
  else os << "\"inf\"";
  os << ",\"log_value\":";
  if (std::isfinite(log_value)) os << log_value;
  else os << "null";
  os << ",\"truncation\":{\"M\":" << M << ",\"R\":" << R << "},\"diverges\":" << (diverges ? "true" : "false") << "}";
  return os.str();
}

NormReport make_report(const std::vector<NormLevel>& raw, double divergence_ratio) {
  NormReport r;
  double run = -kInf;
  for (const auto& l : raw) {
    run = std::max(run, l.log_value);
    r.levels.push_back({l.M, l.R, run});
  }
  r.log_value = run;
  r.value = std::isfinite(run) ? std::exp(run) : (run > 0 ? kInf : 0.0);
  if (!raw.empty()) {
    r.M = raw.back().M;
    r.R = raw.back().R;
  }
  if (r.levels.size() >= 2 && std::isfinite(run)) {
    const double lr = std::log(divergence_ratio);
    bool grows = true;
    for (std::size_t i = 1; i < r.levels.size(); ++i) {
      double a = r.levels[i - 1].log_value, b = r.levels[i].log_value;
      if (std::isfinite(a) && !(b - a > lr)) grows = false;
    }
    r.diverges = grows;
  }
  return r;
}

// -------------------------------------------------------- contour derivatives

std::vector<std::vector<int>> multi_indices(int k, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k, 0);
  // Lexicographically descending: first coordinate takes the largest share.
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == k - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  if (k <= 0) throw DimensionError("multi-indices need k >= 1");
  rec(0, m);
  return out;
}

std::vector<Complex> cauchy_derivatives(const ComplexField& f, const Vec& x, int m, double r, int nodes) {
  const int k = static_cast<int>(x.size());
  auto lams = multi_indices(k, m);
  if (m == 0) return {f(x.cast<Complex>())};
  if (!(r > 0)) throw InvalidInputError("contour radius must be positive");
  int N = std::max(nodes, 2 * m + 8);
  const long max_samples = 1L << 20;
  while (true) {
    long total = 1;
    for (int a = 0; a < k; ++a) total *= N;
    if (total > max_samples) throw NumericalFailure("contour quadrature too large at order " + std::to_string(m));
    std::vector<Complex> F(total);
    std::vector<int> idx(k, 0);
    long pos = 0;
    double fmax = 0.0;
    do {
      CVec w = x.cast<Complex>();
      for (int a = 0; a < k; ++a) w(a) += r * std::polar(1.0, 2.0 * kPi * idx[a] / N);
      F[pos] = f(w);
      if (!std::isfinite(F[pos].real()) || !std::isfinite(F[pos].imag()))
        throw NumericalFailure("non-finite value on contour at order " + std::to_string(m));
      fmax = std::max(fmax, std::abs(F[pos]));
      ++pos;
    } while (next_index(idx, N));

    auto mode = [&](const std::vector<int>& lam) {
      Complex s = 0.0;
      std::vector<int> j(k, 0);
      long p = 0;
      do {
        long phase = 0;
        for (int a = 0; a < k; ++a) phase += static_cast<long>(lam[a]) * j[a];
        s += F[p] * std::polar(1.0, -2.0 * kPi * static_cast<double>(phase % N) / N);
        ++p;
      } while (next_index(j, N));
      return s / static_cast<double>(total);
    };

    // Highest non-negative modes estimate the coefficients that alias into order m.
    double tail = 0.0;
    for (int a = 0; a < k; ++a)
      for (int d = 1; d <= 2; ++d) {
        std::vector<int> lam(k, 0);
        lam[a] = N - d;
        tail = std::max(tail, std::abs(mode(lam)));
      }
    if (tail <= 1e-11 * fmax || fmax == 0.0) {
      std::vector<Complex> out;
      for (const auto& lam : lams) {
        double lf = 0.0;
        for (int v : lam) lf += log_factorial(v);
        out.push_back(mode(lam) * std::exp(lf - m * std::log(r)));
      }
      return out;
    }
    if ((k == 1 && N >= 1024) || (k > 1 && N >= 256))
      throw NumericalFailure("contour quadrature did not converge at order " + std::to_string(m));
    N *= 2;
  }
}

// ------------------------------------------------------------------ norms

namespace {

struct WeightScheme {
  double deriv_scale, deriv_index, moment_scale, moment_index;
};

// Shared engine for real_norm and sigma_norm. radius(x, m) gives the contour
// radius; keep(x) filters grid points.
NormReport derivative_norm(const TestFunction& f, const WeightScheme& w, const Truncation& t,
                           const std::function<double(const Vec&, int)>& radius,
                           const std::function<bool(const Vec&)>& keep) {
  check_truncation(t);
  const int k = f.dim();
  Grid g(k, t.points, t.R);
  const auto pts = g.points();
  const int L = static_cast<int>(t.levels.size());
  std::vector<NormLevel> raw(L);
  for (int l = 0; l < L; ++l) raw[l] = {level_order(t.M, t.levels[l]), t.R * t.levels[l], -kInf};
  if (f.is_zero()) return make_report(raw, t.divergence_ratio);
  ComplexField field = [&](const CVec& z) { return f(z); };

  for (const auto& x : pts) {
    if (!keep(x)) continue;
    const double xn = norm(x);
    std::vector<double> logd(t.M + 1, -kInf);
    for (int m = 0; m <= t.M; ++m) {
      double best = 0.0;
      for (const auto& v : cauchy_derivatives(field, x, m, radius(x, m), t.contour_nodes))
        best = std::max(best, std::abs(v));
      logd[m] = best > 0 ? std::log(best) : -kInf;
    }
    for (int l = 0; l < L; ++l) {
      if (xn > raw[l].R * (1 + 1e-12)) continue;
      const int Ml = raw[l].M;
      double mom = 0.0;  // s = 0 term
      if (xn > 0)
        for (int s = 1; s <= Ml; ++s)
          mom = std::max(mom, s * std::log(xn) - s * std::log(w.moment_scale) - xlogx_pow(s, w.moment_index));
      for (int m = 0; m <= Ml; ++m) {
        if (!std::isfinite(logd[m])) continue;
        double v = logd[m] - m * std::log(w.deriv_scale) - xlogx_pow(m, w.deriv_index) + mom;
        raw[l].log_value = std::max(raw[l].log_value, v);
      }
    }
  }
  return make_report(raw, t.divergence_ratio);
}

}  // namespace

NormReport real_norm(const TestFunction& f, const GSParams& p, const Truncation& t) {
  p.validate();
  if (!f.is_entire()) throw InvalidInputError("real_norm needs an entire test function");
  return derivative_norm(
      f, {p.A, p.alpha, p.B, p.beta}, t,
      [&](const Vec&, int m) { return std::max(1.0, std::pow(static_cast<double>(m), p.alpha)); },
      [](const Vec&) { return true; });
}

NormReport sigma_norm(const TestFunction& f, const OpenSet& O, const GSParams& p, const Truncation& t) {
  if (!(p.A > 0) || !(p.B > 0) || !(p.beta > 1.0) || p.alpha < 0)
    throw InvalidInputError("Σ norm needs beta > 1, alpha >= 0 and positive scales");
  if (O.dim != f.dim()) throw DimensionError("open set dimension does not match test function");
  return derivative_norm(
      f, {p.B, p.beta, p.A, p.alpha}, t,
      [&](const Vec& x, int) { return 0.5 * O.distance_to_complement(x); },
      [&](const Vec& x) { return O.contains(x) && O.distance_to_complement(x) > 1e-12; });
}

namespace {

NormReport cone_norm_impl(const std::function<double(const CVec&)>& log_abs, int dim, const Cone& U,
                          const GSParams& p, const Truncation& t) {
  p.validate();
  check_truncation(t);
  if (U.dim() != dim) throw DimensionError("cone dimension does not match test function");
  const double Rq = t.Rq < 0 ? t.R : t.Rq;
  const int nq = t.q_points < 0 ? t.points : t.q_points;
  Grid gp(dim, t.points, t.R);
  Grid gq(dim, nq, Rq);
  const auto ps = gp.points();
  const auto qs = gq.points();
  const double ea = 1.0 / (1.0 - p.alpha), eb = 1.0 / p.beta;
  const int L = static_cast<int>(t.levels.size());
  std::vector<NormLevel> raw(L);
  for (int l = 0; l < L; ++l) raw[l] = {t.M, t.R * t.levels[l], -kInf};

  for (const auto& x : ps) {
    const double pn = norm(x);
    const double delta = p.A * U.distance(x);  // δ_U(Ap) = A δ_U(p)
    const double base = std::pow(pn / p.B, eb) - std::pow(delta, ea);
    for (const auto& y : qs) {
      const double qn = norm(y);
      CVec w(dim);
      for (int a = 0; a < dim; ++a) w(a) = Complex(x(a), y(a));
      const double lf = log_abs(w);
      if (!(lf > -kInf)) continue;
      if (std::isnan(lf)) throw NumericalFailure("non-finite test function value in cone norm");
      const double v = lf + base - std::pow(p.A * qn, ea);
      for (int l = 0; l < L; ++l)
        if (pn <= t.R * t.levels[l] * (1 + 1e-12) && qn <= Rq * t.levels[l] * (1 + 1e-12))
          raw[l].log_value = std::max(raw[l].log_value, v);
    }
  }
  return make_report(raw, t.divergence_ratio);
}

}  // namespace

NormReport cone_norm(const ComplexField& f, int dim, const Cone& U, const GSParams& p, const Truncation& t) {
  return cone_norm_impl([&](const CVec& w) { return std::log(std::abs(f(w))); }, dim, U, p, t);
}

NormReport cone_norm(const TestFunction& f, const Cone& U, const GSParams& p, const Truncation& t) {
  if (!f.is_entire()) throw InvalidInputError("cone_norm needs an entire test function");
  return cone_norm_impl([&](const CVec& w) { return f.log_abs(w); }, f.dim(), U, p, t);
}

// --------------------------------------------------------------- Example 1

double example1_divergence(double R, double tol) {
  if (!(R > 0)) throw InvalidInputError("truncation radius must be positive");
  quad::Options opt;
  opt.tol = tol;
  auto inner = [&](double p1) {
    double lo = std::max(-R, -std::pow(std::abs(p1), 2.0 / 3.0));
    return quad::integrate_real([&](double p2) { return std::exp(-p1 * p1 - p2 * p2 * p2); }, lo, R, opt);
  };
  // |p1|^{2/3} has a cusp at 0; integrate the halves separately.
  return quad::integrate_real(inner, -R, 0.0, opt) + quad::integrate_real(inner, 0.0, R, opt);
}

// ----------------------------------------------------------- decomposition

namespace {

double wrap(double a) {
  a = std::fmod(a, 2 * kPi);
  return a < 0 ? a + 2 * kPi : a;
}

// Closed arc [start, start + width] of directions in R^2. width < 0: empty.
struct Arc {
  double start = 0.0;
  double width = -1.0;
  bool contains(double a, double tol = 1e-12) const {
    if (width < 0) return false;
    if (width >= 2 * kPi) return true;
    return wrap(a - start) <= width + tol || wrap(a - start) >= 2 * kPi - tol;
  }
  Arc widened(double g) const {
    if (width < 0) return *this;
    if (width + 2 * g >= 2 * kPi) return {0.0, 2 * kPi};
    return {wrap(start - g), width + 2 * g};
  }
};

Arc arc_of(const PolyCone& c) {
  if (c.is_degenerate()) return {};
  if (c.is_full()) return {0.0, 2 * kPi};
  std::vector<double> ang;
  for (const auto& g : c.generators()) ang.push_back(wrap(std::atan2(g(1), g(0))));
  std::sort(ang.begin(), ang.end());
  if (ang.size() == 1) return {ang[0], 0.0};
  // The projection is the complement of the largest gap between generators.
  double best_gap = -1;
  std::size_t at = 0;
  for (std::size_t i = 0; i < ang.size(); ++i) {
    double nxt = i + 1 < ang.size() ? ang[i + 1] : ang[0] + 2 * kPi;
    if (nxt - ang[i] > best_gap) {
      best_gap = nxt - ang[i];
      at = i;
    }
  }
  double start = at + 1 < ang.size() ? ang[at + 1] : ang[0];
  return {start, 2 * kPi - best_gap};
}

// Angular distance between two closed arcs (0 when they meet).
double arc_gap(const Arc& a, const Arc& b) {
  if (a.width < 0 || b.width < 0) return kInf;
  const int n = 3600;
  double best = kInf;
  for (int i = 0; i <= n; ++i) {
    double u = a.start + a.width * i / n;
    for (double e : {b.start, b.start + b.width}) {
      double d = wrap(u - e);
      best = std::min(best, std::min(d, 2 * kPi - d));
    }
    if (b.contains(u)) return 0.0;
  }
  for (double e : {a.start, a.start + a.width})
    if (b.contains(e)) return 0.0;
  return best;
}

Complex gauss1(Complex z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * kPi); }

// ∫_{ray σ·[0,∞)} g0(w - η) dη for w in C.
Complex half_line_mass(Complex w, double sigma) {
  quad::Options opt;
  opt.tol = 1e-14;
  return quad::integrate([&](double s) { return gauss1(w - sigma * s); }, 0.0, kInf, opt).value;
}

// ∫ over the planar sector `arc` of the 2-D Gaussian g0(w - η).
Complex sector_mass(Complex w1, Complex w2, const Arc& arc) {
  if (arc.width < 0) return 0.0;
  quad::Options opt;
  opt.tol = 1e-12;
  opt.max_depth = 12;
  auto radial = [&](double phi) {
    double c = std::cos(phi), s = std::sin(phi);
    return quad::integrate(
               [&](double r) {
                 Complex a = w1 - r * c, b = w2 - r * s;
                 return r * std::exp(-0.5 * (a * a + b * b)) / (2 * kPi);
               },
               0.0, kInf, opt)
        .value;
  };
  if (arc.width == 0) return 0.0;
  return quad::integrate(radial, arc.start, arc.start + arc.width, opt).value;
}

// δ_U(p') >= θ |p'| for unit p' outside V: sampled infimum.
double measure_theta(const Cone& U1, int k1, const std::function<bool(const Vec&)>& in_V1) {
  double th = kInf;
  if (k1 == 1) {
    for (double s : {-1.0, 1.0}) {
      Vec u = Vec::Constant(1, s);
      if (!in_V1(u)) th = std::min(th, U1.distance(u));
    }
  } else {
    const int n = 7200;
    for (int i = 0; i < n; ++i) {
      double a = 2 * kPi * i / n;
      Vec u{{std::cos(a), std::sin(a)}};
      if (in_V1(u)) continue;
      th = std::min(th, U1.distance(u) / norm(u));
    }
  }
  return std::isfinite(th) ? std::min(th, 1.0) : 1.0;
}

}  // namespace

Decomposition decompose(const TestFunction& f, const Cone& U, const std::optional<Cone>& V, const Cone& U1,
                        const Cone& U2, const GSParams& p, const Truncation& tr) {
  p.validate();
  if (p.alpha == 0.0) throw UnsupportedError("decomposition for alpha = 0 is not implemented");
  if (std::abs(p.alpha - 0.5) > 1e-12)
    throw UnsupportedError("the Gaussian mollifier lies in S^{α}_{1-α} only for alpha = 1/2");
  const int k1 = U1.dim();
  if (k1 != 1 && k1 != 2) throw UnsupportedError("decomposition is implemented for k1 = 1 or 2");
  if (U2.dim() != k1 || U.dim() != k1) throw DimensionError("U, U1, U2 must share a dimension");
  const int k2 = V ? V->dim() : 0;
  if (f.dim() != k1 + k2) throw DimensionError("test function dimension must equal dim U + dim V");
  if (!cone_algebra(U1, U2, ConeOp::Intersection).is_degenerate())
    throw InvalidInputError("closures of U1 and U2 must meet only at the origin");

  const Cone UV = V ? cone_algebra(U, *V, ConeOp::Product) : U;
  DecomposeCertificate cert;
  cert.f_norm = cone_norm(f, UV, p, tr);
  if (cert.f_norm.diverges) throw InvalidInputError("f does not have a finite cone norm on U x V");

  // W2 is the set of directions whose mass goes into g1, W1 into g2.
  std::function<Complex(const CVec&)> gW1, gW2;
  std::function<bool(const Vec&)> inV1, inV2;
  if (k1 == 1) {
    auto dirs = [](const Cone& c) {
      std::pair<bool, bool> d{false, false};
      for (const auto& piece : c.pieces())
        for (const auto& g : piece.generators()) (g(0) > 0 ? d.first : d.second) = true;
      return d;
    };
    auto [u1p, u1m] = dirs(U1);
    auto [u2p, u2m] = dirs(U2);
    // In one dimension half-lines already have open projections: Q1 = U1.
    // Directions in neither U1 nor U2 go to W1 unless U1 is {0}.
    bool w1p = u1p || (!u2p && !U1.is_degenerate());
    bool w1m = u1m || (!u2m && !U1.is_degenerate());
    if (U1.is_degenerate()) {
      w1p = false;
      w1m = false;
    }
    auto mass = [](bool plus, bool minus) {
      return [plus, minus](const CVec& w) {
        Complex s = 0.0;
        if (plus) s += half_line_mass(w(0), 1.0);
        if (minus) s += half_line_mass(w(0), -1.0);
        return s;
      };
    };
    gW1 = mass(w1p, w1m);
    gW2 = mass(!w1p, !w1m);
    inV1 = [=](const Vec& u) { return u(0) > 0 ? u1p : u1m; };
    inV2 = [=](const Vec& u) { return u(0) > 0 ? u2p : u2m; };
  } else {
    Arc a1 = arc_of(U1.convex()), a2 = arc_of(U2.convex());
    double gap = arc_gap(a1, a2);
    if (!std::isfinite(gap)) gap = a1.width < 0 ? kPi : std::max(0.0, (2 * kPi - a1.width) / 2);
    gap = std::min(gap, kPi / 2);
    Arc q1 = a1.width < 0 ? Arc{} : a1.widened(gap / 3);
    Arc v1 = a1.width < 0 ? Arc{} : a1.widened(gap / 6);
    Arc v2 = a2.width < 0 ? Arc{} : a2.widened(gap / 6);
    Arc w2 = q1.width < 0 ? Arc{0.0, 2 * kPi}
                          : (q1.width >= 2 * kPi ? Arc{} : Arc{wrap(q1.start + q1.width), 2 * kPi - q1.width});
    gW1 = [q1](const CVec& w) { return q1.width >= 2 * kPi ? Complex(1.0) : sector_mass(w(0), w(1), q1); };
    gW2 = [w2](const CVec& w) { return w2.width >= 2 * kPi ? Complex(1.0) : sector_mass(w(0), w(1), w2); };
    inV1 = [v1](const Vec& u) { return v1.contains(std::atan2(u(1), u(0))); };
    inV2 = [v2](const Vec& u) { return v2.contains(std::atan2(u(1), u(0))); };
  }

  Decomposition d;
  d.g1 = gW2;
  d.g2 = gW1;
  d.f1 = [f, g = d.g1](const CVec& w) { return f(w) * g(w); };
  d.f2 = [f, g = d.g2](const CVec& w) { return f(w) * g(w); };

  cert.A0 = 1.0 / std::sqrt(2.0);
  cert.B0 = std::sqrt(2.0);
  cert.theta = measure_theta(U1, k1, inV1);
  cert.theta2 = measure_theta(U2, k1, inV2);
  cert.A_prime = 2 * (cert.A0 + p.A) + p.A / cert.theta;
  cert.A_prime2 = 2 * (cert.A0 + p.A) + p.A / cert.theta2;
  cert.params1 = {p.alpha, p.beta, cert.A_prime, p.B};
  cert.params2 = {p.alpha, p.beta, cert.A_prime2, p.B};
  Cone c1 = cone_algebra(U, U1, ConeOp::Union);
  Cone c2 = cone_algebra(U, U2, ConeOp::Union);
  if (V) {
    c1 = cone_algebra(c1, *V, ConeOp::Product);
    c2 = cone_algebra(c2, *V, ConeOp::Product);
  }
  cert.f1_norm = cone_norm(d.f1, f.dim(), c1, cert.params1, tr);
  cert.f2_norm = cone_norm(d.f2, f.dim(), c2, cert.params2, tr);
  d.certificate = cert;
  return d;
}

// ---------------------------------------------------------- hyperfunctions

HyperfunctionResult hyperfunction_example(int n, double epsilon, double A, double B, double lambda,
                                          const Truncation& t) {
  if (n < 0) throw InvalidInputError("n must be nonnegative");
  if (!(epsilon > 0) || !(A > 0) || !(B > 0) || !(lambda > 0)) throw InvalidInputError("parameters must be positive");
  check_truncation(t);
  const double r = 1.0 / A;
  const int np = t.points, nq = t.q_points < 0 ? t.points : t.q_points;
  // Sample the closures of the two one-variable neighbourhoods.
  struct Pt {
    double p, q;
  };
  auto region = [&](double lo, double hi) {
    std::vector<Pt> out;
    for (int i = 0; i < np; ++i) {
      double p = lo - r + (hi + r - (lo - r)) * i / (np - 1);
      double dp = p < lo ? lo - p : (p > hi ? p - hi : 0.0);
      double qmax = std::sqrt(std::max(0.0, r * r - dp * dp));
      for (int j = 0; j < nq; ++j) out.push_back({p, -qmax + 2 * qmax * j / std::max(1, nq - 1)});
    }
    return out;
  };
  const auto r1 = region(-epsilon, t.R);
  const auto r2 = region(-epsilon, epsilon);
  const int L = static_cast<int>(t.levels.size());
  std::vector<NormLevel> raw(L);
  for (int l = 0; l < L; ++l) raw[l] = {0, t.R * t.levels[l], -kInf};
  for (const auto& a : r1) {
    for (const auto& b : r2) {
      double lw2 = n == 0 ? 0.0 : n * std::log(std::hypot(b.p, b.q));
      double v = lw2 - a.p + std::max(std::abs(a.p), std::abs(b.p)) / B;
      for (int l = 0; l < L; ++l)
        if (a.p <= t.R * t.levels[l] + 1e-12) raw[l].log_value = std::max(raw[l].log_value, v);
    }
  }
  HyperfunctionResult res;
  res.strip_norm = make_report(raw, t.divergence_ratio);
  res.ray_sup = n == 0 ? 1.0 : std::exp(n * std::log(lambda * n) - n);
  return res;
}

// ------------------------------------------------------------ Σ bounds

FlatCalibration calibrate_flat_bound(const TestFunction& f, const OpenSet& O, const GSParams& p, const Truncation& t,
                                     std::vector<Vec> grid) {
  if (!(p.beta > 1.0)) throw InvalidInputError("flatness bound needs beta > 1");
  if (O.negative_coords.empty()) throw InvalidInputError("open set has no boundary");
  const int k = f.dim();
  if (grid.empty()) {
    for (int i = 0; i < 200; ++i) {
      double s = -2.0 + (2.0 - 0.05) * i / 199.0;
      Vec x = Vec::Zero(k);
      for (int j : O.negative_coords) x(j) = s;
      grid.push_back(x);
    }
  }
  FlatCalibration c;
  c.grid = grid;
  c.norm = sigma_norm(f, O, p, t).value;
  c.A_prime = (p.beta - 1) / (2 * kE) * std::pow(p.B * k * kE, -1.0 / (p.beta - 1));
  if (!(c.norm > 0)) return c;
  for (const auto& x : grid) {
    if (!O.contains(x)) throw InvalidInputError("calibration point outside the open set");
    double d = O.distance_to_complement(x);
    double env = c.norm * std::exp(-c.A_prime * std::pow(d, -1.0 / (p.beta - 1)));
    c.C = std::max(c.C, std::abs(f(x)) / env);
  }
  return c;
}

FlatBound taylor_flat_bound(const TestFunction& f, const OpenSet& O, const GSParams& p, const Vec& x,
                            const FlatCalibration& cal) {
  if (!O.contains(x)) throw InvalidInputError("point lies outside the open set");
  FlatBound b;
  b.lhs = std::abs(f(x));
  double d = O.distance_to_complement(x);
  b.rhs = cal.C * cal.norm * std::exp(-cal.A_prime * std::pow(d, -1.0 / (p.beta - 1)));
  b.ok = b.lhs <= b.rhs * (1 + 1e-12);
  return b;
}

GevreyCheck gevrey_infimum_check(double alpha, double xi, int m_max) {
  if (!(alpha > 0) || !(xi > 0)) throw InvalidInputError("alpha and xi must be positive");
  GevreyCheck g;
  g.log_lhs = kInf;
  for (int m = 0; m <= m_max; ++m) {
    double v = -m * std::log(xi) + xlogx_pow(m, alpha);
    if (v < g.log_lhs) {
      g.log_lhs = v;
      g.argmin = m;
    }
  }
  g.log_rhs = -(alpha / kE) * std::pow(xi, 1.0 / alpha) + alpha * kE / 2;
  g.ok = g.log_lhs <= g.log_rhs;
  return g;
}

}  // namespace eclab
