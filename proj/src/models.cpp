#include "eclab/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eclab/errors.hpp"

namespace eclab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

std::vector<Vec> subcone_directions(int d, double rho, int directions) {
  std::vector<Vec> dirs;
  if (d == 2) {
    for (int i = 0; i < directions; ++i) {
      double v = directions == 1 ? 0.0 : -rho + 2.0 * rho * i / (directions - 1);
      dirs.push_back(Vec{{-1.0, v}});
    }
    return dirs;
  }
  Vec base = Vec::Zero(d);
  base(0) = -1.0;
  dirs.push_back(base);
  for (int k = 1; k < d; ++k)
    for (double s : {-1.0, 1.0}) {
      Vec v = base;
      v(k) = s * rho;
      dirs.push_back(v);
    }
  for (int mask = 0; mask < (1 << (d - 1)); ++mask) {
    Vec v = base;
    for (int k = 1; k < d; ++k) v(k) = ((mask >> (k - 1)) & 1 ? 1.0 : -1.0) * rho / std::sqrt(d - 1.0);
    dirs.push_back(v);
  }
  return dirs;
}

}  // namespace

Complex lorentz_square(const CVec& z) {
  if (z.size() < 1) throw DimensionError("empty vector");
  Complex s = z(0) * z(0);
  for (Eigen::Index k = 1; k < z.size(); ++k) s -= z(k) * z(k);
  return s;
}

bool in_backward_tube(const CVec& z, double margin) {
  Vec eta = z.imag();
  double spatial = eta.size() > 1 ? eta.tail(eta.size() - 1).norm() : 0.0;
  return eta(0) < -spatial - margin;
}

TwoPointModel TwoPointModel::massless(int d, double c) {
  if (d < 2 || d > 4) throw UnsupportedError("models are provided for 2 <= d <= 4");
  if (!(c > 0)) throw InvalidInputError("c must be positive");
  TwoPointModel w;
  w.kind_ = Kind::Massless;
  w.name_ = "massless" + std::to_string(d);
  w.d_ = d;
  w.c_ = c;
  return w;
}

TwoPointModel TwoPointModel::dipole(int d, double c, double mu) {
  if (d < 2 || d > 4) throw UnsupportedError("models are provided for 2 <= d <= 4");
  if (!(c > 0) || !(mu > 0)) throw InvalidInputError("c and mu must be positive");
  TwoPointModel w;
  w.kind_ = Kind::Dipole;
  w.name_ = "dipole" + std::to_string(d);
  w.d_ = d;
  w.c_ = c;
  w.mu_ = mu;
  return w;
}

std::vector<std::string> TwoPointModel::registry() { return {"massless2", "dipole2", "dipole4"}; }

TwoPointModel TwoPointModel::from_registry(const std::string& name) {
  if (name == "massless2") return massless(2).certify();
  if (name == "dipole2") return dipole(2).certify();
  if (name == "dipole4") return dipole(4).certify();
  throw InvalidInputError("unknown two-point model '" + name + "'");
}

Complex TwoPointModel::operator()(const CVec& zeta) const {
  if (zeta.size() != d_) throw DimensionError("two-point argument has the wrong dimension");
  Complex mz2 = -lorentz_square(zeta);
  if (kind_ == Kind::Massless) return c_ / mz2;
  return -c_ * std::log(mz2 / (mu_ * mu_));
}

double TwoPointModel::w_IR(double r) const { return kind_ == Kind::Massless ? 0.0 : std::log1p(r); }

double TwoPointModel::w_UV(double t) const {
  if (!(t > 0)) return std::numeric_limits<double>::infinity();
  return kind_ == Kind::Massless ? 1.0 / (t * t) : std::log1p(1.0 / t);
}

TwoPointModel& TwoPointModel::certify(const Certification& grid) {
  if (!(grid.rho >= 0 && grid.rho < 1)) throw InvalidInputError("subcone aperture must lie in [0, 1)");
  grid_ = grid;
  const int xp = d_ == 2 ? grid.x_points : std::max(5, grid.x_points / 3 | 1);
  std::vector<double> xs(xp);
  for (int i = 0; i < xp; ++i) xs[i] = xp == 1 ? 0.0 : -grid.x_max + 2.0 * grid.x_max * i / (xp - 1);
  std::vector<double> ts(grid.t_points);
  for (int i = 0; i < grid.t_points; ++i)
    ts[i] = grid.t_min * std::pow(grid.t_max / grid.t_min, grid.t_points == 1 ? 0.0 : double(i) / (grid.t_points - 1));
  const auto dirs = subcone_directions(d_, grid.rho, grid.directions);

  double worst = 0.0;
  std::vector<int> idx(d_, 0);
  auto probe = [&](const Vec& x, const Vec& eta) {
    CVec z = x.cast<Complex>() + kI * eta.cast<Complex>();
    double bound = 1.0 + w_IR(2.0 * norm(z)) + w_UV(norm(eta));
    worst = std::max(worst, std::abs((*this)(z)) / bound);
  };
  for (const Vec& u : dirs)
    for (double t : ts) {
      Vec eta = t * u;
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        Vec xi(d_);
        for (int k = 0; k < d_; ++k) xi(k) = xs[idx[k]];
        probe(xi, eta);      // absolute grid
        probe(t * xi / grid.x_max * 4.0, eta);  // grid on the scale of Im ζ
        int pos = 0;
        while (pos < d_ && ++idx[pos] == xp) idx[pos++] = 0;
        if (pos == d_) break;
      }
    }
  C_ = worst;
  return *this;
}

bool TwoPointModel::in_subcone(const CVec& zeta) const {
  Vec eta = zeta.imag();
  double spatial = eta.size() > 1 ? eta.tail(eta.size() - 1).norm() : 0.0;
  return eta(0) < 0 && spatial <= grid_.rho * (-eta(0)) * (1.0 + 1e-12);
}

double TwoPointModel::majorant(const Vec& x, const Vec& y) const {
  if (!certified()) throw InvalidInputError("model is not certified");
  double b = 1.0 + w_IR(2.0 * norm(x) + 2.0 * norm(y)) + w_UV(2.0 * norm(y));
  return C_ * b * b;
}

double cauchy_riemann_residual(const TwoPointModel& w, const CVec& zeta, double h) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < zeta.size(); ++k) {
    CVec e = CVec::Zero(zeta.size());
    e(k) = h;
    Complex d_re = (w(zeta + e) - w(zeta - e)) / (2.0 * h);
    Complex d_im = (w(zeta + kI * e) - w(zeta - kI * e)) / (2.0 * h);
    double scale = std::max(std::abs(d_re), 1e-300);
    worst = std::max(worst, std::abs(d_im - kI * d_re) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------

WickSeries::WickSeries(int n, CoefficientSequence d, int N) : n_(n), N_(N), d_(std::move(d)) {
  if (n < 1) throw InvalidInputError("n must be at least 1");
  if (N < 0) throw InvalidInputError("truncation must be nonnegative");
  K_ = enumerate_K(n, N);
  D_.reserve(K_.size());
  level_end_.assign(N + 1, 0);
  for (std::size_t i = 0; i < K_.size(); ++i) {
    D_.push_back(coefficient_D_K(K_[i], d_).value);
    level_end_[K_[i].total()] = i + 1;
  }
  for (int s = 1; s <= N; ++s) level_end_[s] = std::max(level_end_[s], level_end_[s - 1]);
}

std::vector<Complex> WickSeries::pair_values(const std::vector<CVec>& zeta, const TwoPointModel& w) const {
  if (static_cast<int>(zeta.size()) != n_ - 1) throw DimensionError("expected n - 1 difference variables");
  std::vector<Complex> out(MultiIndexK::slot_count(n_));
  for (int j = 0; j < n_; ++j)
    for (int m = j + 1; m < n_; ++m) {
      CVec s = CVec::Zero(w.dim());
      for (int t = j; t < m; ++t) s += zeta[t];
      out[MultiIndexK::slot(n_, j, m)] = w(s);
    }
  return out;
}

Complex WickSeries::sum(const std::vector<Complex>& pairs, const std::vector<std::size_t>* order) const {
  const int P = static_cast<int>(pairs.size());
  std::vector<std::vector<Complex>> pw(P, std::vector<Complex>(N_ + 1, 1.0));
  for (int s = 0; s < P; ++s)
    for (int k = 1; k <= N_; ++k) pw[s][k] = pw[s][k - 1] * pairs[s];
  Complex total = 0.0;
  const std::size_t count = order ? order->size() : K_.size();
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t i = order ? (*order)[t] : t;
    Complex term = D_[i];
    const auto& k = K_[i].entries();
    for (int s = 0; s < P; ++s) term *= pw[s][k[s]];
    total += term;
  }
  return total;
}

Complex WickSeries::sum_to(const std::vector<Complex>& pairs, int M) const {
  if (M < 0 || M > N_) throw InvalidInputError("partial order outside the table");
  std::vector<std::size_t> order(level_end_[M]);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return sum(pairs, &order);
}

TailConstants tail_constants(int n, const CoefficientSequence& d, const TwoPointModel& w, double lambda) {
  if (!w.certified()) throw InvalidInputError("model is not certified");
  if (!(lambda > 0)) throw HypothesisViolated("lambda must be positive");
  auto cc = check_coefficient_condition(d, 64);
  if (!cc.ok) throw HypothesisViolated("coefficient condition fails for " + d.describe());
  TailConstants tc;
  tc.A = cc.A;
  tc.h = cc.h;
  tc.A_prime = std::pow(cc.A, std::max(n - 1, 0));
  tc.h_prime = 4.0 * n * (2.0 * n - 1.0) * cc.h * cc.h;
  tc.C = w.C();
  tc.lambda = lambda;
  return tc;
}

double wightman_log_tail(int n, const std::vector<CVec>& zeta, const TwoPointModel& w, const CoefficientSequence& d,
                         int N, const TailConstants& tc) {
  if (n < 2) return kNegInf;
  const int P = MultiIndexK::slot_count(n);
  double zmax = 0.0;
  for (const auto& z : zeta) zmax = std::max(zmax, norm(z));
  std::vector<double> X{1.0, w.w_IR(2.0 * n * zmax)};
  for (const auto& z : zeta) X.push_back(w.w_UV(tc.lambda * norm(Vec(z.imag()))));

  auto log_count = [&](int s) { return std::lgamma(s + P) - std::lgamma(s + 1.0) - std::lgamma(double(P)); };
  const double base = std::log(tc.h_prime * (n + 1.0) * tc.C);
  const auto trend = d.ratio_trend();

  double total = kNegInf;
  for (double x : X) {
    if (x == 0.0) continue;
    if (!std::isfinite(x)) throw TruncationInsufficient("envelope is infinite at the requested point");
    const double lx = base + std::log(x);
    auto log_term = [&](int s) {
      double ld = d.log_abs(2 * s);
      if (ld == kNegInf) return kNegInf;
      return log_count(s) + std::log(tc.A_prime) + s * lx + std::lgamma(s + 1.0) + ld;
    };
    double acc = kNegInf;
    if (trend == CoefficientSequence::RatioTrend::Finite) {
      for (int s = N + 1; 2 * s <= d.support_end(); ++s) acc = log_add(acc, log_term(s));
      total = log_add(total, acc);
      continue;
    }
    bool done = false;
    for (int s = N + 1; s < N + 200000; ++s) {
      double lt = log_term(s), lt1 = log_term(s + 1), lt2 = log_term(s + 2);
      acc = log_add(acc, lt);
      if (trend == CoefficientSequence::RatioTrend::Nondecreasing) {
        if (lt1 >= lt) throw TruncationInsufficient("tail series diverges at the requested point");
        continue;
      }
      double r1 = std::exp(lt2 - lt1);
      if (r1 < 1.0) {
        double rem = lt1 - std::log1p(-r1);
        if (rem < acc + std::log(1e-17)) {
          acc = log_add(acc, rem);
          done = true;
          break;
        }
      }
    }
    if (!done) throw TruncationInsufficient("tail series did not settle");
    total = log_add(total, acc);
  }
  return total;
}

WightmanResult wightman_eval(const WickSeries& series, const std::vector<CVec>& zeta, const TwoPointModel& w,
                             const TailConstants& tc) {
  const int n = series.n();
  if (static_cast<int>(zeta.size()) != n - 1) throw DimensionError("expected n - 1 difference variables");
  for (const auto& z : zeta) {
    if (z.size() != w.dim()) throw DimensionError("difference variable has the wrong dimension");
    if (!in_backward_tube(z)) throw TubeViolation("difference variable outside the backward tube");
    if (!w.in_subcone(z)) throw InvalidInputError("difference variable outside the certified subcone");
  }
  WightmanResult res;
  res.N = series.truncation();
  res.terms = series.indices().size();
  res.constants = tc;
  res.value = series.sum(series.pair_values(zeta, w));
  res.log_tail = wightman_log_tail(n, zeta, w, series.coefficients(), series.truncation(), tc);
  res.tail = std::exp(res.log_tail);
  return res;
}

WightmanResult wightman_eval(int n, const std::vector<CVec>& zeta, const TwoPointModel& w,
                             const CoefficientSequence& d, int N) {
  WickSeries series(n, d, N);
  return wightman_eval(series, zeta, w, tail_constants(n, d, w));
}

Complex exponential_closed_form(const std::vector<CVec>& zeta, const TwoPointModel& w, double g) {
  const int n = static_cast<int>(zeta.size()) + 1;
  Complex acc = 0.0;
  for (int j = 0; j < n; ++j)
    for (int m = j + 1; m < n; ++m) {
      CVec s = CVec::Zero(w.dim());
      for (int t = j; t < m; ++t) s += zeta[t];
      acc += w(s);
    }
  return std::exp(g * g * acc);
}

}  // namespace eclab
