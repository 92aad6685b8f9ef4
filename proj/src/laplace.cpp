#include "eclab/laplace.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eclab/errors.hpp"

namespace eclab {

namespace {

// Simplicial pieces (generator matrices, columns = rays) covering a
// full-dimensional convex cone up to null sets.
std::vector<Mat> simplicial_pieces(const PolyCone& c) {
  const int k = c.dim();
  const int ell = c.lineality_dim();
  const auto& gens = c.generators();
  const int ne = static_cast<int>(gens.size()) - 2 * ell;
  std::vector<Vec> E(gens.begin(), gens.begin() + ne), L;
  for (int j = 0; j < ell; ++j) L.push_back(gens[ne + 2 * j]);
  if (ne + ell < k) throw UnsupportedError("density carrier must be full-dimensional");

  std::vector<std::vector<Vec>> pointed;
  if (ne == k - ell) {
    pointed.push_back(E);
  } else if (ell == 0 && k == 3) {
    // Fan triangulation around the mean ray.
    Vec c0 = Vec::Zero(3);
    for (const auto& e : E) c0 += e;
    c0.normalize();
    Vec a = std::abs(c0(0)) < 0.9 ? Vec::Unit(3, 0) : Vec::Unit(3, 1);
    Vec e1 = (a - a.dot(c0) * c0).normalized();
    Eigen::Vector3d c3 = c0, e13 = e1;
    Vec e2 = c3.cross(e13);
    std::sort(E.begin(), E.end(), [&](const Vec& u, const Vec& v) {
      return std::atan2(u.dot(e2), u.dot(e1)) < std::atan2(v.dot(e2), v.dot(e1));
    });
    for (int i = 1; i + 1 < ne; ++i) pointed.push_back({E[0], E[i], E[i + 1]});
  } else {
    throw UnsupportedError("density carrier is not simplicial and not a 3-D pointed cone");
  }

  std::vector<Mat> out;
  for (const auto& P : pointed)
    for (int signs = 0; signs < (1 << ell); ++signs) {
      Mat G(k, k);
      int col = 0;
      for (const auto& e : P) G.col(col++) = e;
      for (int j = 0; j < ell; ++j) G.col(col++) = (signs >> j & 1) ? Vec(-L[j]) : L[j];
      out.push_back(G);
    }
  return out;
}

Complex density_integral(const Cone& carrier, const std::function<Complex(const Vec&)>& g, const quad::Options& opt) {
  Complex total = 0.0;
  for (const auto& G : simplicial_pieces(carrier.convex())) {
    const double jac = std::abs(G.determinant());
    std::vector<quad::Axis> axes(G.cols(), quad::Axis::positive_half());
    auto h = [&](const Vec& t) -> Complex { return g(G * t) * jac; };
    total += quad::integrate_nd(h, axes, opt).value;
  }
  return total;
}

// Fourth-order central difference of φ at p along v.
Complex directional_derivative(const std::function<Complex(const Vec&)>& phi, const Vec& p, const Vec& v, double h) {
  return (-phi(p + 2 * h * v) + 8.0 * phi(p + h * v) - 8.0 * phi(p - h * v) + phi(p - 2 * h * v)) / (12.0 * h);
}

Complex apply_atoms(const Functional& u, const std::function<Complex(const Vec&)>& phi, const quad::Options& opt,
                    double h) {
  Complex total = 0.0;
  for (const auto& a : u.atoms()) {
    switch (a.kind) {
      case Atom::Kind::PointMass: total += a.weight * phi(a.location); break;
      case Atom::Kind::DerivativePointMass:
        total += a.weight * directional_derivative(phi, a.location, a.direction, h);
        break;
      case Atom::Kind::Density:
        total += a.weight * density_integral(
                                u.carrier(),
                                [&](const Vec& p) -> Complex {
                                  const Complex r = a.density(p);
                                  return r == 0.0 ? Complex(0.0) : r * phi(p);  // skip φ where ρ underflows
                                },
                                opt);
        break;
    }
  }
  return total;
}

Complex apply_factors(const std::vector<Functional>& fs, std::size_t i, Vec& p, int offset,
                      const std::function<Complex(const Vec&)>& phi, const quad::Options& opt, double h) {
  const Functional& u = fs[i];
  auto inner = [&](const Vec& q) -> Complex {
    p.segment(offset, u.dim()) = q;
    if (i + 1 == fs.size()) return phi(p);
    return apply_factors(fs, i + 1, p, offset + u.dim(), phi, opt, h);
  };
  return u.apply(inner, opt, h);
}

// Diagonal blocks of a block-diagonal form; UnsupportedError otherwise.
std::vector<PairingForm> split_form(const PairingForm& form, const std::vector<Functional>& fs) {
  std::vector<PairingForm> out;
  int off = 0;
  const Mat& M = form.matrix;
  for (const auto& f : fs) {
    const int k = f.dim();
    for (int r = off; r < off + k; ++r)
      for (int c = 0; c < M.cols(); ++c)
        if ((c < off || c >= off + k) && M(r, c) != 0.0)
          throw UnsupportedError("tensor functional needs a block-diagonal pairing");
    out.emplace_back(M.block(off, off, k, k));
    off += k;
  }
  return out;
}

bool in_interior(const Cone& V, const Vec& y) {
  for (const auto& piece : V.pieces())
    if (piece.interior_margin(y) > 1e-12) return true;
  return false;
}

}  // namespace

// ----------------------------------------------------------------- Functional

Functional::Functional(int dim, Cone carrier) : dim_(dim), carrier_(std::move(carrier)) {
  if (dim <= 0) throw DimensionError("functional dimension must be positive");
  if (carrier_.dim() != dim) throw DimensionError("carrier dimension mismatch");
}

Functional Functional::point_mass(const Vec& p, const Cone& carrier, Complex weight) {
  Functional u(static_cast<int>(p.size()), carrier);
  u.add(Atom{Atom::Kind::PointMass, weight, p, {}, {}});
  return u;
}

Functional Functional::derivative_point_mass(const Vec& p, const Vec& v, const Cone& carrier, Complex weight) {
  Functional u(static_cast<int>(p.size()), carrier);
  u.add(Atom{Atom::Kind::DerivativePointMass, weight, p, v, {}});
  return u;
}

Functional Functional::density(const TestFunction& rho, const Cone& carrier, Complex weight) {
  Functional u(rho.dim(), carrier);
  u.add(Atom{Atom::Kind::Density, weight, {}, {}, rho});
  return u;
}

Functional& Functional::add(Atom a) {
  if (is_tensor()) throw UnsupportedError("cannot add atoms to a tensor product");
  switch (a.kind) {
    case Atom::Kind::PointMass:
    case Atom::Kind::DerivativePointMass:
      if (a.location.size() != dim_) throw DimensionError("atom location dimension mismatch");
      if (!carrier_.contains(a.location)) throw InvalidInputError("point mass lies outside the carrier cone");
      if (a.kind == Atom::Kind::DerivativePointMass && a.direction.size() != dim_)
        throw DimensionError("derivative direction dimension mismatch");
      break;
    case Atom::Kind::Density:
      if (a.density.dim() != dim_) throw DimensionError("density dimension mismatch");
      simplicial_pieces(carrier_.convex());  // validates the carrier shape
      break;
  }
  atoms_.push_back(std::move(a));
  return *this;
}

Functional Functional::tensor(const Functional& w) const {
  Functional r(dim_ + w.dim_, cone_algebra(carrier_, w.carrier_, ConeOp::Product));
  auto push = [&](const Functional& f) {
    if (f.is_tensor()) r.factors_.insert(r.factors_.end(), f.factors_.begin(), f.factors_.end());
    else r.factors_.push_back(f);
  };
  push(*this);
  push(w);
  return r;
}

Complex Functional::apply(const std::function<Complex(const Vec&)>& phi, const quad::Options& opt, double h) const {
  if (!is_tensor()) return apply_atoms(*this, phi, opt, h);
  Vec p = Vec::Zero(dim_);
  return apply_factors(factors_, 0, p, 0, phi, opt, h);
}

// ------------------------------------------------------------------ TubePoint

TubePoint TubePoint::make(Vec x, Vec y, Cone V) {
  if (x.size() != y.size() || V.dim() != y.size()) throw DimensionError("tube point dimension mismatch");
  if (!in_interior(V, y)) throw TubeViolation("imaginary part is not inside the tube cone");
  return TubePoint{std::move(x), std::move(y), std::move(V)};
}

CVec TubePoint::z() const {
  CVec z(x.size());
  for (int i = 0; i < x.size(); ++i) z(i) = Complex(x(i), y(i));
  return z;
}

// ------------------------------------------------------------------ transforms

Complex laplace_transform(const Functional& u, const CVec& z, const PairingForm& form, const quad::Options& opt) {
  if (z.size() != u.dim() || form.dim() != u.dim()) throw DimensionError("laplace transform dimension mismatch");
  if (u.is_tensor()) {
    auto forms = split_form(form, u.factors());
    Complex r = 1.0;
    int off = 0;
    for (std::size_t i = 0; i < u.factors().size(); ++i) {
      const auto& f = u.factors()[i];
      r *= laplace_transform(f, z.segment(off, f.dim()), forms[i], opt);
      off += f.dim();
    }
    return r;
  }
  const CVec Mz = form.matrix.cast<Complex>() * z;
  Complex total = 0.0;
  for (const auto& a : u.atoms()) {
    switch (a.kind) {
      case Atom::Kind::PointMass:
        total += a.weight * std::exp(kI * a.location.cast<Complex>().dot(Mz));
        break;
      case Atom::Kind::DerivativePointMass: {
        // ∂_v e^{i<p, z>} = i <v, z> e^{i<p, z>}
        Complex e = std::exp(kI * a.location.cast<Complex>().dot(Mz));
        total += a.weight * kI * a.direction.cast<Complex>().dot(Mz) * e;
        break;
      }
      case Atom::Kind::Density: {
        auto g = [&](const Vec& p) { return a.density(p) * std::exp(kI * p.cast<Complex>().dot(Mz)); };
        total += a.weight * density_integral(u.carrier(), g, opt);
        break;
      }
    }
  }
  if (!std::isfinite(total.real()) || !std::isfinite(total.imag()))
    throw NumericalFailure("laplace transform is not finite");
  return total;
}

// ------------------------------------------------------------- LaplaceTable

namespace {

// Gauss–Legendre nodes and weights on (0, 1) by Golub–Welsch.
void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
  Mat J = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    x[k] = 0.5 * (es.eigenvalues()(k) + 1.0);
    w[k] = es.eigenvectors()(0, k) * es.eigenvectors()(0, k);  // sums to 1 on (0, 1)
  }
}

}  // namespace

LaplaceTable::LaplaceTable(const Functional& u, const PairingForm& form, int nodes) : dim_(u.dim()) {
  if (form.dim() != u.dim()) throw DimensionError("laplace table dimension mismatch");
  if (nodes < 4) throw InvalidInputError("too few quadrature nodes");
  std::vector<double> s, ws;
  gauss_legendre01(nodes, s, ws);
  std::vector<double> wt(nodes);
  t_.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    t_[i] = s[i] / (1.0 - s[i]);
    wt[i] = ws[i] / ((1.0 - s[i]) * (1.0 - s[i]));
  }

  std::vector<Functional> fs = u.is_tensor() ? u.factors() : std::vector<Functional>{u};
  std::vector<PairingForm> forms = u.is_tensor() ? split_form(form, fs) : std::vector<PairingForm>{form};
  int off = 0;
  for (std::size_t b = 0; b < fs.size(); ++b) {
    Block blk;
    blk.offset = off;
    blk.dim = fs[b].dim();
    blk.M = forms[b].matrix;
    for (const auto& a : fs[b].atoms()) {
      if (a.kind != Atom::Kind::Density) {
        blk.points.push_back(a);
        continue;
      }
      for (const auto& G : simplicial_pieces(fs[b].carrier().convex())) {
        const int k = static_cast<int>(G.cols());
        std::size_t total = 1;
        for (int j = 0; j < k; ++j) total *= static_cast<std::size_t>(nodes);
        if (total > 20'000'000) throw UnsupportedError("laplace table too large");
        Piece pc;
        pc.MG = blk.M * G;
        pc.table.resize(total);
        const double jac = std::abs(G.determinant());
        std::vector<int> idx(k, 0);
        Vec t(k);
        for (std::size_t flat = 0; flat < total; ++flat) {
          double w = jac;
          for (int j = 0; j < k; ++j) {
            t(j) = t_[idx[j]];
            w *= wt[idx[j]];
          }
          const Vec p = G * t;
          const Complex r = a.density(p);
          pc.table[flat] = r == 0.0 ? Complex(0.0) : a.weight * r * w;
          for (int j = k - 1; j >= 0; --j) {
            if (++idx[j] < nodes) break;
            idx[j] = 0;
          }
        }
        blk.pieces.push_back(std::move(pc));
      }
    }
    off += blk.dim;
    blocks_.push_back(std::move(blk));
  }
}

Complex LaplaceTable::operator()(const CVec& z) const {
  if (z.size() != dim_) throw DimensionError("laplace table evaluated at a point of wrong dimension");
  const int N = static_cast<int>(t_.size());
  Complex result = 1.0;
  for (const auto& blk : blocks_) {
    const CVec zb = z.segment(blk.offset, blk.dim);
    const CVec Mz = blk.M.cast<Complex>() * zb;
    Complex total = 0.0;
    for (const auto& a : blk.points) {
      const Complex e = std::exp(kI * a.location.cast<Complex>().dot(Mz));
      total += a.kind == Atom::Kind::PointMass ? a.weight * e : a.weight * kI * a.direction.cast<Complex>().dot(Mz) * e;
    }
    for (const auto& pc : blk.pieces) {
      const int k = static_cast<int>(pc.MG.cols());
      // c_j = i <g_j, z>; the kernel is Π_j exp(t_j c_j).
      std::vector<std::vector<Complex>> E(k, std::vector<Complex>(N));
      for (int j = 0; j < k; ++j) {
        const Complex c = kI * pc.MG.col(j).cast<Complex>().dot(zb);
        for (int i = 0; i < N; ++i) E[j][i] = std::exp(c * t_[i]);
      }
      // Contract the last axis first.
      std::vector<Complex> cur(pc.table);
      std::size_t len = cur.size();
      for (int j = k - 1; j >= 0; --j) {
        const std::size_t outer = len / N;
        std::vector<Complex> next(outer, 0.0);
        for (std::size_t o = 0; o < outer; ++o) {
          Complex acc = 0.0;
          const Complex* row = cur.data() + o * N;
          for (int i = 0; i < N; ++i)
            if (row[i] != 0.0) acc += row[i] * E[j][i];
          next[o] = acc;
        }
        cur.swap(next);
        len = outer;
      }
      total += cur[0];
    }
    result *= total;
  }
  if (!std::isfinite(result.real()) || !std::isfinite(result.imag()))
    throw NumericalFailure("laplace transform is not finite");
  return result;
}

Complex laplace_transform(const Functional& u, const TubePoint& z, const PairingForm& form, const quad::Options& opt) {
  for (const auto& piece : u.carrier().pieces())
    for (const auto& g : piece.generators())
      for (const auto& vp : z.V.pieces())
        for (const auto& v : vp.generators())
          if (form(g, v) < -1e-9) throw InvalidInputError("functional is not carried by the dual of the tube cone");
  return laplace_transform(u, z.z(), form, opt);
}

Complex fourier_transform(const TestFunction& f, const Vec& p, const PairingForm& form, const quad::Options& opt) {
  const int k = f.dim();
  if (p.size() != k || form.dim() != k) throw DimensionError("fourier transform dimension mismatch");
  const Mat& M = form.matrix;
  const bool diagonal = (M - Mat(M.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  const Vec Mp = M * p;
  if (diagonal && k > 1) {
    if (auto fs = f.factorize()) {
      Complex r = 1.0;
      for (int j = 0; j < k; ++j)
        r *= fourier_transform((*fs)[j], Vec::Constant(1, p(j)), PairingForm(M.block(j, j, 1, 1)), opt);
      return r;
    }
  }
  std::vector<quad::Axis> axes(k, quad::Axis::line());
  for (int j : f.support().negative_coords) axes[j] = quad::Axis::negative_half();
  auto g = [&](const Vec& x) { return f(x) * std::exp(kI * Mp.dot(x)); };
  return quad::integrate_nd(g, axes, opt).value;
}

// ---------------------------------------------------------------------- a_norm

namespace {

struct BlockSample {
  CVec z;
  double log_weight;  // minus the exponential weight
  int level;          // first level containing the sample
  bool inside;        // radius-R restriction
};

std::vector<Vec> block_directions(const Cone& V, int count) {
  const PolyCone& c = V.convex();
  if (!c.is_pointed()) throw InvalidInputError("a_norm subcones must be pointed");
  std::vector<Vec> dirs;
  const auto& g = c.generators();
  if (g.empty()) throw InvalidInputError("a_norm subcone is degenerate");
  if (c.dim() == 2 && g.size() == 2 && count >= 2) {
    double a0 = std::atan2(g[0](1), g[0](0)), a1 = std::atan2(g[1](1), g[1](0));
    double span = a1 - a0;
    while (span <= -kPi) span += 2 * kPi;
    while (span > kPi) span -= 2 * kPi;
    for (int i = 0; i < count; ++i) {
      double a = a0 + span * i / (count - 1);
      dirs.push_back(Vec{{std::cos(a), std::sin(a)}});
    }
  } else {
    Vec mean = Vec::Zero(c.dim());
    for (const auto& v : g) {
      dirs.push_back(v);
      mean += v;
    }
    if (g.size() > 1) dirs.push_back(mean.normalized());
  }
  for (auto& d : dirs) d /= norm(d);  // sup-normalize: |y| = t
  return dirs;
}

}  // namespace

NormReport a_norm(const ComplexField& v, const ANormSpec& spec, double alpha, double beta, const ATruncation& t) {
  if (!(beta > 1.0)) throw InvalidInputError("the 𝒜 norm needs beta > 1");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidInputError("the 𝒜 norm needs 0 <= alpha < 1");
  if (alpha == 0.0 && !spec.R) throw InvalidInputError("alpha = 0 needs a radius R");
  if (!(spec.epsilon > 0)) throw InvalidInputError("epsilon must be positive");
  if (spec.subcones.empty()) throw InvalidInputError("no subcones given");
  if (!spec.tube_cones.empty()) {
    if (spec.tube_cones.size() != spec.subcones.size()) throw DimensionError("one tube cone per subcone");
    for (std::size_t j = 0; j < spec.subcones.size(); ++j)
      if (!compact_containment(spec.subcones[j], spec.tube_cones[j]))
        throw InvalidInputError("subcone is not compactly contained in its tube cone");
  }
  const int L = static_cast<int>(t.levels.size());
  const double eps = spec.epsilon;

  std::vector<double> tgrid;
  for (int i = 0; i < t.t_points; ++i)
    tgrid.push_back(t.y_max * std::pow(t.y_min / t.y_max, t.t_points == 1 ? 1.0 : double(i) / (t.t_points - 1)));
  auto level_of = [&](double xs, double tt) {
    for (int l = 0; l < L; ++l) {
      double s = t.levels[l];
      if (xs <= s * t.X * (1 + 1e-12) && tt >= t.y_max * std::pow(t.y_min / t.y_max, s) * (1 - 1e-12)) return l;
    }
    return L;
  };

  std::vector<std::vector<BlockSample>> blocks;
  int total_dim = 0;
  for (const auto& V : spec.subcones) {
    const int k = V.dim();
    total_dim += k;
    auto dirs = block_directions(V, t.directions);
    std::vector<BlockSample> samples;
    std::vector<int> idx(k, 0);
    while (true) {
      Vec x(k);
      for (int a = 0; a < k; ++a)
        x(a) = t.x_points == 1 ? 0.0 : -t.X + 2 * t.X * idx[a] / (t.x_points - 1);
      const double xs = norm(x);
      for (const auto& u : dirs)
        for (double tt : tgrid) {
          Vec y = tt * u;
          BlockSample s;
          s.z = x.cast<Complex>() + kI * y.cast<Complex>();
          const double zabs = norm(s.z);
          s.log_weight = -eps * std::pow(norm(y), -1.0 / (beta - 1));
          if (alpha > 0) s.log_weight -= eps * std::pow(zabs, 1.0 / alpha);
          s.inside = alpha > 0 || zabs <= *spec.R;
          s.level = level_of(xs, tt);
          if (s.inside && s.level < L) samples.push_back(std::move(s));
        }
      int a = k - 1;
      while (a >= 0 && ++idx[a] == t.x_points) idx[a--] = 0;
      if (a < 0) break;
    }
    blocks.push_back(std::move(samples));
  }

  std::vector<double> raw(L, -INFINITY);
  CVec z(total_dim);
  std::vector<std::size_t> pick(blocks.size(), 0);
  for (const auto& b : blocks)
    if (b.empty()) throw InvalidInputError("a_norm grid is empty");
  while (true) {
    int off = 0, lvl = 0;
    double lw = 0.0;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      const auto& s = blocks[j][pick[j]];
      z.segment(off, s.z.size()) = s.z;
      off += static_cast<int>(s.z.size());
      lw += s.log_weight;
      lvl = std::max(lvl, s.level);
    }
    const double la = std::log(std::abs(v(z))) + lw;
    for (int l = lvl; l < L; ++l) raw[l] = std::max(raw[l], la);
    std::size_t j = blocks.size();
    while (j > 0 && ++pick[j - 1] == blocks[j - 1].size()) pick[--j] = 0;
    if (j == 0) break;
  }
  std::vector<NormLevel> lv;
  for (int l = 0; l < L; ++l) lv.push_back({0, t.levels[l] * t.X, raw[l]});
  return make_report(lv, t.divergence_ratio);
}

// ---------------------------------------------------------- boundary values

BoundaryReport boundary_value_check(const Functional& u, const TestFunction& f, const std::vector<Vec>& ys,
                                    const PairingForm& form, double tol, const quad::Options& opt, int table_nodes) {
  const int k = u.dim();
  if (f.dim() != k || form.dim() != k) throw DimensionError("boundary check dimension mismatch");
  if (ys.empty()) throw InvalidInputError("empty y sequence");
  auto fhat = [&](const Vec& p) { return fourier_transform(f, p, form, opt); };
  BoundaryReport rep;
  rep.limit = u.apply(fhat, opt);

  std::optional<LaplaceTable> table;
  if (table_nodes > 0) table.emplace(u, form, table_nodes);
  auto Lu = [&](const CVec& z) { return table ? (*table)(z) : laplace_transform(u, z, form, opt); };

  std::vector<quad::Axis> axes(k, quad::Axis::line());
  for (int j : f.support().negative_coords) axes[j] = quad::Axis::negative_half();
  for (const auto& y : ys) {
    if (y.size() != k) throw DimensionError("y dimension mismatch");
    BoundaryStep s;
    s.y = y;
    auto g = [&](const Vec& x) {
      Complex fx = f(x);
      if (fx == 0.0) return Complex(0.0);
      CVec z = x.cast<Complex>() + kI * y.cast<Complex>();
      return Lu(z) * fx;
    };
    s.lhs = quad::integrate_nd(g, axes, opt).value;
    s.identity_rhs = u.apply([&](const Vec& p) { return std::exp(-form(p, y)) * fhat(p); }, opt);
    s.gap_identity = std::abs(s.lhs - s.identity_rhs);
    s.gap_limit = std::abs(s.lhs - rep.limit);
    rep.max_gap_identity = std::max(rep.max_gap_identity, s.gap_identity);
    rep.steps.push_back(std::move(s));
  }
  rep.final_gap_limit = rep.steps.back().gap_limit;
  rep.monotone_tail = true;
  for (std::size_t i = rep.steps.size() / 2; i + 1 < rep.steps.size(); ++i)
    if (rep.steps[i + 1].gap_limit > rep.steps[i].gap_limit + 1e-9) rep.monotone_tail = false;
  rep.converged = rep.final_gap_limit < tol;
  return rep;
}

std::string BoundaryReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"limit\":[" << limit.real() << "," << limit.imag() << "],\"max_gap_identity\":" << max_gap_identity
     << ",\"final_gap_limit\":" << final_gap_limit << ",\"monotone_tail\":" << (monotone_tail ? "true" : "false")
     << ",\"converged\":" << (converged ? "true" : "false") << ",\"steps\":[";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) os << ",";
    os << "{\"y\":[";
    for (int j = 0; j < steps[i].y.size(); ++j) os << (j ? "," : "") << steps[i].y(j);
    os << "],\"gap_identity\":" << steps[i].gap_identity << ",\"gap_limit\":" << steps[i].gap_limit << "}";
  }
  os << "]}";
  return os.str();
}

// ------------------------------------------------------------ check transform

CVec iota(const Vec& x, int d) {
  if (d <= 0 || x.size() % d != 0) throw DimensionError("iota: length is not a multiple of d");
  CVec z = x.cast<Complex>();
  for (int j = 0; j < x.size(); j += d) z(j) *= kI;
  return z;
}

Complex check_transform(const std::function<Complex(const Vec&)>& f, int d, int n, const Vec& p, SpatialSign s,
                        const quad::Options& opt) {
  if (d <= 0 || n <= 0 || p.size() != d * n) throw DimensionError("check transform dimension mismatch");
  for (int j = 0; j < n; ++j)
    if (!(p(j * d) > 0)) throw InvalidInputError("check transform needs positive time components of p");
  std::vector<quad::Axis> axes(d * n, quad::Axis::line());
  for (int j = 0; j < n; ++j) axes[j * d] = quad::Axis::negative_half();
  const double sgn = static_cast<double>(static_cast<int>(s));
  auto g = [&](const Vec& xi) {
    double re = 0.0, im = 0.0;
    for (int j = 0; j < n; ++j) {
      re += p(j * d) * xi(j * d);
      for (int a = 1; a < d; ++a) im += p(j * d + a) * xi(j * d + a);
    }
    return f(xi) * std::exp(Complex(re, sgn * im));
  };
  return quad::integrate_nd(g, axes, opt).value * std::pow(2 * kPi, -d * n);
}

Complex check_transform(const TestFunction& f, int d, int n, const Vec& p, SpatialSign s, const quad::Options& opt) {
  if (f.dim() != d * n) throw DimensionError("check transform dimension mismatch");
  auto neg = f.support().negative_coords;
  for (int j = 0; j < n; ++j)
    if (!f.is_zero() && std::find(neg.begin(), neg.end(), j * d) == neg.end())
      throw InvalidInputError("test function is not supported in negative times");
  if (p.size() != d * n) throw DimensionError("check transform dimension mismatch");
  for (int j = 0; j < n; ++j)
    if (!(p(j * d) > 0)) throw InvalidInputError("check transform needs positive time components of p");
  if (auto parts = f.separate()) {
    // Sum of products of one-variable transforms.
    const double sgn = static_cast<double>(static_cast<int>(s));
    Complex total = 0.0;
    for (const auto& fs : *parts) {
      Complex prod = 1.0;
      for (int c = 0; c < d * n && prod != 0.0; ++c) {
        const TestFunction& g = fs[c];
        const double pc = p(c);
        Vec x1(1);
        if (c % d == 0) {
          prod *= quad::integrate_negative_axis(
                      [&](double x) {
                        x1(0) = x;
                        return g(x1) * std::exp(pc * x);
                      },
                      opt)
                      .value;
        } else {
          prod *= quad::integrate(
                      [&](double x) {
                        x1(0) = x;
                        return g(x1) * std::exp(Complex(0.0, sgn * pc * x));
                      },
                      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), opt)
                      .value;
        }
      }
      total += prod;
    }
    return total * std::pow(2 * kPi, -d * n);
  }
  return check_transform([&](const Vec& xi) { return f(xi); }, d, n, p, s, opt);
}

}  // namespace eclab
