#include "eclab/cone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "eclab/errors.hpp"
#include "eclab/lp.hpp"

namespace eclab {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kFeasTol = 1e-9;

void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw MalformedConeError(std::string(what) + " has non-finite entries");
}

// Orthonormal basis of {x : A x = 0}, one vector per column. A is m x k.
Mat null_space(const Mat& A, int k) {
  if (A.rows() == 0) return Mat::Identity(k, k);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > kRankTol * std::max(1.0, smax)) ++rank;
  return svd.matrixV().rightCols(k - rank);
}

bool same_direction(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff() < 1e-8; }

void push_unique(std::vector<Vec>& out, const Vec& v) {
  for (const auto& w : out)
    if (same_direction(w, v)) return;
  out.push_back(v);
}

std::vector<Vec> normalized(int k, const std::vector<Vec>& in, const char* what) {
  std::vector<Vec> out;
  for (const auto& v : in) {
    if (v.size() != k) throw DimensionError(std::string(what) + " vector has wrong dimension");
    check_finite(v, what);
    double n = v.norm();
    if (n == 0.0) throw MalformedConeError(std::string(what) + " contains a zero vector");
    out.push_back(v / n);
  }
  return out;
}

struct RayResult {
  std::vector<Vec> rays;  // extreme rays of the pointed part, then +/- lineality basis
  int lineality = 0;
};

// Generators of {x : <n_i, x> >= 0}. Brute-force double description: every
// extreme ray of the pointed part is cut out by k-1-dim(L) linearly
// independent active constraints together with orthogonality to the
// lineality space L. Fine for the handful of constraints used here.
RayResult extreme_rays(const std::vector<Vec>& normals, int k) {
  Mat N(static_cast<int>(normals.size()), k);
  for (std::size_t i = 0; i < normals.size(); ++i) N.row(static_cast<int>(i)) = normals[i].transpose();
  Mat L = null_space(N, k);
  const int ell = static_cast<int>(L.cols());
  RayResult res;
  res.lineality = ell;
  const int m = static_cast<int>(normals.size());
  const int s = k - 1 - ell;
  auto feasible = [&](const Vec& r) {
    for (int i = 0; i < m; ++i)
      if (normals[i].dot(r) < -kFeasTol) return false;
    return true;
  };
  if (s >= 0 && s <= m) {
    std::vector<int> idx(s);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      Mat B(s + ell, k);
      for (int i = 0; i < s; ++i) B.row(i) = normals[idx[i]].transpose();
      if (ell > 0) B.bottomRows(ell) = L.transpose();
      Mat ns = null_space(B, k);
      if (ns.cols() == 1) {
        Vec r = ns.col(0).normalized();
        if (feasible(r)) push_unique(res.rays, r);
        else if (feasible(-r)) push_unique(res.rays, Vec(-r));
      }
      int i = s - 1;
      while (i >= 0 && idx[i] == m - s + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  for (int j = 0; j < ell; ++j) {
    res.rays.push_back(L.col(j));
    res.rays.push_back(-L.col(j));
  }
  return res;
}

}  // namespace

// ---------------------------------------------------------------- PairingForm

PairingForm::PairingForm(Mat m) : matrix(std::move(m)) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw DimensionError("pairing matrix must be square and nonempty");
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidInputError("pairing matrix must be symmetric");
  if (std::abs(matrix.determinant()) < 1e-12) throw InvalidInputError("pairing matrix is degenerate");
}

PairingForm PairingForm::euclidean(int k) { return PairingForm(Mat::Identity(k, k)); }

PairingForm PairingForm::lorentz(int d) {
  Mat m = -Mat::Identity(d, d);
  m(0, 0) = 1.0;
  return PairingForm(m);
}

PairingForm PairingForm::reconstruction(int d, int n) {
  Mat m = Mat::Zero(d * n, d * n);
  for (int j = 0; j < n; ++j) {
    m(j * d, j * d) = -1.0;
    for (int a = 1; a < d; ++a) m(j * d + a, j * d + a) = 1.0;
  }
  return PairingForm(m);
}

Complex PairingForm::operator()(const Vec& p, const CVec& z) const {
  Vec mp = matrix * p;
  return mp.cast<Complex>().dot(z);  // dot conjugates its first argument, which is real
}

// ------------------------------------------------------------------- PolyCone

PolyCone PolyCone::from_generators(int dim, const std::vector<Vec>& generators) {
  if (dim <= 0) throw DimensionError("cone dimension must be positive");
  auto g = normalized(dim, generators, "generator");
  auto dual = extreme_rays(g, dim);
  auto prim = extreme_rays(dual.rays, dim);
  return PolyCone(dim, std::move(prim.rays), std::move(dual.rays), prim.lineality);
}

PolyCone PolyCone::from_halfspaces(int dim, const std::vector<Vec>& normals) {
  if (dim <= 0) throw DimensionError("cone dimension must be positive");
  auto n = normalized(dim, normals, "half-space normal");
  auto prim = extreme_rays(n, dim);
  auto dual = extreme_rays(prim.rays, dim);
  return PolyCone(dim, std::move(prim.rays), std::move(dual.rays), prim.lineality);
}

PolyCone PolyCone::origin(int dim) { return from_generators(dim, {}); }
PolyCone PolyCone::full(int dim) { return from_halfspaces(dim, {}); }

Mat PolyCone::generator_matrix() const {
  Mat G(dim_, static_cast<int>(generators_.size()));
  for (std::size_t j = 0; j < generators_.size(); ++j) G.col(static_cast<int>(j)) = generators_[j];
  return G;
}

bool PolyCone::contains(const Vec& p, double tol) const {
  if (p.size() != dim_) throw DimensionError("point dimension does not match cone");
  double scale = std::max(1.0, norm(p, Norm::Euclidean));
  for (const auto& n : normals_)
    if (n.dot(p) < -tol * scale) return false;
  return true;
}

double PolyCone::distance(const Vec& p, Norm nrm) const {
  if (p.size() != dim_) throw DimensionError("point dimension does not match cone");
  if (!p.allFinite()) throw InvalidInputError("point has non-finite entries");
  if (contains(p, 1e-13)) return 0.0;
  if (generators_.empty()) return norm(p, nrm);
  const Mat G = generator_matrix();
  const int m = static_cast<int>(G.cols());
  if (nrm == Norm::Euclidean) return (G * lp::nnls(G, p) - p).norm();
  // min t  s.t.  -t <= p - G lam <= t,  lam, t >= 0
  Mat A = Mat::Zero(2 * dim_, m + 1);
  A.topLeftCorner(dim_, m) = -G;
  A.bottomLeftCorner(dim_, m) = G;
  A.col(m).setConstant(-1.0);
  Vec b(2 * dim_);
  b << -p, p;
  Vec c = Vec::Zero(m + 1);
  c(m) = -1.0;
  auto sol = lp::maximize(A, b, c);
  if (sol.status != lp::Status::Optimal) throw NumericalFailure("cone distance LP did not reach optimum");
  return std::max(0.0, -sol.objective);
}

double PolyCone::interior_margin(const Vec& u) const {
  if (u.size() != dim_) throw DimensionError("direction dimension does not match cone");
  if (normals_.empty()) return std::numeric_limits<double>::infinity();
  Vec v = u.normalized();
  double m = std::numeric_limits<double>::infinity();
  for (const auto& n : normals_) m = std::min(m, n.dot(v));
  return m;
}

Vec PolyCone::project(const Vec& p) const {
  if (generators_.empty()) return Vec::Zero(dim_);
  Mat G = generator_matrix();
  return G * lp::nnls(G, p);
}

PolyCone PolyCone::product(const PolyCone& other) const {
  const int k = dim_ + other.dim_;
  std::vector<Vec> gens;
  for (const auto& g : generators_) {
    Vec v = Vec::Zero(k);
    v.head(dim_) = g;
    gens.push_back(v);
  }
  for (const auto& g : other.generators_) {
    Vec v = Vec::Zero(k);
    v.tail(other.dim_) = g;
    gens.push_back(v);
  }
  return from_generators(k, gens);
}

PolyCone PolyCone::intersect(const PolyCone& other) const {
  if (other.dim_ != dim_) throw DimensionError("intersection of cones of different dimension");
  std::vector<Vec> n = normals_;
  n.insert(n.end(), other.normals_.begin(), other.normals_.end());
  return from_halfspaces(dim_, n);
}

// ----------------------------------------------------------------------- Cone

Cone::Cone(PolyCone piece) : dim_(piece.dim()) { pieces_.push_back(std::move(piece)); }

Cone Cone::union_of(std::vector<PolyCone> pieces) {
  if (pieces.empty()) throw MalformedConeError("empty union of cones");
  int k = pieces.front().dim();
  for (const auto& p : pieces)
    if (p.dim() != k) throw DimensionError("union of cones of different dimension");
  return Cone(k, std::move(pieces));
}

Cone Cone::from_generators(int dim, const std::vector<Vec>& g) { return PolyCone::from_generators(dim, g); }
Cone Cone::from_halfspaces(int dim, const std::vector<Vec>& n) { return PolyCone::from_halfspaces(dim, n); }
Cone Cone::origin(int dim) { return PolyCone::origin(dim); }
Cone Cone::full(int dim) { return PolyCone::full(dim); }

Cone Cone::nonnegative_orthant(int dim) {
  std::vector<Vec> g;
  for (int j = 0; j < dim; ++j) g.push_back(Vec::Unit(dim, j));
  return from_generators(dim, g);
}

Cone Cone::light_cone(int d, bool forward, int polygon_n) {
  const double t = forward ? 1.0 : -1.0;
  std::vector<Vec> g;
  if (d == 1) {
    g.push_back(Vec::Constant(1, t));
  } else if (d == 2) {
    g.push_back(Vec{{t, 1.0}});
    g.push_back(Vec{{t, -1.0}});
  } else if (d == 3) {
    if (polygon_n < 3) throw InvalidInputError("light-cone polygon needs at least 3 vertices");
    for (int j = 0; j < polygon_n; ++j) {
      double a = 2.0 * kPi * j / polygon_n;
      g.push_back(Vec{{t, std::cos(a), std::sin(a)}});
    }
  } else if (d == 4) {
    if (polygon_n < 4) throw InvalidInputError("light-cone sphere sampling needs at least 4 rays");
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < polygon_n; ++j) {
      double z = 1.0 - 2.0 * (j + 0.5) / polygon_n;
      double r = std::sqrt(1.0 - z * z);
      double a = golden * j;
      g.push_back(Vec{{t, r * std::cos(a), r * std::sin(a), z}});
    }
  } else {
    throw UnsupportedError("light cones are provided for d <= 4");
  }
  Cone c = from_generators(d, g);
  c.set_open_projection(true);
  return c;
}

const PolyCone& Cone::convex() const {
  if (pieces_.size() != 1) throw UnsupportedError("operation requires a convex cone, got a union");
  return pieces_.front();
}

bool Cone::is_degenerate() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const PolyCone& p) { return p.is_degenerate(); });
}

bool Cone::contains(const Vec& p, double tol) const {
  return std::any_of(pieces_.begin(), pieces_.end(), [&](const PolyCone& c) { return c.contains(p, tol); });
}

double Cone::distance(const Vec& p, Norm norm) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : pieces_) best = std::min(best, c.distance(p, norm));
  return best;
}

std::string Cone::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (i) os << " | ";
    os << "cone{dim=" << dim_ << ", gens=[";
    const auto& g = pieces_[i].generators();
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (j) os << ",";
      os << "[";
      for (int a = 0; a < g[j].size(); ++a) os << (a ? "," : "") << g[j](a);
      os << "]";
    }
    os << "]}";
  }
  return os.str();
}

// ----------------------------------------------------------------- operations

double distance_to_cone(const Vec& p, const Cone& U, Norm norm) {
  if (p.size() != U.dim()) throw DimensionError("point dimension does not match cone");
  return U.distance(p, norm);
}

Cone dual_cone(const Cone& V, const PairingForm& form) {
  if (form.dim() != V.dim()) throw DimensionError("pairing form dimension does not match cone");
  std::vector<Vec> normals;
  for (const auto& piece : V.pieces())
    for (const auto& g : piece.generators()) normals.push_back(form.matrix * g);
  return Cone::from_halfspaces(V.dim(), normals);
}

bool compact_containment(const Cone& U, const Cone& V, double margin, int samples, std::uint64_t seed) {
  if (U.dim() != V.dim()) throw DimensionError("containment test on cones of different dimension");
  if (U.is_degenerate()) return true;
  // For a union a direction on a shared seam is still interior; probe a small
  // neighbourhood when no single piece holds u with margin.
  auto inside = [&](const Vec& u0) {
    Vec u = u0.normalized();
    for (const auto& c : V.pieces())
      if (c.interior_margin(u) > margin) return true;
    if (V.is_convex() || !V.contains(u, 0.0)) return false;
    const int k = V.dim();
    const double r = 1e-6;
    for (int mask = 0; mask < (1 << k); ++mask) {
      Vec w(k);
      for (int j = 0; j < k; ++j) w(j) = (mask >> j) & 1 ? 1.0 : -1.0;
      if (!V.contains(Vec(u + r * w / std::sqrt(double(k))), 0.0)) return false;
    }
    for (int j = 0; j < k; ++j)
      for (double sgn : {-1.0, 1.0})
        if (!V.contains(Vec(u + sgn * r * Vec::Unit(k, j)), 0.0)) return false;
    return true;
  };
  for (const auto& piece : U.pieces())
    for (const auto& g : piece.generators())
      if (!inside(g)) return false;
  if (V.is_convex()) return true;  // convexity of V carries generators to the hull
  // A union V is not convex: sample the projection of each piece of U.
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  for (const auto& piece : U.pieces()) {
    const auto& g = piece.generators();
    if (g.empty()) continue;
    for (int s = 0; s < samples; ++s) {
      Vec u = Vec::Zero(U.dim());
      for (const auto& gj : g) u += expo(rng) * gj;
      if (u.norm() < 1e-12) continue;
      if (!inside(u)) return false;
    }
  }
  return true;
}

Cone cone_algebra(const Cone& a, const Cone& b, ConeOp op) {
  switch (op) {
    case ConeOp::Union: {
      if (a.dim() != b.dim()) throw DimensionError("union of cones of different dimension");
      std::vector<PolyCone> p = a.pieces();
      p.insert(p.end(), b.pieces().begin(), b.pieces().end());
      Cone c = Cone::union_of(std::move(p));
      c.set_open_projection(a.is_open_projection() && b.is_open_projection());
      return c;
    }
    case ConeOp::Intersection: {
      if (a.dim() != b.dim()) throw DimensionError("intersection of cones of different dimension");
      std::vector<PolyCone> p;
      for (const auto& x : a.pieces())
        for (const auto& y : b.pieces()) p.push_back(x.intersect(y));
      return Cone::union_of(std::move(p));
    }
    case ConeOp::Product: {
      std::vector<PolyCone> p;
      for (const auto& x : a.pieces())
        for (const auto& y : b.pieces()) p.push_back(x.product(y));
      Cone c = Cone::union_of(std::move(p));
      c.set_open_projection(a.is_open_projection() && b.is_open_projection());
      return c;
    }
  }
  throw InvalidInputError("unknown cone operation");
}

// -------------------------------------------------------------------- parsing

namespace {

class ConeParser {
 public:
  explicit ConeParser(std::string_view s) : s_(s) {}

  Cone parse() {
    Cone c = expr();
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return c;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("cone literal: " + msg + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (b == pos_) fail("expected identifier");
    return std::string(s_.substr(b, pos_ - b));
  }
  double number() {
    skip();
    std::string tail(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tail, &used);
    } catch (const std::exception&) {
      fail("expected number");
    }
    pos_ += used;
    return v;
  }
  std::vector<Vec> matrix() {
    expect('[');
    std::vector<Vec> rows;
    if (accept(']')) return rows;
    do {
      expect('[');
      std::vector<double> r;
      do r.push_back(number());
      while (accept(','));
      expect(']');
      rows.push_back(Eigen::Map<Vec>(r.data(), static_cast<int>(r.size())));
    } while (accept(','));
    expect(']');
    return rows;
  }

  Cone atom() {
    if (ident() != "cone") fail("expected 'cone'");
    expect('{');
    int dim = -1, n = 64;
    bool have_g = false, have_h = false, open = false, have_open = false;
    std::vector<Vec> gens, hs;
    std::string kind;
    do {
      std::string key = ident();
      expect('=');
      if (key == "dim") dim = static_cast<int>(number());
      else if (key == "n") n = static_cast<int>(number());
      else if (key == "gens") gens = matrix(), have_g = true;
      else if (key == "halfspaces") hs = matrix(), have_h = true;
      else if (key == "kind") kind = ident();
      else if (key == "open") {
        std::string v = ident();
        if (v != "true" && v != "false") fail("open expects true or false");
        open = v == "true";
        have_open = true;
      } else fail("unknown key '" + key + "'");
    } while (accept(','));
    expect('}');
    if (dim <= 0) fail("missing or invalid dim");
    Cone c = Cone::origin(dim);
    if (!kind.empty()) {
      if (have_g || have_h) fail("kind cannot be combined with gens/halfspaces");
      if (kind == "origin") c = Cone::origin(dim);
      else if (kind == "full") c = Cone::full(dim);
      else if (kind == "orthant") c = Cone::nonnegative_orthant(dim);
      else if (kind == "forward_light") c = Cone::light_cone(dim, true, n);
      else if (kind == "backward_light") c = Cone::light_cone(dim, false, n);
      else fail("unknown kind '" + kind + "'");
    } else if (have_g && have_h) {
      PolyCone a = PolyCone::from_generators(dim, gens);
      c = a.intersect(PolyCone::from_halfspaces(dim, hs));
    } else if (have_h) {
      c = Cone::from_halfspaces(dim, hs);
    } else {
      c = Cone::from_generators(dim, gens);
    }
    if (have_open) c.set_open_projection(open);
    return c;
  }

  Cone term() {
    Cone c = atom();
    while (true) {
      skip();
      if (pos_ < s_.size() && s_[pos_] == 'x') {
        ++pos_;
        c = cone_algebra(c, atom(), ConeOp::Product);
      } else {
        return c;
      }
    }
  }

  Cone expr() {
    Cone c = term();
    while (accept('|')) c = cone_algebra(c, term(), ConeOp::Union);
    return c;
  }
};

}  // namespace

Cone parse_cone(std::string_view text) { return ConeParser(text).parse(); }

}  // namespace eclab
