#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eclab/cone.hpp"
#include "eclab/gs_spaces.hpp"
#include "eclab/quadrature.hpp"
#include "eclab/test_function.hpp"
#include "eclab/types.hpp"

namespace eclab {

struct Atom {
  enum class Kind { PointMass, DerivativePointMass, Density };
  Kind kind = Kind::PointMass;
  Complex weight{1.0, 0.0};
  Vec location;          // point masses
  Vec direction;         // derivative point masses: u(φ) = weight * ∂_v φ(location)
  TestFunction density;  // densities, integrated over the carrier only
};

/// Analytic functional carried by a closed cone K, built from point masses,
/// first-derivative point masses and densities; or a tensor product of such.
class Functional {
 public:
  Functional(int dim, Cone carrier);

  static Functional point_mass(const Vec& p, const Cone& carrier, Complex weight = 1.0);
  static Functional derivative_point_mass(const Vec& p, const Vec& v, const Cone& carrier, Complex weight = 1.0);
  static Functional density(const TestFunction& rho, const Cone& carrier, Complex weight = 1.0);

  /// Appends an atom after checking it against the carrier.
  Functional& add(Atom a);
  /// u ⊗ w on R^{k+l}; carried by the product cone.
  Functional tensor(const Functional& w) const;

  int dim() const { return dim_; }
  const Cone& carrier() const { return carrier_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Functional>& factors() const { return factors_; }
  bool is_tensor() const { return !factors_.empty(); }

  /// u(φ) for a smooth φ on R^k. Derivative atoms use a fourth-order central
  /// difference with step h.
  Complex apply(const std::function<Complex(const Vec&)>& phi, const quad::Options& opt = {}, double h = 1e-3) const;

 private:
  int dim_ = 0;
  Cone carrier_;
  std::vector<Atom> atoms_;
  std::vector<Functional> factors_;
};

/// z = x + iy with y in the interior of the open cone V.
struct TubePoint {
  Vec x;
  Vec y;
  Cone V;

  /// Throws TubeViolation unless y lies strictly inside V.
  static TubePoint make(Vec x, Vec y, Cone V);
  CVec z() const;
  int dim() const { return static_cast<int>(x.size()); }
};

/// (L u)(z) = u(e^{i<·, z>}). Densities are integrated over a simplicial
/// subdivision of the carrier with semi-infinite Gauss–Kronrod per axis.
Complex laplace_transform(const Functional& u, const CVec& z, const PairingForm& form, const quad::Options& opt = {});
/// L u prepared for many evaluation points. Every density atom is sampled
/// once on a product Gauss–Legendre rule (t = s/(1 - s) on each axis) over the
/// simplicial pieces of its carrier; on a piece p = G t the kernel factorizes
/// as Π_j exp(i t_j <g_j, z>), so a point costs one tensor contraction.
/// Point masses and derivative point masses are exact.
class LaplaceTable {
 public:
  LaplaceTable(const Functional& u, const PairingForm& form, int nodes = 128);
  Complex operator()(const CVec& z) const;
  int dim() const { return dim_; }

 private:
  struct Piece {
    Mat MG;                             // form.matrix * G, columns paired with z
    std::vector<Complex> table;         // weight · ρ(G t) · Π w_i · |det G|, row-major
  };
  struct Block {
    int offset = 0;
    int dim = 0;
    Mat M;                              // diagonal block of the form
    std::vector<Atom> points;           // point masses and derivative atoms
    std::vector<Piece> pieces;
  };
  int dim_ = 0;
  std::vector<double> t_;               // nodes on [0, inf)
  std::vector<Block> blocks_;           // one per tensor factor
};

/// Checks that the carrier lies in the dual of the tube cone before evaluating.
Complex laplace_transform(const Functional& u, const TubePoint& z, const PairingForm& form,
                          const quad::Options& opt = {});

/// f^(p) = ∫ f(x) e^{i<p, x>} dx. Uses one-variable transforms when f
/// factorizes and the form is diagonal.
Complex fourier_transform(const TestFunction& f, const Vec& p, const PairingForm& form, const quad::Options& opt = {});

struct ANormSpec {
  double epsilon = 1.0;
  std::optional<double> R;        // radius variant, used when alpha = 0
  std::vector<Cone> subcones;     // V'_j, one per block; dimensions concatenate
  std::vector<Cone> tube_cones;   // V_j; when given, V'_j ⋐ V_j is checked
};

/// Grid for the 𝒜-norm: per block, x on a uniform grid of [-X, X]^{k_j} and
/// y = t u with u a set of unit directions of V'_j and t log-spaced in
/// [y_min, y_max]. Level s keeps |x| <= sX and t >= y_max (y_min/y_max)^s.
struct ATruncation {
  double X = 10.0;
  int x_points = 41;
  double y_min = 0.05;
  double y_max = 10.0;
  int t_points = 41;
  int directions = 9;  // per two-dimensional block; generators only above that
  std::vector<double> levels{0.25, 0.5, 1.0};
  double divergence_ratio = 1.5;
};

/// sup |v(z)| prod_j exp(-ε|z_j|^{1/α} - ε|y_j|^{-1/(β-1)}) over the grid
/// (radius-R variant without the |z_j| weight when α = 0).
NormReport a_norm(const ComplexField& v, const ANormSpec& spec, double alpha, double beta, const ATruncation& t = {});

struct BoundaryStep {
  Vec y;
  Complex lhs;           // ∫ (L u)(x + iy) f(x) dx
  Complex identity_rhs;  // u(e^{-<·, y>} f^)
  double gap_identity = 0.0;
  double gap_limit = 0.0;  // |lhs - u(f^)|
};

struct BoundaryReport {
  Complex limit;  // u(f^)
  std::vector<BoundaryStep> steps;
  double max_gap_identity = 0.0;
  double final_gap_limit = 0.0;
  bool monotone_tail = false;  // gap_limit nonincreasing over the second half
  bool converged = false;      // final_gap_limit < tol

  std::string to_json() const;
};

/// With table_nodes > 0, L u comes from a LaplaceTable with that many nodes
/// per axis instead of adaptive quadrature at every x.
BoundaryReport boundary_value_check(const Functional& u, const TestFunction& f, const std::vector<Vec>& ys,
                                    const PairingForm& form, double tol = 1e-6, const quad::Options& opt = {},
                                    int table_nodes = 0);

/// Sign of the spatial part of the check-transform kernel. PairingConsistent
/// (+i) is what (L δ_p)(ιξ) produces under the reconstruction pairing;
/// AsWritten (-i) is the alternative, kept for comparison.
enum class SpatialSign { PairingConsistent = 1, AsWritten = -1 };

/// (2π)^{-dn} ∫_{R^{dn}_-} f(ξ) exp[Σ_j (p_j^0 ξ_j^0 + s i p_j·ξ_j)] dξ, time
/// components first in each d-block, time axes mapped by ξ = -e^t.
Complex check_transform(const std::function<Complex(const Vec&)>& f, int d, int n, const Vec& p,
                        SpatialSign s = SpatialSign::PairingConsistent, const quad::Options& opt = {});
/// As above; f must be supported where every time component is negative.
Complex check_transform(const TestFunction& f, int d, int n, const Vec& p,
                        SpatialSign s = SpatialSign::PairingConsistent, const quad::Options& opt = {});

/// ι: multiply the time component of each d-block by i.
CVec iota(const Vec& x, int d);

}  // namespace eclab
