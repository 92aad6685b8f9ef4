#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eclab/types.hpp"

namespace eclab {

/// Symmetric nondegenerate bilinear form <p, x> = p^T M x on R^k.
struct PairingForm {
  Mat matrix;

  explicit PairingForm(Mat m);

  static PairingForm euclidean(int k);
  /// p^0 x^0 - p^1 x^1 - ... - p^{d-1} x^{d-1}.
  static PairingForm lorentz(int d);
  /// <p, x> = -sum_j p_j x_j (Lorentz products) on R^{dn}; the pairing used for
  /// the Wightman/Schwinger correspondence.
  static PairingForm reconstruction(int d, int n);

  int dim() const { return static_cast<int>(matrix.rows()); }
  double operator()(const Vec& p, const Vec& x) const { return p.dot(matrix * x); }
  Complex operator()(const Vec& p, const CVec& z) const;
};

/// Closed convex polyhedral cone held in both generator and half-space form.
///
/// Generators are unit extreme rays followed by +/- an orthonormal basis of
/// the lineality space. Half-spaces are unit inward normals n with <n, p> >= 0;
/// an implicit equality appears as a +/- pair. Both lists are irredundant.
class PolyCone {
 public:
  static PolyCone from_generators(int dim, const std::vector<Vec>& generators);
  static PolyCone from_halfspaces(int dim, const std::vector<Vec>& normals);
  static PolyCone origin(int dim);
  static PolyCone full(int dim);

  int dim() const { return dim_; }
  const std::vector<Vec>& generators() const { return generators_; }
  const std::vector<Vec>& halfspaces() const { return normals_; }
  int lineality_dim() const { return lineality_; }
  bool is_degenerate() const { return generators_.empty(); }
  bool is_pointed() const { return lineality_ == 0; }
  bool is_full() const { return normals_.empty(); }

  Mat generator_matrix() const;
  bool contains(const Vec& p, double tol = 1e-9) const;
  double distance(const Vec& p, Norm norm = Norm::Sup) const;
  /// min_i <n_i, u/|u|_2>; positive iff u lies in the interior. +inf for R^k.
  double interior_margin(const Vec& u) const;
  /// Euclidean projection onto the cone.
  Vec project(const Vec& p) const;

  PolyCone product(const PolyCone& other) const;
  PolyCone intersect(const PolyCone& other) const;

 private:
  PolyCone(int dim, std::vector<Vec> generators, std::vector<Vec> normals, int lineality)
      : dim_(dim), generators_(std::move(generators)), normals_(std::move(normals)), lineality_(lineality) {}

  int dim_ = 0;
  std::vector<Vec> generators_;
  std::vector<Vec> normals_;
  int lineality_ = 0;
};

/// A finite union of closed polyhedral cones in R^k. Nearly every cone in use
/// is a single convex piece; unions arise only through cone_algebra.
class Cone {
 public:
  Cone(PolyCone piece);  // NOLINT(google-explicit-constructor)
  static Cone union_of(std::vector<PolyCone> pieces);

  static Cone from_generators(int dim, const std::vector<Vec>& generators);
  static Cone from_halfspaces(int dim, const std::vector<Vec>& normals);
  static Cone origin(int dim);
  static Cone full(int dim);
  /// {p : p_j >= 0 for all j}.
  static Cone nonnegative_orthant(int dim);
  /// Closed forward (or backward) light cone {±p^0 >= |p_spatial|_2} in R^d.
  /// Exact for d = 2; for d = 3 an inscribed N-gon over the projection; for
  /// d = 4 the hull of N near-uniform rays on the 2-sphere.
  static Cone light_cone(int d, bool forward, int polygon_n = 64);

  int dim() const { return dim_; }
  const std::vector<PolyCone>& pieces() const { return pieces_; }
  bool is_convex() const { return pieces_.size() == 1; }
  /// The single convex piece; throws UnsupportedError for genuine unions.
  const PolyCone& convex() const;
  bool is_degenerate() const;
  bool is_open_projection() const { return open_projection_; }
  void set_open_projection(bool v) { open_projection_ = v; }

  bool contains(const Vec& p, double tol = 1e-9) const;
  double distance(const Vec& p, Norm norm = Norm::Sup) const;
  std::string describe() const;

 private:
  Cone(int dim, std::vector<PolyCone> pieces) : dim_(dim), pieces_(std::move(pieces)) {}
  int dim_ = 0;
  std::vector<PolyCone> pieces_;
  bool open_projection_ = false;
};

double distance_to_cone(const Vec& p, const Cone& U, Norm norm = Norm::Sup);

/// {p : <p, y> >= 0 for all y in V}. A union dualizes to the dual of its hull.
Cone dual_cone(const Cone& V, const PairingForm& form);

/// U ⋐ V, i.e. closure(U) \ {0} lies in the interior of V.
bool compact_containment(const Cone& U, const Cone& V, double margin = 1e-9, int samples = 2000,
                         std::uint64_t seed = 0x5eed);

enum class ConeOp { Union, Intersection, Product };
Cone cone_algebra(const Cone& a, const Cone& b, ConeOp op);

/// Parses a cone literal.
///
///   expr  := term ('|' term)*          union
///   term  := atom ('x' atom)*          product (dimensions concatenate)
///   atom  := 'cone' '{' item (',' item)* '}'
///   item  := 'dim' '=' INT | 'gens' '=' MATRIX | 'halfspaces' '=' MATRIX
///          | 'kind' '=' ('origin'|'full'|'orthant'|'forward_light'|'backward_light')
///          | 'n' '=' INT | 'open' '=' ('true'|'false')
///   MATRIX := '[' ']' | '[' ROW (',' ROW)* ']',  ROW := '[' NUM (',' NUM)* ']'
///
/// Example: cone{dim=2, gens=[[1,1],[1,-1]]} x cone{dim=1, kind=orthant}
Cone parse_cone(std::string_view text);

}  // namespace eclab
