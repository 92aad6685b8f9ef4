#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eclab/cone.hpp"
#include "eclab/test_function.hpp"

namespace eclab {

/// Gelfand–Shilov indices. Derivatives are weighted by A^|λ| |λ|^{α|λ|},
/// moments by B^|μ| |μ|^{β|μ|}.
struct GSParams {
  double alpha = 0.5;
  double beta = 0.5;
  double A = 1.0;
  double B = 1.0;

  bool nontrivial() const;
  /// Throws InvalidInputError unless A, B > 0, alpha in [0,1), beta > 0.
  void validate() const;
};

/// Truncation of a sup over multi-indices and a grid. The grid has constant
/// spacing 2R/(points-1) per axis; each nested level keeps the points with
/// |x| <= level*R and orders <= ceil(level*M), so the levels are nested.
struct Truncation {
  int M = 20;
  double R = 10.0;
  double Rq = -1.0;  // radius for imaginary parts; negative means R
  int points = 81;
  int q_points = -1;  // negative means points
  std::vector<double> levels{0.25, 0.5, 1.0};
  double divergence_ratio = 1.5;
  int contour_nodes = 128;
};

struct NormLevel {
  int M = 0;
  double R = 0.0;
  double log_value = -INFINITY;  // running max up to this level
};

struct NormReport {
  double value = 0.0;            // exp(log_value); +inf on overflow or divergence
  double log_value = -INFINITY;  // -inf for the zero function
  int M = 0;
  double R = 0.0;
  bool diverges = false;
  std::vector<NormLevel> levels;

  std::string to_json() const;
};

/// Multi-indices of total order m in k variables, lexicographically descending.
std::vector<std::vector<int>> multi_indices(int k, int m);

/// All partial derivatives of total order m at x by the trapezoid rule for
/// the Cauchy integral on the torus of radius r, in multi_indices(k, m)
/// order. The node count doubles (up to 1024 in one variable) until the
/// Nyquist mode is negligible; NumericalFailure otherwise.
std::vector<Complex> cauchy_derivatives(const ComplexField& f, const Vec& x, int m, double r, int nodes = 128);

/// Assembles a report from per-level raw sups (log scale), applying the
/// running max and the divergence-ratio trend rule.
NormReport make_report(const std::vector<NormLevel>& raw, double divergence_ratio);

/// Truncated norm sup |p^μ ∂^λ f(p)| / (A^|λ| B^|μ| |λ|^{α|λ|} |μ|^{β|μ|})
/// with derivatives from Cauchy integrals on circles of radius max(1, m^α).
NormReport real_norm(const TestFunction& f, const GSParams& p, const Truncation& t);

/// Truncated sup over w = p + iq of
///   |f(w)| exp(|p/B|^{1/β} - |Aq|^{1/(1-α)} - δ_U(Ap)^{1/(1-α)}).
NormReport cone_norm(const ComplexField& f, int dim, const Cone& U, const GSParams& p, const Truncation& t);
NormReport cone_norm(const TestFunction& f, const Cone& U, const GSParams& p, const Truncation& t);

/// ∫ exp(-p1^2 - p2^3) over {|p| <= R, p2 >= -|p1|^{2/3}}.
double example1_divergence(double R, double tol = 1e-10);

// ------------------------------------------------------------ decomposition

struct DecomposeCertificate {
  double theta = 0.0;    // inf of δ_{U1}(p') over unit p' outside V1 (sampled)
  double theta2 = 0.0;   // same for U2 and V2
  double A0 = 0.0;       // Gaussian mollifier indices in S^{α,A0}_{1-α,B0}
  double B0 = 0.0;
  double A_prime = 0.0;  // 2(A0 + A) + A/theta
  double A_prime2 = 0.0; // 2(A0 + A) + A/theta2
  GSParams params1, params2;
  NormReport f_norm;     // f on U x V
  NormReport f1_norm;    // f1 on (U ∪ U1) x V
  NormReport f2_norm;    // f2 on (U ∪ U2) x V
};

struct Decomposition {
  ComplexField g1, g2;  // g1 + g2 = 1
  ComplexField f1, f2;  // f g1, f g2
  DecomposeCertificate certificate;
};

/// f = f1 + f2 with f_{1,2} in S((U ∪ U_{1,2}) x V) using a Gaussian
/// mollifier over the complementary cones. U1, U2 live in the first k1
/// coordinates (k1 = 1 or 2); V covers the remaining coordinates and may be
/// omitted when f depends on the first k1 only.
Decomposition decompose(const TestFunction& f, const Cone& U, const std::optional<Cone>& V, const Cone& U1,
                        const Cone& U2, const GSParams& p, const Truncation& certificate_truncation);

// -------------------------------------------------------- hyperfunctions

struct HyperfunctionResult {
  NormReport strip_norm;  // S^{1,A}_{1,B} norm of p2^n e^{-p1} on the 1/A-neighbourhood
  double ray_sup = 0.0;   // λ^n n^n e^{-n}
};

/// g_n(p) = p2^n e^{-p1} over the product of the ε-neighbourhoods of
/// [0, ∞) and {0}. Grid sizes follow `t.points`; `t.R` bounds Re w1.
HyperfunctionResult hyperfunction_example(int n, double epsilon, double A, double B, double lambda,
                                          const Truncation& t = {});

// ---------------------------------------------------------- Σ-space bounds

/// Truncated Σ norm |||f|||_{B,A}: derivatives weighted by (B, β), moments by
/// (A, α), over the grid points inside O, contour radius |δ_{∁O}(x)|/2.
NormReport sigma_norm(const TestFunction& f, const OpenSet& O, const GSParams& p, const Truncation& t);

struct FlatCalibration {
  double norm = 0.0;      // truncated Σ norm of f
  double A_prime = 0.0;   // (β-1)/(2e) (Bke)^{-1/(β-1)}
  double C = 0.0;         // fitted constant
  std::vector<Vec> grid;  // calibration points
};

struct FlatBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

/// Fits C = max over the grid of |f(x)| / (|||f||| exp(-A' δ^{-1/(β-1)})).
/// Default grid: 200 points with every constrained coordinate equal to
/// t in [-2, -0.05].
FlatCalibration calibrate_flat_bound(const TestFunction& f, const OpenSet& O, const GSParams& p,
                                     const Truncation& t, std::vector<Vec> grid = {});

FlatBound taylor_flat_bound(const TestFunction& f, const OpenSet& O, const GSParams& p, const Vec& x,
                            const FlatCalibration& cal);

struct GevreyCheck {
  double log_lhs = 0.0;  // log inf_m ξ^{-m} m^{αm}
  double log_rhs = 0.0;  // -(α/e) ξ^{1/α} + αe/2
  int argmin = 0;
  bool ok = false;
};

GevreyCheck gevrey_infimum_check(double alpha, double xi, int m_max = 200);

}  // namespace eclab
