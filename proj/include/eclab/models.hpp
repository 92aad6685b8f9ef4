#pragma once

#include <string>
#include <vector>

#include "eclab/types.hpp"
#include "eclab/wick.hpp"

namespace eclab {

/// ζ² = ζ_0² - Σ_k ζ_k², complex bilinear, time component first.
Complex lorentz_square(const CVec& zeta);

/// Open backward light cone: η_0 < -|η⃗|.
bool in_backward_tube(const CVec& zeta, double margin = 0.0);

/// Grid over a compact subcone of the backward cone on which C is measured.
struct ModelCertification {
  double rho = 0.6;   // subcone: |η⃗| <= rho |η_0|, η_0 < 0
  double x_max = 40.0;
  int x_points = 17;  // per axis (fewer above d = 2)
  double t_min = 1e-3;
  double t_max = 1e3;
  int t_points = 25;
  int directions = 9;
};

/// Two-point function 𝐰 analytic on the tube over the backward light cone,
/// with the envelopes w_IR, w_UV and a measured constant C for
/// |𝐰(ζ)| <= C (1 + w_IR(2|ζ|) + w_UV(|Im ζ|)) on a compact subcone.
class TwoPointModel {
 public:
  enum class Kind { Massless, Dipole };

  /// 𝐰(ζ) = c / (-ζ²).
  static TwoPointModel massless(int d, double c = 1.0);
  /// 𝐰(ζ) = -c log(-ζ²/μ²), principal branch.
  static TwoPointModel dipole(int d, double c = 1.0, double mu = 1.0);
  /// "massless2", "dipole2", "dipole4", certified with default settings.
  static TwoPointModel from_registry(const std::string& name);
  static std::vector<std::string> registry();

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int dim() const { return d_; }
  double c() const { return c_; }
  double mu() const { return mu_; }

  Complex operator()(const CVec& zeta) const;
  double w_IR(double r) const;
  double w_UV(double t) const;

  using Certification = ModelCertification;

  /// Measures C on the certification grid; returns *this certified.
  TwoPointModel& certify(const Certification& grid = {});
  bool certified() const { return C_ > 0.0; }
  double C() const { return C_; }
  double subcone_rho() const { return grid_.rho; }
  /// Whether Im ζ lies in the certified subcone.
  bool in_subcone(const CVec& zeta) const;

  /// |𝐰_maj(x - iy, x + iy)| for the declared majorant
  /// C (1 + w_IR(2|x| + 2|y|) + w_UV(2|y|))².
  double majorant(const Vec& x, const Vec& y) const;

 private:
  Kind kind_ = Kind::Massless;
  std::string name_;
  int d_ = 2;
  double c_ = 1.0;
  double mu_ = 1.0;
  double C_ = 0.0;
  Certification grid_;
};

/// max over probes of |∂𝐰/∂Re ζ_k - (-i) ∂𝐰/∂Im ζ_k| by central differences,
/// relative to |𝐰'|.
double cauchy_riemann_residual(const TwoPointModel& w, const CVec& zeta, double h = 1e-5);

/// Constants entering the tail bound.
struct TailConstants {
  double A = 1.0;        // coefficient condition
  double h = 2.0;
  double A_prime = 1.0;  // A^{n-1}
  double h_prime = 0.0;  // 4 n (2n - 1) h^2
  double C = 0.0;        // model constant
  double lambda = 1.0;   // cone constant
};

/// Precomputed D_K table for |K| <= N.
class WickSeries {
 public:
  WickSeries(int n, CoefficientSequence d, int N);

  int n() const { return n_; }
  int truncation() const { return N_; }
  const CoefficientSequence& coefficients() const { return d_; }
  const std::vector<MultiIndexK>& indices() const { return K_; }
  const std::vector<double>& coefficients_D() const { return D_; }

  /// Pair values w_jm = 𝐰(ζ_j + ... + ζ_{m-1}) in slot order.
  std::vector<Complex> pair_values(const std::vector<CVec>& zeta, const TwoPointModel& w) const;
  /// Σ_{|K| <= N} D_K Π w_jm^{k_jm}, summed in enumeration order or in the
  /// given order.
  Complex sum(const std::vector<Complex>& pairs, const std::vector<std::size_t>* order = nullptr) const;
  /// Partial sum over |K| <= M for M <= N.
  Complex sum_to(const std::vector<Complex>& pairs, int M) const;

 private:
  int n_, N_;
  CoefficientSequence d_;
  std::vector<MultiIndexK> K_;
  std::vector<double> D_;
  std::vector<std::size_t> level_end_;  // one past the last index with |K| = s
};

struct WightmanResult {
  Complex value;
  double tail = 0.0;
  double log_tail = 0.0;
  int N = 0;
  std::size_t terms = 0;
  TailConstants constants;
};

/// Tail constants for n points: (A, h) from the coefficient condition at
/// kmax = 64, C from the model, λ supplied (1 for the sup norm on the light
/// cone).
TailConstants tail_constants(int n, const CoefficientSequence& d, const TwoPointModel& w, double lambda = 1.0);

/// Σ_{s>N} count(s) A' h'^s s!|d_2s| ((n+1)C)^s (1 + w_IR(2n|ζ|)^s + Σ_i w_UV(λ|η_i|)^s)
/// in log form. Throws TruncationInsufficient when the series diverges.
double wightman_log_tail(int n, const std::vector<CVec>& zeta, const TwoPointModel& w, const CoefficientSequence& d,
                         int N, const TailConstants& tc);

/// Truncated n-point function in difference variables ζ_1..ζ_{n-1}.
/// Throws TubeViolation outside the tube and InvalidInputError outside the
/// certified subcone.
WightmanResult wightman_eval(const WickSeries& series, const std::vector<CVec>& zeta, const TwoPointModel& w,
                             const TailConstants& tc);
WightmanResult wightman_eval(int n, const std::vector<CVec>& zeta, const TwoPointModel& w,
                             const CoefficientSequence& d, int N);

/// Π_{j<m} exp(g² w_jm), the sum of the full series for d_k = g^k / k!.
Complex exponential_closed_form(const std::vector<CVec>& zeta, const TwoPointModel& w, double g);

}  // namespace eclab
