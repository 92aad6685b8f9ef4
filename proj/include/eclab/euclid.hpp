#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "eclab/laplace.hpp"
#include "eclab/models.hpp"
#include "eclab/test_function.hpp"
#include "eclab/types.hpp"
#include "eclab/wick.hpp"

namespace eclab {

struct EuclidConfig {
  int d = 2;
  int n = 2;
  const TwoPointModel* model = nullptr;
  CoefficientSequence coeffs = CoefficientSequence::exponential(Rational(3, 10));
  double alpha = 0.5;  // [0, 1)
  double beta = 2.0;   // > 1

  /// Throws InvalidInputError / DimensionError on inconsistent fields.
  void validate() const;
};

struct SchwingerResult {
  Complex value;
  double tail = 0.0;
  int N = 0;
  bool reordered = false;        // a rotation/permutation was applied first
  Mat rotation;                  // identity unless reordered
  std::vector<int> permutation;  // π, points taken as x_{π(0)}, x_{π(1)}, ...
};

/// Schwinger functions s_n(x) = 𝐖_{n-1}(ιξ) through the truncated Wick series.
/// Keeps the D_K table and tail constants between calls.
class Schwinger {
 public:
  Schwinger(EuclidConfig cfg, int N);

  const EuclidConfig& config() const { return cfg_; }
  int truncation() const { return series_.truncation(); }
  const TailConstants& constants() const { return tc_; }

  /// At difference variables ξ_1..ξ_{n-1}; every ξ_j^0 must be negative.
  SchwingerResult at_differences(const std::vector<Vec>& xi) const;
  /// At points x_1..x_n. Time-ordered input (x_j^0 < x_{j+1}^0) is evaluated
  /// directly; otherwise chronological_order supplies a rotation and a
  /// permutation first, which the shipped models permit since they depend on
  /// Lorentz squares only.
  SchwingerResult operator()(const std::vector<Vec>& x) const;

 private:
  EuclidConfig cfg_;
  WickSeries series_;
  TailConstants tc_;
};

SchwingerResult schwinger_eval(const EuclidConfig& cfg, const std::vector<Vec>& x, int N);

/// Difference variables ξ_j = x_j - x_{j+1}.
std::vector<Vec> difference_variables(const std::vector<Vec>& x);
/// Whether ιξ_j lies in R^d + i𝕍₋ for every j, decided on the real data:
/// Im ιξ_j = (ξ_j^0, 0, ..., 0).
bool in_past_tube(const std::vector<Vec>& xi);

struct ChronoResult {
  Mat rotation;                  // T, proper orthogonal
  std::vector<int> permutation;  // (T x_{π(j)})^0 increasing in j
  Vec direction;                 // u with (T x)^0 = <u, x>
  double min_gap = 0.0;          // min_j (T x_{π(j+1)})^0 - (T x_{π(j)})^0
  double min_distance = 0.0;     // min_{j != k} |x_j - x_k|, Euclidean
  double ratio = 0.0;
  double floor = 0.0;            // calibrated c_n
  bool above_floor = false;
  std::size_t candidates = 0;
};

/// Maximizes the smallest rotated-time gap over rotations. The objective
/// depends on T only through u = T^{-1} e_0 and equals min_{i<j} |<u, x_i - x_j>|,
/// so besides a direction grid (angle step 1e-3 in d = 2, 4000 Fibonacci
/// directions in d = 3) every exact local-maximum candidate is tried: u along
/// a pair axis, u on the equal-gap set of two pairs, and in d = 3 the
/// intersection of two equal-gap planes.
ChronoResult chronological_order(const std::vector<Vec>& x, int d);

/// Frozen c_n for 2 <= n <= 4, measured with calibrate_chronological on the
/// calibration seed; 0 outside that range.
double chronological_floor(int n);
constexpr std::uint64_t kChronoCalibrationSeed = 7001;

struct ChronoCalibration {
  std::map<int, double> c;  // n -> smallest ratio seen
  std::map<int, std::size_t> samples;
};

/// Random configurations (n in [2, 4], d in [2, 3], uniform in a box) plus
/// structured ones (collinear, regular polygons and simplices) when asked.
std::vector<std::vector<Vec>> chronological_corpus(std::uint64_t seed, std::size_t count, bool structured,
                                                    std::vector<int>* dims = nullptr);
ChronoCalibration calibrate_chronological(std::uint64_t seed, std::size_t count, bool structured = true);

/// Sample grid in difference variables (one entry per configuration).
struct BoundGrid {
  std::string description;
  std::vector<std::vector<Vec>> points;
};

/// n = 2 grid of ξ = (ξ^0, ξ^1, ..., 0) with ξ^0 uniform in [t_lo, t_hi]
/// (negative) and ξ^1 uniform in [-s, s].
BoundGrid difference_grid(int d, double t_lo, double t_hi, double s, int t_points, int s_points);

struct BoundFit {
  double epsilon = 0.0;
  double C = 0.0;
  double residual = 0.0;  // max_grid |S| - C·weight, ≤ 0 when the fit certifies
  double log_C = 0.0;
  std::size_t argmax = 0;
  std::string grid;
  std::size_t points = 0;
  bool diverged = false;
  std::vector<double> log_lhs;     // log(|S| + tail) per grid entry
  std::vector<double> log_weight;  // log of the weight per grid entry
};

enum class BoundForm {
  Differences,  // exp[ε|ξ|^{1/α} + ε (min_j |ξ_j^0|)^{-1/(β-1)}], sup norm
  Points        // exp[ε|x|^{1/α} + ε (min_{j≠k} |x_j - x_k|)^{-1/(β-1)}]
};

/// Smallest C with |S| <= C·weight on the grid. Points form reads each grid
/// entry as the points x_1..x_n.
BoundFit bound_fit_S(const Schwinger& s, const BoundGrid& grid, double epsilon,
                     BoundForm form = BoundForm::Differences);

struct ReconstructionResult {
  Complex lhs;
  Complex rhs;
  double gap = 0.0;
};

/// lhs = (2π)^{-dn} ∫_{R^{dn}_-} (L u)(ιξ) f(ξ) dξ with L u from a
/// LaplaceTable, and rhs = u(f̌) with adaptive quadrature over the carrier and
/// f̌ at tol·1e-3, abs_tol·1e-2. The transform uses the reconstruction
/// pairing.
ReconstructionResult reconstruction_check(const Functional& u, const TestFunction& f, int d, int n,
                                          const quad::Options& opt = {1e-9, 15, 1e-13});

/// Y_{0l} f = Σ_k (ξ_k^0 ∂/∂ξ_k^l - ξ_k^l ∂/∂ξ_k^0) f.
std::function<Complex(const Vec&)> euclidean_rotation_generator(const TestFunction& f, int d, int l);

struct BoostProbe {
  Vec p;
  Complex lhs;  // (Y f)ˇ(p)
  Complex rhs;  // factor · X (f̌)(p)
};

struct BoostReport {
  std::vector<BoostProbe> probes;
  Complex factor;        // (Y f)ˇ = factor · X f̌, factor = -s i
  double scale = 0.0;    // max |lhs| over the probes, or 1 when that is tiny
  double max_abs = 0.0;
  double residual = 0.0; // max_abs / scale
};

/// Compares (Y_{0l} f)ˇ with -s i X_{0l} f̌, X_{0l} = Σ_k (p_k^0 ∂/∂p_k^l +
/// p_k^l ∂/∂p_k^0), the derivative taken by central differences at step h
/// with one Richardson level. Probes need positive time components.
BoostReport boost_intertwine_check(const TestFunction& f, int d, int n, int l, const std::vector<Vec>& probes,
                                   SpatialSign s = SpatialSign::PairingConsistent, double h = 1e-4,
                                   const quad::Options& opt = {});

/// p^0 uniform in [t_lo, t_hi], p^1 uniform in [-s, s], other components 0.
std::vector<Vec> probe_grid(int d, double t_lo, double t_hi, double s, int t_points, int s_points);

}  // namespace eclab
