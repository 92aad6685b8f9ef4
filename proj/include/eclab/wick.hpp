#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eclab/cone.hpp"
#include "eclab/types.hpp"

namespace eclab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "3/10", "0.3", "-1.25e-2" or an integer into an exact rational.
Rational parse_rational(const std::string& s);
BigInt factorial(int k);
BigInt binomial(int n, int k);

/// Pairing multi-index K = (k_jm), 0 <= j < m < n, stored in the order
/// (0,1), (0,2), ..., (0,n-1), (1,2), ...
class MultiIndexK {
 public:
  explicit MultiIndexK(int n = 2);
  MultiIndexK(int n, std::vector<int> entries);

  static int slot_count(int n) { return n * (n - 1) / 2; }
  static int slot(int n, int j, int m);

  int n() const { return n_; }
  int slots() const { return static_cast<int>(k_.size()); }
  const std::vector<int>& entries() const { return k_; }
  std::vector<int>& entries() { return k_; }

  /// k_jm for j != m in either order.
  int operator()(int j, int m) const;
  std::vector<int> valences() const;
  int total() const;
  std::string str() const;

  friend bool operator==(const MultiIndexK& a, const MultiIndexK& b) { return a.n_ == b.n_ && a.k_ == b.k_; }
  friend bool operator<(const MultiIndexK& a, const MultiIndexK& b) {
    return a.n_ != b.n_ ? a.n_ < b.n_ : a.k_ < b.k_;
  }

 private:
  int n_ = 2;
  std::vector<int> k_;
};

/// Every K with |K| <= N, by |K| and then in decreasing lexicographic order
/// within each total.
class KEnumerator {
 public:
  KEnumerator(int n, int N);
  bool next(MultiIndexK& out);

 private:
  int n_, N_, s_ = 0;
  std::vector<int> cur_;
  bool started_ = false;
};

std::vector<MultiIndexK> enumerate_K(int n, int N);
/// Number of K with |K| = s.
BigInt count_K(int n, int s);

class CoefficientSequence {
 public:
  enum class Kind { Exponential, InverseFactorial, GaussianDecay, Constant, Custom };

  static CoefficientSequence exponential(const Rational& g);  // g^k / k!
  static CoefficientSequence inverse_factorial();             // 1 / k!
  static CoefficientSequence gaussian_decay();                // exp(-k^2)
  static CoefficientSequence constant(const Rational& c);     // c for every k
  /// d_k for k < size, zero beyond.
  static CoefficientSequence custom(std::vector<double> values);
  static CoefficientSequence custom_exact(std::vector<Rational> values);
  /// "exponential:0.3", "inverse_factorial", "gaussian", "constant:1",
  /// "list:1,0.5,0.25" or "list:1,1/2,1/6".
  static CoefficientSequence parse(const std::string& spec);

  Kind kind() const { return kind_; }
  std::string describe() const;

  std::optional<Rational> exact(int k) const;
  double value(int k) const;
  /// log |d_k|; -inf when d_k = 0.
  double log_abs(int k) const;
  int sign(int k) const;

  /// Trend of k!|d_2k| ratios (k+1)|d_{2k+2}|/|d_{2k}|: nonincreasing for the
  /// tagged decaying kinds, nondecreasing for constants, and irrelevant for
  /// finite lists.
  enum class RatioTrend { Nonincreasing, Nondecreasing, Finite };
  RatioTrend ratio_trend() const;
  /// Last index with d_k possibly nonzero, or -1 when unbounded.
  int support_end() const;

 private:
  Kind kind_ = Kind::InverseFactorial;
  Rational param_{1};
  std::vector<double> list_;
  std::vector<Rational> exact_list_;
  bool list_exact_ = false;
};

/// κ!/K!, the number of Wick diagrams with line multiplicities K.
BigInt diagram_count(const MultiIndexK& K);

struct DKValue {
  std::optional<Rational> exact;  // when every d_κj is rational and |K| <= 64
  double value = 0.0;
  double log_abs = 0.0;
  int sign = 0;
  double rel_error = 0.0;  // only for the log-domain branch
};

/// D_K = (κ!/K!) Π_j d_{κ_j}. Exact up to |K| = 64, log-domain beyond.
DKValue coefficient_D_K(const MultiIndexK& K, const CoefficientSequence& d);

/// Perfect matchings of labeled legs (κ_j legs at vertex j) with no
/// intra-vertex pair, grouped by the line multiplicities they produce.
/// Empty when the total is odd. Total legs are limited to 16.
std::map<MultiIndexK, std::uint64_t> pairing_oracle(const std::vector<int>& kappa);

struct WickOracleReport {
  int max_legs = 0;
  int max_n = 0;
  std::size_t kappas = 0;
  std::size_t indices = 0;
  std::size_t mismatches = 0;
  std::vector<std::string> mismatch_log;
};

struct WickOracleRow {
  std::vector<int> kappa;
  MultiIndexK K;
  BigInt formula;  // κ!/K!
  BigInt oracle;   // matchings counted by pairing_oracle
};

/// Compares diagram_count with pairing_oracle for every valence vector with
/// 2 <= n <= max_n and even total <= max_legs. Appends one row per K when
/// rows is given.
WickOracleReport wick_oracle_check(int max_n, int max_legs, std::vector<WickOracleRow>* rows = nullptr);

struct CoefficientCondition {
  bool ok = false;
  double A = 0.0;
  double h = 0.0;
  std::optional<std::pair<int, int>> witness;  // first violating (k, l) under the most permissive pair
  double witness_log_ratio = 0.0;              // log(|d_k d_l| / (A h^{k+l} |d_{k+l}|))
};

/// Checks |d_k d_l| <= A h^{k+l} |d_{k+l}| for all k + l <= kmax, with (k, l)
/// scanned by total and then by k. Exact when the sequence is rational.
bool coefficient_condition_holds(const CoefficientSequence& d, double A, double h, int kmax,
                                 std::optional<std::pair<int, int>>* witness = nullptr, double* log_ratio = nullptr);

/// Searches A in {1, 10, 100} then h in {2, 4, 8}; kmax <= 64.
CoefficientCondition check_coefficient_condition(const CoefficientSequence& d, int kmax,
                                                 const std::vector<double>& As = {1, 10, 100},
                                                 const std::vector<double>& hs = {2, 4, 8});

/// Σ_k L^k k! |d_2k| w^k with a tail bound from the ratio test.
struct MajorantSeries {
  double value = 0.0;
  double tail = 0.0;
  int terms = 0;
  bool converged = false;
  int divergence_index = -1;
  double divergence_log_term = 0.0;
};

MajorantSeries majorant_series(const CoefficientSequence& d, double L, double w, int max_terms = 4000);

enum class Envelope { IR, UV };

struct ConvergenceRow {
  double r = 0.0;
  double lhs = 0.0;
  double tail = 0.0;
  double weight = 0.0;  // exp(ε r^{1/α}) or exp(ε r^{-1/(β-1)})
};

struct ConvergenceReport {
  bool ok = false;
  double C = 0.0;  // minimal constant over the grid
  double argmax = 0.0;
  std::vector<ConvergenceRow> rows;
  std::optional<double> divergence_at;
  int divergence_index = -1;
};

/// Fits the smallest C with Σ_k L^k k!|d_2k| w(r)^k <= C exp(ε r^{1/α}) (IR,
/// exponent = α) or <= C exp(ε r^{-1/(β-1)}) (UV, exponent = β) on the grid.
ConvergenceReport convergence_bound_check(const CoefficientSequence& d, const std::function<double(double)>& w,
                                          Envelope side, double exponent, double L, double epsilon,
                                          const std::vector<double>& grid);

/// sup_k k!|d_2k| L^k over k <= kmax, which bounds k!|d_2k| by C L^{-k}.
struct FactorialMoment {
  double C = 0.0;
  int argmax = 0;
  bool decreasing_tail = false;  // last ratio below 1 with a nonincreasing trend
};

FactorialMoment factorial_moment_bound(const CoefficientSequence& d, double L, int kmax = 200);

struct InequalityReport {
  int n = 0;
  int Nmax = 0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_multinomial = 0.0;  // max (|K|!/K!) / (n(2n-1))^|K|
  double worst_valence = 0.0;      // max κ! / |κ|!
  double worst_central = 0.0;      // max |κ|! / (4^|K| (|K|!)^2)
};

/// |K|!/K! <= (n(2n-1))^|K| and κ! <= |κ|! <= 4^|K| (|K|!)^2 for every K
/// with |K| <= Nmax, exactly.
InequalityReport combinatorial_inequalities(int n, int Nmax);

struct LambdaOptions {
  Norm norm = Norm::Sup;
  int starts = 12;
  int samples = 100000;
  std::uint64_t seed = 20240611;
  int max_iter = 4000;
};

struct LambdaResult {
  double lambda = 0.0;
  int argmin_terms = 0;
  std::vector<double> per_terms;  // index r - 2
  double hull_value = 0.0;        // min |x| over conv of normalized generators
  int hull_support = 0;           // terms needed to attain it
  double certificate_min = 0.0;   // smallest sampled ratio
  std::size_t certificate_samples = 0;
  bool certified = false;         // certificate_min >= lambda - 1e-9
  Norm norm = Norm::Sup;
};

/// λ = min_{2<=r<=m} inf{|η_1+...+η_r| : η_i in K, Σ|η_i| = 1}. For r at
/// least the support of the closest point of conv{g/|g|} the value is that
/// point's norm (linear program for the sup norm, NNLS otherwise); smaller r
/// use multistart Nelder–Mead. A random-sample certificate is attached.
/// Throws HypothesisViolated when the cone contains a line.
LambdaResult lambda_constant(const Cone& cone, int max_terms, const LambdaOptions& opt = {});

}  // namespace eclab
