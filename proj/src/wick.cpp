#include "eclab/wick.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "eclab/errors.hpp"
#include "eclab/lp.hpp"

namespace eclab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_big(const BigInt& v) {
  if (v <= 0) return kNegInf;
  // msb keeps this finite far beyond the double range
  unsigned bits = boost::multiprecision::msb(v);
  if (bits < 1000) return std::log(v.convert_to<double>());
  BigInt top = v >> (bits - 60);
  return std::log(top.convert_to<double>()) + (bits - 60) * std::log(2.0);
}

double log_rational_abs(const Rational& r) {
  if (r == 0) return kNegInf;
  Rational a = abs(r);
  return log_big(numerator(a)) - log_big(denominator(a));
}

BigInt parse_integer(const std::string& s) {
  if (s.empty()) throw ParseError("empty integer");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw ParseError("bad integer '" + s + "'");
  for (std::size_t j = i; j < s.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(s[j]))) throw ParseError("bad integer '" + s + "'");
  BigInt v(s.substr(i));
  return s[0] == '-' ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ParseError("empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    BigInt den = parse_integer(s.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + raw + "'");
    return Rational(parse_integer(s.substr(0, slash)), den);
  }
  int exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    exponent = static_cast<int>(parse_integer(s.substr(e + 1)).convert_to<long long>());
    s = s.substr(0, e);
  }
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  std::string digits;
  int scale = 0;
  if (auto dot = s.find('.'); dot != std::string::npos) {
    digits = s.substr(0, dot) + s.substr(dot + 1);
    scale = static_cast<int>(s.size() - dot - 1);
  } else {
    digits = s;
  }
  if (digits.empty()) throw ParseError("bad number '" + raw + "'");
  Rational v(parse_integer(digits));
  int p = exponent - scale;
  BigInt ten = boost::multiprecision::pow(BigInt(10), std::abs(p));
  v = p >= 0 ? Rational(v * ten) : Rational(v / ten);
  return neg ? Rational(-v) : v;
}

BigInt factorial(int k) {
  BigInt f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

MultiIndexK::MultiIndexK(int n) : n_(n), k_(slot_count(n), 0) {
  if (n < 1) throw InvalidInputError("multi-index needs n >= 1");
}

MultiIndexK::MultiIndexK(int n, std::vector<int> entries) : n_(n), k_(std::move(entries)) {
  if (n < 1) throw InvalidInputError("multi-index needs n >= 1");
  if (static_cast<int>(k_.size()) != slot_count(n)) throw DimensionError("multi-index has the wrong number of slots");
  for (int v : k_)
    if (v < 0) throw InvalidInputError("multi-index entries must be nonnegative");
}

int MultiIndexK::slot(int n, int j, int m) {
  if (j > m) std::swap(j, m);
  if (j == m || j < 0 || m >= n) throw InvalidInputError("bad pair index");
  return j * n - j * (j + 1) / 2 + (m - j - 1);
}

int MultiIndexK::operator()(int j, int m) const { return k_[slot(n_, j, m)]; }

std::vector<int> MultiIndexK::valences() const {
  std::vector<int> kappa(n_, 0);
  for (int j = 0; j < n_; ++j)
    for (int m = j + 1; m < n_; ++m) {
      int v = k_[slot(n_, j, m)];
      kappa[j] += v;
      kappa[m] += v;
    }
  return kappa;
}

int MultiIndexK::total() const {
  int s = 0;
  for (int v : k_) s += v;
  return s;
}

std::string MultiIndexK::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < k_.size(); ++i) os << (i ? "," : "") << k_[i];
  os << ')';
  return os.str();
}

KEnumerator::KEnumerator(int n, int N) : n_(n), N_(N) {
  if (n < 1) throw InvalidInputError("enumeration needs n >= 1");
  cur_.assign(MultiIndexK::slot_count(n), 0);
}

bool KEnumerator::next(MultiIndexK& out) {
  if (!started_) {
    started_ = true;
    if (N_ < 0) return false;
    out = MultiIndexK(n_, cur_);
    return true;
  }
  const int P = static_cast<int>(cur_.size());
  if (P == 0) return false;
  int i = -1;
  for (int t = P - 2; t >= 0; --t)
    if (cur_[t] > 0) {
      i = t;
      break;
    }
  if (i >= 0) {
    int tail = 0;
    for (int t = i + 1; t < P; ++t) {
      tail += cur_[t];
      cur_[t] = 0;
    }
    --cur_[i];
    cur_[i + 1] = tail + 1;
  } else {
    if (++s_ > N_) return false;
    std::fill(cur_.begin(), cur_.end(), 0);
    cur_[0] = s_;
  }
  out = MultiIndexK(n_, cur_);
  return true;
}

std::vector<MultiIndexK> enumerate_K(int n, int N) {
  std::vector<MultiIndexK> all;
  KEnumerator e(n, N);
  MultiIndexK K(n);
  while (e.next(K)) all.push_back(K);
  return all;
}

BigInt count_K(int n, int s) {
  int P = MultiIndexK::slot_count(n);
  if (P == 0) return s == 0 ? 1 : 0;
  return binomial(s + P - 1, P - 1);
}

// ---------------------------------------------------------------------------

CoefficientSequence CoefficientSequence::exponential(const Rational& g) {
  CoefficientSequence d;
  d.kind_ = Kind::Exponential;
  d.param_ = g;
  return d;
}

CoefficientSequence CoefficientSequence::inverse_factorial() {
  CoefficientSequence d;
  d.kind_ = Kind::InverseFactorial;
  return d;
}

CoefficientSequence CoefficientSequence::gaussian_decay() {
  CoefficientSequence d;
  d.kind_ = Kind::GaussianDecay;
  return d;
}

CoefficientSequence CoefficientSequence::constant(const Rational& c) {
  CoefficientSequence d;
  d.kind_ = Kind::Constant;
  d.param_ = c;
  return d;
}

CoefficientSequence CoefficientSequence::custom(std::vector<double> values) {
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidInputError("coefficient list must be finite");
  CoefficientSequence d;
  d.kind_ = Kind::Custom;
  d.list_ = std::move(values);
  for (double v : d.list_) d.exact_list_.emplace_back(v);  // exact binary value
  d.list_exact_ = false;
  return d;
}

CoefficientSequence CoefficientSequence::custom_exact(std::vector<Rational> values) {
  CoefficientSequence d;
  d.kind_ = Kind::Custom;
  d.exact_list_ = std::move(values);
  for (const auto& v : d.exact_list_) d.list_.push_back(v.convert_to<double>());
  d.list_exact_ = true;
  return d;
}

CoefficientSequence CoefficientSequence::parse(const std::string& spec) {
  auto colon = spec.find(':');
  std::string tag = spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (tag == "exponential") {
    if (arg.empty()) throw ParseError("exponential needs a coupling, e.g. exponential:0.3");
    return exponential(parse_rational(arg));
  }
  if (tag == "inverse_factorial") return inverse_factorial();
  if (tag == "gaussian") return gaussian_decay();
  if (tag == "constant") return constant(arg.empty() ? Rational(1) : parse_rational(arg));
  if (tag == "list") {
    std::vector<Rational> vals;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(parse_rational(item));
    if (vals.empty()) throw ParseError("empty coefficient list");
    return custom_exact(std::move(vals));
  }
  throw ParseError("unknown coefficient sequence '" + spec + "'");
}

std::string CoefficientSequence::describe() const {
  switch (kind_) {
    case Kind::Exponential: return "exponential:" + param_.str();
    case Kind::InverseFactorial: return "inverse_factorial";
    case Kind::GaussianDecay: return "gaussian";
    case Kind::Constant: return "constant:" + param_.str();
    case Kind::Custom: {
      std::string s = "list:";
      for (std::size_t i = 0; i < exact_list_.size(); ++i) s += (i ? "," : "") + exact_list_[i].str();
      return s;
    }
  }
  return "?";
}

std::optional<Rational> CoefficientSequence::exact(int k) const {
  if (k < 0) throw InvalidInputError("negative coefficient index");
  switch (kind_) {
    case Kind::Exponential: {
      Rational p = 1;
      for (int i = 1; i <= k; ++i) p = p * param_ / i;
      return p;
    }
    case Kind::InverseFactorial: return Rational(BigInt(1), factorial(k));
    case Kind::GaussianDecay:
      if (k == 0) return Rational(1);
      return std::nullopt;
    case Kind::Constant: return param_;
    case Kind::Custom: return k < static_cast<int>(exact_list_.size()) ? exact_list_[k] : Rational(0);
  }
  return std::nullopt;
}

double CoefficientSequence::log_abs(int k) const {
  if (k < 0) throw InvalidInputError("negative coefficient index");
  switch (kind_) {
    case Kind::Exponential: {
      if (param_ == 0) return k == 0 ? 0.0 : kNegInf;
      return k * log_rational_abs(param_) - std::lgamma(k + 1.0);
    }
    case Kind::InverseFactorial: return -std::lgamma(k + 1.0);
    case Kind::GaussianDecay: return -static_cast<double>(k) * k;
    case Kind::Constant: return log_rational_abs(param_);
    case Kind::Custom:
      if (k >= static_cast<int>(exact_list_.size())) return kNegInf;
      return log_rational_abs(exact_list_[k]);
  }
  return kNegInf;
}

int CoefficientSequence::sign(int k) const {
  switch (kind_) {
    case Kind::Exponential:
      if (param_ == 0) return k == 0 ? 1 : 0;
      return (param_ < 0 && k % 2) ? -1 : 1;
    case Kind::InverseFactorial:
    case Kind::GaussianDecay: return 1;
    case Kind::Constant: return param_ > 0 ? 1 : (param_ < 0 ? -1 : 0);
    case Kind::Custom: {
      if (k >= static_cast<int>(exact_list_.size())) return 0;
      const Rational& v = exact_list_[k];
      return v > 0 ? 1 : (v < 0 ? -1 : 0);
    }
  }
  return 0;
}

double CoefficientSequence::value(int k) const {
  int s = sign(k);
  return s == 0 ? 0.0 : s * std::exp(log_abs(k));
}

CoefficientSequence::RatioTrend CoefficientSequence::ratio_trend() const {
  if (support_end() >= 0) return RatioTrend::Finite;
  return kind_ == Kind::Constant ? RatioTrend::Nondecreasing : RatioTrend::Nonincreasing;
}

int CoefficientSequence::support_end() const {
  switch (kind_) {
    case Kind::Exponential: return param_ == 0 ? 0 : -1;
    case Kind::Constant: return param_ == 0 ? 0 : -1;
    case Kind::Custom: return static_cast<int>(exact_list_.size()) - 1;
    default: return -1;
  }
}

// ---------------------------------------------------------------------------

BigInt diagram_count(const MultiIndexK& K) {
  BigInt num = 1;
  for (int kj : K.valences()) num *= factorial(kj);
  BigInt den = 1;
  for (int k : K.entries()) den *= factorial(k);
  return num / den;
}

DKValue coefficient_D_K(const MultiIndexK& K, const CoefficientSequence& d) {
  DKValue r;
  const auto kappa = K.valences();
  int sign = 1;
  double log_d = 0.0;
  for (int kj : kappa) {
    sign *= d.sign(kj);
    log_d += d.log_abs(kj);
  }
  r.sign = sign;
  const int total = K.total();
  if (total <= 64) {
    BigInt mult = diagram_count(K);
    std::optional<Rational> prod = Rational(mult);
    for (int kj : kappa) {
      auto e = d.exact(kj);
      if (!e) {
        prod.reset();
        break;
      }
      *prod *= *e;
    }
    r.exact = prod;
    r.log_abs = sign == 0 ? kNegInf : log_big(mult) + log_d;
    if (prod)
      r.value = prod->convert_to<double>();
    else
      r.value = sign == 0 ? 0.0 : sign * std::exp(r.log_abs);
    return r;
  }
  double lm = 0.0;
  for (int kj : kappa) lm += std::lgamma(kj + 1.0);
  for (int k : K.entries()) lm -= std::lgamma(k + 1.0);
  r.log_abs = sign == 0 ? kNegInf : lm + log_d;
  r.value = sign == 0 ? 0.0 : sign * std::exp(r.log_abs);
  // lgamma is accurate to a few ulps of its value; the error in log_abs is absolute
  double scale = 0.0;
  for (int kj : kappa) scale += std::lgamma(kj + 1.0);
  r.rel_error = 8.0 * std::numeric_limits<double>::epsilon() * (2.0 * scale + std::abs(log_d) + 1.0);
  return r;
}

namespace {

struct MatchingCounter {
  std::vector<int> vertex;  // leg -> vertex
  int n = 0;
  std::vector<int> k;       // current multiplicities
  std::map<MultiIndexK, std::uint64_t>* out = nullptr;

  void run(std::uint32_t used) {
    const int L = static_cast<int>(vertex.size());
    int first = 0;
    while (first < L && (used >> first & 1u)) ++first;
    if (first == L) {
      ++(*out)[MultiIndexK(n, k)];
      return;
    }
    used |= 1u << first;
    for (int j = first + 1; j < L; ++j) {
      if (used >> j & 1u) continue;
      if (vertex[j] == vertex[first]) continue;
      int s = MultiIndexK::slot(n, vertex[first], vertex[j]);
      ++k[s];
      run(used | (1u << j));
      --k[s];
    }
  }
};

}  // namespace

std::map<MultiIndexK, std::uint64_t> pairing_oracle(const std::vector<int>& kappa) {
  std::map<MultiIndexK, std::uint64_t> out;
  const int n = static_cast<int>(kappa.size());
  if (n < 1) throw InvalidInputError("pairing oracle needs at least one vertex");
  int total = 0;
  for (int v : kappa) {
    if (v < 0) throw InvalidInputError("negative valence");
    total += v;
  }
  if (total > 16) throw InvalidInputError("pairing oracle is limited to 16 legs");
  if (total % 2) return out;
  MatchingCounter mc;
  mc.n = n;
  mc.k.assign(MultiIndexK::slot_count(n), 0);
  for (int j = 0; j < n; ++j)
    for (int t = 0; t < kappa[j]; ++t) mc.vertex.push_back(j);
  mc.out = &out;
  mc.run(0u);
  return out;
}

WickOracleReport wick_oracle_check(int max_n, int max_legs, std::vector<WickOracleRow>* rows) {
  if (max_n < 2) throw InvalidInputError("oracle check needs max_n >= 2");
  if (max_legs > 16) throw InvalidInputError("oracle check is limited to 16 legs");
  WickOracleReport rep;
  rep.max_n = max_n;
  rep.max_legs = max_legs;
  for (int n = 2; n <= max_n; ++n) {
    std::map<std::vector<int>, std::vector<MultiIndexK>> by_valence;
    for (const auto& K : enumerate_K(n, max_legs / 2)) by_valence[K.valences()].push_back(K);

    std::vector<int> kappa(n, 0);
    // odometer over valence vectors with total <= max_legs
    while (true) {
      int total = 0;
      for (int v : kappa) total += v;
      if (total % 2 == 0) {
        ++rep.kappas;
        auto oracle = pairing_oracle(kappa);
        auto it = by_valence.find(kappa);
        std::size_t expected = it == by_valence.end() ? 0 : it->second.size();
        if (it != by_valence.end()) {
          for (const auto& K : it->second) {
            ++rep.indices;
            auto o = oracle.find(K);
            BigInt want = diagram_count(K);
            BigInt got = o == oracle.end() ? BigInt(0) : BigInt(o->second);
            if (rows) rows->push_back({kappa, K, want, got});
            if (want != got) {
              ++rep.mismatches;
              if (rep.mismatch_log.size() < 20)
                rep.mismatch_log.push_back("K=" + K.str() + " formula=" + want.str() + " oracle=" + got.str());
            }
          }
        }
        if (oracle.size() != expected) {
          ++rep.mismatches;
          if (rep.mismatch_log.size() < 20) rep.mismatch_log.push_back("oracle produced an index outside the valence class");
        }
      }
      int pos = 0;
      while (pos < n) {
        ++kappa[pos];
        int t = 0;
        for (int v : kappa) t += v;
        if (t <= max_legs) break;
        kappa[pos] = 0;
        ++pos;
      }
      if (pos == n) break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

bool coefficient_condition_holds(const CoefficientSequence& d, double A, double h, int kmax,
                                 std::optional<std::pair<int, int>>* witness, double* log_ratio) {
  if (!(A > 0) || !(h > 0)) throw InvalidInputError("A and h must be positive");
  if (kmax < 0 || kmax > 64) throw InvalidInputError("kmax must lie in [0, 64]");
  std::vector<std::optional<Rational>> ex(kmax + 1);
  std::vector<double> la(kmax + 1);
  bool all_exact = true;
  for (int k = 0; k <= kmax; ++k) {
    ex[k] = d.exact(k);
    la[k] = d.log_abs(k);
    all_exact = all_exact && ex[k].has_value();
  }
  const Rational Ar(A), hr(h);
  Rational hpow = 1;
  for (int s = 0; s <= kmax; ++s, hpow *= hr) {
    for (int k = 0; k <= s; ++k) {
      const int l = s - k;
      bool bad;
      double lr = la[k] + la[l] - (std::log(A) + s * std::log(h) + la[s]);
      if (all_exact) {
        bad = abs(*ex[k] * *ex[l]) > Ar * hpow * abs(*ex[s]);
      } else if (la[k] == kNegInf || la[l] == kNegInf) {
        bad = false;
      } else if (la[s] == kNegInf) {
        bad = true;
      } else {
        bad = lr > 1e-12 * (1.0 + std::abs(la[k] + la[l]));
      }
      if (bad) {
        if (witness) *witness = std::make_pair(k, l);
        if (log_ratio) *log_ratio = lr;
        return false;
      }
    }
  }
  return true;
}

CoefficientCondition check_coefficient_condition(const CoefficientSequence& d, int kmax, const std::vector<double>& As,
                                                 const std::vector<double>& hs) {
  if (As.empty() || hs.empty()) throw InvalidInputError("empty search grid");
  CoefficientCondition res;
  for (double A : As)
    for (double h : hs)
      if (coefficient_condition_holds(d, A, h, kmax)) {
        res.ok = true;
        res.A = A;
        res.h = h;
        return res;
      }
  res.A = As.back();
  res.h = hs.back();
  std::optional<std::pair<int, int>> w;
  double lr = 0.0;
  coefficient_condition_holds(d, res.A, res.h, kmax, &w, &lr);
  res.witness = w;
  res.witness_log_ratio = lr;
  return res;
}

// ---------------------------------------------------------------------------

MajorantSeries majorant_series(const CoefficientSequence& d, double L, double w, int max_terms) {
  if (!(L > 0) || !(w >= 0) || !std::isfinite(w)) throw InvalidInputError("majorant series needs L > 0 and finite w >= 0");
  MajorantSeries res;
  auto log_term = [&](int k) {
    double ld = d.log_abs(2 * k);
    if (ld == kNegInf) return kNegInf;
    if (k == 0) return ld;
    return k * std::log(L) + std::lgamma(k + 1.0) + ld + k * std::log(w);
  };
  if (w == 0.0) {
    res.value = std::abs(d.value(0));
    res.terms = 1;
    res.converged = true;
    return res;
  }
  const auto trend = d.ratio_trend();
  if (trend == CoefficientSequence::RatioTrend::Finite) {
    int kend = d.support_end() / 2;
    for (int k = 0; k <= kend; ++k) res.value += std::exp(log_term(k));
    res.terms = kend + 1;
    res.converged = std::isfinite(res.value);
    return res;
  }
  for (int k = 0; k < max_terms; ++k) {
    double lt = log_term(k), lt1 = log_term(k + 1), lt2 = log_term(k + 2);
    res.value += std::exp(lt);
    res.terms = k + 1;
    double ratio = std::exp(lt1 - lt);
    if (trend == CoefficientSequence::RatioTrend::Nondecreasing) {
      if (ratio >= 1.0) {
        res.divergence_index = k;
        res.divergence_log_term = lt;
        res.tail = std::numeric_limits<double>::infinity();
        return res;
      }
      continue;
    }
    double r1 = std::exp(lt2 - lt1);
    if (r1 < 1.0) {
      double tail = std::exp(lt1) / (1.0 - r1);
      if (tail <= 1e-17 * res.value || tail == 0.0) {
        res.tail = tail;
        res.converged = std::isfinite(res.value);
        return res;
      }
    }
  }
  res.divergence_index = max_terms;
  res.divergence_log_term = log_term(max_terms);
  res.tail = std::numeric_limits<double>::infinity();
  return res;
}

ConvergenceReport convergence_bound_check(const CoefficientSequence& d, const std::function<double(double)>& w,
                                          Envelope side, double exponent, double L, double epsilon,
                                          const std::vector<double>& grid) {
  if (side == Envelope::IR && !(exponent > 0)) throw InvalidInputError("IR check needs alpha > 0");
  if (side == Envelope::UV && !(exponent > 1)) throw InvalidInputError("UV check needs beta > 1");
  if (!(epsilon > 0)) throw InvalidInputError("epsilon must be positive");
  if (grid.empty()) throw InvalidInputError("empty grid");
  ConvergenceReport rep;
  double best = kNegInf;
  bool all = true;
  for (double r : grid) {
    if (!(r > 0) && side == Envelope::UV) throw InvalidInputError("UV grid must be positive");
    if (r < 0) throw InvalidInputError("grid points must be nonnegative");
    ConvergenceRow row;
    row.r = r;
    MajorantSeries s = majorant_series(d, L, w(r));
    row.lhs = s.value;
    row.tail = s.tail;
    double lw = side == Envelope::IR ? epsilon * std::pow(r, 1.0 / exponent)
                                     : epsilon * std::pow(r, -1.0 / (exponent - 1.0));
    row.weight = std::exp(lw);
    rep.rows.push_back(row);
    if (!s.converged) {
      all = false;
      if (!rep.divergence_at) {
        rep.divergence_at = r;
        rep.divergence_index = s.divergence_index;
      }
      continue;
    }
    double lc = std::log(s.value + s.tail) - lw;
    if (lc > best) {
      best = lc;
      rep.argmax = r;
    }
  }
  rep.C = all ? std::exp(best) : std::numeric_limits<double>::infinity();
  rep.ok = all && std::isfinite(rep.C);
  return rep;
}

FactorialMoment factorial_moment_bound(const CoefficientSequence& d, double L, int kmax) {
  if (!(L > 0)) throw InvalidInputError("L must be positive");
  FactorialMoment fm;
  double best = kNegInf, last = kNegInf, prev = kNegInf;
  for (int k = 0; k <= kmax; ++k) {
    double lm = std::lgamma(k + 1.0) + d.log_abs(2 * k) + k * std::log(L);
    if (lm > best) {
      best = lm;
      fm.argmax = k;
    }
    prev = last;
    last = lm;
  }
  fm.C = std::exp(best);
  const auto trend = d.ratio_trend();
  fm.decreasing_tail = trend == CoefficientSequence::RatioTrend::Finite ||
                       (trend == CoefficientSequence::RatioTrend::Nonincreasing && last < prev);
  return fm;
}

InequalityReport combinatorial_inequalities(int n, int Nmax) {
  if (n < 2 || n > 4) throw InvalidInputError("combinatorial inequalities are checked for 2 <= n <= 4");
  if (Nmax < 0 || Nmax > 8) throw InvalidInputError("combinatorial inequalities are checked for |K| <= 8");
  InequalityReport rep;
  rep.n = n;
  rep.Nmax = Nmax;
  std::vector<BigInt> fact(2 * Nmax + 1);
  for (int k = 0; k <= 2 * Nmax; ++k) fact[k] = factorial(k);
  const BigInt base = n * (2 * n - 1);
  for (const auto& K : enumerate_K(n, Nmax)) {
    const int s = K.total();
    BigInt kfact = 1;
    for (int k : K.entries()) kfact *= fact[k];
    BigInt multinomial = fact[s] / kfact;
    BigInt rhs1 = boost::multiprecision::pow(base, s);
    BigInt kappa_fact = 1;
    for (int kj : K.valences()) kappa_fact *= fact[kj];
    const BigInt& abs_kappa_fact = fact[2 * s];
    BigInt rhs3 = boost::multiprecision::pow(BigInt(4), s) * fact[s] * fact[s];
    ++rep.checked;
    if (multinomial > rhs1 || kappa_fact > abs_kappa_fact || abs_kappa_fact > rhs3) ++rep.violations;
    rep.worst_multinomial = std::max(rep.worst_multinomial, Rational(multinomial, rhs1).convert_to<double>());
    rep.worst_valence = std::max(rep.worst_valence, Rational(kappa_fact, abs_kappa_fact).convert_to<double>());
    rep.worst_central = std::max(rep.worst_central, Rational(abs_kappa_fact, rhs3).convert_to<double>());
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct LambdaProblem {
  Mat G;  // generators as columns
  int r = 2;
  Norm norm = Norm::Sup;

  // x = [w_{1,1..m}, ..., w_{r,1..m}, q_1..q_r]
  double ratio(const double* x) const {
    const int m = static_cast<int>(G.cols());
    Vec sum = Vec::Zero(G.rows());
    double qn = 0.0;
    for (int i = 0; i < r; ++i) qn += x[r * m + i] * x[r * m + i];
    if (qn <= 0.0) return 1e6;
    for (int i = 0; i < r; ++i) {
      Vec eta = Vec::Zero(G.rows());
      for (int g = 0; g < m; ++g) eta += x[i * m + g] * x[i * m + g] * G.col(g);
      double en = eclab::norm(eta, norm);
      if (en <= 1e-300) return 1e6;
      sum += (x[r * m + i] * x[r * m + i] / qn) * eta / en;
    }
    return eclab::norm(sum, norm);
  }

  static double eval(const gsl_vector* v, void* p) {
    return static_cast<LambdaProblem*>(p)->ratio(v->data);
  }
};

double nelder_mead(LambdaProblem& prob, std::vector<double> x0, int max_iter) {
  const std::size_t dim = x0.size();
  gsl_multimin_function fn{&LambdaProblem::eval, dim, &prob};
  gsl_vector* x = gsl_vector_alloc(dim);
  gsl_vector* step = gsl_vector_alloc(dim);
  double best = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 3; ++restart) {
    for (std::size_t i = 0; i < dim; ++i) gsl_vector_set(x, i, x0[i]);
    gsl_vector_set_all(step, restart == 0 ? 0.5 : 0.1);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
    gsl_multimin_fminimizer_set(s, &fn, x, step);
    for (int it = 0; it < max_iter; ++it) {
      if (gsl_multimin_fminimizer_iterate(s)) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-12) == GSL_SUCCESS) break;
    }
    best = std::min(best, s->fval);
    for (std::size_t i = 0; i < dim; ++i) x0[i] = gsl_vector_get(s->x, i);
    gsl_multimin_fminimizer_free(s);
  }
  gsl_vector_free(x);
  gsl_vector_free(step);
  return best;
}

}  // namespace

LambdaResult lambda_constant(const Cone& cone, int max_terms, const LambdaOptions& opt) {
  if (max_terms < 2) throw InvalidInputError("lambda needs at least two terms");
  if (!cone.is_convex()) throw UnsupportedError("lambda is computed for convex cones");
  const PolyCone& pc = cone.convex();
  if (pc.is_degenerate()) throw HypothesisViolated("cone is {0}");
  if (!pc.is_pointed()) throw HypothesisViolated("cone contains a line, so lambda = 0");

  LambdaResult res;
  res.norm = opt.norm;
  LambdaProblem prob;
  prob.G = pc.generator_matrix();
  prob.norm = opt.norm;
  const int m = static_cast<int>(prob.G.cols());
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(0.1, 1.0);

  // Splitting a term into generator pieces never lowers Σ|η_i|, so with
  // enough terms λ is the norm of the closest point of conv{ĝ_1..ĝ_m}.
  Mat Gh = prob.G;
  for (int g = 0; g < m; ++g) Gh.col(g) /= eclab::norm(Vec(prob.G.col(g)), opt.norm);
  const int k = static_cast<int>(Gh.rows());
  Vec u;
  if (opt.norm == Norm::Euclidean) {
    // min |Gh u|² + (Σu - 1)² is attained at a multiple of the closest point
    Mat A(k + 1, m);
    A.topRows(k) = Gh;
    A.row(k).setOnes();
    Vec b = Vec::Zero(k + 1);
    b(k) = 1.0;
    u = lp::nnls(A, b);
  } else {
    // maximize -τ subject to ±Gh u <= τ, Σu = 1, (u, τ) >= 0
    Mat A = Mat::Zero(2 * k + 2, m + 1);
    A.block(0, 0, k, m) = Gh;
    A.block(k, 0, k, m) = -Gh;
    A.block(0, m, 2 * k, 1).setConstant(-1.0);
    A.block(2 * k, 0, 1, m).setOnes();
    A.block(2 * k + 1, 0, 1, m).setConstant(-1.0);
    Vec b = Vec::Zero(2 * k + 2);
    b(2 * k) = 1.0;
    b(2 * k + 1) = -1.0;
    Vec c = Vec::Zero(m + 1);
    c(m) = -1.0;
    auto sol = lp::maximize(A, b, c);
    if (sol.status != lp::Status::Optimal) throw NumericalFailure("lambda linear program did not solve");
    u = sol.x.head(m);
  }
  u = u.cwiseMax(0.0);
  if (!(u.sum() > 0)) throw NumericalFailure("closest-point solve returned zero weights");
  u /= u.sum();
  const double hull = eclab::norm(Vec(Gh * u), opt.norm);
  int support = 0;
  for (int g = 0; g < m; ++g) support += u(g) > 1e-12;
  res.hull_value = hull;
  res.hull_support = support;

  res.lambda = std::numeric_limits<double>::infinity();
  for (int r = 2; r <= max_terms; ++r) {
    prob.r = r;
    if (r >= support) {
      res.per_terms.push_back(hull);
      if (hull < res.lambda) {
        res.lambda = hull;
        res.argmin_terms = r;
      }
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < opt.starts; ++s) {
      std::vector<double> x0(r * m + r);
      for (auto& v : x0) v = uni(rng);
      if (s % 2 == 1) {
        // sparse start: one generator per term
        for (int i = 0; i < r; ++i) {
          int g = static_cast<int>(rng() % m);
          for (int t = 0; t < m; ++t) x0[i * m + t] = t == g ? 1.0 : 0.0;
        }
      }
      best = std::min(best, nelder_mead(prob, x0, opt.max_iter));
    }
    res.per_terms.push_back(best);
    if (best < res.lambda) {
      res.lambda = best;
      res.argmin_terms = r;
    }
  }

  std::exponential_distribution<double> expo(1.0);
  double cert = std::numeric_limits<double>::infinity();
  for (int t = 0; t < opt.samples; ++t) {
    int r = 2 + static_cast<int>(rng() % (max_terms - 1));
    Vec sum = Vec::Zero(prob.G.rows());
    double total = 0.0;
    for (int i = 0; i < r; ++i) {
      Vec eta = Vec::Zero(prob.G.rows());
      if (rng() % 2) {
        eta = prob.G.col(static_cast<Eigen::Index>(rng() % m));
      } else {
        for (int g = 0; g < m; ++g) eta += expo(rng) * prob.G.col(g);
      }
      eta *= expo(rng);
      sum += eta;
      total += eclab::norm(eta, opt.norm);
    }
    if (total > 0) cert = std::min(cert, eclab::norm(sum, opt.norm) / total);
  }
  res.certificate_min = cert;
  res.certificate_samples = static_cast<std::size_t>(opt.samples);
  res.certified = cert >= res.lambda - 1e-9;
  return res;
}

}  // namespace eclab
