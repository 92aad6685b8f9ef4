#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "eclab/types.hpp"

namespace eclab {

/// Polynomial in w_1..w_k with complex coefficients, stored sparsely by
/// exponent vector.
class Polynomial {
 public:
  using Exponent = std::vector<int>;

  explicit Polynomial(int vars = 0) : vars_(vars) {}
  static Polynomial constant(int vars, Complex c);
  static Polynomial variable(int vars, int j);  // w_{j+1}

  /// Parses "-w1^2 + 2*w1*w2 - (1+i)*w2^3". Variables are w1..wk.
  static Polynomial parse(int vars, std::string_view text);

  int vars() const { return vars_; }
  const std::map<Exponent, Complex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree_in(int j) const;
  int total_degree() const;

  Complex operator()(const CVec& w) const;
  Complex operator()(const Vec& x) const { return (*this)(CVec(x.cast<Complex>())); }

  Polynomial derivative(int j) const;
  /// Same polynomial viewed in `total` variables, with w_j -> w_{j+offset}.
  Polynomial embed(int total, int offset) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(Complex c) const;
  Polynomial operator-() const { return *this * Complex(-1.0); }
  Polynomial pow(int n) const;

  std::string str() const;

 private:
  void add(const Exponent& e, Complex c);
  int vars_;
  std::map<Exponent, Complex> terms_;
};

}  // namespace eclab
