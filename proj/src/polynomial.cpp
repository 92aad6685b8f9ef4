#include "eclab/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "eclab/errors.hpp"

namespace eclab {

void Polynomial::add(const Exponent& e, Complex c) {
  if (c == Complex(0.0)) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second == Complex(0.0)) terms_.erase(it);
}

Polynomial Polynomial::constant(int vars, Complex c) {
  Polynomial p(vars);
  p.add(Exponent(vars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int vars, int j) {
  if (j < 0 || j >= vars) throw DimensionError("polynomial variable index out of range");
  Polynomial p(vars);
  Exponent e(vars, 0);
  e[j] = 1;
  p.add(e, 1.0);
  return p;
}

int Polynomial::degree_in(int j) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[j]);
  return d;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int v : e) s += v;
    d = std::max(d, s);
  }
  return d;
}

Complex Polynomial::operator()(const CVec& w) const {
  if (w.size() != vars_) throw DimensionError("polynomial evaluated at point of wrong dimension");
  Complex sum = 0.0;
  for (const auto& [e, c] : terms_) {
    Complex t = c;
    for (int j = 0; j < vars_; ++j)
      for (int r = 0; r < e[j]; ++r) t *= w(j);
    sum += t;
  }
  return sum;
}

Polynomial Polynomial::derivative(int j) const {
  Polynomial d(vars_);
  for (const auto& [e0, c] : terms_) {
    if (e0[j] == 0) continue;
    Complex f = c * static_cast<double>(e0[j]);
    Exponent e = e0;
    --e[j];
    d.add(e, f);
  }
  return d;
}

Polynomial Polynomial::embed(int total, int offset) const {
  if (offset < 0 || offset + vars_ > total) throw DimensionError("polynomial embedding out of range");
  Polynomial p(total);
  for (const auto& [e, c] : terms_) {
    Exponent f(total, 0);
    for (int j = 0; j < vars_; ++j) f[offset + j] = e[j];
    p.add(f, c);
  }
  return p;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (o.vars_ != vars_) throw DimensionError("adding polynomials in different variables");
  Polynomial p = *this;
  for (const auto& [e, c] : o.terms_) p.add(e, c);
  return p;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (o.vars_ != vars_) throw DimensionError("multiplying polynomials in different variables");
  Polynomial p(vars_);
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) {
      Exponent e(vars_);
      for (int j = 0; j < vars_; ++j) e[j] = e1[j] + e2[j];
      p.add(e, c1 * c2);
    }
  return p;
}

Polynomial Polynomial::operator*(Complex c) const {
  Polynomial p(vars_);
  for (const auto& [e, v] : terms_) p.add(e, v * c);
  return p;
}

Polynomial Polynomial::pow(int n) const {
  if (n < 0) throw InvalidInputError("negative polynomial power");
  Polynomial r = constant(vars_, 1.0);
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    const Complex c = it->second;
    if (c.imag() == 0.0) os << c.real();
    else os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "*i)";
    for (int j = 0; j < vars_; ++j) {
      if (it->first[j] == 0) continue;
      os << "*w" << j + 1;
      if (it->first[j] > 1) os << "^" << it->first[j];
    }
  }
  return os.str();
}

// ----------------------------------------------------------------- parsing

namespace {

class PolyParser {
 public:
  PolyParser(int vars, std::string_view s) : vars_(vars), s_(s) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return p;
  }

 private:
  int vars_;
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& m) const {
    throw ParseError("polynomial: " + m + " at offset " + std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool starts_primary() {
    char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'w' || c == 'i' || c == '(';
  }

  Polynomial expr() {
    Polynomial p = term();
    while (true) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        p = p + term();
      } else if (c == '-') {
        ++pos_;
        p = p - term();
      } else {
        return p;
      }
    }
  }
  Polynomial term() {
    Polynomial p = unary();
    while (true) {
      if (peek() == '*') {
        ++pos_;
        p = p * unary();
      } else if (starts_primary()) {
        p = p * unary();  // implicit product, e.g. 2w1
      } else {
        return p;
      }
    }
  }
  Polynomial unary() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      return -unary();
    }
    if (c == '+') {
      ++pos_;
      return unary();
    }
    return power();
  }
  Polynomial power() {
    Polynomial b = primary();
    if (peek() == '^') {
      ++pos_;
      skip();
      std::size_t st = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (st == pos_) fail("expected integer exponent");
      b = b.pow(std::stoi(std::string(s_.substr(st, pos_ - st))));
    }
    return b;
  }
  Polynomial primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return p;
    }
    if (c == 'i') {
      ++pos_;
      return Polynomial::constant(vars_, Complex(0.0, 1.0));
    }
    if (c == 'w') {
      ++pos_;
      std::size_t st = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (st == pos_) fail("expected variable index");
      int j = std::stoi(std::string(s_.substr(st, pos_ - st)));
      if (j < 1 || j > vars_) fail("variable w" + std::to_string(j) + " out of range");
      return Polynomial::variable(vars_, j - 1);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string tail(s_.substr(pos_));
      std::size_t used = 0;
      double v = std::stod(tail, &used);
      pos_ += used;
      return Polynomial::constant(vars_, v);
    }
    fail("expected number, variable, i or '('");
  }
};

}  // namespace

Polynomial Polynomial::parse(int vars, std::string_view text) {
  if (vars <= 0) throw DimensionError("polynomial needs at least one variable");
  return PolyParser(vars, text).parse();
}

}  // namespace eclab
