#pragma once

// Exact univariate rational functions in N over Q, and the falling-factorial
// ratios L_H(N) that the trace formulas are built from.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wordmeasure/core_graph.hpp"

namespace wm {

/// Dense polynomial in N with rational coefficients, lowest degree first.
/// Trailing zeros are never stored; the zero polynomial is empty.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<mpq_class> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Polynomial constant(const mpq_class& a) { return Polynomial(std::vector<mpq_class>{a}); }
  static Polynomial monomial(const mpq_class& a, int degree) {
    std::vector<mpq_class> c(static_cast<std::size_t>(degree) + 1, 0);
    c.back() = a;
    return Polynomial(std::move(c));
  }
  /// N - k.
  static Polynomial shifted(long k) { return Polynomial(std::vector<mpq_class>{mpq_class(-k), mpq_class(1)}); }

  [[nodiscard]] bool is_zero() const { return c_.empty(); }
  [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }
  [[nodiscard]] const mpq_class& leading() const { return c_.back(); }
  [[nodiscard]] const std::vector<mpq_class>& coefficients() const { return c_; }
  [[nodiscard]] mpq_class coeff(int i) const {
    return i >= 0 && i < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(i)] : mpq_class(0);
  }

  [[nodiscard]] mpq_class evaluate(const mpq_class& x) const {
    mpq_class acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<mpq_class> c(std::max(a.c_.size(), b.c_.size()), 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a) {
    std::vector<mpq_class> c = a.c_;
    for (auto& x : c) x = -x;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<mpq_class> c(a.c_.size() + b.c_.size() - 1, 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const mpq_class& s, const Polynomial& a) {
    std::vector<mpq_class> c = a.c_;
    for (auto& x : c) x *= s;
    return Polynomial(std::move(c));
  }

  /// Euclidean division: a = q*b + r with deg r < deg b.
  static std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<mpq_class> rem = a.c_;
    const int db = b.degree();
    std::vector<mpq_class> quot(rem.size() > b.c_.size() ? rem.size() - b.c_.size() + 1 : 1, 0);
    for (int d = static_cast<int>(rem.size()) - 1; d >= db; --d) {
      const mpq_class f = rem[static_cast<std::size_t>(d)] / b.leading();
      if (f == 0) continue;
      quot[static_cast<std::size_t>(d - db)] = f;
      for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(d - db + j)] -= f * b.c_[static_cast<std::size_t>(j)];
    }
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
  }

  /// Monic gcd (zero only if both are zero).
  static Polynomial gcd(Polynomial a, Polynomial b) {
    while (!b.is_zero()) {
      Polynomial r = divmod(a, b).second;
      a = std::move(b);
      b = std::move(r);
    }
    if (a.is_zero()) return a;
    return mpq_class(1 / a.leading()) * a;
  }

  /// e.g. "3N - 4", "N^2 - N", "(1/2)N^3 + 1".
  [[nodiscard]] std::string to_string(const std::string& var = "N") const {
    if (is_zero()) return "0";
    std::string out;
    for (int d = degree(); d >= 0; --d) {
      mpq_class a = c_[static_cast<std::size_t>(d)];
      if (a == 0) continue;
      const bool negative = a < 0;
      if (negative) a = -a;
      if (out.empty())
        out += negative ? "-" : "";
      else
        out += negative ? " - " : " + ";
      if (d == 0)
        out += a.get_str();
      else if (a.get_den() != 1)
        out += "(" + a.get_str() + ")";
      else if (a != 1)
        out += a.get_str();
      if (d >= 1) out += var;
      if (d >= 2) out += "^" + std::to_string(d);
    }
    return out;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<mpq_class> c_;
};

/// One term of an expansion in descending powers of N.
struct LaurentTerm {
  int exponent = 0;
  mpq_class coefficient;
  friend bool operator==(const LaurentTerm&, const LaurentTerm&) = default;
};
using LaurentPrefix = std::vector<LaurentTerm>;

/// numerator / denominator, coprime with monic denominator; zero is 0/1.
/// n_min is the smallest N at which the identity this function represents
/// is claimed to hold.
class RationalFunction {
 public:
  RationalFunction() : den_(Polynomial::constant(1)) {}
  RationalFunction(Polynomial num, Polynomial den, long n_min = 1)
      : num_(std::move(num)), den_(std::move(den)), n_min_(n_min) {
    normalize();
  }

  static RationalFunction constant(const mpq_class& a) { return {Polynomial::constant(a), Polynomial::constant(1)}; }
  /// N^e for any integer e.
  static RationalFunction power_of_n(int e) {
    if (e >= 0) return {Polynomial::monomial(1, e), Polynomial::constant(1)};
    return {Polynomial::constant(1), Polynomial::monomial(1, -e)};
  }

  [[nodiscard]] const Polynomial& numerator() const { return num_; }
  [[nodiscard]] const Polynomial& denominator() const { return den_; }
  [[nodiscard]] long n_min() const { return n_min_; }
  [[nodiscard]] bool is_zero() const { return num_.is_zero(); }
  [[nodiscard]] RationalFunction with_n_min(long n) const {
    RationalFunction f = *this;
    f.n_min_ = n;
    return f;
  }

  /// Exact value at an integer N >= n_min.
  [[nodiscard]] mpq_class evaluate_at(long n) const {
    if (n < n_min_)
      throw std::domain_error("evaluation at N=" + std::to_string(n) + " below validity threshold " +
                              std::to_string(n_min_));
    const mpq_class x(n);
    const mpq_class d = den_.evaluate(x);
    if (d == 0) throw std::domain_error("denominator vanishes at N=" + std::to_string(n));
    return num_.evaluate(x) / d;
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_, std::max(a.n_min_, b.n_min_)};
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_, std::max(a.n_min_, b.n_min_)};
  }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.num_, a.den_ * b.den_, std::max(a.n_min_, b.n_min_)};
  }

  /// Compares normalized forms; n_min is not part of equality.
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  /// "num / den", multi-term parts parenthesized: "(3N - 4) / (N^2 - N)".
  [[nodiscard]] std::string to_string() const {
    auto part = [](const Polynomial& p) {
      std::string s = p.to_string();
      return s.find(' ') == std::string::npos ? s : "(" + s + ")";
    };
    return part(num_) + " / " + part(den_);
  }

 private:
  void normalize() {
    if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
    if (num_.is_zero()) {
      den_ = Polynomial::constant(1);
      return;
    }
    const Polynomial g = Polynomial::gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = Polynomial::divmod(num_, g).first;
      den_ = Polynomial::divmod(den_, g).first;
    }
    const mpq_class lc = den_.leading();
    if (lc != 1) {
      num_ = mpq_class(1 / lc) * num_;
      den_ = mpq_class(1 / lc) * den_;
    }
  }

  Polynomial num_;
  Polynomial den_;
  long n_min_ = 1;
};

/// The first `depth` nonzero terms of f as N -> infinity, by long division in
/// descending powers. Shorter when the expansion terminates; empty for 0.
inline LaurentPrefix laurent_prefix(const RationalFunction& f, int depth) {
  if (depth < 1) throw std::invalid_argument("laurent_prefix depth must be >= 1");
  LaurentPrefix out;
  const Polynomial& den = f.denominator();
  const int q = den.degree();
  std::map<int, mpq_class> rem;
  for (int i = 0; i <= f.numerator().degree(); ++i)
    if (f.numerator().coeff(i) != 0) rem[i] = f.numerator().coeff(i);
  while (static_cast<int>(out.size()) < depth && !rem.empty()) {
    const auto top = std::prev(rem.end());
    const int k = top->first - q;
    const mpq_class c = top->second / den.leading();
    out.push_back({k, c});
    for (int j = 0; j <= q; ++j) {
      const mpq_class& dj = den.coefficients()[static_cast<std::size_t>(j)];
      if (dj == 0) continue;
      mpq_class& slot = rem[k + j];
      slot -= c * dj;
      if (slot == 0) rem.erase(k + j);
    }
  }
  return out;
}

/// prod_k (N - k)^{exponents[k]}, valid (all factors positive) for N >= n_min.
struct FallingFactorialRatio {
  std::vector<int> exponents;
  long n_min = 1;
};

/// L_H(N) = N(N-1)...(N-#V+1) / prod_i N(N-1)...(N-#E_i+1) in factored form.
inline FallingFactorialRatio l_factors(const CoreGraph& g) {
  int longest = g.num_vertices();
  long n_min = 1;
  for (int label = 1; label <= g.ambient_rank(); ++label) {
    longest = std::max(longest, g.edge_count(label));
    n_min = std::max(n_min, static_cast<long>(g.edge_count(label)));
  }
  FallingFactorialRatio f;
  f.exponents.assign(static_cast<std::size_t>(longest), 0);
  for (int k = 0; k < g.num_vertices(); ++k) ++f.exponents[static_cast<std::size_t>(k)];
  for (int label = 1; label <= g.ambient_rank(); ++label)
    for (int k = 0; k < g.edge_count(label); ++k) --f.exponents[static_cast<std::size_t>(k)];
  f.n_min = n_min;
  return f;
}

/// Sum of factored ratios over a common denominator, normalized once.
/// Summation order is the input order.
inline RationalFunction sum_falling_ratios(const std::vector<FallingFactorialRatio>& terms) {
  if (terms.empty()) return {};
  std::size_t width = 0;
  long n_min = 1;
  for (const auto& t : terms) {
    width = std::max(width, t.exponents.size());
    n_min = std::max(n_min, t.n_min);
  }
  std::vector<int> common(width, 0);
  for (const auto& t : terms)
    for (std::size_t k = 0; k < t.exponents.size(); ++k) common[k] = std::max(common[k], -t.exponents[k]);

  Polynomial numerator;
  for (const auto& t : terms) {
    Polynomial p = Polynomial::constant(1);
    for (std::size_t k = 0; k < width; ++k) {
      const int e = (k < t.exponents.size() ? t.exponents[k] : 0) + common[k];
      for (int j = 0; j < e; ++j) p = p * Polynomial::shifted(static_cast<long>(k));
    }
    numerator = numerator + p;
  }
  Polynomial denominator = Polynomial::constant(1);
  for (std::size_t k = 0; k < width; ++k)
    for (int j = 0; j < common[k]; ++j) denominator = denominator * Polynomial::shifted(static_cast<long>(k));
  return {std::move(numerator), std::move(denominator), n_min};
}

inline RationalFunction l_term(const CoreGraph& g) { return sum_falling_ratios({l_factors(g)}); }

/// Exact integer string of a rational, or "p/q".
inline std::string to_exact_string(const mpq_class& q) { return q.get_str(); }

}  // namespace wm
