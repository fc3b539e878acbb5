#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subspec/error.hpp"
#include "subspec/rational.hpp"

namespace subspec {

using Exponents = std::vector<int>;

/// Graded lexicographic order: total degree first, then lexicographic with x_1 > x_2 > ...
struct GradedLex {
  bool operator()(const Exponents& a, const Exponents& b) const {
    int da = std::accumulate(a.begin(), a.end(), 0);
    int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

/// Sparse multivariate polynomial with exact rational coefficients.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, Rational, GradedLex>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c) {
    Polynomial p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
  }

  static Polynomial variable(std::size_t nvars, std::size_t i) {
    Exponents e(nvars, 0);
    e.at(i) = 1;
    Polynomial p(nvars);
    p.add_term(std::move(e), Rational(1));
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && degree() == 0);
  }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    if (terms_.empty()) return -1;
    const auto& top = terms_.rbegin()->first;
    return std::accumulate(top.begin(), top.end(), 0);
  }

  int degree_in(std::size_t var) const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
  }

  int weighted_degree(std::span<const int> weights) const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
      int w = 0;
      for (std::size_t i = 0; i < nvars_; ++i) w += e[i] * weights[i];
      d = std::max(d, w);
    }
    return d;
  }

  Rational coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const { return coefficient(Exponents(nvars_, 0)); }

  void add_term(Exponents e, const Rational& c) {
    if (e.size() != nvars_) throw Error(ErrorKind::InvalidArgument, "monomial arity mismatch");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, Rational(-c));
    return *this;
  }

  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  Polynomial operator-() const { return *this * Rational(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_arity(b);
    Polynomial out(a.nvars_);
    Exponents e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }

  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Polynomial pow(unsigned k) const {
    Polynomial result = constant(nvars_, 1);
    Polynomial base = *this;
    while (k) {
      if (k & 1u) result *= base;
      k >>= 1u;
      if (k) base *= base;
    }
    return result;
  }

  Polynomial derivative(std::size_t var) const {
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponents d = e;
      --d[var];
      out.add_term(std::move(d), c * e[var]);
    }
    return out;
  }

  /// Substitute x_i -> subs[i]; every substitute shares one arity which becomes the result's.
  Polynomial compose(const std::vector<Polynomial>& subs) const {
    if (subs.size() != nvars_) throw Error(ErrorKind::InvalidArgument, "compose: substitution count mismatch");
    std::size_t m = subs.empty() ? 0 : subs.front().nvars();
    Polynomial out(m);
    std::vector<std::vector<Polynomial>> powers(nvars_);
    auto power_of = [&](std::size_t i, int k) -> const Polynomial& {
      auto& cache = powers[i];
      if (cache.empty()) cache.push_back(constant(m, 1));
      while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * subs[i]);
      return cache[k];
    };
    for (const auto& [e, c] : terms_) {
      Polynomial term = constant(m, c);
      for (std::size_t i = 0; i < nvars_; ++i)
        if (e[i] > 0) term *= power_of(i, e[i]);
      out += term;
    }
    return out;
  }

  Rational evaluate(std::span<const Rational> x) const {
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < nvars_; ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      sum += t;
    }
    return sum;
  }

  double evaluate(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = to_double(c);
      for (std::size_t i = 0; i < nvars_; ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      sum += t;
    }
    return sum;
  }

  /// Conservative range over the box [lo, hi].
  std::pair<double, double> bounds(std::span<const double> lo, std::span<const double> hi) const {
    double total_lo = 0.0, total_hi = 0.0;
    for (const auto& [e, c] : terms_) {
      double tlo = to_double(c), thi = tlo;
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        double a = std::pow(lo[i], e[i]), b = std::pow(hi[i], e[i]);
        double plo = std::min(a, b), phi = std::max(a, b);
        if (e[i] % 2 == 0 && lo[i] < 0.0 && hi[i] > 0.0) plo = 0.0;
        double cands[4] = {tlo * plo, tlo * phi, thi * plo, thi * phi};
        tlo = *std::min_element(cands, cands + 4);
        thi = *std::max_element(cands, cands + 4);
      }
      total_lo += tlo;
      total_hi += thi;
    }
    return {total_lo, total_hi};
  }

  /// Human-readable form, highest graded-lex term first, e.g. "x^2 - 1".
  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      bool negative = c < 0;
      Rational mag = abs(c);
      std::string mono;
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += i < names.size() ? names[i] : "x" + std::to_string(i + 1);
        if (e[i] > 1) mono += "^" + std::to_string(e[i]);
      }
      std::string coef = subspec::to_string(mag);
      std::string piece;
      if (mono.empty()) piece = coef;
      else if (mag == 1) piece = mono;
      else piece = coef + "*" + mono;
      if (first) out = (negative ? "-" : "") + piece;
      else out += (negative ? " - " : " + ") + piece;
      first = false;
    }
    return out;
  }

 private:
  void check_arity(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw Error(ErrorKind::InvalidArgument, "polynomial arity mismatch");
  }

  std::size_t nvars_ = 0;
  TermMap terms_;
};

/// Flattened double-precision copy for hot evaluation loops.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p) : nvars_(p.nvars()) {
    for (const auto& [e, c] : p.terms()) {
      coef_.push_back(to_double(c));
      exps_.insert(exps_.end(), e.begin(), e.end());
    }
  }

  bool is_zero() const { return coef_.empty(); }

  double operator()(std::span<const double> x) const {
    double sum = 0.0;
    const int* e = exps_.data();
    for (double c : coef_) {
      double t = c;
      for (std::size_t i = 0; i < nvars_; ++i, ++e)
        for (int k = 0; k < *e; ++k) t *= x[i];
      sum += t;
    }
    return sum;
  }

 private:
  std::size_t nvars_ = 0;
  std::vector<double> coef_;
  std::vector<int> exps_;
};

}  // namespace subspec
