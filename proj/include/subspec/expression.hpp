#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subspec/error.hpp"
#include "subspec/group_model.hpp"
#include "subspec/polynomial.hpp"
#include "subspec/rational.hpp"
#include "subspec/vector_field.hpp"

namespace subspec {

enum class ExprOp { Const, Var, Add, Mul, Pow, Exp, Log, Abs, Norm };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op;
  Rational value;  // Const: the constant; Pow: the exponent
  std::size_t var = 0;
  std::vector<ExprPtr> args;
};

/// Immutable closed-form expression over exponential coordinates. Smart constructors fold
/// constants and flatten sums/products, so derivatives of polynomials stay compact.
class Expr {
 public:
  Expr() : Expr(constant(0)) {}
  explicit Expr(ExprPtr node) : node_(std::move(node)) {}

  static Expr constant(const Rational& c) { return Expr(make(ExprOp::Const, c)); }
  static Expr variable(std::size_t i) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Var;
    n->var = i;
    return Expr(n);
  }
  static Expr norm() { return Expr(make(ExprOp::Norm)); }

  const ExprNode& node() const { return *node_; }
  ExprOp op() const { return node_->op; }

  std::optional<Rational> constant_value() const {
    if (op() == ExprOp::Const) return node_->value;
    return std::nullopt;
  }
  bool is_zero() const { return op() == ExprOp::Const && node_->value == 0; }
  bool is_one() const { return op() == ExprOp::Const && node_->value == 1; }

  friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
  friend Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
  friend Expr operator-(const Expr& a) { return constant(-1) * a; }
  friend Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return a * b.pow(Rational(-1)); }

  static Expr sum(const std::vector<Expr>& terms) {
    Rational c = 0;
    std::vector<ExprPtr> args;
    for (const auto& t : terms) {
      if (t.op() == ExprOp::Const) c += t.node_->value;
      else if (t.op() == ExprOp::Add)
        for (const auto& a : t.node_->args) {
          if (a->op == ExprOp::Const) c += a->value;
          else args.push_back(a);
        }
      else args.push_back(t.node_);
    }
    if (c != 0) args.insert(args.begin(), make(ExprOp::Const, c));
    if (args.empty()) return constant(0);
    if (args.size() == 1) return Expr(args.front());
    return Expr(make(ExprOp::Add, Rational(0), std::move(args)));
  }

  static Expr product(const std::vector<Expr>& factors) {
    Rational c = 1;
    std::vector<ExprPtr> args;
    for (const auto& f : factors) {
      if (f.op() == ExprOp::Const) c *= f.node_->value;
      else if (f.op() == ExprOp::Mul)
        for (const auto& a : f.node_->args) {
          if (a->op == ExprOp::Const) c *= a->value;
          else args.push_back(a);
        }
      else args.push_back(f.node_);
    }
    if (c == 0) return constant(0);
    if (c != 1) args.insert(args.begin(), make(ExprOp::Const, c));
    if (args.empty()) return constant(c);
    if (args.size() == 1) return Expr(args.front());
    return Expr(make(ExprOp::Mul, Rational(0), std::move(args)));
  }

  Expr pow(const Rational& q) const {
    if (q == 0) return constant(1);
    if (q == 1) return *this;
    if (op() == ExprOp::Const && q.get_den() == 1) {
      const Rational& b = node_->value;
      if (b == 0 && q < 0) throw Error(ErrorKind::PotentialNotEvaluable, "0 raised to a negative power");
      mpz_class e = ::abs(q.get_num());
      Rational r = 1;
      for (mpz_class k = 0; k < e; ++k) r *= b;
      return constant(q < 0 ? Rational(1 / r) : r);
    }
    if (op() == ExprOp::Pow && node_->value.get_den() == 1 && q.get_den() == 1)
      return Expr(node_->args.front()).pow(node_->value * q);
    return Expr(make(ExprOp::Pow, q, {node_}));
  }

  Expr exp() const {
    if (is_zero()) return constant(1);
    return Expr(make(ExprOp::Exp, Rational(0), {node_}));
  }
  Expr log() const {
    if (is_one()) return constant(0);
    return Expr(make(ExprOp::Log, Rational(0), {node_}));
  }
  Expr abs() const {
    if (auto c = constant_value()) return constant(::abs(*c));
    return Expr(make(ExprOp::Abs, Rational(0), {node_}));
  }

  bool uses_norm() const {
    if (op() == ExprOp::Norm) return true;
    for (const auto& a : node_->args)
      if (Expr(a).uses_norm()) return true;
    return false;
  }

  /// Symbolic partial derivative in exponential coordinate i.
  Expr derivative(std::size_t i) const {
    const auto& n = *node_;
    switch (n.op) {
      case ExprOp::Const: return constant(0);
      case ExprOp::Var: return constant(n.var == i ? 1 : 0);
      case ExprOp::Add: {
        std::vector<Expr> terms;
        for (const auto& a : n.args) terms.push_back(Expr(a).derivative(i));
        return sum(terms);
      }
      case ExprOp::Mul: {
        std::vector<Expr> terms;
        for (std::size_t k = 0; k < n.args.size(); ++k) {
          Expr dk = Expr(n.args[k]).derivative(i);
          if (dk.is_zero()) continue;
          std::vector<Expr> f;
          for (std::size_t l = 0; l < n.args.size(); ++l) f.push_back(l == k ? dk : Expr(n.args[l]));
          terms.push_back(product(f));
        }
        return sum(terms);
      }
      case ExprOp::Pow: {
        Expr base(n.args.front());
        Expr db = base.derivative(i);
        if (db.is_zero()) return constant(0);
        return constant(n.value) * base.pow(n.value - 1) * db;
      }
      case ExprOp::Exp: {
        Expr da = Expr(n.args.front()).derivative(i);
        return da.is_zero() ? constant(0) : *this * da;
      }
      case ExprOp::Log: {
        Expr a(n.args.front());
        Expr da = a.derivative(i);
        return da.is_zero() ? constant(0) : da / a;
      }
      case ExprOp::Abs: {
        Expr a(n.args.front());
        Expr da = a.derivative(i);
        return da.is_zero() ? constant(0) : a * abs().pow(Rational(-1)) * da;
      }
      case ExprOp::Norm:
        throw Error(ErrorKind::NotDifferentiable, "norm() has no symbolic derivative (not smooth at the identity)");
    }
    return constant(0);
  }

  /// Exact polynomial if the expression is one (sums, products, nonnegative integer powers).
  std::optional<Polynomial> to_polynomial(std::size_t nvars) const {
    const auto& n = *node_;
    switch (n.op) {
      case ExprOp::Const: return Polynomial::constant(nvars, n.value);
      case ExprOp::Var:
        if (n.var >= nvars) return std::nullopt;
        return Polynomial::variable(nvars, n.var);
      case ExprOp::Add: {
        Polynomial p(nvars);
        for (const auto& a : n.args) {
          auto q = Expr(a).to_polynomial(nvars);
          if (!q) return std::nullopt;
          p += *q;
        }
        return p;
      }
      case ExprOp::Mul: {
        Polynomial p = Polynomial::constant(nvars, 1);
        for (const auto& a : n.args) {
          auto q = Expr(a).to_polynomial(nvars);
          if (!q) return std::nullopt;
          p *= *q;
        }
        return p;
      }
      case ExprOp::Pow: {
        if (n.value.get_den() != 1 || n.value < 0) return std::nullopt;
        auto q = Expr(n.args.front()).to_polynomial(nvars);
        if (!q) return std::nullopt;
        return q->pow(static_cast<unsigned>(n.value.get_num().get_ui()));
      }
      default: return std::nullopt;
    }
  }

  std::string to_string(const std::vector<std::string>& names) const {
    const auto& n = *node_;
    auto wrap = [&](const ExprPtr& a) {
      std::string s = Expr(a).to_string(names);
      bool atomic = a->op == ExprOp::Var || a->op == ExprOp::Exp || a->op == ExprOp::Log || a->op == ExprOp::Abs ||
                    a->op == ExprOp::Norm || (a->op == ExprOp::Const && a->value >= 0 && a->value.get_den() == 1);
      return atomic ? s : "(" + s + ")";
    };
    switch (n.op) {
      case ExprOp::Const: return subspec::to_string(n.value);
      case ExprOp::Var: return n.var < names.size() ? names[n.var] : "x" + std::to_string(n.var + 1);
      case ExprOp::Add: {
        std::string s;
        for (std::size_t k = 0; k < n.args.size(); ++k) s += (k ? " + " : "") + Expr(n.args[k]).to_string(names);
        return s;
      }
      case ExprOp::Mul: {
        std::string s;
        for (std::size_t k = 0; k < n.args.size(); ++k) s += (k ? "*" : "") + wrap(n.args[k]);
        return s;
      }
      case ExprOp::Pow: {
        std::string e = subspec::to_string(n.value);
        if (n.value < 0 || n.value.get_den() != 1) e = "(" + e + ")";
        return wrap(n.args.front()) + "^" + e;
      }
      case ExprOp::Exp: return "exp(" + Expr(n.args.front()).to_string(names) + ")";
      case ExprOp::Log: return "log(" + Expr(n.args.front()).to_string(names) + ")";
      case ExprOp::Abs: return "abs(" + Expr(n.args.front()).to_string(names) + ")";
      case ExprOp::Norm: return "norm()";
    }
    return "?";
  }

 private:
  static ExprPtr make(ExprOp op, const Rational& value = Rational(0), std::vector<ExprPtr> args = {}) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->value = value;
    n->args = std::move(args);
    return n;
  }

  ExprPtr node_;
};

inline Expr from_polynomial(const Polynomial& p) {
  std::vector<Expr> terms;
  for (const auto& [e, c] : p.terms()) {
    std::vector<Expr> f{Expr::constant(c)};
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) f.push_back(Expr::variable(i).pow(Rational(e[i])));
    terms.push_back(Expr::product(f));
  }
  return Expr::sum(terms);
}

/// (sum_i a_i d_i) applied to e.
inline Expr apply_field(const VectorFieldOp& field, const Expr& e) {
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < field.dim(); ++i) {
    if (field.coefficients[i].is_zero()) continue;
    Expr d = e.derivative(i);
    if (!d.is_zero()) terms.push_back(from_polynomial(field.coefficients[i]) * d);
  }
  return Expr::sum(terms);
}

/// Recognizes c * exp(P) with c > 0 rational and P a polynomial (products and integer powers
/// of such factors included).
inline std::optional<std::pair<Rational, Polynomial>> as_exp_polynomial(const Expr& e, std::size_t nvars) {
  const auto& n = e.node();
  switch (n.op) {
    case ExprOp::Const:
      if (n.value > 0) return std::make_pair(n.value, Polynomial(nvars));
      return std::nullopt;
    case ExprOp::Exp: {
      auto p = Expr(n.args.front()).to_polynomial(nvars);
      if (!p) return std::nullopt;
      return std::make_pair(Rational(1), *p);
    }
    case ExprOp::Mul: {
      Rational c = 1;
      Polynomial p(nvars);
      for (const auto& a : n.args) {
        auto f = as_exp_polynomial(Expr(a), nvars);
        if (!f) return std::nullopt;
        c *= f->first;
        p += f->second;
      }
      return std::make_pair(c, p);
    }
    case ExprOp::Pow: {
      if (n.value.get_den() != 1) return std::nullopt;
      auto f = as_exp_polynomial(Expr(n.args.front()), nvars);
      if (!f) return std::nullopt;
      Rational c = Expr::constant(f->first).pow(n.value).constant_value().value();
      return std::make_pair(c, f->second * n.value);
    }
    default: return std::nullopt;
  }
}

/// Postfix program for fast repeated evaluation.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const GroupModel* model) : model_(model) {
    if (e.uses_norm() && model == nullptr) throw Error(ErrorKind::InvalidArgument, "norm() requires a group model");
    emit(e.node());
  }

  double operator()(std::span<const double> x) const {
    double stack[64] = {};
    std::vector<double> heap;
    double* st = stack;
    if (max_depth_ > 64) {
      heap.resize(max_depth_);
      st = heap.data();
    }
    int sp = 0;
    for (const auto& in : code_) {
      switch (in.op) {
        case Code::Push: st[sp++] = in.value; break;
        case Code::Load: st[sp++] = x[in.arg]; break;
        case Code::Add: {
          double s = 0.0;
          for (std::size_t k = 0; k < in.arg; ++k) s += st[--sp];
          st[sp++] = s;
          break;
        }
        case Code::Mul: {
          double s = 1.0;
          for (std::size_t k = 0; k < in.arg; ++k) s *= st[--sp];
          st[sp++] = s;
          break;
        }
        case Code::PowInt: {
          double b = st[sp - 1];
          long e = in.int_exp;
          double r = 1.0;
          for (long k = 0; k < (e < 0 ? -e : e); ++k) r *= b;
          st[sp - 1] = e < 0 ? 1.0 / r : r;
          break;
        }
        case Code::PowReal: {
          double b = st[sp - 1];
          if (b < 0.0 && in.odd_den) {
            double m = std::pow(-b, in.value);
            st[sp - 1] = in.odd_num ? -m : m;
          } else {
            st[sp - 1] = std::pow(b, in.value);
          }
          break;
        }
        case Code::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
        case Code::Log: st[sp - 1] = std::log(st[sp - 1]); break;
        case Code::Abs: st[sp - 1] = std::abs(st[sp - 1]); break;
        case Code::Norm: st[sp++] = model_->homogeneous_norm(x); break;
      }
    }
    return st[0];
  }

 private:
  struct Code {
    enum Op { Push, Load, Add, Mul, PowInt, PowReal, Exp, Log, Abs, Norm } op;
    double value = 0.0;
    std::size_t arg = 0;
    long int_exp = 0;
    bool odd_den = false, odd_num = false;
  };

  void emit(const ExprNode& n) {
    switch (n.op) {
      case ExprOp::Const: push({Code::Push, to_double(n.value)}, +1); break;
      case ExprOp::Var: push({Code::Push, 0.0, n.var}, +1), code_.back().op = Code::Load; break;
      case ExprOp::Add:
      case ExprOp::Mul:
        for (const auto& a : n.args) emit(*a);
        push({n.op == ExprOp::Add ? Code::Add : Code::Mul, 0.0, n.args.size()}, 1 - static_cast<int>(n.args.size()));
        break;
      case ExprOp::Pow: {
        emit(*n.args.front());
        Code c{Code::PowReal, to_double(n.value)};
        if (n.value.get_den() == 1 && ::abs(n.value.get_num()) < 64) {
          c.op = Code::PowInt;
          c.int_exp = n.value.get_num().get_si();
        } else {
          c.odd_den = n.value.get_den().get_ui() % 2 == 1;
          c.odd_num = mpz_odd_p(n.value.get_num().get_mpz_t()) != 0;
        }
        push(c, 0);
        break;
      }
      case ExprOp::Exp: emit(*n.args.front()), push({Code::Exp}, 0); break;
      case ExprOp::Log: emit(*n.args.front()), push({Code::Log}, 0); break;
      case ExprOp::Abs: emit(*n.args.front()), push({Code::Abs}, 0); break;
      case ExprOp::Norm: push({Code::Norm}, +1); break;
    }
  }

  void push(Code c, int delta) {
    code_.push_back(c);
    depth_ += delta;
    max_depth_ = std::max<std::size_t>(max_depth_, static_cast<std::size_t>(std::max(depth_, 1)));
  }

  const GroupModel* model_ = nullptr;
  std::vector<Code> code_;
  int depth_ = 0;
  std::size_t max_depth_ = 1;
};

namespace detail {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const std::vector<std::string>& names) : text_(text), names_(names) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr parse_sum() {
    Expr e = parse_product();
    while (true) {
      if (accept('+')) e = e + parse_product();
      else if (accept('-')) e = e - parse_product();
      else return e;
    }
  }

  Expr parse_product() {
    Expr e = parse_unary();
    while (true) {
      if (accept('*')) e = e * parse_unary();
      else if (accept('/')) {
        Expr d = parse_unary();
        if (d.is_zero()) fail("division by zero");
        e = e / d;
      } else return e;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) {
      std::size_t at = pos_;
      Expr ex = parse_unary();
      auto q = ex.constant_value();
      if (!q) {
        pos_ = at;
        fail("exponent must be a constant rational");
      }
      if (base.is_zero() && *q < 0) fail("0 raised to a negative power");
      return base.pow(*q);
    }
    return base;
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(parse_number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      skip_space();
      bool call = pos_ < text_.size() && text_[pos_] == '(';
      if (call) {
        ++pos_;
        if (name == "norm") {
          expect(')');
          return Expr::norm();
        }
        Expr arg = parse_sum();
        expect(')');
        if (name == "exp") return arg.exp();
        if (name == "log") return arg.log();
        if (name == "abs") return arg.abs();
        if (name == "sqrt") return arg.pow(Rational(1, 2));
        pos_ = start;
        fail("unknown function '" + name + "'");
      }
      for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return Expr::variable(i);
      pos_ = start;
      fail("unknown variable '" + name + "'");
    }
    if (accept('(')) {
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Rational parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ + 1 < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (text_[k] == '+' || text_[k] == '-') ++k;
      if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) {
        pos_ = k;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    try {
      return parse_rational(text_.substr(start, pos_ - start));
    } catch (const Error&) {
      pos_ = start;
      fail("malformed number");
    }
  }

  std::string_view text_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Grammar: sums/differences of products/quotients of signed powers; primaries are rational
/// literals, variables bound to coordinate names, exp/log/abs/sqrt(...), norm(), parentheses.
/// Exponents must fold to rational constants.
inline Expr parse_expression(std::string_view text, const std::vector<std::string>& names) {
  return detail::ExpressionParser(text, names).parse();
}

/// Parses and requires an exact polynomial.
inline Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& names) {
  Expr e = parse_expression(text, names);
  auto p = e.to_polynomial(names.size());
  if (!p) throw Error(ErrorKind::NotPolynomial, "'" + std::string(text) + "' is not a polynomial");
  return *p;
}

}  // namespace subspec
