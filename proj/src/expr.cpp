#include "hkt/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <utility>

namespace hkt {

namespace {

ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

bool is_const_value(const ExprPtr& e, cx* out) {
  switch (e->kind) {
    case Expr::Kind::Number:
      *out = cx(e->number, 0.0);
      return true;
    case Expr::Kind::Imag:
      *out = cx(0.0, 1.0);
      return true;
    case Expr::Kind::Const:
      *out = e->constant;
      return true;
    default:
      return false;
  }
}

bool is_zero(const ExprPtr& e) {
  cx v;
  return is_const_value(e, &v) && v == cx(0.0, 0.0);
}

bool is_one(const ExprPtr& e) {
  cx v;
  return is_const_value(e, &v) && v == cx(1.0, 0.0);
}

ExprPtr const_node(cx v) {
  if (v.imag() == 0.0 && v.real() >= 0.0) return Expr::make_number(v.real());
  Expr e;
  e.kind = Expr::Kind::Const;
  e.constant = v;
  return node(std::move(e));
}

}  // namespace

ExprPtr Expr::make_number(double v) {
  Expr e;
  e.kind = Kind::Number;
  e.number = v;
  return node(std::move(e));
}

ExprPtr Expr::make_imag() {
  Expr e;
  e.kind = Kind::Imag;
  return node(std::move(e));
}

ExprPtr Expr::make_const(cx v) { return const_node(v); }

ExprPtr Expr::make_var(int index) {
  Expr e;
  e.kind = Kind::Var;
  e.var = index;
  return node(std::move(e));
}

ExprPtr Expr::add(ExprPtr l, ExprPtr r) {
  if (is_zero(l)) return r;
  if (is_zero(r)) return l;
  cx a, b;
  if (is_const_value(l, &a) && is_const_value(r, &b)) return const_node(a + b);
  Expr e;
  e.kind = Kind::Add;
  e.a = std::move(l);
  e.b = std::move(r);
  return node(std::move(e));
}

ExprPtr Expr::sub(ExprPtr l, ExprPtr r) {
  if (is_zero(r)) return l;
  cx a, b;
  if (is_const_value(l, &a) && is_const_value(r, &b)) return const_node(a - b);
  Expr e;
  e.kind = Kind::Sub;
  e.a = std::move(l);
  e.b = std::move(r);
  return node(std::move(e));
}

ExprPtr Expr::mul(ExprPtr l, ExprPtr r) {
  if (is_zero(l) || is_zero(r)) return make_number(0.0);
  if (is_one(l)) return r;
  if (is_one(r)) return l;
  cx a, b;
  if (is_const_value(l, &a) && is_const_value(r, &b)) return const_node(a * b);
  Expr e;
  e.kind = Kind::Mul;
  e.a = std::move(l);
  e.b = std::move(r);
  return node(std::move(e));
}

ExprPtr Expr::div(ExprPtr l, ExprPtr r) {
  if (is_one(r)) return l;
  if (is_zero(l)) return make_number(0.0);
  cx a, b;
  if (is_const_value(l, &a) && is_const_value(r, &b) && b != cx(0.0, 0.0))
    return const_node(a / b);
  Expr e;
  e.kind = Kind::Div;
  e.a = std::move(l);
  e.b = std::move(r);
  return node(std::move(e));
}

ExprPtr Expr::pow(ExprPtr base, int k) {
  if (k == 0) return make_number(1.0);
  if (k == 1) return base;
  Expr e;
  e.kind = Kind::Pow;
  e.a = std::move(base);
  e.exponent = k;
  return node(std::move(e));
}

ExprPtr Expr::log(ExprPtr arg) {
  Expr e;
  e.kind = Kind::Log;
  e.a = std::move(arg);
  return node(std::move(e));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  int n_vars;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(std::size_t at, const std::string& expected) {
    std::ostringstream os;
    os << "syntax error at position " << at << ": expected " << expected;
    if (at < text.size())
      os << ", found '" << text[at] << "'";
    else
      os << ", found end of input";
    throw SyntaxError(at, expected, os.str());
  }

  bool peek_char(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool accept_char(char c) {
    if (peek_char(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect_char(char c, const std::string& what) {
    if (!accept_char(c)) fail(pos, what);
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      if (accept_char('+'))
        e = raw_binary(Expr::Kind::Add, e, parse_term());
      else if (accept_char('-'))
        e = raw_binary(Expr::Kind::Sub, e, parse_term());
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    for (;;) {
      if (accept_char('*'))
        e = raw_binary(Expr::Kind::Mul, e, parse_factor());
      else if (accept_char('/'))
        e = raw_binary(Expr::Kind::Div, e, parse_factor());
      else
        return e;
    }
  }

  // Parsed trees are kept verbatim (no folding) so printing round-trips.
  static ExprPtr raw_binary(Expr::Kind k, ExprPtr l, ExprPtr r) {
    Expr e;
    e.kind = k;
    e.a = std::move(l);
    e.b = std::move(r);
    return std::make_shared<const Expr>(std::move(e));
  }

  ExprPtr parse_factor() {
    ExprPtr base = parse_base();
    skip_ws();
    if (accept_char('^')) {
      int k = parse_integer_exponent();
      Expr e;
      e.kind = Expr::Kind::Pow;
      e.a = std::move(base);
      e.exponent = k;
      return std::make_shared<const Expr>(std::move(e));
    }
    return base;
  }

  int parse_integer_exponent() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() &&
        (text[pos] == '(' || std::isalpha(static_cast<unsigned char>(text[pos]))))
      throw NonIntegerExponent("exponent at position " + std::to_string(start) +
                               " must be an integer literal");
    bool neg = false;
    if (pos < text.size() && text[pos] == '-') {
      neg = true;
      ++pos;
    }
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      fail(start, "integer exponent");
    long v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + (text[pos] - '0');
      if (v > 1000000) fail(start, "integer exponent in range");
      ++pos;
    }
    if (pos < text.size() && (text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E'))
      throw NonIntegerExponent("exponent at position " + std::to_string(start) +
                               " is not an integer");
    return neg ? static_cast<int>(-v) : static_cast<int>(v);
  }

  ExprPtr parse_base() {
    skip_ws();
    if (pos >= text.size()) fail(pos, "number, 'i', 'Z<k>', 'log(...)' or '('");
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos;
      ExprPtr e = parse_expr();
      expect_char(')', "')'");
      return e;
    }
    if (c == 'i' && !followed_by_letter(pos + 1)) {
      ++pos;
      return Expr::make_imag();
    }
    if (text.substr(pos, 3) == "log" && !followed_by_letter(pos + 3)) {
      pos += 3;
      expect_char('(', "'(' after log");
      ExprPtr e = parse_expr();
      expect_char(')', "')'");
      return Expr::log(std::move(e));
    }
    if (c == 'Z') {
      std::size_t start = pos;
      ++pos;
      if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
        fail(start, "variable index after 'Z'");
      long idx = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        idx = idx * 10 + (text[pos] - '0');
        if (idx > 1000000) break;
        ++pos;
      }
      if (idx < 1 || idx > n_vars)
        throw UnknownVariable(static_cast<int>(idx),
                              "unknown variable Z" + std::to_string(idx) +
                                  " (chart has " + std::to_string(n_vars) +
                                  " coordinates)");
      return Expr::make_var(static_cast<int>(idx));
    }
    fail(pos, "number, 'i', 'Z<k>', 'log(...)' or '('");
  }

  bool followed_by_letter(std::size_t p) const {
    return p < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_');
  }

  ExprPtr parse_number() {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;  // 'e' belongs to something else; not part of the number
      }
    }
    if (pos == start) fail(start, "number");
    double v = std::stod(std::string(text.substr(start, pos - start)));
    return Expr::make_number(v);
  }
};

}  // namespace

ExprPtr parse_expression(std::string_view text, int n_vars) {
  Parser p{text, 0, n_vars};
  ExprPtr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail(p.pos, "operator or end of input");
  return e;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    case Expr::Kind::Pow:
      return 3;
    default:
      return 4;
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void print_rec(const ExprPtr& e, std::ostream& os, int parent_prec, bool rhs) {
  int prec = precedence(e->kind);
  bool need_paren = prec < parent_prec || (prec == parent_prec && rhs);
  switch (e->kind) {
    case Expr::Kind::Number:
      os << format_double(e->number);
      return;
    case Expr::Kind::Imag:
      os << 'i';
      return;
    case Expr::Kind::Const: {
      // Rendered inside the grammar: a+b*i with explicit sign handling.
      cx v = e->constant;
      if (v.imag() == 0.0) {
        if (v.real() < 0.0)
          os << "(0-" << format_double(-v.real()) << ')';
        else
          os << format_double(v.real());
      } else {
        os << '(';
        if (v.real() != 0.0)
          os << format_double(v.real()) << (v.imag() < 0.0 ? '-' : '+');
        else if (v.imag() < 0.0)
          os << "0-";
        os << format_double(std::abs(v.imag())) << "*i)";
      }
      return;
    }
    case Expr::Kind::Var:
      os << 'Z' << e->var;
      return;
    case Expr::Kind::Log:
      os << "log(";
      print_rec(e->a, os, 0, false);
      os << ')';
      return;
    case Expr::Kind::Pow:
      if (need_paren) os << '(';
      print_rec(e->a, os, prec + 1, false);
      os << '^';
      if (e->exponent < 0)
        os << '-' << -static_cast<long>(e->exponent);
      else
        os << e->exponent;
      if (need_paren) os << ')';
      return;
    default: {
      char op = e->kind == Expr::Kind::Add   ? '+'
                : e->kind == Expr::Kind::Sub ? '-'
                : e->kind == Expr::Kind::Mul ? '*'
                                             : '/';
      if (need_paren) os << '(';
      print_rec(e->a, os, prec, false);
      os << op;
      print_rec(e->b, os, prec, true);
      if (need_paren) os << ')';
      return;
    }
  }
}

}  // namespace

std::string print_expression(const ExprPtr& e) {
  std::ostringstream os;
  print_rec(e, os, 0, false);
  return os.str();
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Number:
      return a->number == b->number;
    case Expr::Kind::Imag:
      return true;
    case Expr::Kind::Const:
      return a->constant == b->constant;
    case Expr::Kind::Var:
      return a->var == b->var;
    case Expr::Kind::Pow:
      return a->exponent == b->exponent && structurally_equal(a->a, b->a);
    case Expr::Kind::Log:
      return structurally_equal(a->a, b->a);
    default:
      return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
  }
}

// ---------------------------------------------------------------------------
// Differentiation

ExprPtr differentiate(const ExprPtr& e, int index) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::Number:
    case K::Imag:
    case K::Const:
      return Expr::make_number(0.0);
    case K::Var:
      return Expr::make_number(e->var == index ? 1.0 : 0.0);
    case K::Add:
      return Expr::add(differentiate(e->a, index), differentiate(e->b, index));
    case K::Sub:
      return Expr::sub(differentiate(e->a, index), differentiate(e->b, index));
    case K::Mul:
      return Expr::add(Expr::mul(differentiate(e->a, index), e->b),
                       Expr::mul(e->a, differentiate(e->b, index)));
    case K::Div:
      // (a/b)' = a'/b - a b'/b^2
      return Expr::sub(
          Expr::div(differentiate(e->a, index), e->b),
          Expr::div(Expr::mul(e->a, differentiate(e->b, index)), Expr::pow(e->b, 2)));
    case K::Pow: {
      ExprPtr da = differentiate(e->a, index);
      if (is_zero(da)) return Expr::make_number(0.0);
      ExprPtr factor = Expr::mul(Expr::make_number(static_cast<double>(e->exponent)),
                                 Expr::pow(e->a, e->exponent - 1));
      return Expr::mul(factor, da);
    }
    case K::Log:
      return Expr::div(differentiate(e->a, index), e->a);
  }
  return Expr::make_number(0.0);  // unreachable
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Distance from w to the ray (-inf, 0] in the complex plane.
double cut_distance(cx w) {
  if (w.real() <= 0.0) return std::abs(w.imag());
  return std::abs(w);
}

cx eval_rec(const ExprPtr& e, std::span<const cx> Z) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::Number:
      return cx(e->number, 0.0);
    case K::Imag:
      return cx(0.0, 1.0);
    case K::Const:
      return e->constant;
    case K::Var:
      return Z[static_cast<std::size_t>(e->var - 1)];
    case K::Add:
      return eval_rec(e->a, Z) + eval_rec(e->b, Z);
    case K::Sub:
      return eval_rec(e->a, Z) - eval_rec(e->b, Z);
    case K::Mul:
      return eval_rec(e->a, Z) * eval_rec(e->b, Z);
    case K::Div: {
      cx denom = eval_rec(e->b, Z);
      if (denom == cx(0.0, 0.0)) throw DomainError("division by zero");
      return eval_rec(e->a, Z) / denom;
    }
    case K::Pow: {
      cx base = eval_rec(e->a, Z);
      int k = e->exponent;
      if (k < 0 && base == cx(0.0, 0.0))
        throw DomainError("zero raised to a negative power");
      bool inv = k < 0;
      unsigned long long m = inv ? static_cast<unsigned long long>(-(long long)k)
                                 : static_cast<unsigned long long>(k);
      cx acc(1.0, 0.0), p = base;
      while (m) {
        if (m & 1ull) acc *= p;
        p *= p;
        m >>= 1;
      }
      return inv ? cx(1.0, 0.0) / acc : acc;
    }
    case K::Log: {
      cx w = eval_rec(e->a, Z);
      if (cut_distance(w) < 1e-9)
        throw DomainError("log argument within 1e-9 of the branch cut (-inf, 0]");
      return std::log(w);
    }
  }
  return cx(0.0, 0.0);  // unreachable
}

}  // namespace

cx evaluate(const ExprPtr& e, std::span<const cx> Z) { return eval_rec(e, Z); }

}  // namespace hkt
