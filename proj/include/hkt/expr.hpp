#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "hkt/errors.hpp"

namespace hkt {

using cx = std::complex<double>;

// Immutable expression tree over complex variables Z1..Zn.
//
// Grammar (strict; no unary minus, no non-integer powers):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' integer)?
//   base   := number | 'i' | 'Z' digits | 'log' '(' expr ')' | '(' expr ')'
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind {
    Number,  // nonnegative real literal
    Imag,    // the imaginary unit
    Const,   // general complex constant (produced by differentiation/builders)
    Var,     // Z{index}, 1-based
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // integer exponent
    Log   // principal branch
  };

  Kind kind;
  double number = 0.0;  // Kind::Number
  cx constant{};        // Kind::Const
  int var = 0;          // Kind::Var, 1-based
  int exponent = 0;     // Kind::Pow
  ExprPtr a, b;

  static ExprPtr make_number(double v);
  static ExprPtr make_imag();
  static ExprPtr make_const(cx v);
  static ExprPtr make_var(int index);
  static ExprPtr add(ExprPtr l, ExprPtr r);
  static ExprPtr sub(ExprPtr l, ExprPtr r);
  static ExprPtr mul(ExprPtr l, ExprPtr r);
  static ExprPtr div(ExprPtr l, ExprPtr r);
  static ExprPtr pow(ExprPtr base, int k);
  static ExprPtr log(ExprPtr arg);
};

// Parses `text` with variables Z1..Zn. Throws SyntaxError (with position and
// the expected token class), UnknownVariable, NonIntegerExponent.
ExprPtr parse_expression(std::string_view text, int n_vars);

// Canonical rendering; parse_expression(print_expression(e), n) rebuilds an
// identical tree for any parsed tree e.
std::string print_expression(const ExprPtr& e);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

// d e / d Z{index} with light simplification (constant folding, dropping
// zero/one factors).
ExprPtr differentiate(const ExprPtr& e, int index);

// Evaluates at Z (0-based span, Z[i] is Z{i+1}). Throws DomainError on
// division by zero, 0 raised to a negative power, or a log argument within
// 1e-9 of the branch cut (-inf, 0].
cx evaluate(const ExprPtr& e, std::span<const cx> Z);

}  // namespace hkt
