#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>
#include <vector>

#include "hkt/expr.hpp"

using hkt::cx;
using hkt::evaluate;
using hkt::parse_expression;
using hkt::print_expression;

namespace {

cx eval1(const hkt::ExprPtr& e, cx z) {
  const cx Z[1] = {z};
  return evaluate(e, Z);
}

}  // namespace

TEST_CASE("print/parse round trip is structurally stable") {
  const char* corpus[] = {
      "Z1",
      "1/2*Z1^2",
      "Z1^3/6",
      "(Z1+Z2)^2 - Z1*Z2",
      "i*Z1^2/4",
      "log(Z1)",
      "Z1^2*(log(Z1/10) - 3/2)",
      "2.5*Z1 + 0.125",
      "Z1/(1+Z2^2)",
      "log(Z1*Z2 + i)",
  };
  for (const char* text : corpus) {
    CAPTURE(text);
    const auto tree = parse_expression(text, 2);
    const auto printed = print_expression(tree);
    const auto reparsed = parse_expression(printed, 2);
    CHECK(hkt::structurally_equal(tree, reparsed));
    CHECK(print_expression(reparsed) == printed);
  }
}

TEST_CASE("syntax errors carry position and expected token") {
  try {
    parse_expression("Z1 + ", 1);
    FAIL("expected SyntaxError");
  } catch (const hkt::SyntaxError& e) {
    CHECK(e.position == 5);
    CHECK(!e.expected.empty());
  }
  CHECK_THROWS_AS(parse_expression("", 1), hkt::SyntaxError);
  CHECK_THROWS_AS(parse_expression("(Z1", 1), hkt::SyntaxError);
  CHECK_THROWS_AS(parse_expression("Z1 Z1", 1), hkt::SyntaxError);
  CHECK_THROWS_AS(parse_expression("-Z1", 1), hkt::SyntaxError);  // no unary minus
  CHECK_THROWS_AS(parse_expression("log Z1", 1), hkt::SyntaxError);
}

TEST_CASE("unknown variables and bad exponents are classified") {
  try {
    parse_expression("Z3", 2);
    FAIL("expected UnknownVariable");
  } catch (const hkt::UnknownVariable& e) {
    CHECK(e.index == 3);
  }
  CHECK_THROWS_AS(parse_expression("Z1^1.5", 1), hkt::NonIntegerExponent);
  CHECK_THROWS_AS(parse_expression("Z1^Z1", 1), hkt::NonIntegerExponent);
}

TEST_CASE("evaluation matches hand values") {
  const auto e = parse_expression("1/2*Z1^2 + i*Z1", 1);
  const cx z(2.0, 1.0);
  const cx expected = 0.5 * z * z + cx(0, 1) * z;
  CHECK(std::abs(eval1(e, z) - expected) < 1e-15);

  const auto cube = parse_expression("Z1^3/6", 1);
  CHECK(std::abs(eval1(cube, cx(0, 2)) - cx(0, -8.0 / 6.0)) < 1e-15);

  const auto lg = parse_expression("log(Z1)", 1);
  CHECK(std::abs(eval1(lg, cx(0, 1)).imag() - std::numbers::pi / 2) < 1e-15);

  const auto neg = parse_expression("1/Z1^2", 1);
  CHECK(std::abs(eval1(neg, cx(2, 0)) - cx(0.25, 0)) < 1e-15);
}

TEST_CASE("evaluation domain errors") {
  const auto inv = parse_expression("1/Z1", 1);
  CHECK_THROWS_AS(eval1(inv, cx(0, 0)), hkt::DomainError);
  const auto lg = parse_expression("log(Z1)", 1);
  CHECK_THROWS_AS(eval1(lg, cx(0, 0)), hkt::DomainError);
  CHECK_THROWS_AS(eval1(lg, cx(-1, 0)), hkt::DomainError);  // branch cut
  const auto pw = parse_expression("Z1^2/Z1^3", 1);
  CHECK_THROWS_AS(eval1(pw, cx(0, 0)), hkt::DomainError);
}

TEST_CASE("symbolic derivative matches central differences") {
  const char* corpus[] = {
      "1/2*Z1^2 + Z1*Z2",
      "Z1^3/6 + i*Z2^2",
      "log(Z1 + 2*Z2 + 5)",
      "Z1^2*Z2 / (Z2^2 + 4)",
      "Z1^2*(log(Z1/10) - 3/2)",
  };
  std::mt19937 rng(20260822);
  std::uniform_real_distribution<double> u(0.3, 1.5);
  const double h = 1e-5;
  for (const char* text : corpus) {
    CAPTURE(text);
    const auto tree = parse_expression(text, 2);
    for (int k = 0; k < 2; ++k) {
      const auto d = hkt::differentiate(tree, k + 1);
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<cx> Z = {cx(u(rng), u(rng)), cx(u(rng), u(rng))};
        const cx analytic = evaluate(d, Z);
        std::vector<cx> Zp = Z, Zm = Z;
        Zp[static_cast<std::size_t>(k)] += h;
        Zm[static_cast<std::size_t>(k)] -= h;
        const cx fd = (evaluate(tree, Zp) - evaluate(tree, Zm)) / (2 * h);
        CHECK(std::abs(analytic - fd) < 1e-7 * std::max(1.0, std::abs(analytic)));
      }
    }
  }
}

TEST_CASE("derivative folds constants") {
  const auto tree = parse_expression("Z1^2/2", 1);
  const auto d2 = hkt::differentiate(hkt::differentiate(tree, 1), 1);
  const cx Z[1] = {cx(3.7, -0.4)};
  CHECK(std::abs(evaluate(d2, Z) - cx(1, 0)) < 1e-15);
}
