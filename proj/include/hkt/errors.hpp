#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hkt {

// Expression language
struct SyntaxError : std::runtime_error {
  std::size_t position;   // byte offset into the source text
  std::string expected;   // token class the parser was looking for
  SyntaxError(std::size_t pos, std::string exp, const std::string& msg)
      : std::runtime_error(msg), position(pos), expected(std::move(exp)) {}
};

struct UnknownVariable : std::runtime_error {
  int index;
  UnknownVariable(int idx, const std::string& msg)
      : std::runtime_error(msg), index(idx) {}
};

struct NonIntegerExponent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation near a singular locus (branch cut, pole, log of zero)
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry
struct NonInvertibleImTau : std::runtime_error {
  double det;
  NonInvertibleImTau(double d, const std::string& msg)
      : std::runtime_error(msg), det(d) {}
};

// Special functions
struct NonPositiveArgument : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Charge data
struct CoupledSupport : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MixedFrame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroCharge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sampled point came too close to a wall where some |Z_gamma| vanishes
struct SupportViolation : std::runtime_error {
  double min_abs;
  SupportViolation(double m, const std::string& msg)
      : std::runtime_error(msg), min_abs(m) {}
};

// Frame construction
struct DegenerateFrame : std::runtime_error {
  double cond;
  DegenerateFrame(double c, const std::string& msg)
      : std::runtime_error(msg), cond(c) {}
};

struct ZeroZeta : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration / driver
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownObservable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hkt
