#pragma once

#include <complex>
#include <vector>

#include "hkt/errors.hpp"

namespace hkt {

using cx = std::complex<double>;

struct BesselValue {
  double value = 0.0;
  bool underflow = false;  // e^{-x} range exhausted; value flushed to 0
};

// Modified Bessel function of the second kind, order 0 or 1, x > 0.
// Relative accuracy ~1e-15 up to x ~ 700; beyond the exponential range the
// value underflows to 0 and the flag is set. Throws NonPositiveArgument.
BesselValue bessel_k(int order, double x);
double bessel_k0(double x);
double bessel_k1(double x);

// Independent oracle: composite Gauss-Legendre quadrature of
// int_0^T exp(-x cosh t) cosh(order*t) dt with T chosen so the tail is
// negligible. Slow but accurate to ~1e-15 relative for x in [0.05, 700].
double bessel_k_quadrature(int order, double x);

// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const QuadRule& gauss_legendre(int npoints);

// Dilogarithm on the closed unit disk (plus 1e-12 slack). Throws OutOfDomain
// outside. Absolute accuracy ~1e-15.
cx dilog(cx z);

// Integral of dilog(exp(-2 pi |Zg| cosh t + i phig)) over t in
// [-t_cutoff, t_cutoff], one Gauss-Legendre panel of quad_points nodes per
// half-interval.
struct RayIntegralSpec {
  cx Zg;
  double phig = 0.0;
  double t_cutoff = 0.0;
  int quad_points = 257;

  // Picks t_cutoff so the integrand magnitude at the endpoints is below 1e-18.
  static RayIntegralSpec standard(cx Zg, double phig);
};
cx ray_integral_dilog(const RayIntegralSpec& spec);

}  // namespace hkt
