#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hkt/special.hpp"

using hkt::bessel_k0;
using hkt::bessel_k1;
using hkt::cx;
using hkt::dilog;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("Bessel K at reference points") {
  CHECK(bessel_k0(1.0) == doctest::Approx(0.42102443824070834).epsilon(1e-14));
  CHECK(bessel_k1(1.0) == doctest::Approx(0.60190723019723457).epsilon(1e-14));
  CHECK(bessel_k0(0.1) == doctest::Approx(2.4270690247020166).epsilon(1e-14));
  CHECK(bessel_k1(10.0) == doctest::Approx(1.8648773453825585e-05).epsilon(1e-14));
}

TEST_CASE("Bessel K agrees with quadrature across the working range") {
  for (double x = 0.1; x <= 30.0; x += 0.37) {
    CAPTURE(x);
    for (int order : {0, 1}) {
      const double lib = order == 0 ? bessel_k0(x) : bessel_k1(x);
      const double quad = hkt::bessel_k_quadrature(order, x);
      CHECK(std::abs(lib - quad) <= 1e-12 * std::max(1.0, std::abs(quad)));
    }
  }
}

TEST_CASE("Bessel K derivative identities") {
  const double h = 1e-6;
  for (double x : {0.5, 1.0, 2.5, 7.0, 15.0}) {
    CAPTURE(x);
    const double dk0 = (bessel_k0(x + h) - bessel_k0(x - h)) / (2 * h);
    CHECK(std::abs(dk0 + bessel_k1(x)) < 1e-8 * std::max(1.0, std::abs(dk0)));
    const double dxk1 =
        ((x + h) * bessel_k1(x + h) - (x - h) * bessel_k1(x - h)) / (2 * h);
    CHECK(std::abs(dxk1 + x * bessel_k0(x)) < 1e-8 * std::max(1.0, std::abs(dxk1)));
  }
}

TEST_CASE("Bessel K edge behavior") {
  CHECK_THROWS_AS(bessel_k0(0.0), hkt::NonPositiveArgument);
  CHECK_THROWS_AS(bessel_k1(-2.0), hkt::NonPositiveArgument);
  const hkt::BesselValue far = hkt::bessel_k(0, 800.0);
  CHECK(far.underflow);
  CHECK(far.value == 0.0);
  const hkt::BesselValue near = hkt::bessel_k(0, 5.0);
  CHECK(!near.underflow);
}

TEST_CASE("dilog special values") {
  CHECK(std::abs(dilog(cx(0, 0))) == 0.0);
  CHECK(std::abs(dilog(cx(1, 0)) - cx(kPi * kPi / 6, 0)) < 1e-14);
  CHECK(std::abs(dilog(cx(-1, 0)) - cx(-kPi * kPi / 12, 0)) < 1e-14);
  CHECK(std::abs(dilog(cx(0.5, 0)) -
                 cx(kPi * kPi / 12 - 0.5 * std::log(2.0) * std::log(2.0), 0)) < 1e-14);
}

TEST_CASE("dilog functional identities on the disk") {
  const cx samples[] = {cx(0.3, 0.4), cx(-0.6, 0.2), cx(0.1, -0.8), cx(0.9, 0.1)};
  for (cx z : samples) {
    CAPTURE(z.real());
    CAPTURE(z.imag());
    // duplication: Li2(z) + Li2(-z) = Li2(z^2) / 2
    CHECK(std::abs(dilog(z) + dilog(-z) - 0.5 * dilog(z * z)) < 1e-13);
    // reflection in the real axis
    CHECK(std::abs(dilog(std::conj(z)) - std::conj(dilog(z))) < 1e-14);
  }
}

TEST_CASE("dilog domain boundary") {
  CHECK_THROWS_AS(dilog(cx(1.1, 0)), hkt::OutOfDomain);
  CHECK_THROWS_AS(dilog(cx(0.8, 0.7)), hkt::OutOfDomain);
  CHECK_NOTHROW(dilog(cx(0, 1)));  // on the circle
}

TEST_CASE("ray integral against the Bessel series") {
  // At Zg = 1, phase 0 the integrand expands into Bessel functions:
  // integral = sum_m 2 K0(2 pi m) / m^2.
  const hkt::RayIntegralSpec spec = hkt::RayIntegralSpec::standard(cx(1, 0), 0.0);
  const cx val = hkt::ray_integral_dilog(spec);
  double series = 0.0;
  for (int m = 1; m <= 40; ++m)
    series += 2.0 * bessel_k0(2.0 * kPi * m) / (static_cast<double>(m) * m);
  CHECK(std::abs(val - cx(series, 0)) < 1e-14);
}

TEST_CASE("ray integral is converged in the quadrature order") {
  for (cx Zg : {cx(0.5, 0.1), cx(1, 0), cx(2, -0.4)}) {
    for (double phig : {0.0, 1.2}) {
      hkt::RayIntegralSpec spec = hkt::RayIntegralSpec::standard(Zg, phig);
      const cx base = hkt::ray_integral_dilog(spec);
      spec.quad_points = 2 * spec.quad_points + 1;
      const cx fine = hkt::ray_integral_dilog(spec);
      CHECK(std::abs(base - fine) < 1e-12);
    }
  }
}

TEST_CASE("ray integral phase periodicity") {
  const cx a = hkt::ray_integral_dilog(hkt::RayIntegralSpec::standard(cx(0.8, 0), 0.7));
  const cx b =
      hkt::ray_integral_dilog(hkt::RayIntegralSpec::standard(cx(0.8, 0), 0.7 + 2 * kPi));
  CHECK(std::abs(a - b) < 1e-13);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  const hkt::QuadRule& rule = hkt::gauss_legendre(8);
  REQUIRE(rule.nodes.size() == 8);
  double total = 0.0, quartic = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    total += rule.weights[i];
    quartic += rule.weights[i] * std::pow(rule.nodes[i], 4);
  }
  CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(quartic == doctest::Approx(2.0 / 5.0).epsilon(1e-13));
}
