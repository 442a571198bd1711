#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hkt/bps.hpp"

using hkt::BpsStructure;
using hkt::Charge;
using hkt::cx;
using hkt::Rational;

TEST_CASE("rational parsing") {
  CHECK(Rational::parse("1") == Rational{1, 1});
  CHECK(Rational::parse("-2") == Rational{-2, 1});
  CHECK(Rational::parse("3/4") == Rational{3, 4});
  CHECK(Rational::parse("-5/2").value() == -2.5);
  CHECK_THROWS_AS(Rational::parse(""), hkt::ConfigError);
  CHECK_THROWS_AS(Rational::parse("1/0"), hkt::ConfigError);
  CHECK_THROWS_AS(Rational::parse("a/b"), hkt::ConfigError);
  CHECK_THROWS_AS(Rational::parse("1.5"), hkt::ConfigError);
}

TEST_CASE("darboux pairing is antisymmetric and integral") {
  const Charge a{{1, 0}, {0, 2}};
  const Charge b{{0, 1}, {3, 0}};
  CHECK(hkt::darboux_pairing(a, b) == 1 * 3 + 0 * 0 - (0 * 0 + 2 * 1));
  CHECK(hkt::darboux_pairing(a, b) == -hkt::darboux_pairing(b, a));
  CHECK(hkt::darboux_pairing(a, a) == 0);
}

TEST_CASE("support completion under negation") {
  const BpsStructure bps =
      BpsStructure::make(1, {{Charge{{0}, {1}}, Rational{1, 1}}});
  REQUIRE(bps.pairs().size() == 1);
  CHECK(bps.pairs()[0].gamma.k == std::vector<int>{1});
  CHECK(bps.omega_max() == 1.0);

  // Listing both partners with the same index collapses to one pair.
  const BpsStructure both = BpsStructure::make(
      1, {{Charge{{0}, {1}}, Rational{2, 1}}, {Charge{{0}, {-1}}, Rational{2, 1}}});
  CHECK(both.pairs().size() == 1);
  CHECK(both.pairs()[0].omega == Rational{2, 1});
}

TEST_CASE("index zero drops the charge") {
  const BpsStructure bps = BpsStructure::make(
      1, {{Charge{{0}, {1}}, Rational{0, 1}}, {Charge{{0}, {2}}, Rational{1, 2}}});
  REQUIRE(bps.pairs().size() == 1);
  CHECK(bps.pairs()[0].gamma.k == std::vector<int>{2});
}

TEST_CASE("construction rejections") {
  // Non-commuting support: <gamma, gamma'> != 0.
  CHECK_THROWS_AS(BpsStructure::make(1, {{Charge{{1}, {0}}, Rational{1, 1}},
                                         {Charge{{0}, {1}}, Rational{1, 1}}}),
                  hkt::CoupledSupport);
  // Commuting but with a frame component: the adapted frame requires m = 0.
  CHECK_THROWS_AS(BpsStructure::make(1, {{Charge{{1}, {0}}, Rational{1, 1}}}),
                  hkt::MixedFrame);
  CHECK_THROWS_AS(BpsStructure::make(1, {{Charge{{0}, {0}}, Rational{1, 1}}}),
                  hkt::ZeroCharge);
  CHECK_THROWS_AS(BpsStructure::make(1, {{Charge{{0}, {1}}, Rational{1, 1}},
                                         {Charge{{0}, {-1}}, Rational{2, 1}}}),
                  hkt::ParityViolation);
  CHECK_THROWS_AS(BpsStructure::make(2, {{Charge{{0}, {1}}, Rational{1, 1}}}),
                  hkt::ConfigError);  // dimension mismatch
}

TEST_CASE("two-dimensional commuting support is accepted") {
  const BpsStructure bps = BpsStructure::make(
      2, {{Charge{{0, 0}, {1, 0}}, Rational{1, 1}},
          {Charge{{0, 0}, {0, 1}}, Rational{-1, 1}},
          {Charge{{0, 0}, {1, 1}}, Rational{1, 2}}});
  CHECK(bps.pairs().size() == 3);
  CHECK(bps.omega_max() == 1.0);
}

TEST_CASE("central charge pairs the lattice with the periods") {
  const hkt::Prepotential F = hkt::catalog_prepotential("cubic", 1);
  Eigen::VectorXcd Z(1);
  Z << cx(0, 2);
  const hkt::ChartJet jet = F.jet(Z);  // Zlow = Z^2/2 = -2
  const BpsStructure bps =
      BpsStructure::make(1, {{Charge{{0}, {1}}, Rational{1, 1}}});

  const hkt::CentralCharge k_only = central_charge(bps, jet, Charge{{0}, {3}});
  CHECK(std::abs(k_only.value - cx(0, 6)) < 1e-15);
  CHECK(k_only.fiber_k == std::vector<int>{3});
  CHECK(k_only.fiber_m == std::vector<int>{0});

  const hkt::CentralCharge mixed = central_charge(bps, jet, Charge{{2}, {1}});
  CHECK(std::abs(mixed.value - (2.0 * cx(-2, 0) + cx(0, 2))) < 1e-15);

  // Additivity in the charge.
  const hkt::CentralCharge a = central_charge(bps, jet, Charge{{1}, {2}});
  const hkt::CentralCharge b = central_charge(bps, jet, Charge{{1}, {-1}});
  const hkt::CentralCharge sum = central_charge(bps, jet, Charge{{2}, {1}});
  CHECK(std::abs(a.value + b.value - sum.value) < 1e-15);
}
