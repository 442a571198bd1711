#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hkt/prepotential.hpp"

using hkt::catalog_prepotential;
using hkt::ChartJet;
using hkt::cx;
using hkt::Prepotential;
using hkt::VectorXcd;

namespace {

constexpr double kPi = std::numbers::pi;

VectorXcd z1(cx z) {
  VectorXcd Z(1);
  Z(0) = z;
  return Z;
}

}  // namespace

TEST_CASE("quadratic catalog jet") {
  const Prepotential F = catalog_prepotential("quadratic", 1);
  const ChartJet jet = F.jet(z1(cx(0.7, -0.3)));
  CHECK(std::abs(jet.F - cx(0, 0.5) * cx(0.7, -0.3) * cx(0.7, -0.3)) < 1e-15);
  CHECK(std::abs(jet.Zlow(0) - cx(0, 1) * cx(0.7, -0.3)) < 1e-15);
  CHECK(std::abs(jet.tau(0, 0) - cx(0, 1)) < 1e-15);
  CHECK(jet.dtau[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cubic catalog jet") {
  const Prepotential F = catalog_prepotential("cubic", 1);
  const cx z(0.4, 1.3);
  const ChartJet jet = F.jet(z1(z));
  CHECK(std::abs(jet.F - z * z * z / 6.0) < 1e-15);
  CHECK(std::abs(jet.Zlow(0) - z * z / 2.0) < 1e-15);
  CHECK(std::abs(jet.tau(0, 0) - z) < 1e-15);
  CHECK(std::abs(jet.dtau[0](0, 0) - cx(1, 0)) < 1e-15);
}

TEST_CASE("log-corrected catalog jet matches its closed derivatives") {
  const Prepotential F = catalog_prepotential("ov-log", 1);
  const cx z(0.3, 1.1);
  const ChartJet jet = F.jet(z1(z));
  const cx lg = std::log(z / 10.0);
  const cx tau = cx(0, 1) - cx(0, 1.0 / (2.0 * kPi)) * lg;
  const cx dtau = -cx(0, 1.0 / (2.0 * kPi)) / z;
  const cx Fval = -cx(0, 1.0 / (4.0 * kPi)) * z * z * (lg - 1.5) + cx(0, 0.5) * z * z;
  CHECK(std::abs(jet.F - Fval) < 1e-14);
  CHECK(std::abs(jet.tau(0, 0) - tau) < 1e-14);
  CHECK(std::abs(jet.dtau[0](0, 0) - dtau) < 1e-14);

  hkt::Prepotential::Jet jet2 =
      catalog_prepotential("ov-log", 1, {{"Lambda", {cx(2, 0)}}, {"tau0", {cx(0, 3)}}})
          .jet(z1(z));
  const cx tau2 = cx(0, 3) - cx(0, 1.0 / (2.0 * kPi)) * std::log(z / 2.0);
  CHECK(std::abs(jet2.tau(0, 0) - tau2) < 1e-14);
}

TEST_CASE("catalog rejects bad requests") {
  CHECK_THROWS_AS(catalog_prepotential("cubic", 2), hkt::ConfigError);
  CHECK_THROWS_AS(catalog_prepotential("no-such-name", 1), hkt::ConfigError);
  CHECK_THROWS_AS(catalog_prepotential("ov-log", 1, {{"Lambda", {cx(-1, 0)}}}),
                  hkt::ConfigError);
  CHECK(!hkt::catalog_names().empty());
}

TEST_CASE("jet evaluation respects the branch cut") {
  const Prepotential F = catalog_prepotential("ov-log", 1);
  CHECK_THROWS_AS(F.jet(z1(cx(-0.5, 0))), hkt::DomainError);
  CHECK_THROWS_AS(F.jet(z1(cx(0, 0))), hkt::DomainError);
}

TEST_CASE("degenerate coupling matrix is rejected") {
  const Prepotential F = catalog_prepotential("quadratic", 1, {{"c", {cx(1, 0)}}});
  CHECK_THROWS_AS(hkt::ask_tensors(F.jet(z1(cx(0.2, 0.9)))), hkt::NonInvertibleImTau);
}

TEST_CASE("base tensors of the flat chart") {
  const Prepotential F = catalog_prepotential("quadratic", 1);
  const hkt::AskTensors T = hkt::ask_tensors(F.jet(z1(cx(0.7, -0.3))));
  CHECK((T.omega - (Eigen::MatrixXd(2, 2) << 0, 1, -1, 0).finished()).norm() < 1e-15);
  CHECK((T.g - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-15);
  CHECK(T.sig_pos == 2);
  CHECK(T.sig_neg == 0);
}

TEST_CASE("signature tracks the sign of Im tau") {
  const Prepotential F = catalog_prepotential("quadratic", 1, {{"c", {cx(0, -1)}}});
  const hkt::AskTensors T = hkt::ask_tensors(F.jet(z1(cx(0.7, -0.3))));
  CHECK(T.sig_pos == 0);
  CHECK(T.sig_neg == 2);
}

TEST_CASE("conjugate coordinates") {
  const Prepotential F = catalog_prepotential("cubic", 1);
  const cx z(0.4, 1.3);
  const ChartJet jet = F.jet(z1(z));
  const hkt::ConjugateCoords cc = hkt::conjugate_coordinates(jet);
  CHECK(cc.x(0) == z.real());
  CHECK(cc.y(0) == doctest::Approx(-(z * z / 2.0).real()).epsilon(1e-14));
  CHECK(std::abs(cc.xi10(0) - z / 2.0) < 1e-15);
  CHECK(std::abs(cc.xi10(1) + (z * z / 2.0) / 2.0) < 1e-15);
}

TEST_CASE("period structure holds on curved charts") {
  std::vector<VectorXcd> samples = {z1(cx(0.4, 1.3)), z1(cx(-0.2, 0.9)), z1(cx(0.1, 2.0))};
  for (const char* name : {"cubic", "ov-log"}) {
    CAPTURE(name);
    const Prepotential F = catalog_prepotential(name, 1);
    const hkt::PeriodStructureReport rep =
        hkt::verify_special_period_structure(F, samples);
    CHECK(rep.tau_symmetry == 0.0);
    CHECK(rep.dz < 1e-9);
    CHECK(rep.euler < 1e-9);
    CHECK(rep.max_residual < 1e-9);
  }
}

TEST_CASE("two-variable chart treats the labels symmetrically") {
  const Prepotential F = Prepotential::parse("Z1^3/6 + Z2^3/6 + Z1*Z2", 2);
  VectorXcd Zab(2), Zba(2);
  Zab << cx(0.3, 1.2), cx(-0.1, 0.8);
  Zba << cx(-0.1, 0.8), cx(0.3, 1.2);
  const ChartJet ja = F.jet(Zab), jb = F.jet(Zba);
  CHECK(std::abs(ja.F - jb.F) < 1e-15);
  CHECK(std::abs(ja.Zlow(0) - jb.Zlow(1)) < 1e-15);
  CHECK(std::abs(ja.tau(0, 0) - jb.tau(1, 1)) < 1e-15);
  CHECK(std::abs(ja.tau(0, 1) - jb.tau(1, 0)) < 1e-15);
  CHECK(std::abs(ja.dtau[0](0, 0) - jb.dtau[1](1, 1)) < 1e-15);
  CHECK((ja.tau - ja.tau.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const hkt::PeriodStructureReport rep =
      hkt::verify_special_period_structure(F, std::vector<VectorXcd>{Zab});
  CHECK(rep.max_residual < 1e-8);
}
