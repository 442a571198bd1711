#include "hkt/intsys.hpp"

#include <cmath>
#include <numbers>

namespace hkt {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double periodicity_residual(const JoyceProvider& provider, const ChartPoint& pt,
                            const ChartJet& jet, const LatticeShift& shift,
                            std::span<const cx> zetas, double cond_max) {
  const int n = provider.dim();
  if (static_cast<int>(shift.up.size()) != n || static_cast<int>(shift.dn.size()) != n)
    throw ConfigError("lattice shift dimension mismatch");

  const TensorReport a = tensor_report(provider, pt, jet, zetas, cond_max);
  ChartPoint q = pt;
  for (int i = 0; i < n; ++i) {
    q.phi_up(i) += kTwoPi * shift.up[static_cast<std::size_t>(i)];
    q.phi_dn(i) += kTwoPi * shift.dn[static_cast<std::size_t>(i)];
  }
  const TensorReport b = tensor_report(provider, q, jet, zetas, cond_max);

  double worst = 0.0;
  auto acc = [&worst](const MatrixXd& x, const MatrixXd& y) {
    worst = std::max(worst, (x - y).cwiseAbs().maxCoeff());
  };
  acc(a.I1, b.I1);
  acc(a.I2, b.I2);
  acc(a.I3, b.I3);
  acc(a.om1, b.om1);
  acc(a.om2, b.om2);
  acc(a.om3, b.om3);
  acc(a.g, b.g);
  worst = std::max(worst, (a.omega_hol - b.omega_hol).cwiseAbs().maxCoeff());
  for (std::size_t s = 0; s < a.Izeta.size(); ++s)
    worst = std::max(
        worst, (a.Izeta[s].second - b.Izeta[s].second).cwiseAbs().maxCoeff());
  return worst;
}

FiberChecks fiber_checks(const TensorReport& report) {
  const int n = report.n;
  FiberChecks out;

  out.lagrangian =
      report.omega_hol.block(2 * n, 2 * n, 2 * n, 2 * n).cwiseAbs().maxCoeff();

  // om3 on fiber directions is the constant angular pairing
  // (1/4pi^2) dphi_i ^ dphi^i regardless of the corrections.
  MatrixXd pairing = MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    pairing(i, n + i) = -1.0;
    pairing(n + i, i) = 1.0;
  }
  pairing /= 4.0 * std::numbers::pi * std::numbers::pi;
  out.polarization =
      (report.om3.block(2 * n, 2 * n, 2 * n, 2 * n) - pairing).cwiseAbs().maxCoeff();

  // The projection to the base intertwines I3 with the base complex
  // structure: base rows are [I_base | 0].
  MatrixXd Ibase = MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    Ibase(n + i, i) = 1.0;
    Ibase(i, n + i) = -1.0;
  }
  const double p1 = (report.I3.block(0, 0, 2 * n, 2 * n) - Ibase).cwiseAbs().maxCoeff();
  const double p2 = report.I3.block(0, 2 * n, 2 * n, 2 * n).cwiseAbs().maxCoeff();
  out.projection = std::max(p1, p2);

  out.max_all = std::max({out.lagrangian, out.polarization, out.projection});
  return out;
}

}  // namespace hkt
