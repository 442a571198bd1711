#include "hkt/joyce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hkt {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

MatrixXcd basis_b_to_r(int n) {
  // v_R = C v_B with d/dZ = (d/dReZ - i d/dImZ)/2:
  // a d/dZ^i + b d/dZbar^i = ((a+b)/2)... coefficients transform as
  //   ReZ row: a + b is wrong; see below.
  // A vector a d/dZ + b d/dZbar equals p d/dReZ + q d/dImZ with
  //   p = (a + b)/2 * 2? Writing d/dZ = (d/dRe - i d/dIm)/2:
  //   a d/dZ + b d/dZbar = ((a+b)/2) d/dRe + (i(b-a)/2) d/dIm.
  MatrixXcd C = MatrixXcd::Zero(4 * n, 4 * n);
  for (int i = 0; i < n; ++i) {
    C(i, i) = 0.5;
    C(i, n + i) = 0.5;
    C(n + i, i) = cx(0, -0.5);
    C(n + i, n + i) = cx(0, 0.5);
    C(2 * n + i, 2 * n + i) = 1.0;
    C(3 * n + i, 3 * n + i) = 1.0;
  }
  return C;
}

VectorXcd conj_in_b(const VectorXcd& v) {
  const int n = static_cast<int>(v.size()) / 4;
  VectorXcd out(4 * n);
  for (int i = 0; i < n; ++i) {
    out(i) = std::conj(v(n + i));
    out(n + i) = std::conj(v(i));
    out(2 * n + i) = std::conj(v(2 * n + i));
    out(3 * n + i) = std::conj(v(3 * n + i));
  }
  return out;
}

JoyceProvider JoyceProvider::zero(int n) {
  JoyceProvider p;
  p.n_ = n;
  return p;
}

JoyceProvider JoyceProvider::uncoupled(BpsStructure bps, double tail_tol,
                                       double support_floor) {
  if (!(tail_tol > 0.0) || tail_tol > 1e-6)
    throw ConfigError("tail tolerance must lie in (0, 1e-6]");
  if (!(support_floor > 0.0)) throw ConfigError("support floor must be positive");
  JoyceProvider p;
  p.n_ = bps.dim();
  p.bps_ = std::move(bps);
  p.tail_tol_ = tail_tol;
  p.support_floor_ = support_floor;
  return p;
}

const BpsStructure& JoyceProvider::bps() const {
  if (!bps_) throw std::logic_error("zero provider has no charge support");
  return *bps_;
}

namespace {

double term_bound(double omega_max, double r, int n) {
  return omega_max * std::sqrt(kPi / (4.0 * kPi * n * r)) * std::exp(-kTwoPi * n * r) /
         (static_cast<double>(n) * n);
}

// with_growth adds the order-3 derivative headroom (1 + (2 pi n)^3) so one
// n_max serves the whole table and term-level cancellations stay exact.
ChargeSeriesData pair_data(const BpsStructure::SupportPair& sp, const ChartPoint& pt,
                           const ChartJet& jet, double omega_max, double tail_tol,
                           double support_floor, bool with_growth) {
  const int n = jet.Z.size();
  ChargeSeriesData pd;
  pd.k = &sp.gamma.k;
  pd.omega = sp.omega.value();
  pd.Zg = cx(0, 0);
  double phi = 0.0;
  for (int i = 0; i < n; ++i) {
    pd.Zg += static_cast<double>(sp.gamma.k[static_cast<std::size_t>(i)]) * jet.Z(i);
    phi += static_cast<double>(sp.gamma.k[static_cast<std::size_t>(i)]) * pt.phi_up(i);
  }
  pd.r = std::abs(pd.Zg);
  if (pd.r < support_floor) {
    std::ostringstream os;
    os << "|Z_gamma| = " << pd.r << " below the support floor " << support_floor;
    throw SupportViolation(pd.r, os.str());
  }
  pd.theta = std::remainder(phi, kTwoPi);
  int m = 1;
  const int hard_cap = 5000000;
  auto bound = [&](int nn) {
    double b = term_bound(omega_max, pd.r, nn);
    if (with_growth) b *= 1.0 + std::pow(kTwoPi * nn, 3);
    return b;
  };
  while (bound(m) >= tail_tol) {
    ++m;
    if (m > hard_cap)
      throw std::runtime_error("series truncation target unreachable at this point");
  }
  pd.n_max = m;
  // Remaining terms decay at least geometrically with ratio e^{-2 pi r}.
  pd.tail = 2.0 * bound(m + 1) / (1.0 - std::exp(-kTwoPi * pd.r));
  return pd;
}

}  // namespace

std::vector<ChargeSeriesData> charge_series_data(const JoyceProvider& provider,
                                                 const ChartPoint& pt, const ChartJet& jet,
                                                 bool derivative_guard) {
  std::vector<ChargeSeriesData> out;
  if (provider.is_zero()) return out;
  const BpsStructure& bps = provider.bps();
  out.reserve(bps.pairs().size());
  for (const auto& sp : bps.pairs())
    out.push_back(pair_data(sp, pt, jet, bps.omega_max(), provider.tail_tol(),
                            provider.support_floor(), derivative_guard));
  return out;
}

JEval j_eval(const JoyceProvider& provider, const ChartPoint& pt, const ChartJet& jet) {
  JEval out;
  out.value = cx(0, 0);
  if (provider.is_zero()) return out;
  const BpsStructure& bps = provider.bps();
  const double omega_max = bps.omega_max();
  double series = 0.0;
  for (const auto& sp : bps.pairs()) {
    ChargeSeriesData pd = pair_data(sp, pt, jet, omega_max, provider.tail_tol(),
                                    provider.support_floor(), false);
    // The +gamma and -gamma terms combine to 2 cos(n theta) K0 / n^2, which
    // keeps the sum real and exactly invariant under negating all angles.
    double acc = 0.0;
    for (int m = 1; m <= pd.n_max; ++m) {
      double K0 = bessel_k0(kTwoPi * m * pd.r);
      acc += 2.0 * std::cos(m * pd.theta) * K0 / (static_cast<double>(m) * m);
    }
    series += pd.omega * acc;
    out.tail_bound += pd.tail;
  }
  out.value = cx(0.0, -1.0 / kTwoPi) * series;  // multiply by 1/(2 pi i)
  return out;
}

// ---------------------------------------------------------------------------
// Derivative table

JetTable::JetTable(int n, int order) : n_(n), order_(order) {
  d1_ = VectorXcd::Zero(4 * n);
  if (order >= 2) d2_ = MatrixXcd::Zero(4 * n, 4 * n);
  if (order >= 3) d3_.assign(static_cast<std::size_t>(4 * n), MatrixXcd::Zero(4 * n, 4 * n));
}

JetTable j_partials(const JoyceProvider& provider, const ChartPoint& pt,
                    const ChartJet& jet, int max_order) {
  if (max_order < 0 || max_order > 3)
    throw ConfigError("derivative table order must be between 0 and 3");
  const int n = provider.dim();
  JetTable T(n, max_order);
  if (provider.is_zero()) return T;

  const BpsStructure& bps = provider.bps();
  const double omega_max = bps.omega_max();
  const cx wpref = cx(0.0, -1.0 / kTwoPi);  // 1/(2 pi i)

  for (const auto& sp : bps.pairs()) {
    ChargeSeriesData pd = pair_data(sp, pt, jet, omega_max, provider.tail_tol(),
                                    provider.support_floor(), true);
    T.tail_ += pd.tail;

    for (int sign = 0; sign < 2; ++sign) {
      const double sg = sign == 0 ? 1.0 : -1.0;
      const cx u = sg * pd.Zg;
      const cx ub = std::conj(u);
      const double r = pd.r;
      const double th = sg * pd.theta;

      // S[a][b][p]: sum over the series of the (d/du)^a (d/dubar)^b
      // derivative with p fiber-phase derivatives (each contributing i n).
      cx S[4][4][4] = {};
      for (int m = 1; m <= pd.n_max; ++m) {
        const double c = kTwoPi * m;
        const double x = c * r;
        const double K0 = bessel_k0(x);
        const double K1 = bessel_k1(x);
        const double g1 = -c * K1;
        const double g2 = c * c * (K0 + K1 / x);
        const double g3 = c * c * c * (-K1 - K0 / x - 2.0 * K1 / (x * x));
        // Wirtinger derivatives of g(|u|) via r = sqrt(u ubar)
        cx G[4][4] = {};
        G[0][0] = K0;
        if (max_order >= 1) {
          G[1][0] = g1 * ub / (2.0 * r);
          G[0][1] = g1 * u / (2.0 * r);
        }
        if (max_order >= 2) {
          const double A2m = g2 - g1 / r;
          G[2][0] = ub * ub * A2m / (4.0 * r * r);
          G[1][1] = (g2 + g1 / r) / 4.0;
          G[0][2] = u * u * A2m / (4.0 * r * r);
        }
        if (max_order >= 3) {
          const double A3m = g3 - 3.0 * g2 / r + 3.0 * g1 / (r * r);
          const double A3p = g3 + g2 / r - g1 / (r * r);
          G[3][0] = ub * ub * ub * A3m / (8.0 * r * r * r);
          G[2][1] = ub * A3p / (8.0 * r);
          G[1][2] = u * A3p / (8.0 * r);
          G[0][3] = u * u * u * A3m / (8.0 * r * r * r);
        }
        const cx phase(std::cos(m * th), std::sin(m * th));
        const cx base = pd.omega * phase / static_cast<double>(m * m);
        for (int a = 0; a <= max_order; ++a)
          for (int b = 0; a + b <= max_order; ++b) {
            cx f = base * G[a][b];
            for (int p = 0; a + b + p <= max_order; ++p) {
              S[a][b][p] += f;
              f *= cx(0.0, static_cast<double>(m));
            }
          }
      }

      // Distribute into the dense table. Variable classes: 0 = Z (factor k_i,
      // one u-derivative), 1 = Zbar (factor k_i, one ubar-derivative),
      // 2 = phi^ (factor k_i, one phase derivative), 3 = phi_ (annihilates).
      auto k_of = [&](int var) {
        return sg * static_cast<double>((*pd.k)[static_cast<std::size_t>(var % n)]);
      };
      auto cls = [&](int var) { return var / n; };
      auto accum = [&](std::span<const int> vars) -> cx {
        int a = 0, b = 0, p = 0;
        double coeff = 1.0;
        for (int vvar : vars) {
          switch (cls(vvar)) {
            case 0: ++a; break;
            case 1: ++b; break;
            case 2: ++p; break;
            default: return cx(0, 0);
          }
          coeff *= k_of(vvar);
        }
        return coeff * S[a][b][p];
      };

      T.d0_ += wpref * S[0][0][0];
      if (max_order >= 1)
        for (int va = 0; va < 4 * n; ++va) {
          int vars[1] = {va};
          T.d1_(va) += wpref * accum(vars);
        }
      if (max_order >= 2)
        for (int va = 0; va < 4 * n; ++va)
          for (int vb = va; vb < 4 * n; ++vb) {
            int vars[2] = {va, vb};
            cx val = wpref * accum(vars);
            T.d2_(va, vb) += val;
            if (vb != va) T.d2_(vb, va) += val;
          }
      if (max_order >= 3)
        for (int va = 0; va < 4 * n; ++va)
          for (int vb = va; vb < 4 * n; ++vb)
            for (int vc = vb; vc < 4 * n; ++vc) {
              int vars[3] = {va, vb, vc};
              cx val = wpref * accum(vars);
              // accumulate on every distinct permutation exactly once
              int perms[6][3] = {{va, vb, vc}, {va, vc, vb}, {vb, va, vc},
                                 {vb, vc, va}, {vc, va, vb}, {vc, vb, va}};
              bool done[6] = {};
              for (int pi = 0; pi < 6; ++pi) {
                if (done[pi]) continue;
                for (int pj = pi + 1; pj < 6; ++pj)
                  if (perms[pj][0] == perms[pi][0] && perms[pj][1] == perms[pi][1] &&
                      perms[pj][2] == perms[pi][2])
                    done[pj] = true;
                T.d3_[static_cast<std::size_t>(perms[pi][0])](perms[pi][1], perms[pi][2]) +=
                    val;
              }
            }
    }
  }
  return T;
}

VectorXcd vertical_ham(int n, const VectorXcd& dphi_up, const VectorXcd& dphi_dn) {
  VectorXcd out = VectorXcd::Zero(4 * n);
  for (int i = 0; i < n; ++i) {
    out(2 * n + i) = -dphi_dn(i);
    out(3 * n + i) = dphi_up(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frames

FrameAtPoint frame_hv(const JoyceProvider& provider, const ChartPoint& pt,
                      const ChartJet& jet, double cond_max) {
  JetTable T = j_partials(provider, pt, jet, 2);
  return frame_hv(provider, jet, T, cond_max);
}

FrameAtPoint frame_hv(const JoyceProvider& provider, const ChartJet& jet,
                      const JetTable& table, double cond_max) {
  const int n = provider.dim();
  if (jet.Z.size() != n) throw ConfigError("jet dimension mismatch");
  if (table.dim() != n || table.order() < 2)
    throw ConfigError("frame assembly needs an order-2 derivative table");
  const JetTable& T = table;
  const MatrixXcd& tau = jet.tau;
  const MatrixXcd taub = jet.tau.conjugate();

  FrameAtPoint fr;
  fr.n = n;
  fr.H = MatrixXcd::Zero(4 * n, n);
  fr.nu = MatrixXcd::Zero(4 * n, n);
  fr.h = MatrixXcd::Zero(4 * n, n);
  fr.v = MatrixXcd::Zero(4 * n, n);

  for (int i = 0; i < n; ++i) {
    fr.H(i, i) = 1.0;

    fr.nu(2 * n + i, i) = 0.5;
    for (int j = 0; j < n; ++j) fr.nu(3 * n + j, i) -= 0.5 * tau(i, j);

    // h_i = H_i + Ham_{H_i J}
    VectorXcd up(n), dn(n);
    for (int j = 0; j < n; ++j) {
      up(j) = T.d2(i, 2 * n + j);
      dn(j) = T.d2(i, 3 * n + j);
    }
    fr.h.col(i) = fr.H.col(i) + vertical_ham(n, up, dn);

    // v_i = 2 pi i (nubar_i + Ham_{nubar_i J}) with nubar built from taubar
    VectorXcd nub = VectorXcd::Zero(4 * n);
    nub(2 * n + i) = 0.5;
    for (int j = 0; j < n; ++j) nub(3 * n + j) -= 0.5 * taub(i, j);
    VectorXcd upb(n), dnb(n);
    for (int j = 0; j < n; ++j) {
      cx su = 0.5 * T.d2(2 * n + i, 2 * n + j);
      cx sd = 0.5 * T.d2(2 * n + i, 3 * n + j);
      for (int l = 0; l < n; ++l) {
        su -= 0.5 * taub(i, l) * T.d2(3 * n + l, 2 * n + j);
        sd -= 0.5 * taub(i, l) * T.d2(3 * n + l, 3 * n + j);
      }
      upb(j) = su;
      dnb(j) = sd;
    }
    fr.v.col(i) = cx(0, kTwoPi) * (nub + vertical_ham(n, upb, dnb));
  }

  // For the uncoupled series the assembled frame must agree with its explicit
  // fiber-angle form; this guards the generic Hamiltonian assembly.
  if (!provider.is_zero()) {
    double scale = std::max(1.0, std::max(fr.h.cwiseAbs().maxCoeff(),
                                          fr.v.cwiseAbs().maxCoeff()));
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      VectorXcd he = VectorXcd::Zero(4 * n);
      he(i) = 1.0;
      for (int j = 0; j < n; ++j) he(3 * n + j) += T.d2(i, 2 * n + j);
      VectorXcd ve = VectorXcd::Zero(4 * n);
      ve(2 * n + i) = cx(0, kPi);
      for (int j = 0; j < n; ++j)
        ve(3 * n + j) += cx(0, kPi) * (-taub(i, j) + T.d2(2 * n + i, 2 * n + j));
      worst = std::max(worst, (fr.h.col(i) - he).cwiseAbs().maxCoeff());
      worst = std::max(worst, (fr.v.col(i) - ve).cwiseAbs().maxCoeff());
    }
    if (worst > 1e-12 * scale)
      throw std::logic_error("frame assembly disagrees with its explicit form");
  }

  MatrixXcd M(4 * n, 4 * n);
  for (int i = 0; i < n; ++i) {
    M.col(i) = fr.h.col(i);
    M.col(n + i) = conj_in_b(fr.h.col(i));
    M.col(2 * n + i) = fr.v.col(i);
    M.col(3 * n + i) = conj_in_b(fr.v.col(i));
  }
  Eigen::JacobiSVD<MatrixXcd> svd(M);
  double smin = svd.singularValues()(4 * n - 1);
  double smax = svd.singularValues()(0);
  fr.cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(fr.cond <= cond_max)) {
    std::ostringstream os;
    os << "frame condition number " << fr.cond << " exceeds " << cond_max;
    throw DegenerateFrame(fr.cond, os.str());
  }
  return fr;
}

VectorXcd connection_vector(const FrameAtPoint& frame, cx zeta, int i, bool conjugated) {
  if (zeta == cx(0, 0))
    throw ZeroZeta("connection direction undefined at zeta = 0; use the scaled limit");
  if (conjugated) return conj_in_b(frame.h.col(i)) + zeta * frame.v.col(i);
  return frame.h.col(i) - (cx(1, 0) / zeta) * conj_in_b(frame.v.col(i));
}

VectorXcd connection_limit(const FrameAtPoint& frame, bool at_zero, int i,
                           bool conjugated) {
  if (at_zero)
    return conjugated ? conj_in_b(frame.h.col(i)).eval()
                      : (-conj_in_b(frame.v.col(i))).eval();
  return conjugated ? frame.v.col(i).eval() : frame.h.col(i).eval();
}

}  // namespace hkt
