#include "hkt/residuals.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace hkt {

namespace {
constexpr double kPi = std::numbers::pi;

double coord_value(const ChartPoint& pt, int a) {
  const int n = static_cast<int>(pt.Z.size());
  if (a < n) return pt.Z(a).real();
  if (a < 2 * n) return pt.Z(a - n).imag();
  if (a < 3 * n) return pt.phi_up(a - 2 * n);
  return pt.phi_dn(a - 3 * n);
}

std::string format_cx(cx z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

ChartPoint displace(const ChartPoint& pt, int a, double delta) {
  const int n = static_cast<int>(pt.Z.size());
  ChartPoint q = pt;
  if (a < n)
    q.Z(a) += delta;
  else if (a < 2 * n)
    q.Z(a - n) += cx(0, delta);
  else if (a < 3 * n)
    q.phi_up(a - 2 * n) += delta;
  else
    q.phi_dn(a - 3 * n) += delta;
  return q;
}

FrameProbe frame_probe(const Prepotential& F, const JoyceProvider& provider,
                       const ChartPoint& pt, double h_fd, double cond_max) {
  const int n = provider.dim();
  const MatrixXcd C = basis_b_to_r(n);
  FrameProbe probe;
  probe.n = n;
  probe.center = frame_hv(provider, pt, F.jet(pt.Z), cond_max);
  probe.h.resize(static_cast<std::size_t>(n));
  probe.v.resize(static_cast<std::size_t>(n));
  probe.Jh.assign(static_cast<std::size_t>(n), MatrixXcd::Zero(4 * n, 4 * n));
  probe.Jv.assign(static_cast<std::size_t>(n), MatrixXcd::Zero(4 * n, 4 * n));
  for (int i = 0; i < n; ++i) {
    probe.h[static_cast<std::size_t>(i)] = C * probe.center.h.col(i);
    probe.v[static_cast<std::size_t>(i)] = C * probe.center.v.col(i);
  }
  for (int a = 0; a < 4 * n; ++a) {
    const double step = h_fd * std::max(1.0, std::abs(coord_value(pt, a)));
    ChartPoint qp = displace(pt, a, step);
    ChartPoint qm = displace(pt, a, -step);
    FrameAtPoint fp = frame_hv(provider, qp, F.jet(qp.Z), cond_max);
    FrameAtPoint fm = frame_hv(provider, qm, F.jet(qm.Z), cond_max);
    for (int i = 0; i < n; ++i) {
      probe.Jh[static_cast<std::size_t>(i)].col(a) =
          C * (fp.h.col(i) - fm.h.col(i)) / (2.0 * step);
      probe.Jv[static_cast<std::size_t>(i)].col(a) =
          C * (fp.v.col(i) - fm.v.col(i)) / (2.0 * step);
    }
  }
  return probe;
}

VectorXcd fd_bracket(const VectorXcd& aval, const MatrixXcd& ajac, const VectorXcd& bval,
                     const MatrixXcd& bjac) {
  return bjac * aval - ajac * bval;
}

FlatnessResiduals flatness_residuals(const Prepotential& F, const JoyceProvider& provider,
                                     const ChartPoint& pt, std::span<const cx> zetas,
                                     double h_fd, double cond_max) {
  const int n = provider.dim();
  FrameProbe probe = frame_probe(F, provider, pt, h_fd, cond_max);

  auto hv = [&](int i) { return probe.h[static_cast<std::size_t>(i)]; };
  auto vv = [&](int i) { return probe.v[static_cast<std::size_t>(i)]; };
  auto Jh = [&](int i) { return probe.Jh[static_cast<std::size_t>(i)]; };
  auto Jv = [&](int i) { return probe.Jv[static_cast<std::size_t>(i)]; };
  // In the real basis, conjugate fields are entrywise conjugates.
  auto hb = [&](int i) { return hv(i).conjugate().eval(); };
  auto vb = [&](int i) { return vv(i).conjugate().eval(); };
  auto Jhb = [&](int i) { return Jh(i).conjugate().eval(); };
  auto Jvb = [&](int i) { return Jv(i).conjugate().eval(); };

  FlatnessResiduals out;
  auto norm = [](const VectorXcd& x) { return x.cwiseAbs().maxCoeff(); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.termwise[0] = std::max(
          out.termwise[0], norm(fd_bracket(hv(i), Jh(i), hv(j), Jh(j))));
      out.termwise[1] = std::max(
          out.termwise[1], norm(fd_bracket(hv(i), Jh(i), vb(j), Jvb(j)) +
                                fd_bracket(vb(i), Jvb(i), hv(j), Jh(j))));
      out.termwise[2] = std::max(
          out.termwise[2], norm(fd_bracket(vv(i), Jv(i), vv(j), Jv(j))));
      out.termwise[3] = std::max(
          out.termwise[3], norm(fd_bracket(hv(i), Jh(i), hb(j), Jhb(j)) -
                                fd_bracket(vb(i), Jvb(i), vv(j), Jv(j))));
      out.termwise[4] = std::max(
          out.termwise[4], norm(fd_bracket(hv(i), Jh(i), vv(j), Jv(j))));
    }

  for (cx zeta : zetas) {
    std::vector<VectorXcd> Aval(static_cast<std::size_t>(2 * n));
    std::vector<MatrixXcd> Ajac(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
      if (zeta == cx(0, 0)) {
        // scaled limit: (A_i, A_ibar) -> (-vbar_i, hbar_i)
        Aval[static_cast<std::size_t>(i)] = -vb(i);
        Ajac[static_cast<std::size_t>(i)] = -Jvb(i);
        Aval[static_cast<std::size_t>(n + i)] = hb(i);
        Ajac[static_cast<std::size_t>(n + i)] = Jhb(i);
      } else {
        Aval[static_cast<std::size_t>(i)] = hv(i) - vb(i) / zeta;
        Ajac[static_cast<std::size_t>(i)] = Jh(i) - Jvb(i) / zeta;
        Aval[static_cast<std::size_t>(n + i)] = hb(i) + zeta * vv(i);
        Ajac[static_cast<std::size_t>(n + i)] = Jhb(i) + zeta * Jv(i);
      }
    }
    double worst = 0.0;
    for (int a = 0; a < 2 * n; ++a)
      for (int b = a + 1; b < 2 * n; ++b)
        worst = std::max(
            worst, norm(fd_bracket(Aval[static_cast<std::size_t>(a)],
                                   Ajac[static_cast<std::size_t>(a)],
                                   Aval[static_cast<std::size_t>(b)],
                                   Ajac[static_cast<std::size_t>(b)])));
    out.by_zeta[format_cx(zeta)] = worst;
  }

  out.max_all = 0.0;
  for (double t : out.termwise) out.max_all = std::max(out.max_all, t);
  for (const auto& [k, vres] : out.by_zeta) out.max_all = std::max(out.max_all, vres);
  return out;
}

// ---------------------------------------------------------------------------
// Analytic residuals of the generating identities

namespace {

// Variable id permutation realizing complex conjugation (Z <-> Zbar).
int sigma(int var, int n) {
  if (var < n) return var + n;
  if (var < 2 * n) return var - n;
  return var;
}

struct TableView {
  const JetTable& T;
  bool conjugated;  // true: entries of the conjugate function Jbar

  int n() const { return T.dim(); }
  cx d1(int a) const {
    if (!conjugated) return T.d1(a);
    return std::conj(T.d1(sigma(a, n())));
  }
  cx d2(int a, int b) const {
    if (!conjugated) return T.d2(a, b);
    return std::conj(T.d2(sigma(a, n()), sigma(b, n())));
  }
  cx d3(int a, int b, int c) const {
    if (!conjugated) return T.d3(a, b, c);
    return std::conj(T.d3(sigma(a, n()), sigma(b, n()), sigma(c, n())));
  }
};

// Scalar with fiber 2-jet: fiber variable f in [0, 2n) maps to table variable
// 2n + f (phi^f for f < n, phi_{f-n} otherwise).
struct FiberJet2 {
  cx val;
  VectorXcd d;
  MatrixXcd dd;
};

// s = d/dZ^i of the function (base index i < n for holomorphic, n <= i < 2n
// for antiholomorphic derivative).
FiberJet2 base_derivative_jet(const TableView& f, int base_var) {
  const int n = f.n();
  FiberJet2 s;
  s.val = f.d1(base_var);
  s.d = VectorXcd::Zero(2 * n);
  s.dd = MatrixXcd::Zero(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    s.d(a) = f.d2(base_var, 2 * n + a);
    for (int b = 0; b < 2 * n; ++b) s.dd(a, b) = f.d3(base_var, 2 * n + a, 2 * n + b);
  }
  return s;
}

// s = nu-type derivative: 1/2 (d/dphi^i - sum_l coef(i,l) d/dphi_l) applied to
// the function, where coef is tau or its conjugate.
FiberJet2 nu_derivative_jet(const TableView& f, int i, const MatrixXcd& coef) {
  const int n = f.n();
  FiberJet2 s;
  s.d = VectorXcd::Zero(2 * n);
  s.dd = MatrixXcd::Zero(2 * n, 2 * n);
  s.val = f.d1(2 * n + i);
  for (int l = 0; l < n; ++l) s.val -= coef(i, l) * f.d1(3 * n + l);
  s.val *= 0.5;
  for (int a = 0; a < 2 * n; ++a) {
    cx acc = f.d2(2 * n + i, 2 * n + a);
    for (int l = 0; l < n; ++l) acc -= coef(i, l) * f.d2(3 * n + l, 2 * n + a);
    s.d(a) = 0.5 * acc;
    for (int b = 0; b < 2 * n; ++b) {
      cx acc2 = f.d3(2 * n + i, 2 * n + a, 2 * n + b);
      for (int l = 0; l < n; ++l)
        acc2 -= coef(i, l) * f.d3(3 * n + l, 2 * n + a, 2 * n + b);
      s.dd(a, b) = 0.5 * acc2;
    }
  }
  return s;
}

cx poisson_val(const FiberJet2& f, const FiberJet2& g, int n) {
  cx acc = 0;
  for (int k = 0; k < n; ++k)
    acc += f.d(k) * g.d(n + k) - f.d(n + k) * g.d(k);
  return acc;
}

VectorXcd poisson_grad(const FiberJet2& f, const FiberJet2& g, int n) {
  VectorXcd out = VectorXcd::Zero(2 * n);
  for (int m = 0; m < 2 * n; ++m) {
    cx acc = 0;
    for (int k = 0; k < n; ++k) {
      acc += f.dd(m, k) * g.d(n + k) + f.d(k) * g.dd(m, n + k);
      acc -= f.dd(m, n + k) * g.d(k) + f.d(n + k) * g.dd(m, k);
    }
    out(m) = acc;
  }
  return out;
}

}  // namespace

PlebanskiResiduals plebanski_residuals(const JoyceProvider& provider, const ChartPoint& pt,
                                       const ChartJet& jet) {
  const int n = provider.dim();
  const JetTable T = j_partials(provider, pt, jet, 3);
  const TableView J{T, false};
  const TableView Jb{T, true};
  const MatrixXcd& tau = jet.tau;
  const MatrixXcd taub = jet.tau.conjugate();

  // K = J - Jbar entries on demand
  auto K3 = [&](int a, int b, int c) { return J.d3(a, b, c) - Jb.d3(a, b, c); };

  PlebanskiResiduals out;
  std::vector<FiberJet2> HiJ, nubJ, nuJb;
  for (int i = 0; i < n; ++i) {
    HiJ.push_back(base_derivative_jet(J, i));
    nubJ.push_back(nu_derivative_jet(J, i, taub));  // nu_{ibar} J
    nuJb.push_back(nu_derivative_jet(Jb, i, tau));  // nu_i Jbar
  }

  auto chmax = [](double& slot, cx v) { slot = std::max(slot, std::abs(v)); };

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      chmax(out.compatibility, poisson_val(nubJ[static_cast<std::size_t>(i)],
                                           nubJ[static_cast<std::size_t>(j)], n));

      for (const VectorXcd& grad :
           {poisson_grad(HiJ[static_cast<std::size_t>(i)],
                         HiJ[static_cast<std::size_t>(j)], n),
            poisson_grad(nubJ[static_cast<std::size_t>(i)],
                         nubJ[static_cast<std::size_t>(j)], n),
            poisson_grad(HiJ[static_cast<std::size_t>(i)],
                         nubJ[static_cast<std::size_t>(j)], n)})
        out.descent = std::max(out.descent, grad.cwiseAbs().maxCoeff());

      // First structure equation, fiber gradient:
      //   nu_i(H_j K) - nu_j(H_i K) - {nu_j Jbar, H_i J} + {nu_i Jbar, H_j J}
      VectorXcd e1 = VectorXcd::Zero(2 * n);
      for (int m = 0; m < 2 * n; ++m) {
        cx t1 = K3(j, 2 * n + i, 2 * n + m);
        cx t2 = K3(i, 2 * n + j, 2 * n + m);
        for (int l = 0; l < n; ++l) {
          t1 -= tau(i, l) * K3(j, 3 * n + l, 2 * n + m);
          t2 -= tau(j, l) * K3(i, 3 * n + l, 2 * n + m);
        }
        e1(m) = 0.5 * (t1 - t2);
      }
      e1 -= poisson_grad(nuJb[static_cast<std::size_t>(j)],
                         HiJ[static_cast<std::size_t>(i)], n);
      e1 += poisson_grad(nuJb[static_cast<std::size_t>(i)],
                         HiJ[static_cast<std::size_t>(j)], n);
      out.pleb1 = std::max(out.pleb1, e1.cwiseAbs().maxCoeff());

      // Second structure equation, fiber gradient:
      //   H_i(H_jbar K) + 4 pi^2 nu_i(nu_jbar K)
      //   - {H_i J, H_jbar Jbar} + 4 pi^2 {nu_i Jbar, nu_jbar J}
      VectorXcd e2 = VectorXcd::Zero(2 * n);
      for (int m = 0; m < 2 * n; ++m) {
        cx hh = K3(i, n + j, 2 * n + m);
        cx nn = K3(2 * n + j, 2 * n + i, 2 * n + m);
        for (int l = 0; l < n; ++l) {
          nn -= taub(j, l) * K3(3 * n + l, 2 * n + i, 2 * n + m);
          nn -= tau(i, l) * K3(2 * n + j, 3 * n + l, 2 * n + m);
          for (int l2 = 0; l2 < n; ++l2)
            nn += tau(i, l) * taub(j, l2) * K3(3 * n + l2, 3 * n + l, 2 * n + m);
        }
        e2(m) = hh + kPi * kPi * nn;  // 4 pi^2 * (1/4) = pi^2
      }
      FiberJet2 HjbJb = base_derivative_jet(Jb, n + j);
      FiberJet2 nujbJ = nu_derivative_jet(J, j, taub);
      e2 -= poisson_grad(HiJ[static_cast<std::size_t>(i)], HjbJb, n);
      e2 += 4.0 * kPi * kPi *
            poisson_grad(nuJb[static_cast<std::size_t>(i)], nujbJ, n);
      out.pleb2 = std::max(out.pleb2, e2.cwiseAbs().maxCoeff());

      chmax(out.linear_symmetry, T.d2(i, 2 * n + j) - T.d2(j, 2 * n + i));
      chmax(out.linear_pde, T.d2(i, n + j) + kPi * kPi * T.d2(2 * n + i, 2 * n + j));
    }

  out.max_all = std::max({out.compatibility, out.descent, out.pleb1, out.pleb2,
                          out.linear_symmetry, out.linear_pde});
  return out;
}

}  // namespace hkt
