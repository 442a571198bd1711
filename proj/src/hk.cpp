#include "hkt/hk.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "hkt/special.hpp"

namespace hkt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double coord_value(const ChartPoint& pt, int a) {
  const int n = static_cast<int>(pt.Z.size());
  if (a < n) return pt.Z(a).real();
  if (a < 2 * n) return pt.Z(a - n).imag();
  if (a < 3 * n) return pt.phi_up(a - 2 * n);
  return pt.phi_dn(a - 3 * n);
}

// Frame columns h | hbar | v | vbar as basis-R coefficient vectors.
MatrixXcd frame_r_matrix(const FrameAtPoint& frame) {
  const int n = frame.n;
  const MatrixXcd C = basis_b_to_r(n);
  MatrixXcd P(4 * n, 4 * n);
  for (int i = 0; i < n; ++i) {
    P.col(i) = C * frame.h.col(i);
    P.col(2 * n + i) = C * frame.v.col(i);
  }
  for (int i = 0; i < n; ++i) {
    P.col(n + i) = P.col(i).conjugate();
    P.col(3 * n + i) = P.col(2 * n + i).conjugate();
  }
  return P;
}

// Structure with -i eigenspace spanned by the connection directions at zeta
// (scaled limit at zeta = 0), conjugated back to coordinates.
MatrixXcd eigenspace_structure(const MatrixXcd& P, cx zeta) {
  const int N = static_cast<int>(P.rows());
  const int n = N / 4;
  MatrixXcd Pz(N, N);
  for (int i = 0; i < n; ++i) {
    if (zeta == cx(0, 0)) {
      Pz.col(i) = -P.col(3 * n + i);
      Pz.col(n + i) = P.col(n + i);
    } else {
      Pz.col(i) = P.col(i) - (1.0 / zeta) * P.col(3 * n + i);
      Pz.col(n + i) = P.col(n + i) + zeta * P.col(2 * n + i);
    }
  }
  Pz.rightCols(2 * n) = Pz.leftCols(2 * n).conjugate();
  MatrixXcd D = MatrixXcd::Zero(N, N);
  for (int a = 0; a < 2 * n; ++a) {
    D(a, a) = cx(0, -1);
    D(2 * n + a, 2 * n + a) = cx(0, 1);
  }
  return Pz * D * Pz.inverse();
}

MatrixXcd wedge(const VectorXcd& a, const VectorXcd& b) {
  return a * b.transpose() - b * a.transpose();
}

// Covector dZ^i (respectively dZbar^i) over basis R.
VectorXcd dz_covector(int n, int i, bool conjugated) {
  VectorXcd c = VectorXcd::Zero(4 * n);
  c(i) = 1.0;
  c(n + i) = conjugated ? cx(0, -1) : cx(0, 1);
  return c;
}

// Instanton corrections shared by the tangent and cotangent closed forms;
// fiber_base selects the slot block holding the charge angle covector
// (2n for dphi_gamma on the tangent side, 3n for dtheta_gamma).
void add_charge_corrections(ClosedFormTensors& out, const JoyceProvider& provider,
                            const ChartPoint& pt, const ChartJet& jet, int fiber_base) {
  const int n = static_cast<int>(jet.Z.size());
  const auto data = charge_series_data(provider, pt, jet, true);
  for (const auto& pd : data) {
    for (int sign = 0; sign < 2; ++sign) {
      const double sg = sign == 0 ? 1.0 : -1.0;
      const cx Zg = sg * pd.Zg;
      const double th = sg * pd.theta;
      const double r = pd.r;

      cx V = 0, S1 = 0;
      for (int m = 1; m <= pd.n_max; ++m) {
        const cx ph = std::polar(1.0, m * th);
        V += ph * bessel_k0(kTwoPi * m * r);
        S1 += ph * bessel_k1(kTwoPi * m * r);
      }
      V /= kTwoPi;

      VectorXcd dZg = VectorXcd::Zero(4 * n);
      VectorXcd dZgb = VectorXcd::Zero(4 * n);
      VectorXcd dfg = VectorXcd::Zero(4 * n);
      for (int i = 0; i < n; ++i) {
        const double ki = sg * static_cast<double>((*pd.k)[static_cast<std::size_t>(i)]);
        dZg += ki * dz_covector(n, i, false);
        dZgb += ki * dz_covector(n, i, true);
        dfg(fiber_base + i) = ki;
      }

      const VectorXcd A =
          (-r / (4.0 * kPi)) * S1 * (dZg / Zg - dZgb / std::conj(Zg));
      out.om3 += pd.omega * (cx(0, 0.5) * V * wedge(dZg, dZgb) +
                             (1.0 / kTwoPi) * wedge(dfg, A));
      out.omega_hol +=
          pd.omega * (wedge(dZg, A) + cx(0, 1.0 / kTwoPi) * V * wedge(dfg, dZg));
    }
    out.tail_bound += pd.tail;
  }
}

}  // namespace

MatrixXcd fiber_pairing(const FrameAtPoint& frame) {
  const int n = frame.n;
  auto omega_nu = [n](const VectorXcd& a, const VectorXcd& b) {
    cx s = 0;
    for (int k = 0; k < n; ++k)
      s += a(2 * n + k) * b(3 * n + k) - a(3 * n + k) * b(2 * n + k);
    return s;
  };
  MatrixXcd W(n, n);
  const double c = -1.0 / (4.0 * kPi * kPi);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      W(i, j) = c * omega_nu(frame.v.col(i), conj_in_b(frame.v.col(j)));
  }
  return W;
}

ComplexStructures complex_structures(const FrameAtPoint& frame, std::span<const cx> zetas) {
  const int n = frame.n;
  const int N = 4 * n;
  const MatrixXcd P = frame_r_matrix(frame);
  const MatrixXcd Pinv = P.inverse();

  double realness = 0.0;
  auto realize = [&realness](const MatrixXcd& M) {
    realness = std::max(realness, M.imag().cwiseAbs().maxCoeff());
    return MatrixXd(M.real());
  };

  // Frame-action matrices: column = image of a frame vector in frame coords.
  MatrixXcd M1 = MatrixXcd::Zero(N, N);
  MatrixXcd M2 = MatrixXcd::Zero(N, N);
  MatrixXcd M3 = MatrixXcd::Zero(N, N);
  for (int i = 0; i < n; ++i) {
    // I1: h -> vbar, hbar -> v, v -> -hbar, vbar -> -h
    M1(3 * n + i, i) = 1.0;
    M1(2 * n + i, n + i) = 1.0;
    M1(n + i, 2 * n + i) = -1.0;
    M1(i, 3 * n + i) = -1.0;
    // I2: h -> -i vbar, hbar -> i v, v -> i hbar, vbar -> -i h
    M2(3 * n + i, i) = cx(0, -1);
    M2(2 * n + i, n + i) = cx(0, 1);
    M2(n + i, 2 * n + i) = cx(0, 1);
    M2(i, 3 * n + i) = cx(0, -1);
    // I3: i on (h, v), -i on the conjugates
    M3(i, i) = cx(0, 1);
    M3(n + i, n + i) = cx(0, -1);
    M3(2 * n + i, 2 * n + i) = cx(0, 1);
    M3(3 * n + i, 3 * n + i) = cx(0, -1);
  }

  ComplexStructures out;
  out.I1 = realize(P * M1 * Pinv);
  out.I2 = realize(P * M2 * Pinv);
  out.I3 = realize(P * M3 * Pinv);

  const MatrixXd id = MatrixXd::Identity(N, N);
  double quat = 0.0;
  auto track = [&quat](const MatrixXd& M) {
    quat = std::max(quat, M.cwiseAbs().maxCoeff());
  };
  track(out.I1 * out.I1 + id);
  track(out.I2 * out.I2 + id);
  track(out.I3 * out.I3 + id);
  track(out.I1 * out.I2 - out.I3);
  track(out.I2 * out.I3 - out.I1);
  track(out.I3 * out.I1 - out.I2);

  for (cx zeta : zetas)
    out.Izeta.emplace_back(zeta, realize(eigenspace_structure(P, zeta)));

  // The eigenspace structure must match the rational combination of the
  // anchor structures across the canonical parameter set.
  const std::array<cx, 4> canonical = {cx(0, 0), cx(0, 1), cx(-1, 0), cx(0.5, 0.5)};
  double twistor = 0.0;
  for (cx zc : canonical) {
    const MatrixXd Ie = realize(eigenspace_structure(P, zc));
    const double den = 1.0 + std::norm(zc);
    const MatrixXd If = (2.0 * zc.imag() * out.I1 - 2.0 * zc.real() * out.I2 +
                         (1.0 - std::norm(zc)) * out.I3) /
                        den;
    twistor = std::max(twistor, (Ie - If).cwiseAbs().maxCoeff());
  }

  out.residuals["quaternion"] = quat;
  out.residuals["twistor"] = twistor;
  out.residuals["realness"] = realness;
  return out;
}

KahlerForms kahler_forms(const FrameAtPoint& frame, const ChartJet& jet,
                         const JetTable& table, const ComplexStructures& cs) {
  const int n = frame.n;
  const int N = 4 * n;
  const JetTable& T = table;
  if (T.order() < 2) throw ConfigError("form assembly needs an order-2 derivative table");

  const MatrixXcd W = fiber_pairing(frame);

  // om3 in frame coordinates: h pairs with hbar, v with vbar.
  MatrixXcd OmF = MatrixXcd::Zero(N, N);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      OmF(i, n + j) = W(j, i);
      OmF(n + j, i) = -W(j, i);
      OmF(2 * n + i, 3 * n + j) = W(i, j);
      OmF(3 * n + j, 2 * n + i) = -W(i, j);
    }
  }

  const MatrixXcd P = frame_r_matrix(frame);
  const MatrixXcd Pinv = P.inverse();
  const MatrixXcd om3c = Pinv.transpose() * OmF * Pinv;

  KahlerForms out;
  double realness = om3c.imag().cwiseAbs().maxCoeff();
  out.om3 = om3c.real();
  out.g = out.om3 * cs.I3;
  out.om1 = cs.I1.transpose() * out.g;
  out.om2 = cs.I2.transpose() * out.g;
  out.omega_hol = out.om1.cast<cx>() + cx(0, 1) * out.om2.cast<cx>();

  const MatrixXd gs = 0.5 * (out.g + out.g.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gs);
  const double eig_scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (int a = 0; a < N; ++a) {
    if (es.eigenvalues()(a) > 1e-10 * eig_scale)
      ++out.sig_pos;
    else if (es.eigenvalues()(a) < -1e-10 * eig_scale)
      ++out.sig_neg;
  }

  double hermitian = 0.0;
  for (const MatrixXd* I : {&cs.I1, &cs.I2, &cs.I3})
    hermitian = std::max(
        hermitian, (out.g - I->transpose() * out.g * (*I)).cwiseAbs().maxCoeff());

  // Pairing vs its second-derivative expression:
  //   W_ij = (i/2) Im tau_ij + nu_ibar(nu_j K) - {nu_ibar J, nu_j Jbar},
  // with K = J - Jbar and brackets over the fiber.
  const MatrixXcd tau = jet.tau;
  const MatrixXcd taub = jet.tau.conjugate();
  auto K2 = [&T](int A, int B) { return T.d2(A, B) - T.d2_conj(A, B); };
  double keyexp = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cx nunuK = K2(2 * n + i, 2 * n + j);
      for (int l = 0; l < n; ++l) {
        nunuK -= tau(j, l) * K2(2 * n + i, 3 * n + l);
        nunuK -= taub(i, l) * K2(3 * n + l, 2 * n + j);
        for (int m = 0; m < n; ++m)
          nunuK += taub(i, l) * tau(j, m) * K2(3 * n + l, 3 * n + m);
      }
      nunuK *= 0.25;

      // fiber gradients of nu_ibar J and nu_j Jbar
      auto da = [&](int A) {
        cx s = T.d2(2 * n + i, A);
        for (int l = 0; l < n; ++l) s -= taub(i, l) * T.d2(3 * n + l, A);
        return 0.5 * s;
      };
      auto db = [&](int A) {
        cx s = T.d2_conj(2 * n + j, A);
        for (int l = 0; l < n; ++l) s -= tau(j, l) * T.d2_conj(3 * n + l, A);
        return 0.5 * s;
      };
      cx pois = 0;
      for (int k = 0; k < n; ++k)
        pois += da(2 * n + k) * db(3 * n + k) - da(3 * n + k) * db(2 * n + k);

      const cx expected = cx(0, 0.5 * tau(i, j).imag()) + nunuK - pois;
      keyexp = std::max(keyexp, std::abs(W(i, j) - expected));
    }
  }

  // Type (2,0) structure of om1 + i om2 in the frame: it must annihilate
  // hbar and vbar and pair h with v through the fiber pairing.
  const MatrixXcd OmHolF = P.transpose() * out.omega_hol * P;
  MatrixXcd expectedF = MatrixXcd::Zero(N, N);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      expectedF(i, 2 * n + j) = cx(0, -2) * W(j, i);
      expectedF(2 * n + j, i) = cx(0, 2) * W(j, i);
    }
  }
  const double holomega3 = (OmHolF - expectedF).cwiseAbs().maxCoeff();

  out.residuals["keyexp"] = keyexp;
  out.residuals["holomega3"] = holomega3;
  out.residuals["hermitian"] = hermitian;
  out.residuals["realness"] = realness;
  return out;
}

TensorReport tensor_report(const JoyceProvider& provider, const ChartPoint& pt,
                           const ChartJet& jet, std::span<const cx> zetas,
                           double cond_max) {
  const JetTable T = j_partials(provider, pt, jet, 2);
  const FrameAtPoint frame = frame_hv(provider, jet, T, cond_max);
  ComplexStructures cs = complex_structures(frame, zetas);
  KahlerForms kf = kahler_forms(frame, jet, T, cs);

  TensorReport rep;
  rep.n = frame.n;
  rep.I1 = std::move(cs.I1);
  rep.I2 = std::move(cs.I2);
  rep.I3 = std::move(cs.I3);
  rep.Izeta = std::move(cs.Izeta);
  rep.om1 = std::move(kf.om1);
  rep.om2 = std::move(kf.om2);
  rep.om3 = std::move(kf.om3);
  rep.g = std::move(kf.g);
  rep.omega_hol = std::move(kf.omega_hol);
  rep.sig_pos = kf.sig_pos;
  rep.sig_neg = kf.sig_neg;
  rep.frame_cond = frame.cond;
  rep.tail_bound = T.tail_bound();
  rep.residuals = std::move(cs.residuals);
  for (const auto& [key, val] : kf.residuals) {
    auto [it, inserted] = rep.residuals.emplace(key, val);
    if (!inserted) it->second = std::max(it->second, val);
  }
  return rep;
}

ClosednessResiduals closedness_residuals(const Prepotential& F, const JoyceProvider& provider,
                                         const ChartPoint& pt, double h_fd,
                                         double cond_max) {
  const int n = provider.dim();
  const int N = 4 * n;
  const MatrixXcd C = basis_b_to_r(n);

  struct Local {
    std::array<MatrixXd, 3> om;
    MatrixXcd W;
    MatrixXcd h, v;  // basis-R frame fields, n columns each
  };
  auto eval = [&](const ChartPoint& q) {
    const ChartJet jet = F.jet(q.Z);
    const JetTable T = j_partials(provider, q, jet, 2);
    const FrameAtPoint fr = frame_hv(provider, jet, T, cond_max);
    const ComplexStructures cs = complex_structures(fr, {});
    const KahlerForms kf = kahler_forms(fr, jet, T, cs);
    Local loc;
    loc.om = {kf.om1, kf.om2, kf.om3};
    loc.W = fiber_pairing(fr);
    loc.h.resize(N, n);
    loc.v.resize(N, n);
    for (int i = 0; i < n; ++i) {
      loc.h.col(i) = C * fr.h.col(i);
      loc.v.col(i) = C * fr.v.col(i);
    }
    return loc;
  };

  const Local center = eval(pt);

  std::vector<std::array<MatrixXd, 3>> Dom(static_cast<std::size_t>(N));
  std::vector<MatrixXcd> DW(static_cast<std::size_t>(N));
  std::vector<MatrixXcd> Jh(static_cast<std::size_t>(n), MatrixXcd::Zero(N, N));
  std::vector<MatrixXcd> Jv(static_cast<std::size_t>(n), MatrixXcd::Zero(N, N));
  for (int a = 0; a < N; ++a) {
    const double step = h_fd * std::max(1.0, std::abs(coord_value(pt, a)));
    const Local lp = eval(displace(pt, a, step));
    const Local lm = eval(displace(pt, a, -step));
    auto& da = Dom[static_cast<std::size_t>(a)];
    for (int k = 0; k < 3; ++k) da[k] = (lp.om[k] - lm.om[k]) / (2.0 * step);
    DW[static_cast<std::size_t>(a)] = (lp.W - lm.W) / (2.0 * step);
    for (int i = 0; i < n; ++i) {
      Jh[static_cast<std::size_t>(i)].col(a) = (lp.h.col(i) - lm.h.col(i)) / (2.0 * step);
      Jv[static_cast<std::size_t>(i)].col(a) = (lp.v.col(i) - lm.v.col(i)) / (2.0 * step);
    }
  }

  ClosednessResiduals out;
  for (int k = 0; k < 3; ++k) {
    double worst = 0.0;
    for (int a = 0; a < N; ++a) {
      for (int b = a + 1; b < N; ++b) {
        for (int c = b + 1; c < N; ++c) {
          const double t = Dom[static_cast<std::size_t>(a)][k](b, c) -
                           Dom[static_cast<std::size_t>(b)][k](a, c) +
                           Dom[static_cast<std::size_t>(c)][k](a, b);
          worst = std::max(worst, std::abs(t));
        }
      }
    }
    out.d_om[k] = worst;
  }

  // First-order consequences on the fiber pairing. Directional derivative of
  // the scalar field W_ik along a complex frame field:
  auto dirW = [&](int i, int k, const VectorXcd& u) {
    cx s = 0;
    for (int a = 0; a < N; ++a) s += u(a) * DW[static_cast<std::size_t>(a)](i, k);
    return s;
  };
  const ChartJet cjet = F.jet(pt.Z);
  const JetTable cT = j_partials(provider, pt, cjet, 2);
  const FrameAtPoint cfr = frame_hv(provider, cjet, cT, cond_max);
  // complex om3 over basis R for pairing complexified fields
  const MatrixXcd P = frame_r_matrix(cfr);
  const MatrixXcd Pinv = P.inverse();
  MatrixXcd OmF = MatrixXcd::Zero(N, N);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      OmF(i, n + j) = center.W(j, i);
      OmF(n + j, i) = -center.W(j, i);
      OmF(2 * n + i, 3 * n + j) = center.W(i, j);
      OmF(3 * n + j, 2 * n + i) = -center.W(i, j);
    }
  }
  const MatrixXcd om3c = Pinv.transpose() * OmF * Pinv;
  auto om3 = [&](const VectorXcd& u, const VectorXcd& w) -> cx {
    return u.transpose() * om3c * w;
  };
  auto br = [&](const VectorXcd& av, const MatrixXcd& aj, const VectorXcd& bv,
                const MatrixXcd& bj) { return fd_bracket(av, aj, bv, bj); };

  double sA = 0.0, sB = 0.0, sC = 0.0, sD = 0.0;
  for (int i = 0; i < n; ++i) {
    const VectorXcd vi = center.v.col(i);
    const MatrixXcd& Jvi = Jv[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const VectorXcd vj = center.v.col(j);
      const MatrixXcd& Jvj = Jv[static_cast<std::size_t>(j)];
      for (int k = 0; k < n; ++k) {
        const VectorXcd vbk = center.v.col(k).conjugate();
        const MatrixXcd Jvbk = Jv[static_cast<std::size_t>(k)].conjugate();
        const VectorXcd hj = center.h.col(j);
        const MatrixXcd& Jhj = Jh[static_cast<std::size_t>(j)];
        const VectorXcd hbk = center.h.col(k).conjugate();
        const MatrixXcd Jhbk = Jh[static_cast<std::size_t>(k)].conjugate();

        sA = std::max(sA, std::abs(dirW(j, k, vi) - dirW(i, k, vj)));
        sB = std::max(sB, std::abs(dirW(i, k, hj) - om3(vi, br(hj, Jhj, vbk, Jvbk))));
        sC = std::max(sC, std::abs(om3(br(vi, Jvi, hbk, Jhbk), vj) -
                                   om3(br(vj, Jvj, hbk, Jhbk), vi)));
        sD = std::max(sD, std::abs(dirW(j, k, vi) - om3(vi, br(vj, Jvj, vbk, Jvbk))));
      }
    }
  }
  out.structural[0] = sA;
  out.structural[1] = sB;
  out.structural[2] = sC;
  out.structural[3] = sD;

  out.max_all = 0.0;
  for (double t : out.d_om) out.max_all = std::max(out.max_all, t);
  for (double t : out.structural) out.max_all = std::max(out.max_all, t);
  return out;
}

NijenhuisResiduals nijenhuis_residuals(const Prepotential& F, const JoyceProvider& provider,
                                       const ChartPoint& pt, double h_fd,
                                       double cond_max) {
  const int n = provider.dim();
  const int N = 4 * n;

  auto structures_at = [&](const ChartPoint& q) {
    const ChartJet jet = F.jet(q.Z);
    const JetTable T = j_partials(provider, q, jet, 2);
    const FrameAtPoint fr = frame_hv(provider, jet, T, cond_max);
    const ComplexStructures cs = complex_structures(fr, {});
    return std::array<MatrixXd, 3>{cs.I1, cs.I2, cs.I3};
  };

  const std::array<MatrixXd, 3> I = structures_at(pt);
  std::vector<std::array<MatrixXd, 3>> DI(static_cast<std::size_t>(N));
  for (int a = 0; a < N; ++a) {
    const double step = h_fd * std::max(1.0, std::abs(coord_value(pt, a)));
    const auto sp = structures_at(displace(pt, a, step));
    const auto sm = structures_at(displace(pt, a, -step));
    for (int k = 0; k < 3; ++k)
      DI[static_cast<std::size_t>(a)][k] = (sp[k] - sm[k]) / (2.0 * step);
  }

  NijenhuisResiduals out;
  for (int k = 0; k < 3; ++k) {
    const MatrixXd& Ik = I[static_cast<std::size_t>(k)];
    double worst = 0.0;
    for (int a = 0; a < N; ++a) {
      for (int b = a + 1; b < N; ++b) {
        VectorXd col = VectorXd::Zero(N);
        for (int d = 0; d < N; ++d) {
          const auto& DId = DI[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)];
          col += Ik(d, a) * DId.col(b) - Ik(d, b) * DId.col(a);
        }
        col += Ik * (DI[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)].col(a) -
                     DI[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)].col(b));
        worst = std::max(worst, col.cwiseAbs().maxCoeff());
      }
    }
    out.by_structure[k] = worst;
    out.max_all = std::max(out.max_all, worst);
  }
  return out;
}

ClosedFormTensors closed_form_tensors(const JoyceProvider& provider, const ChartPoint& pt,
                                      const ChartJet& jet) {
  const int n = static_cast<int>(jet.Z.size());
  const int N = 4 * n;
  ClosedFormTensors out;
  out.om3 = MatrixXcd::Zero(N, N);
  out.omega_hol = MatrixXcd::Zero(N, N);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      out.om3 += cx(0, 0.5 * jet.tau(i, j).imag()) *
                 wedge(dz_covector(n, i, false), dz_covector(n, j, true));
  }
  for (int i = 0; i < n; ++i) {
    VectorXcd dphi_dn = VectorXcd::Zero(N);
    dphi_dn(3 * n + i) = 1.0;
    VectorXcd dphi_up = VectorXcd::Zero(N);
    dphi_up(2 * n + i) = 1.0;
    out.om3 += (1.0 / (4.0 * kPi * kPi)) * wedge(dphi_dn, dphi_up);

    VectorXcd beta = dphi_dn;
    for (int j = 0; j < n; ++j) {
      VectorXcd dphi_up_j = VectorXcd::Zero(N);
      dphi_up_j(2 * n + j) = 1.0;
      beta += jet.tau(i, j) * dphi_up_j;
    }
    out.omega_hol += (-1.0 / kTwoPi) * wedge(dz_covector(n, i, false), beta);
  }

  add_charge_corrections(out, provider, pt, jet, 2 * n);
  return out;
}

ClosedFormTensors cotangent_closed_forms(const JoyceProvider& provider, const ChartPoint& pt,
                                         const ChartJet& jet) {
  const int n = static_cast<int>(jet.Z.size());
  const int N = 4 * n;
  ClosedFormTensors out;
  out.om3 = MatrixXcd::Zero(N, N);
  out.omega_hol = MatrixXcd::Zero(N, N);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      out.om3 += cx(0, 0.5 * jet.tau(i, j).imag()) *
                 wedge(dz_covector(n, i, false), dz_covector(n, j, true));
  }
  for (int i = 0; i < n; ++i) {
    VectorXcd dth_dn = VectorXcd::Zero(N);  // dtheta_i, dual slot 2n+i
    dth_dn(2 * n + i) = 1.0;
    VectorXcd dth_up = VectorXcd::Zero(N);  // dtheta^i, dual slot 3n+i
    dth_up(3 * n + i) = 1.0;
    out.om3 += (-1.0 / (4.0 * kPi * kPi)) * wedge(dth_dn, dth_up);

    VectorXcd beta = dth_dn;
    for (int j = 0; j < n; ++j) {
      VectorXcd dth_up_j = VectorXcd::Zero(N);
      dth_up_j(3 * n + j) = 1.0;
      beta -= jet.tau(i, j) * dth_up_j;
    }
    out.omega_hol += (1.0 / kTwoPi) * wedge(dz_covector(n, i, false), beta);
  }

  add_charge_corrections(out, provider, pt, jet, 3 * n);
  return out;
}

CrosscheckResiduals closed_form_crosscheck(const TensorReport& report,
                                           const ClosedFormTensors& cf) {
  CrosscheckResiduals out;
  out.om3 = (report.om3.cast<cx>() - cf.om3).cwiseAbs().maxCoeff();
  out.omega_hol = (report.omega_hol - cf.omega_hol).cwiseAbs().maxCoeff();
  out.max_all = std::max(out.om3, out.omega_hol);
  return out;
}

TensorReport cotangent_pushforward(const TensorReport& report, bool invert) {
  const int n = report.n;
  const int N = 4 * n;
  MatrixXd S = MatrixXd::Zero(N, N);
  for (int a = 0; a < 2 * n; ++a) S(a, a) = 1.0;
  for (int i = 0; i < n; ++i) {
    S(3 * n + i, 2 * n + i) = 1.0;   // d/dphi^i -> d/dtheta^i
    S(2 * n + i, 3 * n + i) = -1.0;  // d/dphi_i -> -d/dtheta_i
  }
  if (invert) S.transposeInPlace();  // S is orthogonal
  const MatrixXd Si = S.transpose();
  const MatrixXcd Sc = S.cast<cx>();
  const MatrixXcd Sic = Si.cast<cx>();

  TensorReport out = report;
  out.I1 = S * report.I1 * Si;
  out.I2 = S * report.I2 * Si;
  out.I3 = S * report.I3 * Si;
  for (auto& [zeta, Iz] : out.Izeta) Iz = S * Iz * Si;
  // forms pull back along the inverse differential
  out.om1 = Si.transpose() * report.om1 * Si;
  out.om2 = Si.transpose() * report.om2 * Si;
  out.om3 = Si.transpose() * report.om3 * Si;
  out.g = Si.transpose() * report.g * Si;
  out.omega_hol = Sic.transpose() * report.omega_hol * Sic;
  return out;
}

}  // namespace hkt
