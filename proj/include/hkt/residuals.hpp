#pragma once

#include <map>

#include "hkt/joyce.hpp"

namespace hkt {

// Shifts one real coordinate (basis-R slot a) of the point by delta.
ChartPoint displace(const ChartPoint& pt, int a, double delta);

// Frame vector fields around a point, expressed in basis R, together with
// central finite-difference Jacobians. Shared by the bracket-based checks.
struct FrameProbe {
  int n = 0;
  FrameAtPoint center;
  std::vector<VectorXcd> h, v;    // center values, basis R
  std::vector<MatrixXcd> Jh, Jv;  // Jacobians: column a = d(field)/d(coord a)
};
FrameProbe frame_probe(const Prepotential& F, const JoyceProvider& provider,
                       const ChartPoint& pt, double h_fd = 1e-4, double cond_max = 1e6);

// Lie bracket of two fields from their values and FD Jacobians.
VectorXcd fd_bracket(const VectorXcd& aval, const MatrixXcd& ajac, const VectorXcd& bval,
                     const MatrixXcd& bjac);

// Commutator residuals of the connection family.
//  termwise[0..4]: the five zeta-coefficient identities
//    [h,h], [h,vbar]+[vbar,h], [v,v], [h,hbar]-[vbar,v], [h,v]
//  by_zeta: direct evaluation of max |[A^zeta_a, A^zeta_b]| per sample zeta
struct FlatnessResiduals {
  double termwise[5] = {};
  std::map<std::string, double> by_zeta;
  double max_all = 0.0;
};
FlatnessResiduals flatness_residuals(const Prepotential& F, const JoyceProvider& provider,
                                     const ChartPoint& pt, std::span<const cx> zetas,
                                     double h_fd = 1e-4, double cond_max = 1e6);

// Analytic (series-differentiated) residuals of the generating identities:
//  compatibility: {nu_ibar J, nu_jbar J}
//  descent: fiber gradients of the three structural brackets
//  pleb1/pleb2: fiber gradients of the two second-order equations
//  linear_symmetry / linear_pde: the linearized (uncoupled) identities
struct PlebanskiResiduals {
  double compatibility = 0.0;
  double descent = 0.0;
  double pleb1 = 0.0;
  double pleb2 = 0.0;
  double linear_symmetry = 0.0;
  double linear_pde = 0.0;
  double max_all = 0.0;
};
PlebanskiResiduals plebanski_residuals(const JoyceProvider& provider, const ChartPoint& pt,
                                       const ChartJet& jet);

}  // namespace hkt
