#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hkt/prepotential.hpp"
#include "hkt/residuals.hpp"

namespace hkt {

// Almost complex structures induced by the adapted frame, as real 4n x 4n
// matrices acting on basis-R coefficient vectors (d/dReZ, d/dImZ, d/dphi^,
// d/dphi_). Izeta holds the structure singled out by each requested twistor
// parameter, recovered from the eigenbasis of connection directions.
// Residual keys:
//   quaternion: worst of I_k^2 + Id and the cyclic products I1 I2 - I3, ...
//   twistor:    eigenbasis structure vs the rational combination of I1,I2,I3
//               at the canonical parameter set {0, i, -1, (1+i)/2}
//   realness:   largest imaginary part discarded when casting to real
struct ComplexStructures {
  MatrixXd I1, I2, I3;
  std::vector<std::pair<cx, MatrixXd>> Izeta;
  std::map<std::string, double> residuals;
};
ComplexStructures complex_structures(const FrameAtPoint& frame, std::span<const cx> zetas);

// Metric and the triple of 2-forms, plus the holomorphic symplectic form
// om1 + i om2, all over basis R. Forms are stored as antisymmetric matrices
// W with alpha(u, w) = u^T W w. Residual keys:
//   keyexp:    fiber pairing of the frame vs its second-derivative expression
//   holomega3: type (2,0) structure of om1 + i om2 in the frame
//   hermitian: g - I_k^T g I_k for k = 1, 2, 3
//   realness:  largest imaginary part discarded when casting to real
struct KahlerForms {
  MatrixXd om1, om2, om3, g;
  MatrixXcd omega_hol;
  int sig_pos = 0, sig_neg = 0;
  std::map<std::string, double> residuals;
};
KahlerForms kahler_forms(const FrameAtPoint& frame, const ChartJet& jet,
                         const JetTable& table, const ComplexStructures& cs);

// Fiber symplectic pairing W_ij = om3(v_i, vbar_j) of the frame; its
// semiflat value is (i/2) Im tau, so W - (i/2) Im tau isolates the series
// corrections.
MatrixXcd fiber_pairing(const FrameAtPoint& frame);

// Everything assembled at one chart point.
struct TensorReport {
  int n = 0;
  MatrixXd I1, I2, I3;
  std::vector<std::pair<cx, MatrixXd>> Izeta;
  MatrixXd om1, om2, om3, g;
  MatrixXcd omega_hol;
  int sig_pos = 0, sig_neg = 0;
  double frame_cond = 0.0;
  double tail_bound = 0.0;
  std::map<std::string, double> residuals;
};
TensorReport tensor_report(const JoyceProvider& provider, const ChartPoint& pt,
                           const ChartJet& jet, std::span<const cx> zetas,
                           double cond_max = 1e6);

// Finite-difference exterior derivatives of om1, om2, om3 plus the four
// first-order identities the closed forms impose on the frame pairing
// W_ij = om3(v_i, vbar_j):
//   structural[0]: v_i W_jk symmetric in i, j
//   structural[1]: h_j W_ik = om3(v_i, [h_j, vbar_k])
//   structural[2]: om3([v_i, hbar_k], v_j) symmetric in i, j
//   structural[3]: v_i W_jk = om3(v_i, [v_j, vbar_k])
struct ClosednessResiduals {
  double d_om[3] = {};
  double structural[4] = {};
  double max_all = 0.0;
};
ClosednessResiduals closedness_residuals(const Prepotential& F, const JoyceProvider& provider,
                                         const ChartPoint& pt, double h_fd = 1e-4,
                                         double cond_max = 1e6);

// Nijenhuis tensor of I1, I2, I3 by finite differences of the structure
// matrices; each entry is the largest component over all direction pairs.
struct NijenhuisResiduals {
  double by_structure[3] = {};
  double max_all = 0.0;
};
NijenhuisResiduals nijenhuis_residuals(const Prepotential& F, const JoyceProvider& provider,
                                       const ChartPoint& pt, double h_fd = 1e-4,
                                       double cond_max = 1e6);

// om3 and the holomorphic symplectic form assembled from their literal
// closed-form expressions: the semiflat part plus, per signed charge, the
// Bessel-sum instanton potential and connection correction.
struct ClosedFormTensors {
  MatrixXcd om3;
  MatrixXcd omega_hol;
  double tail_bound = 0.0;
};
ClosedFormTensors closed_form_tensors(const JoyceProvider& provider, const ChartPoint& pt,
                                      const ChartJet& jet);

// Entrywise comparison of the frame-assembled tensors against the closed
// forms (om3 real part vs the real closed form; omega_hol directly).
struct CrosscheckResiduals {
  double om3 = 0.0;
  double omega_hol = 0.0;
  double max_all = 0.0;
};
CrosscheckResiduals closed_form_crosscheck(const TensorReport& report,
                                           const ClosedFormTensors& cf);

// Transport of a report along the fiberwise identification with the
// cotangent model (theta^i = phi^i, theta_i = -phi_i): operators conjugate by
// the differential, forms pull back along its inverse. invert applies the
// inverse transport.
TensorReport cotangent_pushforward(const TensorReport& report, bool invert = false);

// Closed-form tensors of the cotangent model, built directly from the
// theta-coordinate expressions (basis-R slots 2n+i = d/dtheta_i,
// 3n+i = d/dtheta^i).
ClosedFormTensors cotangent_closed_forms(const JoyceProvider& provider, const ChartPoint& pt,
                                         const ChartJet& jet);

}  // namespace hkt
