#pragma once

#include <optional>
#include <span>

#include "hkt/bps.hpp"
#include "hkt/special.hpp"

namespace hkt {

// A point of the total space: base coordinates Z and fiber angles
// (phi^1..phi^n, phi_1..phi_n).
struct ChartPoint {
  VectorXcd Z;
  VectorXd phi_up;  // phi^i
  VectorXd phi_dn;  // phi_i
};

// Complexified coordinate basis ordering used throughout ("basis B"):
//   0..n-1   : d/dZ^i
//   n..2n-1  : d/dZbar^i
//   2n..3n-1 : d/dphi^i
//   3n..4n-1 : d/dphi_i
// The real basis ("basis R") replaces the first two blocks by
// d/dReZ^i, d/dImZ^i and keeps the fiber blocks.

// Change of coefficients from basis B to basis R for tangent vectors.
MatrixXcd basis_b_to_r(int n);

// Complex conjugate of a vector field expressed in basis B (swaps the
// holomorphic/antiholomorphic blocks).
VectorXcd conj_in_b(const VectorXcd& v);

// Source of the generating function: either identically zero (semi-flat) or
// the uncoupled series attached to a mutually commuting charge support.
class JoyceProvider {
 public:
  static JoyceProvider zero(int n);
  static JoyceProvider uncoupled(BpsStructure bps, double tail_tol = 1e-12,
                                 double support_floor = 1e-6);

  bool is_zero() const { return !bps_.has_value(); }
  int dim() const { return n_; }
  const BpsStructure& bps() const;
  double tail_tol() const { return tail_tol_; }
  double support_floor() const { return support_floor_; }

 private:
  int n_ = 0;
  std::optional<BpsStructure> bps_;
  double tail_tol_ = 1e-12;
  double support_floor_ = 1e-6;
};

struct JEval {
  cx value;
  double tail_bound = 0.0;  // bound on the truncated remainder
};
JEval j_eval(const JoyceProvider& provider, const ChartPoint& pt, const ChartJet& jet);

// Per-support-pair series data: central charge value, reduced phase, and the
// truncation index meeting the provider's tail tolerance at this point. With
// derivative_guard the truncation also covers third-derivative growth, so one
// index serves a whole derivative table. Throws SupportViolation when a
// central charge modulus falls below the support floor.
struct ChargeSeriesData {
  const std::vector<int>* k = nullptr;  // fiber charge of the representative
  double omega = 0.0;
  cx Zg;
  double r = 0.0;
  double theta = 0.0;  // reduced to (-pi, pi]
  int n_max = 0;
  double tail = 0.0;
};
std::vector<ChargeSeriesData> charge_series_data(const JoyceProvider& provider,
                                                const ChartPoint& pt, const ChartJet& jet,
                                                bool derivative_guard);

// Dense table of partial derivatives of J up to the requested order (max 3)
// in the complexified variables, indexed by basis-B variable ids.
class JetTable {
 public:
  JetTable(int n, int order);

  int dim() const { return n_; }
  int order() const { return order_; }
  double tail_bound() const { return tail_; }

  cx d0() const { return d0_; }
  cx d1(int a) const { return d1_(a); }
  cx d2(int a, int b) const { return d2_(a, b); }
  cx d3(int a, int b, int c) const { return d3_[static_cast<std::size_t>(a)](b, c); }

  // Entries of the table of the conjugate function: a derivative of conj(J)
  // is the conjugate of the derivative of J with Z and Zbar indices swapped.
  cx d0_conj() const { return std::conj(d0_); }
  cx d1_conj(int a) const { return std::conj(d1(swap_z(a))); }
  cx d2_conj(int a, int b) const { return std::conj(d2(swap_z(a), swap_z(b))); }
  cx d3_conj(int a, int b, int c) const {
    return std::conj(d3(swap_z(a), swap_z(b), swap_z(c)));
  }

  // Variable id with the Z and Zbar blocks exchanged; fiber ids are fixed.
  int swap_z(int a) const {
    if (a < n_) return a + n_;
    if (a < 2 * n_) return a - n_;
    return a;
  }

 private:
  friend JetTable j_partials(const JoyceProvider&, const ChartPoint&, const ChartJet&, int);
  int n_;
  int order_;
  double tail_ = 0.0;
  cx d0_{};
  VectorXcd d1_;
  MatrixXcd d2_;
  std::vector<MatrixXcd> d3_;
};

JetTable j_partials(const JoyceProvider& provider, const ChartPoint& pt,
                    const ChartJet& jet, int max_order);

// Fiber Hamiltonian field of a function with the given fiber gradient,
// returned as basis-B coefficients:
//   (df/dphi^i) d/dphi_i - (df/dphi_i) d/dphi^i.
VectorXcd vertical_ham(int n, const VectorXcd& dphi_up, const VectorXcd& dphi_dn);

// Adapted frame at a point. Columns i of each matrix are basis-B coefficient
// vectors for the base direction d/dZ^i:
//   H:  horizontal unit vector d/dZ^i
//   nu: nu for d/dZ^i (uses tau)
//   h:  H + Ham of (H . J)
//   v:  2 pi i (nu-bar + Ham of (nu-bar . J)), the anti-linear partner
// cond is the condition number of [h | conj h | v | conj v].
struct FrameAtPoint {
  int n = 0;
  MatrixXcd H, nu, h, v;  // 4n x n
  double cond = 0.0;
};
FrameAtPoint frame_hv(const JoyceProvider& provider, const ChartPoint& pt,
                      const ChartJet& jet, double cond_max = 1e6);
// Same, reusing a precomputed order-2 derivative table.
FrameAtPoint frame_hv(const JoyceProvider& provider, const ChartJet& jet,
                      const JetTable& table, double cond_max = 1e6);

// Connection direction vectors A^zeta for the base direction d/dZ^i
// (conjugated = false) or d/dZbar^i (conjugated = true), in basis B:
//   A^zeta_i    = h_i - zeta^{-1} conj(v_i)
//   A^zeta_ibar = conj(h_i) + zeta v_i
// Throws ZeroZeta at zeta = 0; the scaled limits are available separately.
VectorXcd connection_vector(const FrameAtPoint& frame, cx zeta, int i, bool conjugated);
VectorXcd connection_limit(const FrameAtPoint& frame, bool at_zero, int i, bool conjugated);

}  // namespace hkt
