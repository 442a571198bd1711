#pragma once

#include "hkt/hk.hpp"

namespace hkt {

// Integer lattice shift of the fiber angles: phi^i by 2 pi up_i, phi_i by
// 2 pi dn_i.
struct LatticeShift {
  std::vector<int> up, dn;
};

// Largest entrywise change across the assembled tensors when the fiber point
// moves by the shift. The fiber is a torus of period 2 pi in every angle, so
// a lattice shift must reproduce every tensor; a non-integer shift generally
// does not and serves as a negative control.
double periodicity_residual(const JoyceProvider& provider, const ChartPoint& pt,
                            const ChartJet& jet, const LatticeShift& shift,
                            std::span<const cx> zetas, double cond_max = 1e6);

// Torus-fibration structure at one point:
//   lagrangian: omega_hol evaluated on pairs of fiber directions
//   polarization: om3 fiber block vs the constant angular pairing
//   projection: base rows of I3 vs the base complex structure
struct FiberChecks {
  double lagrangian = 0.0;
  double polarization = 0.0;
  double projection = 0.0;
  double max_all = 0.0;
};
FiberChecks fiber_checks(const TensorReport& report);

}  // namespace hkt
