#pragma once

#include <string>
#include <vector>

#include "hkt/prepotential.hpp"

namespace hkt {

// Exact rational index value, parsed from "p" or "p/q".
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational parse(const std::string& text);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

// Lattice charge split into the frame (m) and fiber (k) halves.
struct Charge {
  std::vector<int> m;
  std::vector<int> k;

  bool operator==(const Charge&) const = default;
  Charge negated() const;
  bool is_zero() const;
};

// Antisymmetric Darboux pairing <a, b> = sum_i (m_i k'_i - k_i m'_i).
long long darboux_pairing(const Charge& a, const Charge& b);

// Finite symmetric charge support with rational indices. Construction
// enforces:
//  - entries have consistent dimension and nonzero charge (ZeroCharge)
//  - mutually commuting support (CoupledSupport, checked first)
//  - the adapted frame m = 0 (MixedFrame)
//  - symmetry under negation; the missing partner of each charge is filled in
//    automatically, and conflicting indices for gamma/-gamma raise
//    ParityViolation
// Charges with index 0 are dropped.
class BpsStructure {
 public:
  struct SupportPair {
    Charge gamma;  // representative; -gamma carries the same index
    Rational omega;
  };

  static BpsStructure make(int n, const std::vector<std::pair<Charge, Rational>>& entries);

  int dim() const { return n_; }
  const std::vector<SupportPair>& pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }
  double omega_max() const;

 private:
  int n_ = 0;
  std::vector<SupportPair> pairs_;
};

struct CentralCharge {
  cx value;                    // m_i Zlow_i + k_i Z^i
  std::vector<int> fiber_m;    // coefficients of phi_i in the fiber phase
  std::vector<int> fiber_k;    // coefficients of phi^i in the fiber phase
};
CentralCharge central_charge(const BpsStructure& bps, const ChartJet& jet,
                             const Charge& gamma);

}  // namespace hkt
