#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hkt/expr.hpp"

namespace hkt {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Holomorphic function F(Z1..Zn) with precomputed symbolic derivatives up to
// third order. Instances come from parsing user text or from the built-in
// catalog.
class Prepotential {
 public:
  static Prepotential parse(std::string_view text, int n);
  static Prepotential from_tree(ExprPtr tree, int n, std::string tag = "custom");

  int dim() const { return n_; }
  const ExprPtr& tree() const { return tree_; }
  const std::string& tag() const { return tag_; }

  struct Jet;
  Jet jet(const VectorXcd& Z) const;

  // First derivative trees (for tests that want the symbolic layer directly).
  const ExprPtr& gradient_tree(int i) const { return grad_[static_cast<std::size_t>(i)]; }

 private:
  int n_ = 0;
  std::string tag_;
  ExprPtr tree_;
  std::vector<ExprPtr> grad_;          // n entries
  std::vector<ExprPtr> hess_;          // packed i <= j
  std::vector<std::vector<ExprPtr>> third_;  // third_[packed ij][k], k = 0..n-1

  std::size_t packed(int i, int j) const;  // i <= j
};

// Pointwise second-order data of the chart: value, dual periods, tau and its
// gradient. dtau[k](i, j) = d tau_ij / d Z^k, symmetrized over all index
// permutations after an internal symmetry assertion.
struct Prepotential::Jet {
  VectorXcd Z;
  cx F;
  VectorXcd Zlow;                // Zlow_i = dF/dZ^i
  MatrixXcd tau;                 // tau_ij, symmetric
  std::vector<MatrixXcd> dtau;   // n matrices

  MatrixXd im_tau() const { return tau.imag(); }
};

using ChartJet = Prepotential::Jet;

// Base-manifold tensors in the real frame (d/dReZ^1.., d/dImZ^1..).
struct AskTensors {
  MatrixXd omega;  // 2n x 2n, blocks [[0, Im tau], [-Im tau, 0]]
  MatrixXd g;      // omega composed with multiplication by i, [[Im tau, 0], [0, Im tau]]
  int sig_pos = 0;
  int sig_neg = 0;
};
AskTensors ask_tensors(const ChartJet& jet);

struct ConjugateCoords {
  VectorXd x;       // Re Z^i
  VectorXd y;       // -Re Zlow_i
  VectorXcd xi10;   // components of the distinguished (1,0) section in the
                    // frame (d/dx^i, d/dy_i): (Z^i/2, -Zlow_i/2)
};
ConjugateCoords conjugate_coordinates(const ChartJet& jet);

// Finite-difference validation of the chart structure at sample points:
//  - dz: d Zlow_i / d Z^j equals tau_ij (Wirtinger derivative by central FD)
//  - tau_symmetry: max |tau - tau^T|
//  - euler: the covariant derivative of the distinguished section equals the
//    (1,0) projector in the conjugate frame
struct PeriodStructureReport {
  double dz = 0.0;
  double tau_symmetry = 0.0;
  double euler = 0.0;
  double max_residual = 0.0;
};
PeriodStructureReport verify_special_period_structure(const Prepotential& F,
                                                      std::span<const VectorXcd> samples,
                                                      double fd_step = 1e-5);

// Built-in prepotentials. Parameters (all optional, with defaults):
//  quadratic: "c" row-major n*n complex matrix, default i*Id
//  cubic:     n = 1 only, Z^3/6
//  ov-log:    n = 1, (Z^2/(4 pi i)) (log(Z/Lambda) - 3/2) + (tau0/2) Z^2,
//             parameters "Lambda" (default 10) and "tau0" (default i)
Prepotential catalog_prepotential(const std::string& name, int n,
                                  const std::map<std::string, std::vector<cx>>& params = {});
std::vector<std::string> catalog_names();

}  // namespace hkt
