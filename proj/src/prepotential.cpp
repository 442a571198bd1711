#include "hkt/prepotential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hkt {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::size_t Prepotential::packed(int i, int j) const {
  // i <= j, both 0-based; row-packed upper triangle
  return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 +
         static_cast<std::size_t>(j - i);
}

Prepotential Prepotential::parse(std::string_view text, int n) {
  return from_tree(parse_expression(text, n), n, "custom");
}

Prepotential Prepotential::from_tree(ExprPtr tree, int n, std::string tag) {
  Prepotential F;
  F.n_ = n;
  F.tag_ = std::move(tag);
  F.tree_ = std::move(tree);
  F.grad_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) F.grad_.push_back(differentiate(F.tree_, i + 1));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      F.hess_.push_back(differentiate(F.grad_[static_cast<std::size_t>(i)], j + 1));
  F.third_.resize(F.hess_.size());
  std::size_t p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++p)
      for (int k = 0; k < n; ++k)
        F.third_[p].push_back(differentiate(F.hess_[p], k + 1));
  return F;
}

Prepotential::Jet Prepotential::jet(const VectorXcd& Z) const {
  const int n = n_;
  std::span<const cx> zs(Z.data(), static_cast<std::size_t>(n));
  Jet out;
  out.Z = Z;
  out.F = evaluate(tree_, zs);
  out.Zlow.resize(n);
  for (int i = 0; i < n; ++i) out.Zlow(i) = evaluate(grad_[static_cast<std::size_t>(i)], zs);
  out.tau.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      cx v = evaluate(hess_[packed(i, j)], zs);
      out.tau(i, j) = v;
      out.tau(j, i) = v;
    }

  // Third derivatives: evaluate d tau_ij / d Z^k for i <= j and assert the
  // remaining index symmetry before symmetrizing the full tensor.
  std::vector<std::vector<cx>> D(hess_.size(), std::vector<cx>(static_cast<std::size_t>(n)));
  double scale = 1.0;
  std::size_t p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++p)
      for (int k = 0; k < n; ++k) {
        cx v = evaluate(third_[p][static_cast<std::size_t>(k)], zs);
        D[p][static_cast<std::size_t>(k)] = v;
        scale = std::max(scale, std::abs(v));
      }
  auto lookup = [&](int i, int j, int k) {
    int a = std::min(i, j), b = std::max(i, j);
    return D[packed(a, b)][static_cast<std::size_t>(k)];
  };
  out.dtau.assign(static_cast<std::size_t>(n), MatrixXcd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        int s[3] = {i, j, k};
        std::sort(s, s + 3);
        cx canonical = lookup(s[0], s[1], s[2]);
        for (cx v : {lookup(i, j, k), lookup(i, k, j), lookup(k, j, i)}) {
          if (std::abs(v - canonical) > 1e-12 * scale)
            throw std::logic_error("third-derivative symmetry violated");
        }
        out.dtau[static_cast<std::size_t>(k)](i, j) = canonical;
        out.dtau[static_cast<std::size_t>(k)](j, i) = canonical;
      }

  MatrixXd im = out.tau.imag();
  double im_max = im.cwiseAbs().maxCoeff();
  double det = im.determinant();
  if (std::abs(det) <= 1e-10 * std::pow(im_max, n)) {
    std::ostringstream os;
    os << "Im tau is numerically singular (det = " << det << ")";
    throw NonInvertibleImTau(det, os.str());
  }
  return out;
}

AskTensors ask_tensors(const ChartJet& jet) {
  const int n = static_cast<int>(jet.Z.size());
  MatrixXd im = jet.tau.imag();
  AskTensors t;
  t.omega = MatrixXd::Zero(2 * n, 2 * n);
  t.omega.block(0, n, n, n) = im;
  t.omega.block(n, 0, n, n) = -im;
  t.g = MatrixXd::Zero(2 * n, 2 * n);
  t.g.block(0, 0, n, n) = im;
  t.g.block(n, n, n, n) = im;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(t.g);
  double thresh = 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff();
  for (int k = 0; k < 2 * n; ++k) {
    if (es.eigenvalues()(k) > thresh)
      ++t.sig_pos;
    else if (es.eigenvalues()(k) < -thresh)
      ++t.sig_neg;
  }
  return t;
}

ConjugateCoords conjugate_coordinates(const ChartJet& jet) {
  const int n = static_cast<int>(jet.Z.size());
  ConjugateCoords c;
  c.x = jet.Z.real();
  c.y = -jet.Zlow.real();
  c.xi10.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    c.xi10(i) = 0.5 * jet.Z(i);
    c.xi10(n + i) = -0.5 * jet.Zlow(i);
  }
  return c;
}

PeriodStructureReport verify_special_period_structure(const Prepotential& F,
                                                      std::span<const VectorXcd> samples,
                                                      double fd_step) {
  PeriodStructureReport rep;
  const int n = F.dim();
  const double h = fd_step;
  for (const VectorXcd& Z : samples) {
    ChartJet jet = F.jet(Z);
    rep.tau_symmetry =
        std::max(rep.tau_symmetry, (jet.tau - jet.tau.transpose()).cwiseAbs().maxCoeff());

    // dz: central differences of Zlow along ReZ^j and ImZ^j
    for (int j = 0; j < n; ++j) {
      VectorXcd Zp = Z, Zm = Z;
      Zp(j) += h;
      Zm(j) -= h;
      VectorXcd d_re = (F.jet(Zp).Zlow - F.jet(Zm).Zlow) / (2 * h);
      Zp = Z;
      Zm = Z;
      Zp(j) += cx(0, h);
      Zm(j) -= cx(0, h);
      VectorXcd d_im = (F.jet(Zp).Zlow - F.jet(Zm).Zlow) / (2 * h);
      for (int i = 0; i < n; ++i) {
        rep.dz = std::max(rep.dz, std::abs(d_re(i) - jet.tau(i, j)));
        rep.dz = std::max(rep.dz, std::abs(d_im(i) - cx(0, 1) * jet.tau(i, j)));
      }
    }

    // euler: FD Jacobian of the distinguished section in (ReZ, ImZ), pushed to
    // the conjugate frame, against the (1,0) projector.
    MatrixXcd dxi(2 * n, 2 * n);
    for (int j = 0; j < 2 * n; ++j) {
      VectorXcd Zp = Z, Zm = Z;
      cx delta = (j < n) ? cx(h, 0) : cx(0, h);
      int col = j % n;
      Zp(col) += delta;
      Zm(col) -= delta;
      dxi.col(j) = (conjugate_coordinates(F.jet(Zp)).xi10 -
                    conjugate_coordinates(F.jet(Zm)).xi10) /
                   (2 * h);
    }
    MatrixXd im = jet.tau.imag(), re = jet.tau.real();
    MatrixXd Jxy = MatrixXd::Zero(2 * n, 2 * n);
    Jxy.block(0, 0, n, n).setIdentity();
    Jxy.block(n, 0, n, n) = -re;
    Jxy.block(n, n, n, n) = im;
    MatrixXd Istd = MatrixXd::Zero(2 * n, 2 * n);
    Istd.block(0, n, n, n) = -MatrixXd::Identity(n, n);
    Istd.block(n, 0, n, n).setIdentity();
    MatrixXd Jinv = Jxy.inverse();
    MatrixXcd M = dxi * Jinv.cast<cx>();
    MatrixXcd Ixy = (Jxy * Istd * Jinv).cast<cx>();
    MatrixXcd proj =
        0.5 * (MatrixXcd::Identity(2 * n, 2 * n) - cx(0, 1) * Ixy);
    rep.euler = std::max(rep.euler, (M - proj).cwiseAbs().maxCoeff());
  }
  rep.max_residual = std::max({rep.dz, rep.tau_symmetry, rep.euler});
  return rep;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

Prepotential make_quadratic(int n, const std::map<std::string, std::vector<cx>>& params) {
  MatrixXcd c = cx(0, 1) * MatrixXcd::Identity(n, n);
  if (auto it = params.find("c"); it != params.end()) {
    if (static_cast<int>(it->second.size()) != n * n)
      throw ConfigError("quadratic coefficient list must have n*n entries");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j) = it->second[static_cast<std::size_t>(i * n + j)];
    c = ((c + c.transpose()) / 2.0).eval();
  }
  ExprPtr sum = Expr::make_number(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (c(i, j) == cx(0, 0)) continue;
      ExprPtr term = Expr::mul(Expr::make_const(0.5 * c(i, j)),
                               Expr::mul(Expr::make_var(i + 1), Expr::make_var(j + 1)));
      sum = Expr::add(sum, term);
    }
  return Prepotential::from_tree(sum, n, "quadratic");
}

Prepotential make_cubic(int n) {
  if (n != 1) throw ConfigError("cubic catalog prepotential requires n = 1");
  ExprPtr e = Expr::div(Expr::pow(Expr::make_var(1), 3), Expr::make_number(6.0));
  return Prepotential::from_tree(e, 1, "cubic");
}

Prepotential make_ov_log(int n, const std::map<std::string, std::vector<cx>>& params) {
  if (n != 1) throw ConfigError("ov-log catalog prepotential requires n = 1");
  double Lambda = 10.0;
  cx tau0(0, 1);
  if (auto it = params.find("Lambda"); it != params.end() && !it->second.empty()) {
    if (it->second[0].imag() != 0.0 || it->second[0].real() <= 0.0)
      throw ConfigError("Lambda must be a positive real number");
    Lambda = it->second[0].real();
  }
  if (auto it = params.find("tau0"); it != params.end() && !it->second.empty())
    tau0 = it->second[0];
  ExprPtr Z = Expr::make_var(1);
  ExprPtr zsq = Expr::pow(Z, 2);
  // (Z^2 / (4 pi i)) (log(Z/Lambda) - 3/2) + (tau0/2) Z^2
  ExprPtr t1 = Expr::mul(
      Expr::mul(Expr::make_const(cx(0, -1.0 / (4 * kPi))), zsq),
      Expr::sub(Expr::log(Expr::div(Z, Expr::make_number(Lambda))), Expr::make_number(1.5)));
  ExprPtr t2 = Expr::mul(Expr::make_const(tau0 / 2.0), zsq);
  return Prepotential::from_tree(Expr::add(t1, t2), 1, "ov-log");
}

}  // namespace

Prepotential catalog_prepotential(const std::string& name, int n,
                                  const std::map<std::string, std::vector<cx>>& params) {
  if (n < 1) throw ConfigError("chart dimension must be at least 1");
  if (name == "quadratic") return make_quadratic(n, params);
  if (name == "cubic") return make_cubic(n);
  if (name == "ov-log") return make_ov_log(n, params);
  throw ConfigError("unknown catalog prepotential '" + name + "'");
}

std::vector<std::string> catalog_names() { return {"quadratic", "cubic", "ov-log"}; }

}  // namespace hkt
