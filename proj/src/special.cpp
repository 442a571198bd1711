#include "hkt/special.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace hkt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286;

// Chebyshev fits of K_nu(x) e^x sqrt(x) as a function of u = 1/x.
// "mid" covers u in [1/8, 1/2] (x in [2, 8]), "far" covers u in [0, 1/8]
// (x in [8, inf)). Clenshaw evaluation with the leading coefficient halved.
inline constexpr double k0_mid[] = {
    2.4235605209667206,
    -0.022356526056998191,
    0.00077341811546938582,
    -4.2810066888860995e-5,
    3.0817001738629747e-6,
    -2.6393672220096650e-7,
    2.5637130364034692e-8,
    -2.7427055499002013e-9,
    3.1694296580974996e-10,
    -3.9023532869621841e-11,
    5.0680406981885754e-12,
    -6.8895747410078707e-13,
    9.7449784978259177e-14,
    -1.4273328418845485e-14,
    2.1564125710214630e-15,
    -3.3496542551495628e-16,
    5.3352602169529117e-17,
    -8.6936699808907538e-18,
    1.4464043478622122e-18,
    -2.4528898255001297e-19,
};

inline constexpr double k0_far[] = {
    2.4879813017369241,
    -0.0091748526910256953,
    0.00014445509317750058,
    -4.0136141754357097e-6,
    1.5678318108523107e-7,
    -7.7701104385217377e-9,
    4.6111825761797179e-10,
    -3.1585929978605658e-11,
    2.4350180393650411e-12,
    -2.0743313873983479e-13,
    1.9257872805899171e-14,
    -1.9275548058389561e-15,
    2.0621980291978183e-16,
    -2.3416851175792424e-17,
    2.8059028106430422e-18,
    -3.5305076311618079e-19,
};

inline constexpr double k1_mid[] = {
    2.7744313406973883,
    0.075719899531993678,
    -0.0014410515564754061,
    6.6501169551257479e-5,
    -4.3699847095201408e-6,
    3.5402774997630527e-7,
    -3.3111637792932920e-8,
    3.4459775819010535e-9,
    -3.8989323474754271e-10,
    4.7208197504658356e-11,
    -6.0478356628753562e-12,
    8.1284948748658748e-13,
    -1.1386945747147891e-13,
    1.6540358408462282e-14,
    -2.4809025677068848e-15,
    3.8292378907024097e-16,
    -6.0647341040012418e-17,
    9.8324256232648616e-18,
    -1.6284168738284380e-18,
};

inline constexpr double k1_far[] = {
    2.5637930834373900,
    0.028328878130497209,
    -0.00024753706739052503,
    5.7719724516072488e-6,
    -2.0689392195365483e-7,
    9.7399834413818042e-9,
    -5.5853361403806250e-10,
    3.7329966340461852e-11,
    -2.8250519610232254e-12,
    2.3720190024841442e-13,
    -2.1766773879917540e-14,
    2.1579141616160325e-15,
    -2.2901969307182693e-16,
    2.5828857298232750e-17,
    -3.0767526412684632e-18,
    3.8514877212804916e-19,
};

// Even-index Bernoulli numbers B_0, B_2, ..., B_60.
inline constexpr double bernoulli_even[] = {
    1.0000000000000000,
    0.16666666666666667,
    -0.033333333333333333,
    0.023809523809523810,
    -0.033333333333333333,
    0.075757575757575758,
    -0.25311355311355311,
    1.1666666666666667,
    -7.0921568627450980,
    54.971177944862155,
    -529.12424242424242,
    6192.1231884057971,
    -86580.253113553114,
    1425517.1666666667,
    -27298231.067816092,
    601580873.90064237,
    -15116315767.092157,
    429614643061.16667,
    -13711655205088.333,
    488332318973593.17,
    -19296579341940068.,
    8.4169304757368262e+17,
    -4.0338071854059455e+19,
    2.1150748638081992e+21,
    -1.2086626522296526e+23,
    7.5008667460769644e+24,
    -5.0387781014810689e+26,
    3.6528776484818123e+28,
    -2.8498769302450882e+30,
    2.3865427499683628e+32,
    -2.1399949257225334e+34,
};

template <std::size_t N>
double clenshaw(const double (&c)[N], double t) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = N - 1; k >= 1; --k) {
    double next = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = next;
  }
  return t * b1 - b2 + 0.5 * c[0];
}

// Power series for x <= 2 (log form of the small-argument expansion).
double k_series_small(int order, double x) {
  const double q = 0.25 * x * x;
  const double lg = std::log(0.5 * x) + kEulerGamma;
  if (order == 0) {
    // K0 = -(log(x/2)+gamma) I0 + sum_{k>=1} h_k q^k / (k!)^2
    double i0 = 1.0, term = 1.0, corr = 0.0, h = 0.0;
    for (int k = 1; k <= 40; ++k) {
      term *= q / (static_cast<double>(k) * k);
      h += 1.0 / k;
      i0 += term;
      corr += h * term;
      if (term < 1e-19 * i0) break;
    }
    return -lg * i0 + corr;
  }
  // K1 = 1/x + (log(x/2)+gamma) I1 - (x/4) sum_{k>=0} (h_k + h_{k+1}) q^k / (k!(k+1)!)
  double i1 = 1.0, term = 1.0, corr = 1.0, hk = 0.0, hk1 = 1.0;
  for (int k = 1; k <= 40; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    hk += 1.0 / k;
    hk1 += 1.0 / (k + 1);
    i1 += term;
    corr += (hk + hk1) * term;
    if (term < 1e-19 * i1) break;
  }
  return 1.0 / x + lg * (0.5 * x) * i1 - 0.25 * x * corr;
}

}  // namespace

BesselValue bessel_k(int order, double x) {
  if (order != 0 && order != 1)
    throw OutOfDomain("bessel_k supports orders 0 and 1");
  if (!(x > 0.0)) throw NonPositiveArgument("bessel_k requires x > 0");
  if (x <= 2.0) return {k_series_small(order, x), false};
  const double u = 1.0 / x;
  double scaled;
  if (x <= 8.0) {
    const double t = (2.0 * u - 0.625) / 0.375;
    scaled = order == 0 ? clenshaw(k0_mid, t) : clenshaw(k1_mid, t);
  } else {
    const double t = 16.0 * u - 1.0;
    scaled = order == 0 ? clenshaw(k0_far, t) : clenshaw(k1_far, t);
  }
  double v = scaled * std::exp(-x) / std::sqrt(x);
  return {v, v == 0.0};
}

double bessel_k0(double x) { return bessel_k(0, x).value; }
double bessel_k1(double x) { return bessel_k(1, x).value; }

// ---------------------------------------------------------------------------
// Gauss-Legendre rules

const QuadRule& gauss_legendre(int npoints) {
  static std::map<int, QuadRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(npoints);
  if (it != cache.end()) return it->second;

  QuadRule rule;
  rule.nodes.resize(static_cast<std::size_t>(npoints));
  rule.weights.resize(static_cast<std::size_t>(npoints));
  const int m = (npoints + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration on P_n from the standard cosine initial guess
    double z = std::cos(kPi * (i + 0.75) / (npoints + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < npoints; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = npoints * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(npoints - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(npoints - 1 - i)] = w;
  }
  return cache.emplace(npoints, std::move(rule)).first->second;
}

double bessel_k_quadrature(int order, double x) {
  if (!(x > 0.0)) throw NonPositiveArgument("bessel_k_quadrature requires x > 0");
  const double T = std::acosh(1.0 + 45.0 / x);
  const int panels = std::max(1, static_cast<int>(std::ceil(T)));
  const QuadRule& rule = gauss_legendre(48);
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = T * p / panels, b = T * (p + 1) / panels;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = mid + half * rule.nodes[k];
      acc += rule.weights[k] * std::exp(-x * std::cosh(t)) * std::cosh(order * t);
    }
    total += half * acc;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Dilogarithm

namespace {

cx dilog_series(cx z) {
  // |z| <= 0.5
  cx sum = 0.0, p = 1.0;
  for (int n = 1; n <= 64; ++n) {
    p *= z;
    cx term = p / static_cast<double>(n * n);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

cx dilog_bernoulli(cx z) {
  // Sum over B_k u^{k+1} / (k! (k+1)) with u = -log(1-z). Odd Bernoulli
  // numbers vanish except B_1 = -1/2.
  const cx u = -std::log(1.0 - z);
  const cx u2 = u * u;
  cx sum = u - 0.25 * u2;
  cx upow = u;             // u^{2m+1}
  double fact = 1.0;       // (2m)!
  for (int m = 1; m <= 30; ++m) {
    upow *= u2;
    fact *= (2.0 * m - 1.0) * (2.0 * m);
    cx term = bernoulli_even[m] * upow / (fact * (2.0 * m + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

}  // namespace

cx dilog(cx z) {
  if (std::abs(z) > 1.0 + 1e-12)
    throw OutOfDomain("dilog argument outside the closed unit disk");
  if (z == cx(1.0, 0.0)) return cx(kPi * kPi / 6.0, 0.0);
  if (std::abs(z) <= 0.5) return dilog_series(z);
  if (std::abs(1.0 - z) <= 0.5)
    return cx(kPi * kPi / 6.0, 0.0) - std::log(z) * std::log(1.0 - z) -
           dilog_series(1.0 - z);
  return dilog_bernoulli(z);
}

// ---------------------------------------------------------------------------
// Ray integral

RayIntegralSpec RayIntegralSpec::standard(cx Zg, double phig) {
  RayIntegralSpec s;
  s.Zg = Zg;
  s.phig = phig;
  const double r = std::abs(Zg);
  if (!(r > 0.0)) throw NonPositiveArgument("ray integral requires |Zg| > 0");
  s.t_cutoff = std::acosh(std::max(42.0 / (2.0 * kPi * r), std::cosh(1.0)));
  s.quad_points = 257;
  return s;
}

cx ray_integral_dilog(const RayIntegralSpec& spec) {
  const double r = std::abs(spec.Zg);
  if (!(r > 0.0)) throw NonPositiveArgument("ray integral requires |Zg| > 0");
  const double theta = std::remainder(spec.phig, 2.0 * kPi);
  const QuadRule& rule = gauss_legendre(spec.quad_points);
  const double T = spec.t_cutoff;
  cx total = 0.0;
  for (int panel = 0; panel < 2; ++panel) {
    const double a = panel == 0 ? -T : 0.0;
    const double b = panel == 0 ? 0.0 : T;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cx acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = mid + half * rule.nodes[k];
      const double mag = std::exp(-2.0 * kPi * r * std::cosh(t));
      acc += rule.weights[k] * dilog(mag * cx(std::cos(theta), std::sin(theta)));
    }
    total += half * acc;
  }
  return total;
}

}  // namespace hkt
