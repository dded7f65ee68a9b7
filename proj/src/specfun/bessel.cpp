#include "helmholtz/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace helmholtz::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFpMin = 1e-300;
constexpr int kMaxIter = 1000000;

// Taylor coefficients of 1/Gamma(1+x) about x = 0.
constexpr std::array<double, 30> kRecipGamma = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
    1.7144063219273374334e-20,
};

struct GammaPair {
  double gam1;   // (1/Gamma(1-nu) - 1/Gamma(1+nu)) / (2 nu)
  double gam2;   // (1/Gamma(1-nu) + 1/Gamma(1+nu)) / 2
  double gampl;  // 1/Gamma(1+nu)
  double gammi;  // 1/Gamma(1-nu)
};

// |nu| <= 1/2.
GammaPair temme_gammas(double nu) {
  const double nu2 = nu * nu;
  // Horner in nu^2 over the even and odd coefficients separately.
  double even = 0.0;
  for (int i = 28; i >= 0; i -= 2) even = even * nu2 + kRecipGamma[i];
  double odd = 0.0;
  for (int i = 29; i >= 1; i -= 2) odd = odd * nu2 + kRecipGamma[i];
  GammaPair g{};
  g.gam1 = -odd;
  g.gam2 = even;
  g.gampl = g.gam2 - nu * g.gam1;
  g.gammi = g.gam2 + nu * g.gam1;
  return g;
}

struct Cf1Result {
  double ratio;  // J'_nu / J_nu
  int sign;      // sign of J_nu
  int iterations;
};

// Continued fraction for J'_nu/J_nu (modified Lentz).
Cf1Result cf1(double nu, double x) {
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  int isign = 1;
  double h = nu * xi;
  if (std::abs(h) < kFpMin) h = kFpMin;
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int i = 1;
  for (; i <= kMaxIter; ++i) {
    b += xi2;
    d = b - d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b - 1.0 / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::abs(del - 1.0) < kEps) break;
  }
  if (i > kMaxIter) throw std::runtime_error("bessel_jy: CF1 did not converge");
  return {h, isign, i};
}

struct YPair {
  double y;   // Y_nu
  double y1;  // Y_{nu+1}
};

// Temme's series, x < 2, |nu| <= 1/2.
YPair temme_series(double nu, double x) {
  const double x2 = 0.5 * x;
  const double pimu = kPi * nu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = nu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const GammaPair g = temme_gammas(nu);
  double ff = 2.0 / kPi * fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  e = std::exp(e);
  double p = e / (g.gampl * kPi);
  double q = 1.0 / (e * kPi * g.gammi);
  const double pimu2 = 0.5 * pimu;
  const double fact3 = std::abs(pimu2) < kEps ? 1.0 : std::sin(pimu2) / pimu2;
  const double r = kPi * pimu2 * fact3 * fact3;
  double c = 1.0;
  d = -x2 * x2;
  double sum = ff + r * q;
  double sum1 = p;
  const double nu2 = nu * nu;
  int i = 1;
  for (; i <= kMaxIter; ++i) {
    ff = (i * ff + p + q) / (i * static_cast<double>(i) - nu2);
    c *= d / i;
    p /= (i - nu);
    q /= (i + nu);
    const double del = c * (ff + r * q);
    sum += del;
    const double del1 = c * p - i * del;
    sum1 += del1;
    if (std::abs(del) < (1.0 + std::abs(sum)) * kEps) break;
  }
  if (i > kMaxIter) throw std::runtime_error("bessel_jy: Temme series did not converge");
  return {-sum, -sum1 * 2.0 / x};
}

struct Cf2Result {
  double p;  // Re (H1'/H1)
  double q;  // Im (H1'/H1)
};

// Steed's continued fraction CF2 for H1'_nu/H1_nu, x >= 2.
Cf2Result cf2(double nu, double x) {
  const double xi = 1.0 / x;
  double a = 0.25 - nu * nu;
  double p = -0.5 * xi;
  double q = 1.0;
  const double br = 2.0 * x;
  double bi = 2.0;
  double fact = a * xi / (p * p + q * q);
  double cr = br + q * fact;
  double ci = bi + p * fact;
  double den = br * br + bi * bi;
  double dr = br / den;
  double di = -bi / den;
  double dlr = cr * dr - ci * di;
  double dli = cr * di + ci * dr;
  double temp = p * dlr - q * dli;
  q = p * dli + q * dlr;
  p = temp;
  int i = 2;
  for (; i <= kMaxIter; ++i) {
    a += 2 * (i - 1);
    bi += 2.0;
    dr = a * dr + br;
    di = a * di + bi;
    if (std::abs(dr) + std::abs(di) < kFpMin) dr = kFpMin;
    fact = a / (cr * cr + ci * ci);
    cr = br + cr * fact;
    ci = bi - ci * fact;
    if (std::abs(cr) + std::abs(ci) < kFpMin) cr = kFpMin;
    den = dr * dr + di * di;
    dr /= den;
    di /= -den;
    dlr = cr * dr - ci * di;
    dli = cr * di + ci * dr;
    temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    if (std::abs(dlr - 1.0) + std::abs(dli) < kEps) break;
  }
  if (i > kMaxIter) throw std::runtime_error("bessel_jy: CF2 did not converge");
  return {p, q};
}

}  // namespace

BesselOrder::BesselOrder(double mu) : mu_(mu) {
  if (!std::isfinite(mu) || mu < 0.0) {
    throw std::domain_error("Bessel order must be finite and nonnegative, got " + std::to_string(mu));
  }
}

BesselOrder BesselOrder::for_harmonic(int N, int ell) {
  if (N < 2) throw std::domain_error("harmonic Bessel order requires N >= 2");
  if (ell < 0) throw std::domain_error("harmonic degree must be nonnegative");
  return BesselOrder(ell + 0.5 * (N - 2));
}

bool in_validated_envelope(double mu, double x) noexcept {
  return mu <= kMaxValidatedOrder && x >= kMinValidatedArg && x <= kMaxValidatedArg;
}

BesselValue bessel_jy(BesselOrder order, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("bessel_jy: argument must be positive and finite");
  }
  const double mu = order.value();
  const int n = static_cast<int>(std::floor(mu + 0.5));
  const double nu0 = mu - n;
  const double wronskian = 2.0 / (kPi * x);

  double ynu;
  double ynu1;
  if (x < 2.0) {
    const YPair yp = temme_series(nu0, x);
    ynu = yp.y;
    ynu1 = yp.y1;
  } else {
    const Cf1Result f0 = cf1(nu0, x);
    const Cf2Result h = cf2(nu0, x);
    const double gam = (h.p - f0.ratio) / h.q;
    double jnu = std::sqrt(wronskian / ((h.p - f0.ratio) * gam + h.q));
    jnu = f0.sign < 0 ? -jnu : jnu;
    ynu = gam * jnu;
    const double ynup = h.q * jnu + h.p * ynu;
    ynu1 = nu0 / x * ynu - ynup;
  }

  for (int i = 1; i <= n; ++i) {
    const double nu = nu0 + i;
    const double next = 2.0 * nu / x * ynu1 - ynu;
    ynu = ynu1;
    ynu1 = next;
    if (!std::isfinite(ynu1)) {
      throw std::overflow_error("bessel_jy: Y_mu(x) exceeds the double range for mu=" +
                                std::to_string(mu) + ", x=" + std::to_string(x));
    }
  }

  BesselValue out;
  out.y = ynu;
  out.yp = mu / x * ynu - ynu1;
  if (!std::isfinite(out.yp)) {
    throw std::overflow_error("bessel_jy: Y'_mu(x) exceeds the double range");
  }

  const Cf1Result f = cf1(mu, x);
  if (std::abs(f.ratio) <= 1.0) {
    out.j = wronskian / (out.yp - f.ratio * out.y);
    out.jp = f.ratio * out.j;
  } else {
    out.jp = wronskian / (out.yp / f.ratio - out.y);
    out.j = out.jp / f.ratio;
  }

  if (in_validated_envelope(mu, x)) {
    const double mag = std::max({std::abs(out.j), std::abs(out.y)});
    out.abs_err_est = 32.0 * kEps * (n + 1) * mag;
  } else {
    out.abs_err_est = BesselValue::kUnvalidated;
  }
  return out;
}

double hankel1_modsq(BesselOrder order, double x) {
  const BesselValue v = bessel_jy(order, x);
  const double s = v.j * v.j + v.y * v.y;
  if (!std::isfinite(s)) throw std::overflow_error("hankel1_modsq: |H1|^2 exceeds the double range");
  return s;
}

double CylinderCombination::scale(const BesselValue& v, double x) const noexcept {
  return (std::abs(c_j) + std::abs(c_y)) * std::hypot(v.j, v.y) +
         x * (std::abs(c_jp) + std::abs(c_yp)) * std::hypot(v.jp, v.yp);
}

}  // namespace helmholtz::specfun
