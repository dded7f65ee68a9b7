#include "helmholtz/boundary_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace helmholtz::boundary {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t binom(std::int64_t n, std::int64_t r) {
  if (r < 0 || n < 0 || r > n) return 0;
  r = std::min(r, n - r);
  std::int64_t acc = 1;
  for (std::int64_t i = 0; i < r; ++i) {
    if (acc > std::numeric_limits<std::int64_t>::max() / (n - i)) {
      throw std::overflow_error("harmonic dimension exceeds 64-bit range");
    }
    // acc * (n - i) is divisible by i + 1 since acc = binom(n, i).
    acc = acc * (n - i) / (i + 1);
  }
  return acc;
}

void check_dim(int N) {
  if (N < 2) throw std::domain_error("space dimension must be at least 2, got " + std::to_string(N));
}

template <class T>
void check_shape(int N, double R, const HarmonicCoefficients<T>& u) {
  if (u.N != N) throw std::invalid_argument("coefficient dimension does not match N");
  if (std::abs(u.R - R) > 1e-14 * R) throw std::invalid_argument("coefficient radius does not match R");
  u.validate();
}

double unit_sphere_area(int N) {
  return 2.0 * std::pow(kPi, 0.5 * N) / std::tgamma(0.5 * N);
}

struct ScaledHankel {
  Complex h;   // H1(x) / s
  Complex hp;  // H1'(x) / s
  double s;
};

ScaledHankel scaled_hankel(specfun::BesselOrder order, double x) {
  const specfun::BesselValue v = specfun::bessel_jy(order, x);
  const double s = std::max(std::abs(v.j), std::abs(v.y));
  return {Complex(v.j / s, v.y / s), Complex(v.jp / s, v.yp / s), s};
}

// Field and radial derivative multipliers for the ell-th shell at radius r:
// (r/R)^(-nu) H(kr)/H(kR) and its r-derivative.
struct ShellFactor {
  Complex value;
  Complex deriv;
};

ShellFactor shell_factor(int N, double k, double R, int ell, double r) {
  const auto order = specfun::BesselOrder::for_harmonic(N, ell);
  const double nu = 0.5 * (N - 2);
  const specfun::BesselValue outer = specfun::bessel_jy(order, k * r);
  const ScaledHankel inner = scaled_hankel(order, k * R);
  const Complex h_out(outer.j / inner.s, outer.y / inner.s);
  const Complex hp_out(outer.jp / inner.s, outer.yp / inner.s);
  const double geom = std::pow(r / R, -nu);
  const Complex ratio = h_out / inner.h;
  const Complex dratio = (k * hp_out) / inner.h;
  return {geom * ratio, geom * (dratio - (nu / r) * ratio)};
}

double shell_norm(const std::vector<Complex>& c) {
  double s = 0.0;
  for (const auto& x : c) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

std::int64_t harmonic_dim(int N, int ell) {
  check_dim(N);
  if (ell < 0) throw std::domain_error("harmonic degree must be nonnegative");
  if (ell == 0) return 1;
  // Homogeneous polynomials of degree ell minus those of degree ell - 2.
  return binom(N + ell - 1, N - 1) - binom(N + ell - 3, N - 1);
}

HarmonicDimTable::HarmonicDimTable(int N_, int lmax) : N(N_) {
  if (lmax < 0) throw std::domain_error("lmax must be nonnegative");
  dims.reserve(static_cast<std::size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) dims.push_back(harmonic_dim(N_, l));
}

std::int64_t HarmonicDimTable::total() const noexcept {
  std::int64_t t = 0;
  for (auto d : dims) t += d;
  return t;
}

template <class T>
void HarmonicCoefficients<T>::validate() const {
  check_dim(N);
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("sphere radius must be positive");
  if (coeffs.empty()) throw std::invalid_argument("coefficient array holds no shells");
  for (std::size_t l = 0; l < coeffs.size(); ++l) {
    const auto d = harmonic_dim(N, static_cast<int>(l));
    if (static_cast<std::int64_t>(coeffs[l].size()) != d) {
      throw std::invalid_argument("shell " + std::to_string(l) + " has " + std::to_string(coeffs[l].size()) +
                                  " coefficients, expected " + std::to_string(d));
    }
    for (const auto& c : coeffs[l]) {
      if (!std::isfinite(std::abs(c))) {
        throw std::invalid_argument("non-finite coefficient in shell " + std::to_string(l));
      }
    }
  }
}

template <class T>
double HarmonicCoefficients<T>::unit_sphere_norm_sq() const noexcept {
  double s = 0.0;
  for (const auto& shell : coeffs)
    for (const auto& c : shell) s += std::norm(Complex(c));
  return s;
}

template <class T>
double HarmonicCoefficients<T>::norm_sq() const noexcept {
  return std::pow(R, N - 1) * unit_sphere_norm_sq();
}

template struct HarmonicCoefficients<double>;
template struct HarmonicCoefficients<Complex>;

ComplexCoefficients to_complex(const RealCoefficients& u) {
  ComplexCoefficients out;
  out.N = u.N;
  out.R = u.R;
  out.coeffs.reserve(u.coeffs.size());
  for (const auto& shell : u.coeffs) out.coeffs.emplace_back(shell.begin(), shell.end());
  return out;
}

CapacityCoefficient capacity_coeff(int N, double k, double R, int ell) {
  check_dim(N);
  if (!(k > 0.0) || !(R > 0.0)) throw std::domain_error("k and R must be positive");
  const auto order = specfun::BesselOrder::for_harmonic(N, ell);
  const double r = k * R;
  const specfun::BesselValue v = specfun::bessel_jy(order, r);
  const double s = std::max(std::abs(v.j), std::abs(v.y));
  const double a = v.j / s;
  const double b = v.y / s;
  const double m = a * a + b * b;
  const double re_g = r * (a * (v.jp / s) + b * (v.yp / s)) / m;
  const double im_g = (2.0 / kPi) / s / s / m;

  CapacityCoefficient c;
  c.ell = ell;
  c.z = Complex(re_g - 0.5 * (N - 2), im_g);
  c.validated = v.validated();
  const double neg_re = -c.z.real();
  if (N == 2 && ell == 0) {
    c.re_bound_ok = neg_re > 0.0 && neg_re <= 0.5 * (1.0 + kBoundSlack);
    c.im_bound_ok = im_g > 0.0;
  } else {
    const double lo = 0.5 * (N - 1);
    const double hi = ell + N - 2.0;
    c.re_bound_ok = neg_re >= lo * (1.0 - kBoundSlack) && neg_re <= hi * (1.0 + kBoundSlack);
    c.im_bound_ok = im_g > 0.0 && im_g <= r * (1.0 + kBoundSlack);
  }
  return c;
}

std::vector<CapacityCoefficient> capacity_coeffs(int N, double k, double R, int lmax) {
  std::vector<CapacityCoefficient> out;
  out.reserve(static_cast<std::size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) out.push_back(capacity_coeff(N, k, R, l));
  return out;
}

ComplexCoefficients dtn_apply(int N, double k, double R, const ComplexCoefficients& u) {
  check_shape(N, R, u);
  ComplexCoefficients out = u;
  for (int l = 0; l <= u.lmax(); ++l) {
    const Complex mult = capacity_coeff(N, k, R, l).z / R;
    for (auto& c : out.coeffs[l]) c *= mult;
  }
  return out;
}

RealCoefficients ktr_apply(int N, double k, double R, const RealCoefficients& u) {
  check_shape(N, R, u);
  RealCoefficients out = u;
  for (int l = 0; l <= u.lmax(); ++l) {
    const double mult = capacity_coeff(N, k, R, l).z.real() / R;
    for (auto& c : out.coeffs[l]) c *= mult;
  }
  return out;
}

double ktr_bilinear(int N, double k, double R, const RealCoefficients& u, const RealCoefficients& v) {
  check_shape(N, R, u);
  check_shape(N, R, v);
  if (u.lmax() != v.lmax()) throw std::invalid_argument("coefficient arrays differ in lmax");
  double acc = 0.0;
  for (int l = 0; l <= u.lmax(); ++l) {
    const double mult = capacity_coeff(N, k, R, l).z.real() / R;
    double shell = 0.0;
    for (std::size_t m = 0; m < u.coeffs[l].size(); ++m) shell += u.coeffs[l][m] * v.coeffs[l][m];
    acc += mult * shell;
  }
  return std::pow(R, N - 1) * acc;
}

double ktr_coercivity(int N, double k, double R, int lmax) {
  double g = std::numeric_limits<double>::infinity();
  for (int l = 0; l <= lmax; ++l) g = std::min(g, -capacity_coeff(N, k, R, l).z.real() / R);
  return g;
}

std::vector<std::vector<double>> real_harmonics(int N, int lmax, std::span<const double> x) {
  if (static_cast<int>(x.size()) != N) throw std::invalid_argument("point dimension does not match N");
  if (lmax < 0) throw std::domain_error("lmax must be nonnegative");
  std::vector<std::vector<double>> out(static_cast<std::size_t>(lmax) + 1);
  if (N == 2) {
    const double theta = std::atan2(x[1], x[0]);
    out[0] = {1.0 / std::sqrt(2.0 * kPi)};
    for (int l = 1; l <= lmax; ++l) {
      out[l] = {std::cos(l * theta) / std::sqrt(kPi), std::sin(l * theta) / std::sqrt(kPi)};
    }
    return out;
  }
  if (N == 3) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (!(r > 0.0)) throw std::domain_error("direction of the origin is undefined");
    const double theta = std::acos(std::clamp(x[2] / r, -1.0, 1.0));
    const double phi = std::atan2(x[1], x[0]);
    for (int l = 0; l <= lmax; ++l) {
      auto& shell = out[l];
      shell.reserve(2 * l + 1);
      shell.push_back(std::sph_legendre(l, 0, theta));
      for (int m = 1; m <= l; ++m) {
        const double p = std::sqrt(2.0) * std::sph_legendre(l, m, theta);
        shell.push_back(p * std::cos(m * phi));
        shell.push_back(p * std::sin(m * phi));
      }
    }
    return out;
  }
  throw std::domain_error("pointwise harmonics are available for N = 2 and N = 3 only");
}

Complex hankel_ratio(specfun::BesselOrder order, double kr, double kR) {
  const ScaledHankel inner = scaled_hankel(order, kR);
  const specfun::BesselValue outer = specfun::bessel_jy(order, kr);
  return Complex(outer.j / inner.s, outer.y / inner.s) / inner.h;
}

ExteriorValue exterior_eval(int N, double k, double R, const ComplexCoefficients& u,
                            std::span<const double> x) {
  check_shape(N, R, u);
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  const double r = std::sqrt(r2);
  if (static_cast<int>(x.size()) != N) throw std::invalid_argument("point dimension does not match N");
  if (r < R * (1.0 - 1e-14)) throw std::domain_error("exterior evaluation needs |x| >= R");
  const auto ys = real_harmonics(N, u.lmax(), x);
  ExteriorValue out;
  const double area = unit_sphere_area(N);
  for (int l = 0; l <= u.lmax(); ++l) {
    const Complex f = shell_factor(N, k, R, l, std::max(r, R)).value;
    Complex shell = 0.0;
    for (std::size_t m = 0; m < ys[l].size(); ++m) shell += u.coeffs[l][m] * ys[l][m];
    out.value += f * shell;
    if (l == u.lmax()) {
      const double d = static_cast<double>(ys[l].size());
      out.tail_estimate = std::abs(f) * shell_norm(u.coeffs[l]) * std::sqrt(d / area);
    }
  }
  return out;
}

ComplexCoefficients exterior_coefficients(int N, double k, double R, const ComplexCoefficients& u,
                                          double r) {
  check_shape(N, R, u);
  if (r < R * (1.0 - 1e-14)) throw std::domain_error("exterior coefficients need r >= R");
  ComplexCoefficients out = u;
  out.R = r;
  for (int l = 0; l <= u.lmax(); ++l) {
    const Complex f = shell_factor(N, k, R, l, std::max(r, R)).value;
    for (auto& c : out.coeffs[l]) c *= f;
  }
  return out;
}

RadiationReport radiation_diagnostics(int N, double k, double R, const ComplexCoefficients& u,
                                      std::span<const double> r_samples) {
  check_shape(N, R, u);
  RadiationReport rep;
  double prev = -1.0;
  std::vector<double> norms(u.coeffs.size());
  for (std::size_t l = 0; l < u.coeffs.size(); ++l) norms[l] = shell_norm(u.coeffs[l]);
  for (double r : r_samples) {
    if (r < R * (1.0 - 1e-14)) throw std::domain_error("radiation samples must satisfy r >= R");
    if (!(r > prev)) throw std::invalid_argument("radiation samples must be increasing");
    prev = r;
    double w2 = 0.0;
    double s2 = 0.0;
    for (int l = 0; l <= u.lmax(); ++l) {
      if (norms[l] == 0.0) continue;
      const ShellFactor f = shell_factor(N, k, R, l, std::max(r, R));
      w2 += std::norm(f.value) * norms[l] * norms[l];
      s2 += std::norm(f.deriv - Complex(0.0, k) * f.value) * norms[l] * norms[l];
    }
    const double weight = std::pow(r, 0.5 * (N - 1));
    rep.r.push_back(r);
    rep.amplitude.push_back(weight * std::sqrt(w2));
    rep.sommerfeld.push_back(weight * std::sqrt(s2));
    rep.sup_amplitude = std::max(rep.sup_amplitude, rep.amplitude.back());
  }
  if (!rep.sommerfeld.empty() && rep.sommerfeld.front() > 0.0) {
    rep.sommerfeld_ratio = rep.sommerfeld.back() / rep.sommerfeld.front();
    rep.sommerfeld_decays = rep.sommerfeld_ratio < 1.0;
  }
  return rep;
}

}  // namespace helmholtz::boundary
