#include "helmholtz/spectral_ball.hpp"

#include "helmholtz/boundary_spectral.hpp"
#include "helmholtz/specfun.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace helmholtz::spectral {

namespace {

using specfun::BesselOrder;
using specfun::CylinderCombination;

void check_params(int N, double k, double R) {
  if (N < 2) throw std::domain_error("space dimension must be at least 2");
  if (!(k > 0.0) || !(R > 0.0) || !std::isfinite(k) || !std::isfinite(R)) {
    throw std::domain_error("k and R must be positive and finite");
  }
}

void check_envelope(double mu, double x, const char* what) {
  if (!specfun::in_validated_envelope(mu, std::max(x, specfun::kMinValidatedArg))) {
    throw std::domain_error(std::string(what) + ": argument " + std::to_string(x) + " at order " +
                            std::to_string(mu) + " leaves the validated Bessel envelope");
  }
}

// Re G_mu(kR) = Re z_ell(kR) + (N-2)/2.
double re_g(int N, double k, double R, int ell) {
  return boundary::capacity_coeff(N, k, R, ell).z.real() + 0.5 * (N - 2);
}

// s J'(s) - ReG J(s); its zeros in s = sqrt(lambda) R are the sector eigenvalues.
CylinderCombination sector_combination(double reg) { return {-reg, 0.0, 1.0, 0.0}; }

void append(std::vector<std::string>& to, const std::vector<std::string>& from, const std::string& prefix) {
  for (const auto& w : from) to.push_back(prefix + w);
}

}  // namespace

Mismatch radial_bc_mismatch(int N, double k, double R, int ell, double lambda) {
  check_params(N, k, R);
  if (!(lambda > 0.0)) throw std::domain_error("radial_bc_mismatch: lambda must be positive");
  const BesselOrder order = BesselOrder::for_harmonic(N, ell);
  const double s = std::sqrt(lambda) * R;
  check_envelope(order.value(), s, "radial_bc_mismatch");
  check_envelope(order.value(), k * R, "radial_bc_mismatch");
  const double reg = re_g(N, k, R, ell);
  const specfun::BesselValue v = specfun::bessel_jy(order, s);
  const CylinderCombination c = sector_combination(reg);
  // g'(R) - (Re z/R) g(R) = R^(-nu-1) [s J'(s) - ReG J(s)].
  const double pre = std::pow(R, -0.5 * (N - 2) - 1.0);
  const double env = std::abs(reg) * std::abs(v.j) + s * std::abs(v.jp);
  return {pre * c(v, s), pre * env};
}

std::vector<double> sector_eigenvalues(int N, double k, double R, int ell, double lambda_max,
                                       std::vector<std::string>* warnings) {
  check_params(N, k, R);
  const BesselOrder order = BesselOrder::for_harmonic(N, ell);
  const double mu = order.value();
  const double s_max = std::sqrt(std::max(lambda_max, 0.0)) * R;
  check_envelope(mu, k * R, "eigenvalues");
  std::vector<double> out;
  // For s <= mu both J and J' are positive and ReG < 0, so no root lies there.
  const double s_min = std::max(specfun::kMinValidatedArg, 0.5 * mu);
  if (!(s_max > s_min)) return out;
  check_envelope(mu, s_max, "eigenvalues");
  const double reg = re_g(N, k, R, ell);
  const auto scan = specfun::bessel_zero_scan(order, sector_combination(reg), s_min, s_max);
  if (warnings) append(*warnings, scan.warnings, "sector " + std::to_string(ell) + ": ");
  out.reserve(scan.roots.size());
  for (double s : scan.roots) out.push_back((s / R) * (s / R));
  return out;
}

std::vector<double> SpectralSplitting::expanded() const {
  std::vector<double> out;
  for (const auto& p : pairs) out.insert(out.end(), static_cast<std::size_t>(p.multiplicity), p.lambda);
  return out;
}

SpectralSplitting eigenvalues(int N, double k, double R, int lmax, double lambda_max) {
  check_params(N, k, R);
  if (lmax < 0) throw std::domain_error("lmax must be nonnegative");
  if (!(lambda_max > 0.0)) throw std::domain_error("lambda_max must be positive");
  SpectralSplitting sp;
  for (int l = 0; l <= lmax; ++l) {
    const auto mult = boundary::harmonic_dim(N, l);
    std::vector<std::string> w;
    const auto lams = sector_eigenvalues(N, k, R, l, lambda_max, &w);
    if (!w.empty()) sp.resolution_ok = false;
    sp.warnings.insert(sp.warnings.end(), w.begin(), w.end());
    for (std::size_t j = 0; j < lams.size(); ++j) {
      sp.pairs.push_back({lams[j], l, mult, static_cast<int>(j) + 1});
    }
  }
  std::sort(sp.pairs.begin(), sp.pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    return std::tie(a.lambda, a.ell, a.radial_index) < std::tie(b.lambda, b.ell, b.radial_index);
  });
  const double k2 = k * k;
  for (const auto& p : sp.pairs) {
    if (std::abs(p.lambda - k2) < kZeroBand * k2) {
      sp.dim_zero += p.multiplicity;
    } else if (p.lambda < k2) {
      sp.dim_minus += p.multiplicity;
    }
  }
  sp.j_star_lower = sp.dim_minus;
  sp.j_star_upper = sp.dim_minus + sp.dim_zero + 1;
  const double mu_next = (lmax + 1) + 0.5 * (N - 2);
  sp.complete_below = std::min(lambda_max, (mu_next / R) * (mu_next / R));
  if (sp.complete_below <= k2) {
    sp.warnings.push_back("lmax too small: sectors beyond lmax may hold eigenvalues below k^2, so the splitting is incomplete");
    sp.resolution_ok = false;
  }
  return sp;
}

double eigenprofile(int N, int ell, double lambda, double r) {
  if (!(r > 0.0)) throw std::domain_error("eigenprofile: r must be positive");
  const BesselOrder order = BesselOrder::for_harmonic(N, ell);
  return std::pow(r, -0.5 * (N - 2)) * specfun::bessel_jy(order, std::sqrt(lambda) * r).j;
}

std::vector<std::vector<double>> eigenprofile_gram(int N, double R, int ell, const std::vector<double>& lambdas) {
  const std::size_t n = lambdas.size();
  std::vector<std::vector<double>> g(n, std::vector<double>(n, 0.0));
  const BesselOrder order = BesselOrder::for_harmonic(N, ell);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const double ka = std::sqrt(lambdas[a]);
      const double kb = std::sqrt(lambdas[b]);
      // r^(N-1) r^(-2 nu) = r; entire integrand, so composite Gauss-Legendre
      // with panels shorter than a half oscillation is exact to rounding.
      auto f = [&](double r) {
        return r * specfun::bessel_jy(order, ka * r).j * specfun::bessel_jy(order, kb * r).j;
      };
      const int panels = 2 + static_cast<int>(std::ceil((ka + kb) * R / 2.0));
      const double h = R / panels;
      double v = 0.0;
      for (int p = 0; p < panels; ++p) {
        v += boost::math::quadrature::gauss<double, 30>::integrate(f, p * h, (p + 1) * h);
      }
      g[a][b] = g[b][a] = v;
    }
  }
  std::vector<double> d(n);
  for (std::size_t a = 0; a < n; ++a) d[a] = std::sqrt(std::abs(g[a][a]));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) g[a][b] /= d[a] * d[b];
  return g;
}

std::string to_string(DegenerateTag tag) {
  return tag == DegenerateTag::SecondKindZero ? "Y" : "neumann";
}

DegenerateRadii degenerate_radii(int N, double k, int lmax, double r_min, double r_max) {
  if (N < 2) throw std::domain_error("space dimension must be at least 2");
  if (!(k > 0.0)) throw std::domain_error("k must be positive");
  if (!(r_min > 0.0) || !(r_max > r_min)) throw std::domain_error("need 0 < r_min < r_max");
  DegenerateRadii out;
  const double nu = 0.5 * (N - 2);
  const double a = k * r_min;
  const double b = k * r_max;
  for (int l = 0; l <= lmax; ++l) {
    const BesselOrder order = BesselOrder::for_harmonic(N, l);
    check_envelope(order.value(), a, "degenerate_radii");
    check_envelope(order.value(), b, "degenerate_radii");
    const std::string prefix = "ell " + std::to_string(l) + ": ";
    const auto ys = specfun::bessel_zero_scan(order, CylinderCombination::second_kind(), a, b);
    for (double x : ys.roots) out.radii.push_back({x / k, l, DegenerateTag::SecondKindZero});
    // d/dr (r^-nu J(kr)) = r^(-nu-1) [kr J'(kr) - nu J(kr)].
    const auto ns = specfun::bessel_zero_scan(order, CylinderCombination{-nu, 0.0, 1.0, 0.0}, a, b);
    for (double x : ns.roots) out.radii.push_back({x / k, l, DegenerateTag::NeumannZero});
    if (!ys.resolution_ok || !ns.resolution_ok) out.resolution_ok = false;
    append(out.warnings, ys.warnings, prefix);
    append(out.warnings, ns.warnings, prefix);
  }
  std::sort(out.radii.begin(), out.radii.end(), [](const DegenerateRadius& x, const DegenerateRadius& y) {
    return std::tie(x.R, x.ell, x.tag) < std::tie(y.R, y.ell, y.tag);
  });
  return out;
}

ExtensionRadii shared_extension_radii(int N, double k, double R, int ell, double r_max) {
  check_params(N, k, R);
  if (!(r_max > R)) throw std::domain_error("extension interval needs r_max > R");
  const BesselOrder order = BesselOrder::for_harmonic(N, ell);
  const double a = k * R;
  const double b = k * r_max;
  check_envelope(order.value(), a, "shared_extension_radii");
  check_envelope(order.value(), b, "shared_extension_radii");
  const specfun::BesselValue at_r = specfun::bessel_jy(order, a);
  // Normalize so that the combination has unit coefficient modulus.
  const double h = std::hypot(at_r.j, at_r.y);
  const CylinderCombination cross{at_r.y / h, -at_r.j / h, 0.0, 0.0};
  const auto scan = specfun::bessel_zero_scan(order, cross, a, b);
  ExtensionRadii out;
  out.resolution_ok = scan.resolution_ok;
  out.warnings = scan.warnings;
  for (double x : scan.roots) {
    // R' = R is a trivial zero and not part of the open interval.
    if (x <= a * (1.0 + 1e-10)) continue;
    out.radii.push_back(x / k);
  }
  return out;
}

}  // namespace helmholtz::spectral
