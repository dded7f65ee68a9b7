#pragma once

#include "helmholtz/specfun.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace helmholtz::boundary {

using Complex = std::complex<double>;

/// Dimension of the space of degree-ell spherical harmonics in R^N.
std::int64_t harmonic_dim(int N, int ell);

/// d^N_ell for ell = 0..lmax.
struct HarmonicDimTable {
  int N = 0;
  std::vector<std::int64_t> dims;

  HarmonicDimTable(int N, int lmax);
  std::int64_t total() const noexcept;
};

/// Truncated expansion u(R xi) = sum_ell sum_m coeffs[ell][m] Y^ell_m(xi) in a
/// basis orthonormal on the unit sphere. m is zero based here.
template <class T>
struct HarmonicCoefficients {
  int N = 2;
  double R = 1.0;
  std::vector<std::vector<T>> coeffs;

  HarmonicCoefficients() = default;
  HarmonicCoefficients(int N_, double R_, int lmax) : N(N_), R(R_) {
    if (!(R_ > 0.0)) throw std::domain_error("sphere radius must be positive");
    if (lmax < 0) throw std::domain_error("lmax must be nonnegative");
    const HarmonicDimTable table(N_, lmax);
    coeffs.reserve(table.dims.size());
    for (auto d : table.dims) coeffs.emplace_back(static_cast<std::size_t>(d), T{});
  }

  int lmax() const noexcept { return static_cast<int>(coeffs.size()) - 1; }

  /// Throws std::invalid_argument if the ragged shape or the entries are bad.
  void validate() const;

  /// Sum of |u^ell_m|^2, the squared L2(S_1) norm.
  double unit_sphere_norm_sq() const noexcept;
  /// Squared L2(S_R) norm, R^(N-1) times the above.
  double norm_sq() const noexcept;
};

extern template struct HarmonicCoefficients<double>;
extern template struct HarmonicCoefficients<Complex>;

using RealCoefficients = HarmonicCoefficients<double>;
using ComplexCoefficients = HarmonicCoefficients<Complex>;

ComplexCoefficients to_complex(const RealCoefficients& u);

/// z_ell(r) = r H'(r)/H(r) - (N-2)/2 for H = H1 of order ell + (N-2)/2,
/// together with the status of the a priori bounds on it.
struct CapacityCoefficient {
  int ell = 0;
  Complex z;
  bool re_bound_ok = false;
  bool im_bound_ok = false;
  /// False when r lies outside the validated Bessel envelope.
  bool validated = false;

  bool bounds_ok() const noexcept { return re_bound_ok && im_bound_ok; }
};

/// Relative slack used for the bound flags; the N = 3, ell = 0 case sits
/// exactly on both bounds.
inline constexpr double kBoundSlack = 1e-12;

CapacityCoefficient capacity_coeff(int N, double k, double R, int ell);

std::vector<CapacityCoefficient> capacity_coeffs(int N, double k, double R, int lmax);

/// T_R: multiplies the ell-th shell by z_ell(kR)/R.
ComplexCoefficients dtn_apply(int N, double k, double R, const ComplexCoefficients& u);

/// K_R = Re T_R on real data: multiplies the ell-th shell by Re z_ell(kR)/R.
RealCoefficients ktr_apply(int N, double k, double R, const RealCoefficients& u);

/// Integral of v K_R u over S_R.
double ktr_bilinear(int N, double k, double R, const RealCoefficients& u, const RealCoefficients& v);

/// Largest gamma with int u K_R u <= -gamma ||u||^2 on shells 0..lmax, namely
/// min_ell -Re z_ell(kR)/R. Equals (N-1)/(2R) whenever N >= 3.
double ktr_coercivity(int N, double k, double R, int lmax);

/// Real orthonormal harmonics on S_1 at the direction of x; available for
/// N = 2 (1, cos, sin) and N = 3 (real spherical harmonics, m = 0 first,
/// then cos/sin pairs for m = 1..ell). Values are grouped by shell.
std::vector<std::vector<double>> real_harmonics(int N, int lmax, std::span<const double> direction);

struct ExteriorValue {
  Complex value;
  /// Magnitude bound on the last retained shell at this point. Indicates the
  /// size of the omitted tail if the coefficients decay; not a proof.
  double tail_estimate = 0.0;
};

/// Outgoing field with boundary data u on S_R evaluated at |x| >= R.
/// Pointwise evaluation needs N = 2 or 3.
ExteriorValue exterior_eval(int N, double k, double R, const ComplexCoefficients& u,
                            std::span<const double> x);

/// H1_mu(k r)/H1_mu(k R) with both factors pre-scaled by max(|J|, |Y|).
Complex hankel_ratio(specfun::BesselOrder order, double kr, double kR);

/// Coefficients of the outgoing field on the sphere of radius r >= R. Works
/// for every N.
ComplexCoefficients exterior_coefficients(int N, double k, double R, const ComplexCoefficients& u,
                                          double r);

struct RadiationReport {
  std::vector<double> r;
  /// r^((N-1)/2) ||w(r .)||_{L2(S_1)}
  std::vector<double> amplitude;
  /// r^((N-1)/2) ||dw/dr - i k w||_{L2(S_1)}
  std::vector<double> sommerfeld;
  double sup_amplitude = 0.0;
  /// Sommerfeld residual at the last sample relative to the first.
  double sommerfeld_ratio = 0.0;
  /// Last sample below the first one.
  bool sommerfeld_decays = true;
};

RadiationReport radiation_diagnostics(int N, double k, double R, const ComplexCoefficients& u,
                                      std::span<const double> r_samples);

}  // namespace helmholtz::boundary
