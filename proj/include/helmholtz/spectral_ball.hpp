#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace helmholtz::spectral {

struct Mismatch {
  double value = 0.0;
  /// Modulus envelope of the same expression; |value| / scale is the
  /// relative residual.
  double scale = 0.0;
};

/// m(lambda) = g'(R) - (Re z_ell(kR)/R) g(R) with g(r) = r^((2-N)/2) J_mu(sqrt(lambda) r).
/// Vanishes exactly at the eigenvalues of the ell-th sector.
Mismatch radial_bc_mismatch(int N, double k, double R, int ell, double lambda);

struct EigenPair {
  double lambda = 0.0;
  int ell = 0;
  std::int64_t multiplicity = 1;
  int radial_index = 1;
};

struct SpectralSplitting {
  /// One entry per (ell, radial_index), sorted by (lambda, ell, radial_index).
  std::vector<EigenPair> pairs;
  /// j_* = max{j : lambda_j < k^2} counting multiplicity; 0 when none.
  std::int64_t j_star_lower = 0;
  /// j^* = min{j : lambda_j > k^2}.
  std::int64_t j_star_upper = 1;
  std::int64_t dim_minus = 0;
  std::int64_t dim_zero = 0;
  /// Every eigenvalue below this value is in the list: at most lambda_max,
  /// and no sector beyond lmax has an eigenvalue below (mu_{lmax+1}/R)^2.
  double complete_below = 0.0;
  bool resolution_ok = true;
  std::vector<std::string> warnings;

  /// Eigenvalues with multiplicity expanded, ascending.
  std::vector<double> expanded() const;
};

/// Band |lambda - k^2| < kZeroBand * k^2 counts as lambda = k^2.
inline constexpr double kZeroBand = 1e-8;

SpectralSplitting eigenvalues(int N, double k, double R, int lmax, double lambda_max);

/// Eigenvalues of one sector below lambda_max, ascending.
std::vector<double> sector_eigenvalues(int N, double k, double R, int ell, double lambda_max,
                                       std::vector<std::string>* warnings = nullptr);

/// Radial profile r^((2-N)/2) J_mu(sqrt(lambda) r).
double eigenprofile(int N, int ell, double lambda, double r);

/// Gram matrix of the profiles in L2((0,R), r^(N-1) dr), normalized to unit
/// diagonal.
std::vector<std::vector<double>> eigenprofile_gram(int N, double R, int ell,
                                                    const std::vector<double>& lambdas);

enum class DegenerateTag { SecondKindZero, NeumannZero };

std::string to_string(DegenerateTag tag);

struct DegenerateRadius {
  double R = 0.0;
  int ell = 0;
  DegenerateTag tag = DegenerateTag::SecondKindZero;
};

struct DegenerateRadii {
  std::vector<DegenerateRadius> radii;
  bool resolution_ok = true;
  std::vector<std::string> warnings;
};

/// Radii in [r_min, r_max] with Y_mu(kR) = 0 or d/dr(r^((2-N)/2) J_mu(kr)) = 0
/// at r = R, for some ell <= lmax. Sorted by (R, ell, tag).
DegenerateRadii degenerate_radii(int N, double k, int lmax, double r_min, double r_max);

struct ExtensionRadii {
  std::vector<double> radii;
  bool resolution_ok = true;
  std::vector<std::string> warnings;
};

/// Zeros R' in (R, r_max] of J_mu(kR') Y_mu(kR) - J_mu(kR) Y_mu(kR').
ExtensionRadii shared_extension_radii(int N, double k, double R, int ell, double r_max);

}  // namespace helmholtz::spectral
