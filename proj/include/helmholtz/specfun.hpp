#pragma once

#include <limits>
#include <string>
#include <vector>

namespace helmholtz::specfun {

/// Nonnegative real order of a cylinder function.
class BesselOrder {
public:
  explicit BesselOrder(double mu);

  /// Order attached to harmonic degree ell in dimension N: ell + (N-2)/2.
  static BesselOrder for_harmonic(int N, int ell);

  double value() const noexcept { return mu_; }

private:
  double mu_;
};

/// J, Y and their x-derivatives at a single point.
struct BesselValue {
  double j = 0.0;
  double y = 0.0;
  double jp = 0.0;
  double yp = 0.0;
  double abs_err_est = 0.0;

  /// abs_err_est value for points outside the validated envelope.
  static constexpr double kUnvalidated = std::numeric_limits<double>::max();

  bool validated() const noexcept { return abs_err_est < kUnvalidated; }
};

/// The envelope on which accuracy is tested: mu <= 60, 1e-3 <= x <= 200.
inline constexpr double kMaxValidatedOrder = 60.0;
inline constexpr double kMinValidatedArg = 1e-3;
inline constexpr double kMaxValidatedArg = 200.0;

bool in_validated_envelope(double mu, double x) noexcept;

/// Evaluates J_mu(x), Y_mu(x), J'_mu(x), Y'_mu(x).
///
/// Y is obtained at the reduced order mu - round(mu) (Temme's series for
/// x < 2, Steed's continued fraction CF2 otherwise) and carried up by forward
/// recurrence. J follows from the continued fraction for J'/J at order mu and
/// the Wronskian J Y' - J' Y = 2/(pi x).
///
/// Throws std::domain_error for x <= 0 or an invalid order, and
/// std::overflow_error when Y_mu(x) leaves the double range.
BesselValue bessel_jy(BesselOrder order, double x);

/// |H1_mu(x)|^2 = J_mu(x)^2 + Y_mu(x)^2. Throws std::overflow_error if the
/// square is not representable.
double hankel1_modsq(BesselOrder order, double x);

/// Linear combination c_j J + c_y Y + x (c_jp J' + c_yp Y') of cylinder
/// functions of one order.
struct CylinderCombination {
  double c_j = 0.0;
  double c_y = 0.0;
  double c_jp = 0.0;
  double c_yp = 0.0;

  static CylinderCombination first_kind() { return {1.0, 0.0, 0.0, 0.0}; }
  static CylinderCombination second_kind() { return {0.0, 1.0, 0.0, 0.0}; }

  double operator()(const BesselValue& v, double x) const noexcept {
    return c_j * v.j + c_y * v.y + x * (c_jp * v.jp + c_yp * v.yp);
  }
  /// Envelope of the combination: coefficient magnitudes times the moduli
  /// sqrt(J^2 + Y^2) and sqrt(J'^2 + Y'^2). Does not vanish at zeros.
  double scale(const BesselValue& v, double x) const noexcept;
};

struct ZeroScanOptions {
  /// Uniform sampling step; nonpositive selects a local step of one quarter of
  /// the Sturm lower bound on the zero spacing (one eighth for combinations
  /// with derivative terms).
  double step = 0.0;
  /// An end point is reported as a root when |f/f'| <= endpoint_tol * max(1, x).
  double endpoint_tol = 1e-12;
};

struct ZeroScanResult {
  std::vector<double> roots;
  /// Largest sampling step used.
  double step = 0.0;
  /// Lower bound on the distance between consecutive zeros on the interval.
  double min_spacing_bound = 0.0;
  bool resolution_ok = true;
  std::vector<std::string> warnings;
};

/// All zeros of the combination on [a, b], located by sign changes on a
/// uniform scan and polished by a bracketing solver. Sorted ascending.
ZeroScanResult bessel_zero_scan(BesselOrder order, const CylinderCombination& which,
                                double a, double b, const ZeroScanOptions& opts = {});

/// Sturm comparison bound: zeros of any real cylinder function of order mu
/// on [a, inf) are at least this far apart.
double zero_spacing_lower_bound(double mu, double a);

}  // namespace helmholtz::specfun
