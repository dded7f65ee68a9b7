#pragma once

#include "helmholtz/models.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace helmholtz::radial {

struct StartValue {
  double u = 0.0;
  double up = 0.0;
};

/// Default start radius 1e-4 * min(1, 1/k).
double default_eps(double k);

/// Second-order series at r = eps for u(0) = alpha, u'(0) = 0.
StartValue taylor_start(const models::Nonlinearity& nl, int N, double k, double alpha, double eps);

struct ShootOptions {
  double eps = 0.0;          // 0: default_eps(k)
  double tol = 1e-10;        // relative step tolerance; absolute part tol * min(1, eps^((N-1)/2))
  double output_step = 0.0;  // 0: min(0.05, pi / (32 k))
  std::size_t max_steps = 5'000'000;
};

struct Diagnostics {
  double sup_decay = 0.0;       // sup_{r >= 1} r^(N-1) (u'^2 + u^2)
  double gronwall_start = 0.0;  // rho(eps) + 2 eps^(N-1) F(eps, u(eps))
  double gronwall_bound = 0.0;  // gronwall_start * exp((N-1)|N-3| / (4 k eps^2)); may be +inf
  double max_rho = 0.0;
  double min_rho = 0.0;
  bool gronwall_ok = true;      // max rho <= bound up to 10 tol relative slack
  std::size_t steps = 0;
};

/// Samples on the output grid; v = r^((N-1)/2) u, rho = v'^2 + k^2 v^2 and
/// residual = r^((N-1)/2) |u'' + k^2 u| with u'' taken from the equation.
struct RadialSolution {
  int N = 3;
  double k = 1.0;
  double alpha = 0.0;
  double eps = 0.0;
  double tol = 0.0;
  std::vector<double> r, u, up, v, vp, rho, residual;
  /// Upper bound on residual, (N-1)/r sqrt(rho (1 + a^2/(k r)^2)) + r^a |f| with
  /// a = (N-1)/2; attained once per half period where f vanishes and rho is flat.
  std::vector<double> envelope;
  Diagnostics diagnostics;
  std::vector<std::string> warnings;
};

/// Raised when the state stops being finite or the step budget runs out.
class ShootError : public std::runtime_error {
 public:
  ShootError(const std::string& what, double r) : std::runtime_error(what), r_(r) {}
  double where() const noexcept { return r_; }

 private:
  double r_;
};

/// Integrates -v'' - (k^2 - (N-1)(N-3)/(4 r^2)) v = r^((N-1)/2) f(r, r^((1-N)/2) v)
/// from eps to r_max with the Dormand-Prince 5(4) pair.
RadialSolution shoot(const models::Nonlinearity& nl, int N, double k, double alpha, double r_max,
                     const ShootOptions& opt = {});

struct RadiationCheck {
  std::vector<double> r;
  std::vector<double> residual;
  std::vector<double> envelope;
  double r_lo = 0.0;
  double r_hi = 0.0;
  /// Least-squares fit log envelope = intercept + slope log r over [r_lo, r_hi].
  double slope = 0.0;
  double intercept = 0.0;
  /// envelope(r_lo) / envelope(r_hi), linearly interpolated.
  double decay_factor = 1.0;
  /// Same ratio for the fitted trend.
  double fitted_factor = 1.0;
  bool decays = false;  // slope < 0, or residual identically zero
  bool zero = false;
};

/// Fits the decay trend of sol's residual over [r_lo, r_hi] (default [10/k, r_max]).
RadiationCheck radiation_check(const RadialSolution& sol, double r_lo = 0.0, double r_hi = 0.0);

/// Sign changes of u on [r1, r_max].
int sign_changes(const RadialSolution& sol, double r1);

/// Independent shots for alpha = a0 + i (a1 - a0)/(n - 1), run on up to
/// `threads` workers; results keep the input order.
std::vector<RadialSolution> sweep(const models::Nonlinearity& nl, int N, double k, double a0, double a1, int n,
                                  double r_max, const ShootOptions& opt = {}, unsigned threads = 0);

}  // namespace helmholtz::radial
