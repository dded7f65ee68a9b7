#include "helmholtz/radial_shoot.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace helmholtz::radial {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

struct Problem {
  const models::Nonlinearity& nl;
  int N;
  double k;
  double a;  // (N-1)/2
  double c;  // (N-1)(N-3)/4

  void operator()(const State& x, State& dxdt, double r) const {
    const double ra = std::pow(r, a);
    const double u = x[0] / ra;
    dxdt[0] = x[1];
    dxdt[1] = -(k * k - c / (r * r)) * x[0] - ra * models::eval_f(nl, r, u);
  }
};

void check_inputs(int N, double k, double eps, double r_max) {
  if (N < 2) throw std::domain_error("shoot: N must be at least 2");
  if (!(k > 0.0) || !std::isfinite(k)) throw std::domain_error("shoot: k must be positive");
  if (!(eps > 0.0)) throw std::domain_error("shoot: eps must be positive");
  if (!(r_max > eps) || !std::isfinite(r_max)) throw std::domain_error("shoot: need r_max > eps");
}

}  // namespace

double default_eps(double k) { return 1e-4 * std::min(1.0, 1.0 / k); }

StartValue taylor_start(const models::Nonlinearity& nl, int N, double k, double alpha, double eps) {
  const double c = k * k * alpha + models::eval_f(nl, 0.0, alpha);
  return {alpha - c * eps * eps / (2.0 * N), -c * eps / N};
}

RadialSolution shoot(const models::Nonlinearity& nl, int N, double k, double alpha, double r_max,
                     const ShootOptions& opt) {
  const double eps = opt.eps > 0.0 ? opt.eps : default_eps(k);
  check_inputs(N, k, eps, r_max);
  if (!(opt.tol > 0.0)) throw std::domain_error("shoot: tol must be positive");
  const double dr = opt.output_step > 0.0 ? opt.output_step : std::min(0.05, std::numbers::pi / (32.0 * k));

  const Problem prob{nl, N, k, 0.5 * (N - 1), 0.25 * (N - 1) * (N - 3)};
  RadialSolution sol;
  sol.N = N;
  sol.k = k;
  sol.alpha = alpha;
  sol.eps = eps;
  sol.tol = opt.tol;

  std::vector<double> times{eps};
  for (long j = 1;; ++j) {
    const double r = j * dr;
    if (r >= r_max) break;
    if (r > eps) times.push_back(r);
  }
  times.push_back(r_max);

  const StartValue s = taylor_start(nl, N, k, alpha, eps);
  const double ea = std::pow(eps, prob.a);
  State x{ea * s.u, prob.a * std::pow(eps, prob.a - 1.0) * s.u + ea * s.up};

  std::vector<State> states;
  states.reserve(times.size());
  double last_r = eps;
  auto observer = [&](const State& st, double r) {
    if (!std::isfinite(st[0]) || !std::isfinite(st[1])) {
      std::ostringstream msg;
      msg << "shoot: solution blew up near r = " << last_r;
      throw ShootError(msg.str(), last_r);
    }
    last_r = r;
    states.push_back(st);
  };
  auto stepper = odeint::make_controlled(opt.tol * std::min(1.0, ea), opt.tol, odeint::runge_kutta_dopri5<State>());
  std::size_t steps = 0;
  try {
    steps = odeint::integrate_times(stepper, std::ref(prob), x, times.begin(), times.end(), std::min(dr, eps),
                                    observer, odeint::max_step_checker(static_cast<int>(opt.max_steps)));
  } catch (const odeint::no_progress_error&) {
    std::ostringstream msg;
    msg << "shoot: step size underflow or step budget exhausted near r = " << last_r;
    throw ShootError(msg.str(), last_r);
  } catch (const odeint::step_adjustment_error&) {
    std::ostringstream msg;
    msg << "shoot: step size underflow near r = " << last_r;
    throw ShootError(msg.str(), last_r);
  }

  const std::size_t n = states.size();
  for (auto* vec : {&sol.r, &sol.u, &sol.up, &sol.v, &sol.vp, &sol.rho, &sol.residual, &sol.envelope})
    vec->resize(n);
  Diagnostics& d = sol.diagnostics;
  d.steps = steps;
  d.min_rho = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = times[i];
    const double v = states[i][0];
    const double vp = states[i][1];
    const double ra = std::pow(r, prob.a);
    const double u = v / ra;
    const double up = (vp - prob.a * v / r) / ra;
    const double f = models::eval_f(nl, r, u);
    const double res = (N - 1) * up / r + f;
    sol.r[i] = r;
    sol.u[i] = u;
    sol.up[i] = up;
    sol.v[i] = v;
    sol.vp[i] = vp;
    sol.rho[i] = vp * vp + k * k * v * v;
    sol.residual[i] = ra * std::abs(res);
    // r^a u' = v' - (a/r) v, bounded by sqrt(rho (1 + a^2/(k r)^2)).
    const double ak = prob.a / (k * r);
    sol.envelope[i] = (N - 1) / r * std::sqrt(sol.rho[i] * (1.0 + ak * ak)) + ra * std::abs(f);
    d.max_rho = std::max(d.max_rho, sol.rho[i]);
    d.min_rho = std::min(d.min_rho, sol.rho[i]);
    if (r >= 1.0) d.sup_decay = std::max(d.sup_decay, std::pow(r, N - 1) * (up * up + u * u));
  }
  const double F0 = models::eval_F(nl, eps, sol.u.front());
  d.gronwall_start = sol.rho.front() + 2.0 * std::pow(eps, N - 1) * F0;
  const double expo = (N - 1) * std::abs(N - 3) / (4.0 * k * eps * eps);
  d.gronwall_bound = d.gronwall_start * std::exp(expo);
  d.gronwall_ok = d.max_rho <= d.gronwall_bound * (1.0 + 10.0 * opt.tol) + std::numeric_limits<double>::min();
  if (!d.gronwall_ok) {
    sol.warnings.push_back("rho exceeds the Gronwall bound; (g2) or (g3) may fail for this model");
  }
  if (r_max * k < 10.0 * std::numbers::pi) {
    sol.warnings.push_back("r_max k < 10 pi: too few oscillations for a decay fit");
  }
  return sol;
}

static double interpolate(const std::vector<double>& r, const std::vector<double>& y, double x) {
  const auto it = std::lower_bound(r.begin(), r.end(), x);
  if (it == r.begin()) return y.front();
  if (it == r.end()) return y.back();
  const auto i = static_cast<std::size_t>(it - r.begin());
  const double t = (x - r[i - 1]) / (r[i] - r[i - 1]);
  return (1.0 - t) * y[i - 1] + t * y[i];
}

RadiationCheck radiation_check(const RadialSolution& sol, double r_lo, double r_hi) {
  RadiationCheck rc;
  if (sol.r.empty()) return rc;
  rc.r_lo = r_lo > 0.0 ? r_lo : 10.0 / sol.k;
  rc.r_hi = r_hi > 0.0 ? r_hi : sol.r.back();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  bool nonzero = false;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    const double r = sol.r[i];
    if (r < rc.r_lo || r > rc.r_hi) continue;
    rc.r.push_back(r);
    rc.residual.push_back(sol.residual[i]);
    rc.envelope.push_back(sol.envelope[i]);
    if (!(sol.envelope[i] > 0.0)) continue;
    nonzero = true;
    const double lx = std::log(r);
    const double ly = std::log(sol.envelope[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (!nonzero) {
    rc.zero = true;
    rc.decays = true;
    return rc;
  }
  const double den = m * sxx - sx * sx;
  if (m < 2 || den <= 0.0) return rc;
  rc.slope = (m * sxy - sx * sy) / den;
  rc.intercept = (sy - rc.slope * sx) / m;
  rc.fitted_factor = std::pow(rc.r_hi / rc.r_lo, -rc.slope);
  const double e_lo = interpolate(sol.r, sol.envelope, rc.r_lo);
  const double e_hi = interpolate(sol.r, sol.envelope, rc.r_hi);
  rc.decay_factor = e_hi > 0.0 ? e_lo / e_hi : std::numeric_limits<double>::infinity();
  rc.decays = rc.slope < 0.0;
  return rc;
}

int sign_changes(const RadialSolution& sol, double r1) {
  int count = 0;
  double prev = 0.0;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    if (sol.r[i] < r1 || sol.u[i] == 0.0) continue;
    if (prev != 0.0 && (sol.u[i] > 0.0) != (prev > 0.0)) ++count;
    prev = sol.u[i];
  }
  return count;
}

std::vector<RadialSolution> sweep(const models::Nonlinearity& nl, int N, double k, double a0, double a1, int n,
                                  double r_max, const ShootOptions& opt, unsigned threads) {
  if (n < 1) throw std::domain_error("sweep: need at least one value");
  std::vector<RadialSolution> out(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(out.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      const double alpha = n == 1 ? a0 : a0 + i * (a1 - a0) / (n - 1);
      try {
        out[static_cast<std::size_t>(i)] = shoot(nl, N, k, alpha, r_max, opt);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace helmholtz::radial
