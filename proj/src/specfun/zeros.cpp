#include "helmholtz/specfun.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace helmholtz::specfun {

namespace {

// d/dx of c_j J + c_y Y + x (c_jp J' + c_yp Y'), using C'' = -C'/x - (1 - mu^2/x^2) C.
double combination_slope(const CylinderCombination& w, const BesselValue& v, double mu, double x) {
  const double q = 1.0 - mu * mu / (x * x);
  const double jpp = -v.jp / x - q * v.j;
  const double ypp = -v.yp / x - q * v.y;
  return w.c_j * v.jp + w.c_y * v.yp + (w.c_jp * v.jp + w.c_yp * v.yp) +
         x * (w.c_jp * jpp + w.c_yp * ypp);
}

}  // namespace

double zero_spacing_lower_bound(double mu, double a) {
  // sqrt(x) C_mu(x) solves w'' + (1 + (1/4 - mu^2)/x^2) w = 0.
  const double excess = std::max(0.0, 0.25 - mu * mu);
  return std::numbers::pi / std::sqrt(1.0 + excess / (a * a));
}

ZeroScanResult bessel_zero_scan(BesselOrder order, const CylinderCombination& which, double a,
                                double b, const ZeroScanOptions& opts) {
  if (!(a > 0.0) || !(b > a) || !std::isfinite(b)) {
    throw std::domain_error("bessel_zero_scan: need 0 < a < b");
  }
  const double mu = order.value();
  ZeroScanResult out;
  out.min_spacing_bound = zero_spacing_lower_bound(mu, a);
  const bool has_derivative = which.c_jp != 0.0 || which.c_yp != 0.0;
  // Derivative terms leave the Bessel equation, so the Sturm bound is only
  // indicative there; sample twice as densely.
  const double fraction = has_derivative ? 0.125 : 0.25;

  // The spacing bound grows with x, so the step is taken from the bound at the
  // left end of each subinterval.
  std::vector<double> xs;
  if (opts.step > 0.0) {
    const auto intervals = static_cast<std::int64_t>(std::ceil((b - a) / opts.step));
    const double h = (b - a) / static_cast<double>(intervals);
    for (std::int64_t i = 0; i < intervals; ++i) xs.push_back(a + static_cast<double>(i) * h);
  } else {
    for (double x = a; x < b; x += fraction * zero_spacing_lower_bound(mu, x)) xs.push_back(x);
  }
  xs.push_back(b);
  if (xs.size() >= 3 && b - xs[xs.size() - 2] < 1e-3 * (xs[xs.size() - 2] - xs[xs.size() - 3])) {
    xs.erase(xs.end() - 2);
  }
  auto local_step = [&](double x) {
    if (opts.step > 0.0) return xs.size() > 1 ? xs[1] - xs[0] : b - a;
    return fraction * zero_spacing_lower_bound(mu, x);
  };

  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double h = xs[i + 1] - xs[i];
    out.step = std::max(out.step, h);
    if (h > 0.5 * zero_spacing_lower_bound(mu, xs[i]) && out.resolution_ok) {
      out.resolution_ok = false;
      std::ostringstream msg;
      msg << "scan step " << h << " exceeds half the zero spacing bound "
          << zero_spacing_lower_bound(mu, xs[i]) << " near x = " << xs[i] << "; adjacent zeros may be missed";
      out.warnings.push_back(msg.str());
    }
  }

  auto eval = [&](double x) { return which(bessel_jy(order, x), x); };
  std::vector<double> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = eval(xs[i]);

  auto near_zero = [&](double x, double fx) {
    const BesselValue v = bessel_jy(order, x);
    const double slope = combination_slope(which, v, mu, x);
    return std::abs(fx) <= opts.endpoint_tol * std::max(1.0, x) * std::abs(slope);
  };

  if (fs.front() == 0.0 || near_zero(xs.front(), fs.front())) out.roots.push_back(a);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double f0 = fs[i];
    const double f1 = fs[i + 1];
    if (f1 == 0.0) {
      out.roots.push_back(xs[i + 1]);
      continue;
    }
    if (f0 == 0.0 || (f0 < 0.0) == (f1 < 0.0)) continue;
    std::uintmax_t max_iter = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        eval, xs[i], xs[i + 1], f0, f1, boost::math::tools::eps_tolerance<double>(50), max_iter);
    out.roots.push_back(0.5 * (bracket.first + bracket.second));
  }
  if (fs.back() != 0.0 && near_zero(xs.back(), fs.back())) out.roots.push_back(b);

  std::sort(out.roots.begin(), out.roots.end());
  const auto dup = [](double u, double v) { return std::abs(u - v) <= 1e-12 * std::max(1.0, std::abs(v)); };
  out.roots.erase(std::unique(out.roots.begin(), out.roots.end(), dup), out.roots.end());

  for (std::size_t i = 1; i < out.roots.size(); ++i) {
    if (out.roots[i] - out.roots[i - 1] < 2.0 * local_step(out.roots[i - 1])) {
      out.resolution_ok = false;
      std::ostringstream msg;
      msg << "zeros at " << out.roots[i - 1] << " and " << out.roots[i]
          << " are closer than two scan steps";
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

}  // namespace helmholtz::specfun
