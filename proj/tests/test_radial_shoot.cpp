#include <doctest.h>

#include "helmholtz/radial_shoot.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

using namespace helmholtz;
using namespace helmholtz::radial;

namespace {

models::Nonlinearity zero_model() {
  models::Nonlinearity nl;
  nl.kind = models::Kind::Zero;
  nl.radial = true;
  return nl;
}

models::Nonlinearity radial_gaussian() {
  models::Nonlinearity nl;
  nl.kind = models::Kind::Power;
  nl.p = 4.0;
  nl.radial = true;
  nl.q = {models::QType::Gaussian, 0.0, 1.0, 1.0, 2.0};
  return nl;
}

}  // namespace

TEST_CASE("series start") {
  const auto z = zero_model();
  const double eps = 1e-3;
  const auto s = taylor_start(z, 3, 1.0, 1.0, eps);
  CHECK(s.u == doctest::Approx(std::sin(eps) / eps).epsilon(1e-12));
  CHECK(s.up == doctest::Approx((eps * std::cos(eps) - std::sin(eps)) / (eps * eps)).epsilon(1e-6));
  const auto zero = taylor_start(radial_gaussian(), 3, 1.0, 0.0, eps);
  CHECK(zero.u == 0.0);
  CHECK(zero.up == 0.0);
  CHECK(default_eps(4.0) == doctest::Approx(2.5e-5));
}

TEST_CASE("linear shot in three dimensions is sin r / r") {
  ShootOptions fine;
  fine.tol = 1e-11;
  const auto sol = shoot(zero_model(), 3, 1.0, 1.0, 100.0, fine);
  double err = 0.0;
  for (std::size_t i = 0; i < sol.r.size(); ++i) err = std::max(err, std::abs(sol.u[i] - std::sin(sol.r[i]) / sol.r[i]));
  CHECK(err < 1e-8);
  CHECK((sol.diagnostics.max_rho - sol.diagnostics.min_rho) < 1e-9);
  CHECK(sol.rho.front() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.diagnostics.gronwall_ok);
  for (std::size_t i = 0; i < sol.r.size(); i += 97) {
    CHECK(std::abs(sol.v[i] - std::pow(sol.r[i], 1.0) * sol.u[i]) <= 1e-12 * std::max(1.0, std::abs(sol.v[i])));
  }
  const auto rc = radiation_check(sol);
  CHECK(rc.decays);
  CHECK(rc.slope == doctest::Approx(-1.0).epsilon(0.01));
  // u' = cos r / r - sin r / r^2 has amplitude sqrt(1 + 1/r^2) / r.
  CHECK(rc.decay_factor == doctest::Approx(10.0 * std::sqrt(1.01 / 1.0001)).epsilon(1e-8));
  double touch = 0.0;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    CHECK(sol.residual[i] <= sol.envelope[i] * (1.0 + 1e-12));
    if (sol.r[i] > 50.0) touch = std::max(touch, sol.residual[i] / sol.envelope[i]);
  }
  CHECK(touch > 0.999);
  CHECK(sign_changes(sol, 10.0) >= static_cast<int>(std::floor(90.0 / M_PI)) - 2);
}

TEST_CASE("linear shot matches the Bessel profile") {
  for (int N : {2, 4, 5}) {
    const double k = 1.3;
    const auto sol = shoot(zero_model(), N, k, 0.7, 40.0);
    const double nu = 0.5 * N - 1.0;
    double err = 0.0;
    for (std::size_t i = 1; i < sol.r.size(); ++i) {
      const double r = sol.r[i];
      const double want = 0.7 * boost::math::tgamma(0.5 * N) * std::pow(2.0 / (k * r), nu) *
                          boost::math::cyl_bessel_j(nu, k * r);
      err = std::max(err, std::abs(sol.u[i] - want));
    }
    INFO("N = " << N);
    CHECK(err < 1e-8);
    CHECK(std::isfinite(sol.diagnostics.sup_decay));
    CHECK(sol.diagnostics.sup_decay < 10.0);
  }
}

TEST_CASE("self convergence") {
  const auto nl = radial_gaussian();
  ShootOptions a;
  a.tol = 1e-9;
  ShootOptions b = a;
  b.tol = 5e-10;
  const auto s1 = shoot(nl, 3, 1.0, 1.5, 60.0, a);
  const auto s2 = shoot(nl, 3, 1.0, 1.5, 60.0, b);
  const double scale = std::max(1.0, std::abs(s2.v.back()));
  CHECK(std::abs(s1.v.back() - s2.v.back()) < 10 * a.tol * scale * 100);
  // Halving eps is invisible at the tolerance.
  ShootOptions c;
  c.eps = 0.5 * default_eps(1.0);
  const auto s3 = shoot(nl, 3, 1.0, 1.5, 60.0);
  const auto s4 = shoot(nl, 3, 1.0, 1.5, 60.0, c);
  CHECK(std::abs(s3.u.back() - s4.u.back()) < 1e-8);
}

TEST_CASE("nonlinear shot respects the energy bound") {
  const auto nl = radial_gaussian();
  for (double alpha : {0.5, 1.0, 2.0, -1.5}) {
    const auto sol = shoot(nl, 3, 1.0, alpha, 100.0);
    INFO("alpha = " << alpha);
    CHECK(sol.diagnostics.gronwall_ok);
    CHECK(sol.diagnostics.max_rho <= sol.diagnostics.gronwall_bound * (1 + 1e-9));
    const auto rc = radiation_check(sol, 10.0, 100.0);
    CHECK(rc.decays);
    CHECK(sign_changes(sol, 10.0) >= static_cast<int>(std::floor(90.0 / M_PI)) - 2);
  }
  const auto zero = shoot(nl, 3, 1.0, 0.0, 30.0);
  CHECK(radiation_check(zero).zero);
  for (double u : zero.u) CHECK(u == 0.0);
}

TEST_CASE("sweep keeps order and matches single shots") {
  const auto nl = radial_gaussian();
  const auto all = sweep(nl, 3, 1.0, 0.5, 1.5, 5, 20.0, {}, 3);
  REQUIRE(all.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(all[i].alpha == doctest::Approx(0.5 + 0.25 * i));
    const auto one = shoot(nl, 3, 1.0, 0.5 + 0.25 * i, 20.0);
    CHECK(one.u == all[i].u);
  }
  CHECK_THROWS_AS(shoot(nl, 1, 1.0, 1.0, 10.0), std::domain_error);
  CHECK_THROWS_AS(shoot(nl, 3, 1.0, 1.0, 10.0, ShootOptions{0.0, -1.0}), std::domain_error);
}

TEST_CASE("step budget exhaustion is reported") {
  models::Nonlinearity nl;
  nl.kind = models::Kind::Power;
  nl.p = 6.0;
  nl.radial = true;
  nl.q = {models::QType::Constant, 0.0, 1.0, 1.0, 1.0};
  CHECK_NOTHROW(shoot(nl, 2, 1.0, 3.0, 5.0));
  ShootOptions tiny;
  tiny.max_steps = 3;
  CHECK_THROWS_AS(shoot(nl, 2, 1.0, 3.0, 5.0, tiny), ShootError);
}
