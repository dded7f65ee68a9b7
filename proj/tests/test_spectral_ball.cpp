#include <doctest.h>

#include "helmholtz/spectral_ball.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace helmholtz::spectral;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("mismatch in the three-dimensional radial sector") {
  // m(lambda) = R^(-3/2) * sqrt(2/pi) * s^(1/2) cos s for s = sqrt(lambda) R.
  const double R = 1.3;
  for (double s : {0.2, 1.0, 2.5, 7.0, 19.0}) {
    const double lam = (s / R) * (s / R);
    const Mismatch m = radial_bc_mismatch(3, 0.9, R, 0, lam);
    const double want = std::sqrt(2.0 / kPi) * std::sqrt(s) * std::cos(s) / std::pow(R, 1.5);
    CHECK(m.value == doctest::Approx(want).epsilon(1e-12));
    CHECK(m.scale > 0.0);
  }
  // No eigenvalue near zero: the mismatch is positive as lambda -> 0.
  for (int N : {2, 3, 4}) {
    for (int l : {0, 1, 4}) {
      CHECK(radial_bc_mismatch(N, 1.7, 0.8, l, 1e-5).value > 0.0);
    }
  }
  CHECK_THROWS_AS(radial_bc_mismatch(3, 1.0, 1.0, 0, -1.0), std::domain_error);
}

TEST_CASE("radial sector eigenvalues") {
  const auto lams = sector_eigenvalues(3, 2.0, 1.0, 0, 1000.0);
  REQUIRE(lams.size() >= 10);
  for (int j = 1; j <= 10; ++j) {
    const double want = std::pow((2 * j - 1) * kPi / 2, 2);
    CHECK(lams[j - 1] == doctest::Approx(want).epsilon(1e-12));
  }
  for (double lam : lams) {
    const Mismatch m = radial_bc_mismatch(3, 2.0, 1.0, 0, lam);
    CHECK(std::abs(m.value) < 1e-9 * m.scale);
  }
}

TEST_CASE("splitting and multiplicities") {
  const auto sp = eigenvalues(3, 2.0, 1.0, 8, 200.0);
  CHECK(sp.pairs.front().lambda == doctest::Approx(std::pow(kPi / 2, 2)));
  CHECK(sp.j_star_lower == 1);
  CHECK(sp.dim_minus == 1);
  CHECK(sp.dim_zero == 0);
  CHECK(sp.j_star_upper == 2);
  for (const auto& p : sp.pairs) {
    CHECK(p.multiplicity == 2 * p.ell + 1);
    CHECK(p.lambda > 0.0);
    CHECK(std::abs(radial_bc_mismatch(3, 2.0, 1.0, p.ell, p.lambda).value) <
          1e-9 * radial_bc_mismatch(3, 2.0, 1.0, p.ell, p.lambda).scale);
  }
  // Sorted with tie-break.
  for (std::size_t i = 1; i < sp.pairs.size(); ++i) CHECK(sp.pairs[i - 1].lambda <= sp.pairs[i].lambda);
  const auto ex = sp.expanded();
  CHECK(std::is_sorted(ex.begin(), ex.end()));
  std::int64_t total = 0;
  for (const auto& p : sp.pairs) total += p.multiplicity;
  CHECK(static_cast<std::int64_t>(ex.size()) == total);
  // ell = 2 sector appears five times each.
  const auto two = sector_eigenvalues(3, 2.0, 1.0, 2, 200.0);
  REQUIRE(!two.empty());
  CHECK(std::count(ex.begin(), ex.end(), two[0]) == 5);

  const auto low = eigenvalues(3, 0.5, 1.0, 4, 100.0);
  CHECK(low.dim_minus == 0);
  CHECK(low.j_star_lower == 0);
  CHECK(low.j_star_upper == 1);
}

TEST_CASE("eigenvalue counting grows like sqrt(Lambda)") {
  for (int l : {0, 3}) {
    const auto a = sector_eigenvalues(3, 1.0, 2.0, l, 400.0);
    const auto b = sector_eigenvalues(3, 1.0, 2.0, l, 1600.0);
    // Weyl: roughly R sqrt(Lambda) / pi roots.
    CHECK(b.size() >= 2 * a.size() - 2);
    CHECK(b.size() <= 2 * a.size() + 2);
  }
}

TEST_CASE("eigenprofiles are orthogonal") {
  for (int N : {2, 3, 4}) {
    for (int l : {0, 2}) {
      auto lams = sector_eigenvalues(N, 1.4, 1.0, l, 900.0);
      lams.resize(std::min<std::size_t>(lams.size(), 8));
      const auto g = eigenprofile_gram(N, 1.0, l, lams);
      for (std::size_t a = 0; a < lams.size(); ++a)
        for (std::size_t b = 0; b < lams.size(); ++b)
          if (a != b) CHECK(std::abs(g[a][b]) < 1e-8);
    }
  }
}

TEST_CASE("degenerate radii") {
  const double k = kPi / 2;
  const auto d = degenerate_radii(3, k, 0, 0.5, 6.0);
  std::vector<double> y;
  std::vector<double> neu;
  for (const auto& r : d.radii) (r.tag == DegenerateTag::SecondKindZero ? y : neu).push_back(r.R);
  REQUIRE(y.size() == 3);
  CHECK(std::abs(y[0] - 1.0) < 1e-9);
  CHECK(std::abs(y[1] - 3.0) < 1e-9);
  CHECK(std::abs(y[2] - 5.0) < 1e-9);
  // x J' - J/2 = 0 where tan x = x.
  REQUIRE(neu.size() == 2);
  CHECK(neu[0] * k == doctest::Approx(4.493409457909064).epsilon(1e-12));
  CHECK(neu[1] * k == doctest::Approx(7.725251836937707).epsilon(1e-12));
  CHECK(to_string(DegenerateTag::NeumannZero) == "neumann");

  CHECK(degenerate_radii(3, k, 0, 0.1, 0.9).radii.empty());

  // Higher sectors: Y zeros match Boost.
  const auto h = degenerate_radii(4, 1.3, 3, 0.5, 20.0);
  for (const auto& r : h.radii) {
    const double mu = r.ell + 1.0;
    if (r.tag == DegenerateTag::SecondKindZero) CHECK(std::abs(boost::math::cyl_neumann(mu, 1.3 * r.R)) < 1e-12);
  }
  CHECK(std::is_sorted(h.radii.begin(), h.radii.end(),
                       [](const DegenerateRadius& a, const DegenerateRadius& b) { return a.R < b.R; }));
}

TEST_CASE("degenerate radii match the splitting") {
  const double k = kPi / 2;
  CHECK(eigenvalues(3, k, 1.0, 6, 100.0).dim_zero >= 1);
  CHECK(eigenvalues(3, k, 1.0 + 1e-3, 6, 100.0).dim_zero == 0);
  CHECK(eigenvalues(3, k, 1.0 - 1e-3, 6, 100.0).dim_zero == 0);
  // Crossing R = 1 moves one eigenvalue across k^2.
  const auto below = eigenvalues(3, k, 1.0 - 1e-3, 6, 100.0);
  const auto above = eigenvalues(3, k, 1.0 + 1e-3, 6, 100.0);
  CHECK(above.dim_minus == below.dim_minus + 1);
  // Y-type radius for ell = 1 in three dimensions.
  const auto d = degenerate_radii(3, 1.1, 1, 0.5, 8.0);
  for (const auto& r : d.radii) {
    if (r.tag != DegenerateTag::SecondKindZero) continue;
    CHECK(eigenvalues(3, 1.1, r.R, 6, 60.0).dim_zero >= 1);
  }
}

TEST_CASE("shared extension radii") {
  const double k = 1.7;
  const double R = 1.0;
  const auto e = shared_extension_radii(3, k, R, 0, R + 10 * kPi / k);
  REQUIRE(e.radii.size() == 10);
  for (int m = 1; m <= 10; ++m) CHECK(e.radii[m - 1] == doctest::Approx(R + m * kPi / k).epsilon(1e-12));
  const auto near = shared_extension_radii(3, k, R, 0, R + 0.5);
  CHECK(near.radii.empty());
  // Cross product vanishes at every returned radius, higher order too.
  const auto f = shared_extension_radii(2, 0.8, 2.0, 3, 40.0);
  const double jr = boost::math::cyl_bessel_j(3, 1.6);
  const double yr = boost::math::cyl_neumann(3, 1.6);
  for (double rp : f.radii) {
    const double c = boost::math::cyl_bessel_j(3, 0.8 * rp) * yr - jr * boost::math::cyl_neumann(3, 0.8 * rp);
    CHECK(std::abs(c) < 1e-10 * std::hypot(jr, yr));
  }
  CHECK_THROWS(shared_extension_radii(3, k, R, 0, 0.5));
}
