// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [criteria...]
//
// With no arguments every criterion runs. Exit status 1 when any fails.

#include "helmholtz/boundary_spectral.hpp"
#include "helmholtz/models.hpp"
#include "helmholtz/radial_shoot.hpp"
#include "helmholtz/specfun.hpp"
#include "helmholtz/spectral_ball.hpp"
#include "helmholtz/variational_1d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace {

namespace fs = std::filesystem;
using namespace helmholtz;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  return out;
}

models::Nonlinearity shipped() { return models::load_model(std::string(HELMHOLTZ_MODELS_DIR) + "/shipped_power_p4.json"); }
models::Nonlinearity radial_model() {
  return models::load_model(std::string(HELMHOLTZ_MODELS_DIR) + "/radial_gaussian_p4.json");
}

Outcome wronskian() {
  const double mus[] = {0, 0.25, 0.5, 1, 2.5, 10, 30, 60};
  const auto xs = logspace(1e-3, 200, 200);
  double worst = 0.0;
  int bad = 0;
  for (double mu : mus) {
    for (double x : xs) {
      const auto v = specfun::bessel_jy(specfun::BesselOrder(mu), x);
      const double w = 2.0 / (kPi * x);
      const double mag = std::max({std::abs(v.j * v.yp), std::abs(v.jp * v.y), w});
      const double err = std::abs(v.j * v.yp - v.jp * v.y - w);
      const double lim = std::max(1e-10, 1e-8 * mag);
      if (!(err <= lim)) ++bad;
      worst = std::max(worst, err / lim);
    }
  }
  return {bad == 0, std::to_string(bad) + " of 1600 over the limit, worst error/limit " + fmt("%.3g", worst)};
}

Outcome capacity_bounds() {
  const auto rs = logspace(0.05, 150, 100);
  int bad = 0;
  int above_r = 0;
  long count = 0;
  for (int N = 2; N <= 5; ++N) {
    for (int ell = 0; ell <= 40; ++ell) {
      for (double r : rs) {
        const auto z = boundary::capacity_coeff(N, 1.0, r, ell).z;
        const double re = -z.real();
        const double im = z.imag();
        const double lo = (N == 2 && ell == 0) ? 0.0 : 0.5 * (N - 1);
        const double hi = (N == 2 && ell == 0) ? 0.5 : ell + N - 2.0;
        const double slack = 1e-12 * std::max(1.0, hi);
        const bool re_ok = (N == 2 && ell == 0) ? (re > 0.0 && re <= hi + slack)
                                                : (re >= lo - slack && re <= hi + slack);
        // No upper bound on Im z0 for N = 2: r |H_0(r)|^2 increases to 2/pi, so Im z0 > r.
        const bool im_ok = (N == 2 && ell == 0) ? im > 0.0 : (im > 0.0 && im <= r * (1.0 + 1e-12));
        if (N == 2 && ell == 0 && im > r) ++above_r;
        if (!re_ok || !im_ok) ++bad;
        ++count;
      }
    }
  }
  return {bad == 0, std::to_string(bad) + " violations in " + std::to_string(count) + " coefficients; N = 2, ell = 0 has Im z0 > r at " +
                        std::to_string(above_r) + " of 100 radii"};
}

Outcome closed_form_z0() {
  double worst = 0.0;
  for (double r : logspace(0.05, 150, 400)) {
    const auto z = boundary::capacity_coeff(3, 1.0, r, 0).z;
    worst = std::max(worst, std::abs(z - std::complex<double>(-1.0, r)));
  }
  return {worst <= 1e-11, "max |z0 - (-1 + i r)| = " + fmt("%.3g", worst)};
}

Outcome sector_eigenvalues() {
  const auto lams = spectral::sector_eigenvalues(3, 1.0, 1.0, 0, 1000.0);
  if (lams.size() < 10) return {false, "only " + std::to_string(lams.size()) + " eigenvalues below 1000"};
  double worst = 0.0;
  for (int j = 1; j <= 10; ++j) {
    const double want = std::pow((2 * j - 1) * kPi / 2, 2);
    worst = std::max(worst, std::abs(lams[j - 1] - want) / want);
  }
  const std::vector<double> first(lams.begin(), lams.begin() + 10);
  const auto gram = spectral::eigenprofile_gram(3, 1.0, 0, first);
  double off = 0.0;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b)
      if (a != b) off = std::max(off, std::abs(gram[a][b]));
  return {worst <= 1e-9 && off < 1e-8, "max rel error " + fmt("%.3g", worst) + ", max off-diagonal " + fmt("%.3g", off)};
}

Outcome degenerate() {
  const double k = kPi / 2;
  const auto d = spectral::degenerate_radii(3, k, 0, 0.5, 6.0);
  std::vector<double> ys;
  for (const auto& r : d.radii)
    if (r.ell == 0 && r.tag == spectral::DegenerateTag::SecondKindZero) ys.push_back(r.R);
  bool ok = ys.size() == 3;
  double worst = 0.0;
  for (std::size_t i = 0; ok && i < 3; ++i) worst = std::max(worst, std::abs(ys[i] - (2.0 * i + 1.0)));
  ok = ok && worst <= 1e-9;
  const auto below = spectral::eigenvalues(3, k, 1.0 - 1e-3, 4, 50.0);
  const auto above = spectral::eigenvalues(3, k, 1.0 + 1e-3, 4, 50.0);
  const auto at = spectral::eigenvalues(3, k, 1.0, 4, 50.0);
  ok = ok && below.dim_zero == 0 && above.dim_zero == 0 && at.dim_zero >= 1;
  return {ok, std::to_string(ys.size()) + " second-kind radii, max error " + fmt("%.3g", worst) +
                  "; dim X0 at 1-1e-3, 1, 1+1e-3: " + std::to_string(below.dim_zero) + ", " +
                  std::to_string(at.dim_zero) + ", " + std::to_string(above.dim_zero)};
}

Outcome extension() {
  const double k = 1.0;
  const auto e = spectral::shared_extension_radii(3, k, 1.0, 0, 1.0 + 10.5 * kPi / k);
  if (e.radii.size() < 10) return {false, "found " + std::to_string(e.radii.size()) + " radii"};
  double worst = 0.0;
  for (int m = 1; m <= 10; ++m) {
    const double want = 1.0 + m * kPi / k;
    worst = std::max(worst, std::abs(e.radii[m - 1] - want) / want);
  }
  return {worst <= 1e-9 && e.radii.size() == 10, "max rel error " + fmt("%.3g", worst)};
}

Outcome shooting() {
  radial::ShootOptions opt;
  opt.tol = 1e-11;
  models::Nonlinearity zero;
  zero.kind = models::Kind::Zero;
  const auto lin = radial::shoot(zero, 3, 1.0, 1.0, 100.0, opt);
  double err = 0.0;
  for (std::size_t i = 0; i < lin.r.size(); ++i) err = std::max(err, std::abs(lin.u[i] - std::sin(lin.r[i]) / lin.r[i]));
  const double rho0 = lin.rho.front();
  double drift = 0.0;
  for (double r : lin.rho) drift = std::max(drift, std::abs(r - rho0) / rho0);
  bool ok = err < 1e-8 && drift < 1e-9;
  std::ostringstream msg;
  msg << "linear: |u - sin r/r| " << fmt("%.3g", err) << ", rho drift " << fmt("%.3g", drift) << "; nonlinear:";

  const auto nl = radial_model();
  for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
    const auto s = radial::shoot(nl, 3, 1.0, alpha, 100.0, opt);
    // For N = 3 the Gronwall exponent vanishes and the bound is the initial energy.
    const double start = s.rho.front() + 2.0 * s.eps * s.eps * models::eval_F(nl, s.eps, s.u.front());
    double worst = 0.0;
    for (double r : s.rho) worst = std::max(worst, r / start - 1.0);
    const bool gron = worst <= 10.0 * opt.tol;
    const auto rc = radial::radiation_check(s, 10.0, 100.0);
    const bool rad = rc.decay_factor >= 10.0;
    ok = ok && gron && rad;
    msg << " alpha " << alpha << ": rho/bound-1 " << fmt("%.2g", worst) << ", decay " << fmt("%.4f", rc.decay_factor) << " (fit " << fmt("%.4f", rc.fitted_factor) << ")"
        << (rad ? "" : " (<10)") << ";";
  }
  return {ok, msg.str()};
}

struct SuiteData {
  bool ready = false;
  variational::NewtonReport report;
  double least = INFINITY;
};

SuiteData& solve_shipped() {
  static SuiteData data;
  if (!data.ready) {
    const variational::Problem p(variational::Grid1D(kPi, 513), shipped(), 1.3);
    data.report = variational::newton_deflated_solve(p);
    for (const auto& s : data.report.solutions)
      if (s.seed_index >= 0) data.least = std::min(data.least, s.phi);
    data.ready = true;
  }
  return data;
}

Outcome variational_suite() {
  const variational::Problem p(variational::Grid1D(kPi, 513), shipped(), 1.3);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> u(513);
  for (double& v : u) v = unif(gen);
  const auto g = variational::phi_grad(p, u);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto a = u, b = u;
    const double h = 1e-6;
    a[i] += h;
    b[i] -= h;
    const double fd = (variational::phi_eval(p, a) - variational::phi_eval(p, b)) / (2 * h);
    num = std::max(num, std::abs(fd - g[i]));
    den = std::max(den, std::abs(g[i]));
  }
  const double fd_rel = num / den;

  const auto& data = solve_shipped();
  const auto& sols = data.report.solutions;
  int nontrivial = 0;
  const variational::Grid1DSolution* least = nullptr;
  bool paired = true;
  for (const auto& s : sols) {
    if (s.seed_index < 0) continue;
    ++nontrivial;
    if (s.phi == data.least && !least) least = &s;
    bool found = false;
    for (const auto& t : sols) {
      double d = 0.0;
      for (std::size_t i = 0; i < s.u.size(); ++i) d = std::max(d, std::abs(s.u[i] + t.u[i]));
      if (d <= 1e-6 && std::abs(s.phi - t.phi) <= 1e-6) found = true;
    }
    paired = paired && found;
  }
  double order = 0.0;
  if (least) order = variational::refinement_check(p, *least).observed_order;
  const bool ok = fd_rel < 1e-6 && sols.size() >= 3 && data.least > 0.0 && paired && order >= 1.8;
  return {ok, "fd rel error " + fmt("%.3g", fd_rel) + ", " + std::to_string(sols.size()) + " critical points (" +
                  std::to_string(nontrivial) + " nontrivial), least phi " + fmt("%.10g", data.least) +
                  ", pairing " + (paired ? "exact" : "broken") + ", observed order " + fmt("%.4f", order)};
}

Outcome minimax() {
  const variational::Problem p(variational::Grid1D(kPi, 513), shipped(), 1.3);
  variational::MinimaxOptions opt;
  opt.tol = 1e-6;
  const auto m = variational::ground_state_minimax(p, opt);
  const double least = solve_shipped().least;
  const double gap = std::abs(m.c - least);
  return {gap <= 5 * opt.tol, "c " + fmt("%.10g", m.c) + ", least critical value " + fmt("%.10g", least) + ", gap " +
                                  fmt("%.3g", gap)};
}

Outcome splitting_inequality() {
  const auto r = models::check_splitting_inequality(shipped(), 100000, 2024, 1e-12);
  return {r.passed() && r.samples == 100000, std::to_string(r.violations) + " positive values in " +
                                                 std::to_string(r.samples) + " samples, max value/scale " +
                                                 fmt("%.3g", r.max_relative)};
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[e.path().filename().string()] = s.str();
  }
  return files;
}

Outcome determinism() {
  const std::string tool = HELMHOLTZ_TOOL;
  const std::string shipped_path = std::string(HELMHOLTZ_MODELS_DIR) + "/shipped_power_p4.json";
  const std::string radial_path = std::string(HELMHOLTZ_MODELS_DIR) + "/radial_gaussian_p4.json";
  const std::vector<std::string> runs{
      "specfun --mu 2.5 --x 0.5 1 10 100 --zeros 1 30",
      "dtn --N 3 --k 2 --R 1 --lmax 10",
      "spectrum --N 3 --k 2.0 --R 1.0 --lmax 8 --lambda-max 200",
      "degenerate-radii --N 3 --k 1.5707963267948966 --lmax 2 --r-min 0.5 --r-max 6",
      "extension-radii --N 3 --k 1 --R 1 --r-max 30",
      "shoot --model " + radial_path + " --alpha 1.5 --r-max 60",
      "shoot --model " + radial_path + " --sweep 0.5:2:6 --threads 4 --r-max 40 --name sweep",
      "solve1d --model " + shipped_path + " --grid 129 --refine",
      "minimax --model " + shipped_path + " --grid 129 --mplus 40",
      "validate-model --model " + shipped_path + " --samples 20000",
  };
  const auto base = fs::temp_directory_path() / ("helmholtz_acceptance_" + std::to_string(::getpid()));
  int mismatched = 0;
  int failed = 0;
  std::size_t files = 0;
  std::string first_bad;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::map<std::string, std::string> out[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = base / std::to_string(i) / std::to_string(rep);
      fs::create_directories(dir);
      const std::string cmd =
          "'" + tool + "' --seed 2024 --out-dir '" + dir.string() + "' " + runs[i] + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        ++failed;
        if (first_bad.empty()) first_bad = runs[i];
      }
      out[rep] = read_tree(dir);
    }
    if (out[0].empty() || out[0] != out[1]) {
      ++mismatched;
      if (first_bad.empty()) first_bad = runs[i];
    }
    files += out[0].size();
  }
  fs::remove_all(base);
  std::string detail = std::to_string(runs.size()) + " runs, " + std::to_string(files) + " files compared";
  if (failed) detail += ", " + std::to_string(failed) + " runs failed";
  if (mismatched) detail += ", " + std::to_string(mismatched) + " differ";
  if (!first_bad.empty()) detail += " (first: " + first_bad.substr(0, first_bad.find(' ')) + ")";
  return {failed == 0 && mismatched == 0, detail};
}

struct Criterion {
  int id;
  const char* title;
  double budget;  // seconds, 0 when unconstrained
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "Wronskian suite", 5.0, wronskian},
      {2, "capacity coefficient bounds", 10.0, capacity_bounds},
      {3, "closed form of z0 for N = 3", 0.0, closed_form_z0},
      {4, "sector eigenvalues and orthogonality", 0.0, sector_eigenvalues},
      {5, "degenerate radii", 0.0, degenerate},
      {6, "extension radii", 0.0, extension},
      {7, "radial shooting", 0.0, shooting},
      {8, "1-D variational suite", 0.0, variational_suite},
      {9, "minimax consistency", 120.0, minimax},
      {10, "splitting inequality sampling", 0.0, splitting_inequality},
      {11, "determinism", 0.0, determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0.0 && secs > c.budget) {
      o.pass = false;
      o.detail += "; over the time budget of " + fmt("%.0f", c.budget) + " s";
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d  %-38s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d failed\n", failures);
  return failures ? 1 : 0;
}
