#include "helmholtz/variational_1d.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace helmholtz::variational {

namespace {

constexpr double kPi = std::numbers::pi;

double wdot(const std::vector<double>& w, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

// Solves the tridiagonal system in place (b <- H^{-1} b); false if singular.
bool tridiag_solve(std::vector<double> diag, std::vector<double> off, std::vector<double>& b) {
  const auto n = static_cast<lapack_int>(diag.size());
  std::vector<double> lower = off;
  std::vector<double> upper = std::move(off);
  const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, lower.data(), diag.data(), upper.data(), b.data(), n);
  if (info != 0) return false;
  return std::all_of(b.begin(), b.end(), [](double v) { return std::isfinite(v); });
}

// Merit: sum g_i^2 / w_i.
double merit(const Problem& p, const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * g[i] / p.w()[i];
  return s;
}

bool is_odd(const models::Nonlinearity& nl, const Grid1D& g) {
  for (std::size_t i = 0; i < g.x.size(); i += std::max<std::size_t>(1, g.x.size() / 16)) {
    for (double u : {0.3, 1.0, 2.7}) {
      if (models::eval_f(nl, g.x[i], -u) != -models::eval_f(nl, g.x[i], u)) return false;
    }
  }
  return true;
}

std::vector<double> scaled(const std::vector<double>& v, double s) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

// Discrete Neumann eigenvalue of the three point stencil on grid g.
double discrete_lambda(int j, const Grid1D& g) {
  const double s = std::sin((j - 1) * kPi * g.h / (4.0 * g.R));
  return 4.0 / (g.h * g.h) * s * s;
}

}  // namespace

// ---- grid and problem ---------------------------------------------------------

Grid1D::Grid1D(double R_, int n_) : R(R_), n(n_) {
  if (!(R > 0.0) || !std::isfinite(R)) throw std::domain_error("Grid1D: R must be positive");
  if (n < 16) throw std::domain_error("Grid1D: need at least 16 nodes");
  h = 2.0 * R / (n - 1);
  x.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = -R + i * h;
  x.back() = R;
}

std::vector<double> Grid1D::weights() const {
  std::vector<double> w(x.size(), h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

Problem::Problem(Grid1D grid, models::Nonlinearity nl, double k) : grid_(std::move(grid)), nl_(std::move(nl)), k_(k) {
  if (!(k_ > 0.0) || !std::isfinite(k_)) throw std::domain_error("Problem: k must be positive");
  if (grid_.n < 16) throw std::domain_error("Problem: grid not initialised");
  nl_.validate();
  w_ = grid_.weights();
  const auto& x = grid_.x;
  const std::size_t n = x.size();
  qbar_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i == 0 ? x[0] : x[i - 1];
    const double b = i + 1 == n ? x[n - 1] : x[i + 1];
    qbar_[i] = nl_.q.integrate_hat(a, x[i], b) / w_[i];
  }
}

double Problem::phi(const std::vector<double>& u) const {
  const std::size_t n = u.size();
  const double h = grid_.h;
  double kin = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) kin += (u[i + 1] - u[i]) * (u[i + 1] - u[i]);
  double pot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pot += w_[i] * (0.5 * k_ * k_ * u[i] * u[i] + models::eval_F_q(nl_, qbar_[i], grid_.x[i], u[i]));
  }
  return 0.5 * kin / h - pot;
}

std::vector<double> Problem::grad(const std::vector<double>& u) const {
  const std::size_t n = u.size();
  const double h = grid_.h;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lap = 0.0;
    if (i > 0) lap += u[i] - u[i - 1];
    if (i + 1 < n) lap += u[i] - u[i + 1];
    g[i] = lap / h - w_[i] * (k_ * k_ * u[i] + models::eval_f_q(nl_, qbar_[i], grid_.x[i], u[i]));
  }
  return g;
}

void Problem::hessian(const std::vector<double>& u, std::vector<double>& diag, std::vector<double>& off) const {
  const std::size_t n = u.size();
  const double h = grid_.h;
  diag.assign(n, 0.0);
  off.assign(n - 1, -1.0 / h);
  for (std::size_t i = 0; i < n; ++i) {
    const double nb = (i > 0 ? 1.0 : 0.0) + (i + 1 < n ? 1.0 : 0.0);
    diag[i] = nb / h - w_[i] * (k_ * k_ + models::eval_fu_q(nl_, qbar_[i], grid_.x[i], u[i]));
  }
}

double Problem::residual(const std::vector<double>& u) const {
  const auto g = grad(u);
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) r = std::max(r, std::abs(g[i] / w_[i]));
  return r;
}

double Problem::norm(const std::vector<double>& u) const { return std::sqrt(wdot(w_, u, u)); }

double Problem::dot(const std::vector<double>& a, const std::vector<double>& b) const { return wdot(w_, a, b); }

double phi_eval(const Problem& p, const std::vector<double>& u) { return p.phi(u); }

std::vector<double> phi_grad(const Problem& p, const std::vector<double>& u) { return p.grad(u); }

// ---- cosine basis -------------------------------------------------------------

double NeumannBasis::eval(int j, double x) const {
  if (j < 1) throw std::domain_error("NeumannBasis: modes start at 1");
  if (j == 1) return 1.0 / std::sqrt(2.0 * R);
  return std::cos((j - 1) * kPi * (x + R) / (2.0 * R)) / std::sqrt(R);
}

std::vector<double> NeumannBasis::nodal(int j, const Grid1D& grid) const {
  std::vector<double> v(grid.x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = eval(j, grid.x[i]);
  return v;
}

NeumannBasis neumann_spectrum(double R, int m) {
  if (!(R > 0.0)) throw std::domain_error("neumann_spectrum: R must be positive");
  if (m < 1) throw std::domain_error("neumann_spectrum: need at least one mode");
  NeumannBasis b;
  b.R = R;
  b.m = m;
  for (int j = 1; j <= m; ++j) {
    const double s = (j - 1) * kPi / (2.0 * R);
    b.lambdas.push_back(s * s);
  }
  return b;
}

Splitting1D splitting_1d(double R, double k, int m) {
  if (!(k > 0.0)) throw std::domain_error("splitting_1d: k must be positive");
  const auto b = neumann_spectrum(R, m);
  const double k2 = k * k;
  Splitting1D s;
  for (double lam : b.lambdas) {
    if (std::abs(lam - k2) < kZeroBand1D * k2) {
      ++s.dim_zero;
    } else if (lam < k2) {
      ++s.dim_minus;
    }
  }
  if (b.lambdas.back() < k2) throw std::domain_error("splitting_1d: m too small to reach k^2");
  s.j_star_lower = s.dim_minus;
  s.j_star_upper = s.dim_minus + s.dim_zero + 1;
  return s;
}

IndexData index_data(const Problem& p, const std::vector<double>& u) {
  const Grid1D& g = p.grid();
  const auto sp = splitting_1d(g.R, p.k(), g.n);
  const auto basis = neumann_spectrum(g.R, std::max(1, sp.dim_minus));
  IndexData d;
  d.dim_minus = sp.dim_minus;
  double minus2 = 0.0;
  for (int j = 1; j <= sp.dim_minus; ++j) {
    const double c = p.dot(u, basis.nodal(j, g));
    minus2 += c * c;
  }
  d.norm_minus = std::sqrt(minus2);
  d.norm_plus = std::sqrt(std::max(0.0, p.dot(u, u) - minus2));
  return d;
}

// ---- Newton -------------------------------------------------------------------

bool newton_solve(const Problem& p, std::vector<double>& u, double tol, int max_iterations, int* iterations) {
  std::vector<double> diag;
  std::vector<double> off;
  int it = 0;
  bool ok = false;
  for (; it <= max_iterations; ++it) {
    if (p.residual(u) < tol) {
      ok = true;
      break;
    }
    if (it == max_iterations) break;
    auto g = p.grad(u);
    const double m0 = merit(p, g);
    p.hessian(u, diag, off);
    std::vector<double> d = scaled(g, -1.0);
    if (!tridiag_solve(diag, off, d)) break;
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
      std::vector<double> trial(u);
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] += alpha * d[i];
      if (merit(p, p.grad(trial)) < m0) {
        u = std::move(trial);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (iterations) *iterations = it;
  return ok;
}

namespace {

struct Deflation {
  const Problem& p;
  const std::vector<Grid1DSolution>& found;

  // M(u) = prod (1 + 1/|u - u_i|^2).
  double factor(const std::vector<double>& u) const {
    double m = 1.0;
    for (const auto& s : found) {
      const double d2 = dist2(u, s.u);
      m *= 1.0 + 1.0 / d2;
    }
    return m;
  }

  double dist2(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += p.w()[i] * (a[i] - b[i]) * (a[i] - b[i]);
    return s;
  }

  // Scale of the deflated Newton step relative to the plain step d0.
  double step_scale(const std::vector<double>& u, const std::vector<double>& d0) const {
    double s = 0.0;
    for (const auto& sol : found) {
      double inner = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) inner += p.w()[i] * (u[i] - sol.u[i]) * d0[i];
      const double d2 = dist2(u, sol.u);
      s += -2.0 * inner / (d2 * d2 * (1.0 + 1.0 / d2));
    }
    return 1.0 / (1.0 - s);
  }
};

bool deflated_newton(const Problem& p, const Deflation& defl, std::vector<double>& u, double tol, int max_iterations,
                     int& iterations) {
  std::vector<double> diag;
  std::vector<double> off;
  for (iterations = 0; iterations <= max_iterations; ++iterations) {
    if (p.residual(u) < tol) return true;
    if (iterations == max_iterations) break;
    const auto g = p.grad(u);
    const double m0 = defl.factor(u) * std::sqrt(merit(p, g));
    p.hessian(u, diag, off);
    std::vector<double> d = scaled(g, -1.0);
    if (!tridiag_solve(diag, off, d)) return false;
    const double beta = defl.step_scale(u, d);
    if (!std::isfinite(beta)) return false;
    double alpha = beta;
    bool moved = false;
    for (int ls = 0; ls < 20; ++ls, alpha *= 0.5) {
      std::vector<double> trial(u);
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] += alpha * d[i];
      const double m1 = defl.factor(trial) * std::sqrt(merit(p, p.grad(trial)));
      if (std::isfinite(m1) && m1 < m0) {
        u = std::move(trial);
        moved = true;
        break;
      }
    }
    if (!moved) return false;
    for (double v : u)
      if (!std::isfinite(v) || std::abs(v) > 1e8) return false;
  }
  return false;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

NewtonReport newton_deflated_solve(const Problem& p, const NewtonOptions& opt,
                                   const std::vector<std::vector<double>>& seeds) {
  if (!(opt.tol > 0.0)) throw std::domain_error("newton_deflated_solve: tol must be positive");
  const Grid1D& g = p.grid();
  NewtonReport rep;
  rep.splitting = splitting_1d(g.R, p.k(), g.n);
  if (rep.splitting.dim_zero > 0) {
    throw std::domain_error("degenerate (k, R): k^2 is a Neumann eigenvalue, so X0 is nontrivial");
  }
  const auto& sp = rep.splitting;
  if (p.model().q(g.x.front()) != 0.0 || p.model().q(g.x.back()) != 0.0) {
    rep.warnings.push_back("q does not vanish at the ends: support(q) is not inside (-R, R)");
  }
  const auto basis = neumann_spectrum(g.R, g.n);
  for (int j = 1; j <= sp.dim_minus; ++j) {
    if (!(discrete_lambda(j, g) < p.k() * p.k())) {
      rep.warnings.push_back("discrete eigenvalue of mode " + std::to_string(j) + " crosses k^2; refine the grid");
    }
  }

  std::vector<std::vector<double>> seed_list = seeds;
  if (seed_list.empty()) {
    const int d = sp.dim_minus;
    std::vector<std::vector<double>> minus;
    for (int j = 1; j <= d; ++j) minus.push_back(basis.nodal(j, g));
    // Coarse lattice in X-: all sign patterns for small dim X-, single modes otherwise.
    std::vector<std::vector<int>> lattice;
    if (d <= 4) {
      int total = 1;
      for (int j = 0; j < d; ++j) total *= 3;
      for (int c = 0; c < total; ++c) {
        std::vector<int> digits(static_cast<std::size_t>(d));
        int r = c;
        for (int j = 0; j < d; ++j) {
          digits[static_cast<std::size_t>(j)] = r % 3 - 1;
          r /= 3;
        }
        lattice.push_back(digits);
      }
      std::stable_sort(lattice.begin(), lattice.end(), [](const auto& a, const auto& b) {
        auto nz = [](const std::vector<int>& v) { return std::count_if(v.begin(), v.end(), [](int x) { return x != 0; }); };
        return nz(a) < nz(b);
      });
    } else {
      lattice.push_back(std::vector<int>(static_cast<std::size_t>(d), 0));
      for (int j = 0; j < d; ++j) {
        for (int s : {1, -1}) {
          std::vector<int> v(static_cast<std::size_t>(d), 0);
          v[static_cast<std::size_t>(j)] = s;
          lattice.push_back(v);
        }
      }
    }
    const double amp = std::sqrt(g.R);
    for (double t : opt.amplitudes) {
      for (int s = 0; s <= opt.seed_modes; ++s) {
        const int mode = sp.j_star_upper + s;
        if (mode > g.n) break;
        const auto e = basis.nodal(mode, g);
        bool touches = false;
        for (std::size_t i = 0; i < e.size(); ++i)
          if (p.qbar()[i] > 0.0 && std::abs(e[i]) > 1e-12) touches = true;
        if (!touches) {
          rep.warnings.push_back("seed direction e_" + std::to_string(mode) + " vanishes on the nodes of Omega");
        }
        for (const auto& c : lattice) {
          for (double sign : {1.0, -1.0}) {
            std::vector<double> u0 = scaled(e, sign * t * amp);
            for (int j = 0; j < d; ++j)
              for (std::size_t i = 0; i < u0.size(); ++i)
                u0[i] += sign * 0.5 * t * amp * c[static_cast<std::size_t>(j)] * minus[static_cast<std::size_t>(j)][i];
            seed_list.push_back(std::move(u0));
          }
        }
      }
    }
  }

  std::vector<Grid1DSolution> found;
  {
    Grid1DSolution zero;
    zero.grid = g;
    zero.u.assign(g.x.size(), 0.0);
    zero.phi = p.phi(zero.u);
    zero.grad_residual = p.residual(zero.u);
    zero.index_data = index_data(p, zero.u);
    found.push_back(std::move(zero));
  }
  const bool odd = is_odd(p.model(), g);
  auto distinct = [&](const std::vector<double>& u) {
    const double scale = std::max(1.0, p.norm(u));
    for (const auto& s : found) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) d2 += p.w()[i] * (u[i] - s.u[i]) * (u[i] - s.u[i]);
      if (std::sqrt(d2) <= 1e-4 * scale) return false;
    }
    return true;
  };
  auto accept = [&](std::vector<double> u, int iterations, int seed_index) {
    Grid1DSolution s;
    s.grid = g;
    s.phi = p.phi(u);
    s.grad_residual = p.residual(u);
    s.iterations = iterations;
    s.seed_index = seed_index;
    s.u = std::move(u);
    s.index_data = index_data(p, s.u);
    found.push_back(std::move(s));
  };

  std::mt19937_64 jitter(12345);
  for (std::size_t si = 0; si < seed_list.size(); ++si) {
    if (static_cast<int>(found.size()) >= opt.max_solutions) break;
    ++rep.seeds_tried;
    std::vector<double> u = seed_list[si];
    const Deflation defl{p, found};
    int its = 0;
    bool ok = deflated_newton(p, defl, u, opt.tol, opt.max_iterations, its);
    if (!ok && std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); })) {
      // One perturbed retry in case the Jacobian was singular along the way.
      u = seed_list[si];
      for (double& v : u) v *= 1.0 + 1e-3 * (models::unit_uniform(jitter()) - 0.5);
      ok = deflated_newton(p, defl, u, opt.tol, opt.max_iterations, its);
    }
    if (!ok || !distinct(u)) {
      ++rep.seeds_failed;
      continue;
    }
    accept(u, its, static_cast<int>(si));
    if (odd && static_cast<int>(found.size()) < opt.max_solutions) {
      std::vector<double> neg = scaled(found.back().u, -1.0);
      if (p.residual(neg) < opt.tol && distinct(neg)) accept(std::move(neg), 0, static_cast<int>(si));
    }
  }

  std::sort(found.begin(), found.end(), [](const Grid1DSolution& a, const Grid1DSolution& b) {
    if (a.phi != b.phi) return a.phi < b.phi;
    return lex_less(a.u, b.u);
  });

  // Resolution: energy above mode n/4 should be negligible.
  const int cut = g.n / 4;
  for (const auto& s : found) {
    const double total = p.dot(s.u, s.u);
    if (total == 0.0) continue;
    double low = 0.0;
    for (int j = 1; j <= cut; ++j) {
      const double c = p.dot(s.u, basis.nodal(j, g));
      low += c * c;
    }
    if (total - low > 1e-6 * total) {
      std::ostringstream msg;
      msg << "solution with phi = " << s.phi << " has relative energy " << (total - low) / total
          << " above mode n/4; the grid may not resolve it";
      rep.warnings.push_back(msg.str());
    }
  }
  rep.solutions = std::move(found);
  return rep;
}

// ---- minimax ------------------------------------------------------------------

namespace {

struct Inner {
  double value = 0.0;
  double t = 0.0;
  Eigen::VectorXd b;
  std::vector<double> u;
  std::vector<double> grad;
};

class MinimaxSolver {
 public:
  MinimaxSolver(const Problem& p, int m_plus) : p_(p), g_(p.grid()) {
    sp_ = splitting_1d(g_.R, p.k(), g_.n);
    const auto basis = neumann_spectrum(g_.R, g_.n);
    const std::size_t n = g_.x.size();
    minus_.resize(static_cast<Eigen::Index>(n), sp_.dim_minus);
    for (int j = 1; j <= sp_.dim_minus; ++j) {
      const auto e = basis.nodal(j, g_);
      for (std::size_t i = 0; i < n; ++i) minus_(static_cast<Eigen::Index>(i), j - 1) = e[i];
    }
    const int cols = m_plus + 1;
    plus_.resize(static_cast<Eigen::Index>(n), cols);
    precond_.resize(cols);
    for (int c = 0; c < cols; ++c) {
      const int j = sp_.j_star_upper + c;
      const auto e = basis.nodal(j, g_);
      for (std::size_t i = 0; i < n; ++i) plus_(static_cast<Eigen::Index>(i), c) = e[i];
      precond_(c) = 1.0 / (discrete_lambda(j, g_) + 1.0);
    }
  }

  const Splitting1D& splitting() const { return sp_; }
  int dim() const { return static_cast<int>(plus_.cols()); }

  Eigen::VectorXd nodal_direction(const Eigen::VectorXd& a) const { return plus_ * (a / a.norm()); }

  // sup over t >= 0, v in X- of phi(t w + v); warm start from `prev` when given.
  Inner maximize(const Eigen::VectorXd& w, const Inner* prev) const {
    const int d = sp_.dim_minus;
    const std::size_t n = g_.x.size();
    Eigen::VectorXd y(d + 1);
    if (prev && prev->t > 0.0) {
      y(0) = prev->t;
      y.tail(d) = prev->b;
    } else {
      y.setZero();
      y(0) = initial_t(w);
    }
    Eigen::MatrixXd P(static_cast<Eigen::Index>(n), d + 1);
    P.col(0) = w;
    if (d > 0) P.rightCols(d) = minus_;
    std::vector<double> diag;
    std::vector<double> off;
    auto nodal = [&](const Eigen::VectorXd& yy) {
      const Eigen::VectorXd u = P * yy;
      return std::vector<double>(u.data(), u.data() + u.size());
    };
    std::vector<double> u = nodal(y);
    double value = p_.phi(u);
    for (int it = 0; it < 200; ++it) {
      const auto gvec = p_.grad(u);
      const Eigen::Map<const Eigen::VectorXd> gmap(gvec.data(), static_cast<Eigen::Index>(n));
      const Eigen::VectorXd gy = P.transpose() * gmap;
      if (gy.norm() <= 1e-14 * std::max(1.0, std::abs(value))) break;
      p_.hessian(u, diag, off);
      Eigen::MatrixXd HP(static_cast<Eigen::Index>(n), d + 1);
      for (Eigen::Index c = 0; c <= d; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
          double v = diag[i] * P(static_cast<Eigen::Index>(i), c);
          if (i > 0) v += off[i - 1] * P(static_cast<Eigen::Index>(i - 1), c);
          if (i + 1 < n) v += off[i] * P(static_cast<Eigen::Index>(i + 1), c);
          HP(static_cast<Eigen::Index>(i), c) = v;
        }
      }
      const Eigen::MatrixXd Hy = P.transpose() * HP;
      Eigen::LLT<Eigen::MatrixXd> llt(-Hy);
      Eigen::VectorXd step;
      if (llt.info() == Eigen::Success) {
        step = llt.solve(gy);
      } else {
        step = gy / std::max(1.0, Hy.norm());
      }
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        Eigen::VectorXd trial = y + alpha * step;
        if (trial(0) < 0.0) continue;
        auto ut = nodal(trial);
        const double vt = p_.phi(ut);
        if (vt >= value) {
          y = trial;
          u = std::move(ut);
          value = vt;
          moved = true;
          break;
        }
      }
      if (!moved) break;
      if (alpha * step.norm() <= 1e-15 * (1.0 + y.norm())) break;
      if (!std::isfinite(value) || y.norm() > 1e8) {
        throw std::runtime_error("ground_state_minimax: inner maximization diverged");
      }
    }
    Inner out;
    out.value = value;
    out.t = y(0);
    out.b = y.tail(d);
    out.u = u;
    out.grad = p_.grad(u);
    return out;
  }

  // Outer gradient of m(a) = sup phi(t E+ a/|a| + v).
  Eigen::VectorXd outer_gradient(const Eigen::VectorXd& a, const Inner& in) const {
    const Eigen::Map<const Eigen::VectorXd> gmap(in.grad.data(), static_cast<Eigen::Index>(in.grad.size()));
    const double na = a.norm();
    const Eigen::VectorXd ahat = a / na;
    Eigen::VectorXd gw = plus_.transpose() * gmap;
    gw -= ahat * ahat.dot(gw);
    return (in.t / na) * gw;
  }

  const Eigen::VectorXd& precond() const { return precond_; }

 private:
  double initial_t(const Eigen::VectorXd& w) const {
    std::vector<double> wv(w.data(), w.data() + w.size());
    double best_t = 0.0;
    double best = 0.0;
    for (double t = 1e-2; t < 1e6; t *= 1.25) {
      const double v = p_.phi(scaled(wv, t));
      if (v > best) {
        best = v;
        best_t = t;
      } else if (best_t > 0.0 && v < best) {
        break;
      }
    }
    if (!(best_t > 0.0)) throw std::runtime_error("ground_state_minimax: phi(t w) has no positive maximum");
    return best_t;
  }

  const Problem& p_;
  const Grid1D& g_;
  Splitting1D sp_;
  Eigen::MatrixXd minus_;
  Eigen::MatrixXd plus_;
  Eigen::VectorXd precond_;
};

}  // namespace

MinimaxResult ground_state_minimax(const Problem& p, const MinimaxOptions& opt) {
  if (!(opt.tol > 0.0)) throw std::domain_error("ground_state_minimax: tol must be positive");
  const Grid1D& g = p.grid();
  const auto sp = splitting_1d(g.R, p.k(), g.n);
  if (sp.dim_zero > 0) throw std::domain_error("degenerate (k, R): X0 is nontrivial");
  {
    const auto rep = models::validate_f(p.model(), models::make_grid(p.model(), opt.seed), 1);
    for (const char* id : {"f3", "monotone"}) {
      const auto* c = rep.find(id);
      if (!c || !c->passed) {
        throw std::domain_error(std::string("ground_state_minimax: model fails ") + id +
                                " (needs superquadratic F and nondecreasing f/|u|)");
      }
    }
  }
  int m_plus = opt.m_plus > 0 ? opt.m_plus : std::max(1, g.n / 2 - sp.j_star_upper);
  m_plus = std::min(m_plus, g.n - sp.j_star_upper);
  MinimaxSolver solver(p, m_plus);
  const int dim = solver.dim();
  const Eigen::VectorXd& H0 = solver.precond();

  MinimaxResult best;
  best.c = std::numeric_limits<double>::infinity();
  std::mt19937_64 gen(opt.seed);
  for (int restart = 0; restart <= opt.restarts; ++restart) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
    a(0) = 1.0;
    if (restart > 0) {
      for (int c = 0; c < dim; ++c) a(c) += 0.3 * (models::unit_uniform(gen()) - 0.5) * H0(c) / H0(0);
      a /= a.norm();
    }
    Inner in = solver.maximize(solver.nodal_direction(a), nullptr);
    Eigen::VectorXd grad = solver.outer_gradient(a, in);
    Eigen::MatrixXd Hinv = H0.asDiagonal();
    int it = 0;
    int stalls = 0;
    for (; it < opt.max_outer; ++it) {
      const double gnorm = std::sqrt(grad.dot(H0.asDiagonal() * grad));
      if (gnorm < 1e-3 * opt.tol * std::max(1.0, std::abs(in.value))) break;
      Eigen::VectorXd dir = -Hinv * grad;
      if (dir.dot(grad) >= 0.0) {
        Hinv = H0.asDiagonal();
        dir = -Hinv * grad;
      }
      double alpha = 1.0;
      bool moved = false;
      Eigen::VectorXd a_new;
      Inner in_new;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        a_new = a + alpha * dir;
        a_new /= a_new.norm();
        in_new = solver.maximize(solver.nodal_direction(a_new), &in);
        if (in_new.value <= in.value + 1e-4 * alpha * grad.dot(dir)) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
      const Eigen::VectorXd grad_new = solver.outer_gradient(a_new, in_new);
      const Eigen::VectorXd s = a_new - a;
      const Eigen::VectorXd yk = grad_new - grad;
      const double sy = s.dot(yk);
      if (sy > 1e-300) {
        const double rho = 1.0 / sy;
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
        Hinv = (I - rho * s * yk.transpose()) * Hinv * (I - rho * yk * s.transpose()) + rho * s * s.transpose();
      }
      const double drop = in.value - in_new.value;
      stalls = drop < 1e-15 * std::max(1.0, std::abs(in.value)) ? stalls + 1 : 0;
      a = a_new;
      in = std::move(in_new);
      grad = grad_new;
      if (stalls >= 5) break;
    }
    if (it >= opt.max_outer) best.warnings.push_back("outer descent hit the iteration limit");
    if (in.value < best.c) {
      best.c = in.value;
      best.coefficients.assign(a.data(), a.data() + a.size());
      const Eigen::VectorXd w = solver.nodal_direction(a);
      best.direction.assign(w.data(), w.data() + w.size());
      best.maximizer = in.u;
      best.t = in.t;
      best.outer_iterations = it;
      best.grad_norm = std::sqrt(grad.dot(H0.asDiagonal() * grad));
    }
  }
  if (!(best.c > 0.0)) best.warnings.push_back("minimax level is not positive");
  return best;
}

// ---- refinement ---------------------------------------------------------------

std::vector<double> prolong(const Grid1D& a, const std::vector<double>& u, const Grid1D& b) {
  std::vector<double> out(b.x.size());
  for (std::size_t i = 0; i < b.x.size(); ++i) {
    const double s = (b.x[i] + a.R) / a.h;
    const auto j = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(a.n - 2)));
    const double t = s - static_cast<double>(j);
    out[i] = (1.0 - t) * u[j] + t * u[j + 1];
  }
  return out;
}

namespace {

double interior_residual(const Problem& p, const std::vector<double>& u) {
  const Grid1D& g = p.grid();
  const auto bps = p.model().q.breakpoints();
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    const double x = g.x[i];
    if (std::abs(x) > g.R - 2.0 * g.h) continue;
    bool near = false;
    for (double bp : bps)
      if (std::abs(x - bp) < 2.0 * g.h) near = true;
    if (near) continue;
    const double lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (g.h * g.h);
    r = std::max(r, std::abs(-lap - p.k() * p.k() * u[i] - models::eval_f(p.model(), x, u[i])));
  }
  return r;
}

std::vector<double> restrict_half(const std::vector<double>& fine) {
  std::vector<double> out;
  for (std::size_t i = 0; i < fine.size(); i += 2) out.push_back(fine[i]);
  return out;
}

}  // namespace

RefinementCheck refinement_check(const Problem& coarse, const Grid1DSolution& sol, double tol) {
  RefinementCheck rc;
  const Grid1D& g1 = coarse.grid();
  const Grid1D g2(g1.R, 2 * g1.n - 1);
  const Grid1D g4(g1.R, 4 * g1.n - 3);
  const Problem p2(g2, coarse.model(), coarse.k());
  const Problem p4(g4, coarse.model(), coarse.k());
  auto u2 = prolong(g1, sol.u, g2);
  const bool ok2 = newton_solve(p2, u2, tol, 60);
  auto u4 = prolong(g2, u2, g4);
  const bool ok4 = newton_solve(p4, u4, tol, 60);
  rc.converged = ok2 && ok4;
  rc.phi_n = coarse.phi(sol.u);
  rc.phi_2n = p2.phi(u2);
  rc.phi_4n = p4.phi(u4);
  rc.residual_coarse = interior_residual(coarse, restrict_half(u2));
  rc.residual_fine = interior_residual(p2, restrict_half(u4));
  if (rc.residual_fine > 0.0 && rc.residual_coarse > 0.0) {
    rc.observed_order = std::log2(rc.residual_coarse / rc.residual_fine);
  }
  return rc;
}

}  // namespace helmholtz::variational
