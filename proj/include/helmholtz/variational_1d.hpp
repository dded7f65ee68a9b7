#pragma once

#include "helmholtz/models.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace helmholtz::variational {

/// Uniform nodes on [-R, R].
struct Grid1D {
  double R = 1.0;
  int n = 0;
  std::vector<double> x;
  double h = 0.0;

  Grid1D() = default;
  Grid1D(double R, int n);
  /// Trapezoid weights.
  std::vector<double> weights() const;
};

/// Discrete problem: nodes, trapezoid weights and the hat-averaged weight q.
class Problem {
 public:
  Problem(Grid1D grid, models::Nonlinearity nl, double k);

  const Grid1D& grid() const noexcept { return grid_; }
  const models::Nonlinearity& model() const noexcept { return nl_; }
  double k() const noexcept { return k_; }
  const std::vector<double>& w() const noexcept { return w_; }
  const std::vector<double>& qbar() const noexcept { return qbar_; }

  /// Discrete functional: 1/2 sum h ((u_{i+1}-u_i)/h)^2 - sum w_i (k^2 u_i^2 / 2 + F_i(u_i)).
  double phi(const std::vector<double>& u) const;
  /// Exact gradient of phi.
  std::vector<double> grad(const std::vector<double>& u) const;
  /// Tridiagonal Hessian of phi: sub/super diagonal `off`, diagonal `diag`.
  void hessian(const std::vector<double>& u, std::vector<double>& diag, std::vector<double>& off) const;
  /// sup |grad_i / w_i|, the nodal residual of -u'' - k^2 u - f.
  double residual(const std::vector<double>& u) const;
  double norm(const std::vector<double>& u) const;
  double dot(const std::vector<double>& a, const std::vector<double>& b) const;

 private:
  Grid1D grid_;
  models::Nonlinearity nl_;
  double k_;
  std::vector<double> w_;
  std::vector<double> qbar_;
};

double phi_eval(const Problem& p, const std::vector<double>& u);
std::vector<double> phi_grad(const Problem& p, const std::vector<double>& u);

/// e_1 = 1/sqrt(2R), e_j = cos((j-1) pi (x+R)/(2R)) / sqrt(R); lambda_j = ((j-1) pi/(2R))^2.
struct NeumannBasis {
  double R = 1.0;
  int m = 0;
  std::vector<double> lambdas;

  double eval(int j, double x) const;
  /// Mode j sampled on the grid (orthonormal in the trapezoid weights).
  std::vector<double> nodal(int j, const Grid1D& grid) const;
};

NeumannBasis neumann_spectrum(double R, int m);

struct Splitting1D {
  int j_star_lower = 0;  // max{j : lambda_j < k^2}
  int j_star_upper = 1;  // first index above k^2
  int dim_minus = 0;
  int dim_zero = 0;
};

/// Relative band for lambda_j = k^2.
inline constexpr double kZeroBand1D = 1e-8;

Splitting1D splitting_1d(double R, double k, int m);

struct IndexData {
  int dim_minus = 0;
  double norm_plus = 0.0;
  double norm_minus = 0.0;
};

struct Grid1DSolution {
  Grid1D grid;
  std::vector<double> u;
  double phi = 0.0;
  double grad_residual = 0.0;
  IndexData index_data;
  int iterations = 0;
  int seed_index = -1;  // -1 for the trivial solution
};

struct NewtonOptions {
  int max_solutions = 8;
  double tol = 1e-9;
  int max_iterations = 60;
  /// Extra directions beyond e_{j^*} used for seeds.
  int seed_modes = 3;
  std::vector<double> amplitudes{0.5, 1.0, 2.0, 4.0};
};

struct NewtonReport {
  std::vector<Grid1DSolution> solutions;  // sorted by phi, then nodal values
  Splitting1D splitting;
  int seeds_tried = 0;
  int seeds_failed = 0;
  std::vector<std::string> warnings;
};

/// Index data of u against the cosine splitting.
IndexData index_data(const Problem& p, const std::vector<double>& u);

/// Plain damped Newton from u0; returns false if it does not reach tol.
bool newton_solve(const Problem& p, std::vector<double>& u, double tol, int max_iterations, int* iterations = nullptr);

/// Deflated Newton from the default seed set (or `seeds` when non-empty).
NewtonReport newton_deflated_solve(const Problem& p, const NewtonOptions& opt = {},
                                   const std::vector<std::vector<double>>& seeds = {});

struct MinimaxOptions {
  int m_plus = 0;  // 0: n/2 - j^*
  double tol = 1e-6;
  int max_outer = 2000;
  int restarts = 3;
  std::uint64_t seed = 1;
};

struct MinimaxResult {
  double c = 0.0;
  std::vector<double> direction;   // unit nodal vector in X+
  std::vector<double> coefficients;  // of direction in e_{j^*}, ..., e_{j^*+m_plus}
  std::vector<double> maximizer;   // t w + v at the inner sup
  double t = 0.0;
  int outer_iterations = 0;
  double grad_norm = 0.0;
  std::vector<std::string> warnings;
};

/// c = inf over unit w in span{e_{j^*}, ..., e_{j^*+m_plus}} of sup_{t >= 0, v in X-} phi(t w + v).
MinimaxResult ground_state_minimax(const Problem& p, const MinimaxOptions& opt = {});

struct RefinementCheck {
  double residual_coarse = 0.0;  // grid n, restricted from 2n-1
  double residual_fine = 0.0;    // grid 2n-1, restricted from 4n-3
  double observed_order = 0.0;
  double phi_n = 0.0;
  double phi_2n = 0.0;
  double phi_4n = 0.0;
  bool converged = false;
};

/// Two-grid test: refine sol to 2n-1 and 4n-3 nodes by Newton and compare
/// interior stencil residuals of the true operator, away from the ends and
/// from jumps of q.
RefinementCheck refinement_check(const Problem& coarse, const Grid1DSolution& sol, double tol = 1e-9);

/// Linear interpolation from grid a onto grid b.
std::vector<double> prolong(const Grid1D& a, const std::vector<double>& u, const Grid1D& b);

}  // namespace helmholtz::variational
