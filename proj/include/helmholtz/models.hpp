#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace helmholtz::models {

enum class QType { Indicator, Constant, Gaussian, CosineBump, Ramp };

/// Weight q of the position x (1-D coordinate or radius), q >= 0.
///   indicator    scale on [a, b], 0 elsewhere
///   constant     scale everywhere
///   gaussian     scale * exp(-(x/width)^2)
///   cosine_bump  scale * cos^2(pi (x - (a+b)/2) / (b - a)) on [a, b]
///   ramp         scale * clamp((x - a)/(b - a), 0, 1)
struct QSpec {
  QType type = QType::Indicator;
  double a = -1.0;
  double b = 1.0;
  double scale = 1.0;
  double width = 1.0;

  double operator()(double x) const noexcept;
  /// Closed interval outside which q vanishes, if bounded.
  std::optional<std::pair<double, double>> support() const noexcept;
  /// Points where q or q' may jump.
  std::vector<double> breakpoints() const;
  double max_value() const noexcept;
  /// Integral of q times the hat function with nodes x0 < x1 < x2 (peak 1 at
  /// x1). x0 == x1 or x1 == x2 gives a half hat.
  double integrate_hat(double x0, double x1, double x2) const;
};

enum class Kind { Power, LogPower, CustomTable, Zero };

/// f(x, u) = q(x) T(x, u) with T interpolated from samples on a tensor grid.
struct Table {
  std::vector<double> x;                 // ascending slice positions
  std::vector<double> u;                 // ascending, must contain 0
  std::vector<std::vector<double>> f;    // f[i][j] = T(x[i], u[j])
  /// Beyond the u range T continues as T(u_end) (u/u_end)^(tail_exponent-1).
  double tail_exponent = 3.0;
};

struct Nonlinearity {
  Kind kind = Kind::Power;
  QSpec q;
  double p = 4.0;   // power exponent; growth exponent for the other kinds
  double s = 1.0;   // log-power exponent
  double s0 = 1.0;
  bool radial = false;
  Table table;

  /// Throws std::invalid_argument on inconsistent parameters.
  void validate() const;

  /// f = q(x) g(u) for the power, log-power and zero kinds.
  bool separable() const noexcept { return kind != Kind::CustomTable; }
  /// u-part of a separable nonlinearity and its antiderivative/derivative.
  double g(double u) const;
  double G(double u) const;
  double g_u(double u) const;
};

Nonlinearity from_json(const nlohmann::json& j);
nlohmann::json to_json(const Nonlinearity& nl);
Nonlinearity load_model(const std::string& path);

std::string to_string(Kind kind);
std::string to_string(QType type);

double eval_f(const Nonlinearity& nl, double x, double u);
double eval_F(const Nonlinearity& nl, double x, double u);
/// Partial derivative of f in u.
double eval_fu(const Nonlinearity& nl, double x, double u);

/// Same with the weight value q supplied instead of q(x) (cell averages).
double eval_f_q(const Nonlinearity& nl, double q, double x, double u);
double eval_F_q(const Nonlinearity& nl, double q, double x, double u);
double eval_fu_q(const Nonlinearity& nl, double q, double x, double u);

/// Critical exponent 2N/(N-2), infinite for N <= 2.
double critical_exponent(int N) noexcept;

struct SampleGrid {
  std::vector<double> x;
  std::vector<double> u;
  std::uint64_t seed = 0;
};

/// Deterministic grid: structured x over an enlarged support (or [0, x_max]
/// for radial use), symmetric logarithmic u in [1e-6, 1e3], plus random
/// points from the seed.
SampleGrid make_grid(const Nonlinearity& nl, std::uint64_t seed, int nx = 41, int nu = 61,
                     double x_max = 10.0);

struct Witness {
  double x = 0.0;
  double u = 0.0;
  double value = 0.0;  // size of the violation
};

struct AssumptionCheck {
  std::string id;
  std::string description;
  bool passed = true;
  std::int64_t samples = 0;
  std::optional<Witness> worst;
  std::string note;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  std::uint64_t seed = 0;

  bool all_passed() const noexcept;
  const AssumptionCheck* find(const std::string& id) const noexcept;
};

/// Compact-support assumptions f0..f4 and the strengthened monotonicity
/// ("monotone": u -> f/|u| nondecreasing on R \ {0}); N fixes 2*.
AssumptionReport validate_f(const Nonlinearity& nl, const SampleGrid& grid, int N);
/// Radial assumptions g1..g4; x is read as the radius.
AssumptionReport validate_g(const Nonlinearity& nl, const SampleGrid& grid);

struct SplitValue {
  double f1 = 0.0;
  double f2 = 0.0;
};

SplitValue split_f1_f2(const Nonlinearity& nl, double x, double u);
/// Antiderivative of f1 in u.
double eval_F1(const Nonlinearity& nl, double x, double u);

struct InequalityReport {
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  double max_value = 0.0;           // largest expression value
  double max_relative = 0.0;        // largest value / scale
  std::optional<std::vector<double>> worst;  // (x, u, v, s)
  bool passed() const noexcept { return violations == 0; }
};

/// Samples f1(x,u)[s(s/2+1)u + (1+s)v] + F1(x,u) - F1(x,(1+s)u+v) for s >= -1
/// and counts values above tol * scale. use_f swaps f1 for f.
InequalityReport check_splitting_inequality(const Nonlinearity& nl, std::int64_t samples, std::uint64_t seed,
                                            double tol = 1e-12, bool use_f = false);

/// Expression above at one point, together with its scale.
std::pair<double, double> splitting_expression(const Nonlinearity& nl, double x, double u, double v, double s,
                                               bool use_f = false);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double unit_uniform(std::uint64_t bits) noexcept;

}  // namespace helmholtz::models
