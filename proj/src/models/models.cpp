#include "helmholtz/models.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace helmholtz::models {

namespace {

using json = nlohmann::json;

constexpr double kPi = std::numbers::pi;

double sign_of(double u) { return u < 0.0 ? -1.0 : 1.0; }

// Gauss-Legendre on [a, b]; exact for polynomials up to degree 19.
template <class F>
double gauss10(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss<double, 10>::integrate(f, a, b);
}

// ---- monotone cubic interpolation -------------------------------------------

// Shape-preserving derivative at node k of (u, y).
double pchip_slope(const std::vector<double>& u, const std::vector<double>& y, std::size_t k) {
  const std::size_t n = u.size();
  if (n < 2) return 0.0;
  auto delta = [&](std::size_t i) { return (y[i + 1] - y[i]) / (u[i + 1] - u[i]); };
  auto h = [&](std::size_t i) { return u[i + 1] - u[i]; };
  if (n == 2) return delta(0);
  if (k == 0 || k == n - 1) {
    const std::size_t i0 = k == 0 ? 0 : n - 2;
    const std::size_t i1 = k == 0 ? 1 : n - 3;
    const double h0 = h(i0);
    const double h1 = h(i1);
    const double d0 = delta(i0);
    const double d1 = delta(i1);
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign_of(d) != sign_of(d0) || d0 == 0.0) {
      d = 0.0;
    } else if (sign_of(d0) != sign_of(d1) && std::abs(d) > 3.0 * std::abs(d0)) {
      d = 3.0 * d0;
    }
    return d;
  }
  const double dl = delta(k - 1);
  const double dr = delta(k);
  if (dl * dr <= 0.0) return 0.0;
  const double w1 = 2.0 * h(k) + h(k - 1);
  const double w2 = h(k) + 2.0 * h(k - 1);
  return (w1 + w2) / (w1 / dl + w2 / dr);
}

struct CurvePoint {
  double value;
  double deriv;
};

CurvePoint pchip_eval(const std::vector<double>& u, const std::vector<double>& y, double tail, double t) {
  const std::size_t n = u.size();
  if (t > u.back() || t < u.front()) {
    const bool right = t > u.back();
    const double ue = right ? u.back() : u.front();
    const double ye = right ? y.back() : y.front();
    if (ue == 0.0) return {ye, 0.0};
    const double r = t / ue;
    const double v = ye * std::pow(r, tail - 1.0);
    return {v, ye * (tail - 1.0) * std::pow(r, tail - 2.0) / ue};
  }
  std::size_t i = static_cast<std::size_t>(std::upper_bound(u.begin(), u.end(), t) - u.begin());
  i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
  const double h = u[i + 1] - u[i];
  const double s = (t - u[i]) / h;
  const double d0 = pchip_slope(u, y, i);
  const double d1 = pchip_slope(u, y, i + 1);
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  const double v = h00 * y[i] + h10 * h * d0 + h01 * y[i + 1] + h11 * h * d1;
  const double dh00 = 6 * s * s - 6 * s;
  const double dh10 = 3 * s * s - 4 * s + 1;
  const double dh01 = -dh00;
  const double dh11 = 3 * s * s - 2 * s;
  const double dv = (dh00 * y[i] + dh01 * y[i + 1]) / h + dh10 * d0 + dh11 * d1;
  return {v, dv};
}

CurvePoint table_eval(const Table& t, double x, double u) {
  const std::size_t m = t.x.size();
  if (m == 1 || x <= t.x.front()) return pchip_eval(t.u, t.f.front(), t.tail_exponent, u);
  if (x >= t.x.back()) return pchip_eval(t.u, t.f.back(), t.tail_exponent, u);
  std::size_t i = static_cast<std::size_t>(std::upper_bound(t.x.begin(), t.x.end(), x) - t.x.begin()) - 1;
  const double w = (x - t.x[i]) / (t.x[i + 1] - t.x[i]);
  const CurvePoint a = pchip_eval(t.u, t.f[i], t.tail_exponent, u);
  const CurvePoint b = pchip_eval(t.u, t.f[i + 1], t.tail_exponent, u);
  return {(1 - w) * a.value + w * b.value, (1 - w) * a.deriv + w * b.deriv};
}

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson; tol is relative to the panel magnitude (absolute below 1).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max({1.0, std::abs(whole), (b - a) * std::max({std::abs(fa), std::abs(fm), std::abs(fb)})});
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol * scale, 30);
}

double table_F(const Table& t, double x, double u) {
  if (u == 0.0) return 0.0;
  auto f = [&](double s) { return table_eval(t, x, s).value; };
  // Integrate piecewise between table nodes so each panel is a single cubic.
  std::vector<double> cuts{0.0};
  const double lo = std::min(0.0, u);
  const double hi = std::max(0.0, u);
  for (double node : t.u)
    if (node > lo && node < hi) cuts.push_back(node);
  cuts.push_back(u);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  const double tol = 1e-10 / static_cast<double>(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += adaptive_simpson(f, cuts[i], cuts[i + 1], tol);
  return u > 0.0 ? total : -total;
}

// ---- JSON helpers -------------------------------------------------------------

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw std::invalid_argument("unknown key '" + it.key() + "' in " + where);
  }
}

double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("missing key '") + key + "' in " + where);
  if (!j.at(key).is_number()) throw std::invalid_argument(std::string("key '") + key + "' in " + where + " must be a number");
  return j.at(key).get<double>();
}

double get_number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? get_number(j, key, where) : fallback;
}

std::vector<double> get_vector(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw std::invalid_argument(std::string("key '") + key + "' in " + where + " must be an array");
  }
  std::vector<double> v;
  for (const auto& e : j.at(key)) {
    if (!e.is_number()) throw std::invalid_argument(std::string("non-numeric entry in '") + key + "'");
    v.push_back(e.get<double>());
  }
  return v;
}

QType parse_qtype(const std::string& s) {
  if (s == "indicator") return QType::Indicator;
  if (s == "constant") return QType::Constant;
  if (s == "gaussian") return QType::Gaussian;
  if (s == "cosine_bump") return QType::CosineBump;
  if (s == "ramp") return QType::Ramp;
  throw std::invalid_argument("unknown q type '" + s + "'");
}

Kind parse_kind(const std::string& s) {
  if (s == "power") return Kind::Power;
  if (s == "log-power") return Kind::LogPower;
  if (s == "custom-table") return Kind::CustomTable;
  if (s == "zero") return Kind::Zero;
  throw std::invalid_argument("unknown nonlinearity kind '" + s + "'");
}

}  // namespace

// ---- q ------------------------------------------------------------------------

double QSpec::operator()(double x) const noexcept {
  switch (type) {
    case QType::Indicator:
      return (x >= a && x <= b) ? scale : 0.0;
    case QType::Constant:
      return scale;
    case QType::Gaussian:
      return scale * std::exp(-(x / width) * (x / width));
    case QType::CosineBump: {
      if (x < a || x > b) return 0.0;
      const double c = std::cos(kPi * (x - 0.5 * (a + b)) / (b - a));
      return scale * c * c;
    }
    case QType::Ramp:
      return scale * std::clamp((x - a) / (b - a), 0.0, 1.0);
  }
  return 0.0;
}

std::optional<std::pair<double, double>> QSpec::support() const noexcept {
  if (scale == 0.0) return std::make_pair(0.0, 0.0);
  if (type == QType::Indicator || type == QType::CosineBump) return std::make_pair(a, b);
  return std::nullopt;
}

std::vector<double> QSpec::breakpoints() const {
  if (type == QType::Indicator || type == QType::CosineBump || type == QType::Ramp) return {a, b};
  return {};
}

double QSpec::max_value() const noexcept { return scale; }

double QSpec::integrate_hat(double x0, double x1, double x2) const {
  const auto bps = breakpoints();
  auto piece = [&](double lo, double hi, auto&& hat) {
    std::vector<double> cuts{lo};
    for (double bp : bps)
      if (bp > lo && bp < hi) cuts.push_back(bp);
    cuts.push_back(hi);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      // Open panels: Gauss nodes never touch a jump of q.
      acc += gauss10([&](double x) { return (*this)(x) * hat(x); }, cuts[i], cuts[i + 1]);
    }
    return acc;
  };
  double total = 0.0;
  if (x1 > x0) total += piece(x0, x1, [&](double x) { return (x - x0) / (x1 - x0); });
  if (x2 > x1) total += piece(x1, x2, [&](double x) { return (x2 - x) / (x2 - x1); });
  return total;
}

// ---- nonlinearity -------------------------------------------------------------

void Nonlinearity::validate() const {
  if (!(s0 > 0.0) || !std::isfinite(s0)) throw std::invalid_argument("s0 must be positive");
  if (!(p > 2.0) || !std::isfinite(p)) throw std::invalid_argument("p must exceed 2");
  if (kind == Kind::LogPower && !(s > 0.0)) throw std::invalid_argument("log-power exponent s must be positive");
  if (!(q.scale >= 0.0) || !std::isfinite(q.scale)) throw std::invalid_argument("q scale must be nonnegative");
  if ((q.type == QType::Indicator || q.type == QType::CosineBump || q.type == QType::Ramp) && !(q.b > q.a)) {
    throw std::invalid_argument("q needs a < b");
  }
  if (q.type == QType::Gaussian && !(q.width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
  if (kind == Kind::CustomTable) {
    const auto& t = table;
    if (t.x.empty() || t.u.size() < 2) throw std::invalid_argument("table needs at least one slice and two u nodes");
    if (t.f.size() != t.x.size()) throw std::invalid_argument("table f must have one row per x slice");
    for (const auto& row : t.f)
      if (row.size() != t.u.size()) throw std::invalid_argument("table rows must match the u nodes");
    if (!std::is_sorted(t.x.begin(), t.x.end()) || std::adjacent_find(t.x.begin(), t.x.end()) != t.x.end())
      throw std::invalid_argument("table x must be strictly increasing");
    if (!std::is_sorted(t.u.begin(), t.u.end()) || std::adjacent_find(t.u.begin(), t.u.end()) != t.u.end())
      throw std::invalid_argument("table u must be strictly increasing");
    if (!(t.u.front() < 0.0 && t.u.back() > 0.0)) throw std::invalid_argument("table u range must contain 0 inside");
    if (!(t.tail_exponent > 2.0)) throw std::invalid_argument("table tail exponent must exceed 2");
  }
}

double Nonlinearity::g(double u) const {
  switch (kind) {
    case Kind::Power:
      return std::pow(std::abs(u), p - 2.0) * u;
    case Kind::LogPower:
      return u * std::log1p(std::pow(std::abs(u), s));
    case Kind::Zero:
      return 0.0;
    case Kind::CustomTable:
      break;
  }
  throw std::logic_error("table nonlinearity is not separable");
}

double Nonlinearity::G(double u) const {
  switch (kind) {
    case Kind::Power:
      return std::pow(std::abs(u), p) / p;
    case Kind::LogPower: {
      const double a = std::abs(u);
      if (a == 0.0) return 0.0;
      auto f = [&](double t) { return t * std::log1p(std::pow(t, s)); };
      return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, a, 12, 1e-13);
    }
    case Kind::Zero:
      return 0.0;
    case Kind::CustomTable:
      break;
  }
  throw std::logic_error("table nonlinearity is not separable");
}

double Nonlinearity::g_u(double u) const {
  switch (kind) {
    case Kind::Power:
      return (p - 1.0) * std::pow(std::abs(u), p - 2.0);
    case Kind::LogPower: {
      const double t = std::pow(std::abs(u), s);
      return std::log1p(t) + s * t / (1.0 + t);
    }
    case Kind::Zero:
      return 0.0;
    case Kind::CustomTable:
      break;
  }
  throw std::logic_error("table nonlinearity is not separable");
}

double eval_f_q(const Nonlinearity& nl, double q, double x, double u) {
  if (q == 0.0) return 0.0;
  if (nl.separable()) return q * nl.g(u);
  return q * table_eval(nl.table, x, u).value;
}

double eval_F_q(const Nonlinearity& nl, double q, double x, double u) {
  if (q == 0.0) return 0.0;
  if (nl.separable()) return q * nl.G(u);
  return q * table_F(nl.table, x, u);
}

double eval_fu_q(const Nonlinearity& nl, double q, double x, double u) {
  if (q == 0.0) return 0.0;
  if (nl.separable()) return q * nl.g_u(u);
  return q * table_eval(nl.table, x, u).deriv;
}

double eval_f(const Nonlinearity& nl, double x, double u) { return eval_f_q(nl, nl.q(x), x, u); }

double eval_F(const Nonlinearity& nl, double x, double u) { return eval_F_q(nl, nl.q(x), x, u); }

double eval_fu(const Nonlinearity& nl, double x, double u) { return eval_fu_q(nl, nl.q(x), x, u); }

double critical_exponent(int N) noexcept {
  return N <= 2 ? std::numeric_limits<double>::infinity() : 2.0 * N / (N - 2.0);
}

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::Power: return "power";
    case Kind::LogPower: return "log-power";
    case Kind::CustomTable: return "custom-table";
    case Kind::Zero: return "zero";
  }
  return "?";
}

std::string to_string(QType type) {
  switch (type) {
    case QType::Indicator: return "indicator";
    case QType::Constant: return "constant";
    case QType::Gaussian: return "gaussian";
    case QType::CosineBump: return "cosine_bump";
    case QType::Ramp: return "ramp";
  }
  return "?";
}

Nonlinearity from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("model must be a JSON object");
  reject_unknown(j, {"kind", "p", "s", "s0", "radial", "q", "table"}, "model");
  Nonlinearity nl;
  if (!j.contains("kind") || !j.at("kind").is_string()) throw std::invalid_argument("model needs a string 'kind'");
  nl.kind = parse_kind(j.at("kind").get<std::string>());
  if (nl.kind == Kind::Power) nl.p = get_number(j, "p", "model");
  else nl.p = get_number_or(j, "p", 3.0, "model");
  if (nl.kind == Kind::LogPower) nl.s = get_number(j, "s", "model");
  else nl.s = get_number_or(j, "s", 1.0, "model");
  nl.s0 = get_number_or(j, "s0", 1.0, "model");
  if (j.contains("radial")) {
    if (!j.at("radial").is_boolean()) throw std::invalid_argument("'radial' must be a boolean");
    nl.radial = j.at("radial").get<bool>();
  }
  if (j.contains("q")) {
    const json& q = j.at("q");
    if (!q.is_object()) throw std::invalid_argument("'q' must be an object");
    reject_unknown(q, {"type", "a", "b", "scale", "width"}, "q");
    if (!q.contains("type") || !q.at("type").is_string()) throw std::invalid_argument("q needs a string 'type'");
    nl.q.type = parse_qtype(q.at("type").get<std::string>());
    nl.q.scale = get_number_or(q, "scale", 1.0, "q");
    const bool interval = nl.q.type == QType::Indicator || nl.q.type == QType::CosineBump || nl.q.type == QType::Ramp;
    if (interval) {
      nl.q.a = get_number(q, "a", "q");
      nl.q.b = get_number(q, "b", "q");
    } else {
      nl.q.a = get_number_or(q, "a", nl.q.a, "q");
      nl.q.b = get_number_or(q, "b", nl.q.b, "q");
    }
    if (nl.q.type == QType::Gaussian) nl.q.width = get_number(q, "width", "q");
    else nl.q.width = get_number_or(q, "width", 1.0, "q");
  } else if (nl.kind != Kind::Zero) {
    throw std::invalid_argument("model needs 'q'");
  }
  if (nl.kind == Kind::CustomTable) {
    if (!j.contains("table") || !j.at("table").is_object()) throw std::invalid_argument("custom-table model needs 'table'");
    const json& t = j.at("table");
    reject_unknown(t, {"x", "u", "f", "tail_exponent"}, "table");
    nl.table.x = get_vector(t, "x", "table");
    nl.table.u = get_vector(t, "u", "table");
    if (!t.contains("f") || !t.at("f").is_array()) throw std::invalid_argument("table 'f' must be an array of rows");
    for (const auto& row : t.at("f")) {
      std::vector<double> r;
      for (const auto& e : row) r.push_back(e.get<double>());
      nl.table.f.push_back(std::move(r));
    }
    nl.table.tail_exponent = get_number_or(t, "tail_exponent", 3.0, "table");
  } else if (j.contains("table")) {
    throw std::invalid_argument("'table' is only valid for custom-table models");
  }
  nl.validate();
  return nl;
}

json to_json(const Nonlinearity& nl) {
  json j;
  j["kind"] = to_string(nl.kind);
  j["p"] = nl.p;
  if (nl.kind == Kind::LogPower) j["s"] = nl.s;
  j["s0"] = nl.s0;
  j["radial"] = nl.radial;
  json q;
  q["type"] = to_string(nl.q.type);
  q["scale"] = nl.q.scale;
  if (nl.q.type == QType::Gaussian) q["width"] = nl.q.width;
  if (nl.q.type != QType::Gaussian && nl.q.type != QType::Constant) {
    q["a"] = nl.q.a;
    q["b"] = nl.q.b;
  }
  j["q"] = q;
  if (nl.kind == Kind::CustomTable) {
    j["table"] = {{"x", nl.table.x}, {"u", nl.table.u}, {"f", nl.table.f}, {"tail_exponent", nl.table.tail_exponent}};
  }
  return j;
}

Nonlinearity load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

// ---- sampling -----------------------------------------------------------------

double unit_uniform(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

SampleGrid make_grid(const Nonlinearity& nl, std::uint64_t seed, int nx, int nu, double x_max) {
  SampleGrid g;
  g.seed = seed;
  std::mt19937_64 gen(seed);
  double lo;
  double hi;
  if (nl.radial) {
    lo = 0.0;
    hi = x_max;
  } else if (auto sup = nl.q.support()) {
    const double c = 0.5 * (sup->first + sup->second);
    const double w = std::max(0.5 * (sup->second - sup->first), 1e-3);
    lo = c - 1.5 * w;
    hi = c + 1.5 * w;
  } else {
    lo = -x_max;
    hi = x_max;
  }
  for (int i = 0; i < nx; ++i) g.x.push_back(lo + (hi - lo) * i / std::max(1, nx - 1));
  for (int i = 0; i < nx / 4; ++i) g.x.push_back(lo + (hi - lo) * unit_uniform(gen()));
  std::sort(g.x.begin(), g.x.end());
  g.x.erase(std::unique(g.x.begin(), g.x.end()), g.x.end());

  const int half = std::max(2, nu / 2);
  for (int i = 0; i < half; ++i) {
    const double m = std::pow(10.0, -6.0 + 9.0 * i / (half - 1));
    g.u.push_back(m);
    g.u.push_back(-m);
  }
  for (int i = 0; i < nu / 4; ++i) {
    const double m = std::pow(10.0, -6.0 + 9.0 * unit_uniform(gen()));
    g.u.push_back(unit_uniform(gen()) < 0.5 ? -m : m);
  }
  g.u.push_back(0.0);
  g.u.push_back(nl.s0);
  g.u.push_back(-nl.s0);
  std::sort(g.u.begin(), g.u.end());
  g.u.erase(std::unique(g.u.begin(), g.u.end()), g.u.end());
  return g;
}

bool AssumptionReport::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& id) const noexcept {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {

constexpr double kTol = 1e-12;

AssumptionCheck make_check(std::string id, std::string description) {
  AssumptionCheck c;
  c.id = std::move(id);
  c.description = std::move(description);
  return c;
}

void record(AssumptionCheck& c, double x, double u, double violation) {
  ++c.samples;
  if (violation > 0.0) {
    c.passed = false;
    if (!c.worst || violation > c.worst->value) c.worst = Witness{x, u, violation};
  }
}

// sup over x of |f(x, u)/u| for u = +-10^-j, j = 1..6; nonincreasing and
// strictly smaller at the end.
AssumptionCheck small_u_check(const Nonlinearity& nl, const std::vector<double>& xs, const char* id,
                              const char* desc) {
  AssumptionCheck c = make_check(id, desc);
  double prev = std::numeric_limits<double>::infinity();
  constexpr double kMinSlope = 0.02;
  double first = 0.0;
  double at3 = 0.0;
  double last = 0.0;
  for (int j = 1; j <= 6; ++j) {
    const double u = std::pow(10.0, -j);
    double m = 0.0;
    double wx = 0.0;
    for (double x : xs) {
      for (double su : {u, -u}) {
        const double r = std::abs(eval_f(nl, x, su) / su);
        if (r > m) {
          m = r;
          wx = x;
        }
      }
    }
    record(c, wx, u, m > prev * (1.0 + 1e-9) ? m - prev : 0.0);
    if (j == 1) first = m;
    if (j == 3) at3 = m;
    last = m;
    prev = m;
  }
  // Decay must be visible: log-log slope of at least kMinSlope over the last three decades.
  if (last > 0.0 && !(last <= std::pow(10.0, -3.0 * kMinSlope) * at3)) record(c, 0.0, 1e-6, last);
  std::ostringstream note;
  note << "sup |f/u| at |u|=1e-1: " << first << ", at |u|=1e-6: " << last;
  c.note = note.str();
  return c;
}

}  // namespace

AssumptionReport validate_f(const Nonlinearity& nl, const SampleGrid& grid, int N) {
  AssumptionReport rep;
  rep.seed = grid.seed;
  const auto sup = nl.q.support();
  std::vector<double> inside;
  for (double x : grid.x)
    if (nl.q(x) > 0.0) inside.push_back(x);

  {
    AssumptionCheck c = make_check("f0", "f(x,u) = 0 outside a bounded set Omega");
    if (!sup) {
      c.passed = false;
      c.note = "q has unbounded support";
    }
    for (double x : grid.x) {
      if (sup && x >= sup->first && x <= sup->second) continue;
      for (double u : grid.u) record(c, x, u, std::abs(eval_f(nl, x, u)));
    }
    rep.checks.push_back(c);
  }
  {
    AssumptionCheck c = make_check("f1", "|f(x,u)| <= a(1 + |u|^(p-1)) with 2 < p < 2*");
    const double p = nl.p;
    const double crit = critical_exponent(N);
    if (!(p > 2.0 && p < crit)) {
      c.passed = false;
      c.note = "growth exponent outside (2, 2*)";
    }
    const double umax = std::abs(grid.u.front()) > grid.u.back() ? std::abs(grid.u.front()) : grid.u.back();
    double a_all = 0.0;
    double top = 0.0;
    double below = 0.0;
    Witness wtop{};
    for (double x : grid.x) {
      for (double u : grid.u) {
        const double au = std::abs(u);
        const double r = std::abs(eval_f(nl, x, u)) / (1.0 + std::pow(au, p - 1.0));
        ++c.samples;
        a_all = std::max(a_all, r);
        if (au >= umax / 10.0) {
          if (r > top) wtop = {x, u, r};
          top = std::max(top, r);
        } else if (au >= umax / 100.0) {
          below = std::max(below, r);
        }
      }
    }
    // Bounded ratio: the outermost decade must not outgrow the one before.
    if (top > 1.05 * below && top > 0.0) {
      c.passed = false;
      c.worst = Witness{wtop.x, wtop.u, top - below};
    }
    std::ostringstream note;
    note << (c.note.empty() ? "" : c.note + "; ") << "sampled a = " << a_all << ", p = " << p;
    c.note = note.str();
    rep.checks.push_back(c);
  }
  rep.checks.push_back(small_u_check(nl, grid.x, "f2", "f(x,u) = o(|u|) uniformly as u -> 0"));
  {
    AssumptionCheck c = make_check("f3", "F >= 0, and F(x,u)/u^2 -> infinity on Omega");
    for (double x : grid.x) {
      for (double u : grid.u) {
        const double F = eval_F(nl, x, u);
        record(c, x, u, F < -kTol * std::abs(eval_f(nl, x, u) * u) ? -F : 0.0);
      }
    }
    if (inside.empty()) {
      c.passed = false;
      c.note = "no sample inside Omega";
    }
    for (double x : inside) {
      for (double sg : {1.0, -1.0}) {
        double prev = -std::numeric_limits<double>::infinity();
        for (int e = 0; e <= 6; ++e) {
          const double u = sg * std::pow(10.0, e);
          const double r = eval_F(nl, x, u) / (u * u);
          record(c, x, u, r <= prev ? prev - r + std::numeric_limits<double>::min() : 0.0);
          prev = r;
        }
      }
    }
    rep.checks.push_back(c);
  }
  {
    AssumptionCheck c = make_check("f4", "f(x,-s0) <= 0 <= f(x,s0); f/|u| nondecreasing for |u| > s0");
    const double s0 = nl.s0;
    for (double x : inside) {
      record(c, x, s0, std::max(0.0, -eval_f(nl, x, s0)));
      record(c, x, -s0, std::max(0.0, eval_f(nl, x, -s0)));
      double prev_pos = -std::numeric_limits<double>::infinity();
      double prev_neg = -std::numeric_limits<double>::infinity();
      for (double u : grid.u) {
        if (std::abs(u) <= s0) continue;
        const double r = eval_f(nl, x, u) / std::abs(u);
        double& prev = u > 0 ? prev_pos : prev_neg;
        const double slack = kTol * std::max(std::abs(r), std::abs(prev == -INFINITY ? 0.0 : prev));
        record(c, x, u, (prev != -INFINITY && r < prev - slack) ? prev - r : 0.0);
        prev = r;
      }
    }
    rep.checks.push_back(c);
  }
  {
    AssumptionCheck c = make_check("monotone", "u -> f(x,u)/|u| nondecreasing on R \\ {0}");
    for (double x : grid.x) {
      double prev = -std::numeric_limits<double>::infinity();
      for (double u : grid.u) {
        if (u == 0.0) continue;
        const double r = eval_f(nl, x, u) / std::abs(u);
        const double slack = kTol * (prev == -INFINITY ? 0.0 : std::max(std::abs(r), std::abs(prev)));
        record(c, x, u, (prev != -INFINITY && r < prev - slack) ? prev - r : 0.0);
        prev = r;
      }
    }
    rep.checks.push_back(c);
  }
  return rep;
}

AssumptionReport validate_g(const Nonlinearity& nl, const SampleGrid& grid) {
  AssumptionReport rep;
  rep.seed = grid.seed;
  std::vector<double> rs;
  for (double x : grid.x)
    if (x >= 0.0) rs.push_back(x);
  {
    AssumptionCheck c = make_check("g1", "f(r,0) = 0 and f locally Lipschitz in u");
    for (double r : rs) {
      record(c, r, 0.0, std::abs(eval_f(nl, r, 0.0)));
      double prev_u = std::numeric_limits<double>::quiet_NaN();
      double prev_f = 0.0;
      for (double u : grid.u) {
        if (std::abs(u) > 10.0) continue;
        const double f = eval_f(nl, r, u);
        if (!std::isnan(prev_u)) {
          const double slope = std::abs(f - prev_f) / (u - prev_u);
          record(c, r, u, std::isfinite(slope) ? 0.0 : 1.0);
        }
        prev_u = u;
        prev_f = f;
      }
    }
    rep.checks.push_back(c);
  }
  {
    AssumptionCheck c = make_check("g2", "0 <= F(r,u) <= f(r,u) u / 2");
    for (double r : rs) {
      for (double u : grid.u) {
        const double F = eval_F(nl, r, u);
        const double fu = eval_f(nl, r, u) * u;
        const double slack = kTol * (std::abs(F) + std::abs(fu));
        double v = 0.0;
        if (F < -slack) v = -F;
        if (F > 0.5 * fu + slack) v = std::max(v, F - 0.5 * fu);
        record(c, r, u, v);
      }
    }
    rep.checks.push_back(c);
  }
  {
    AssumptionCheck c = make_check("g3", "r -> F(r,u) nonincreasing");
    for (double r : rs) {
      const double h = 1e-6 * std::max(1.0, r);
      for (double u : grid.u) {
        const double F0 = eval_F(nl, r, u);
        const double F1 = eval_F(nl, r + h, u);
        record(c, r, u, F1 - F0 > 1e-10 * std::abs(F0) ? F1 - F0 : 0.0);
      }
    }
    if (nl.q.type == QType::Indicator || nl.q.type == QType::CosineBump || nl.q.type == QType::Ramp) {
      c.note = "q has kinks or jumps at a, b; only the sign of the r-increment is checked";
    }
    rep.checks.push_back(c);
  }
  rep.checks.push_back(small_u_check(nl, rs, "g4", "f(r,u) = o(|u|) uniformly in r as u -> 0"));
  return rep;
}

// ---- splitting ----------------------------------------------------------------

SplitValue split_f1_f2(const Nonlinearity& nl, double x, double u) {
  const double f = eval_f(nl, x, u);
  if (std::abs(u) >= nl.s0) return {f, 0.0};
  const double edge = eval_f(nl, x, u >= 0.0 ? nl.s0 : -nl.s0);
  const double f1 = u * u / (nl.s0 * nl.s0) * edge;
  return {f1, f - f1};
}

double eval_F1(const Nonlinearity& nl, double x, double u) {
  const double s0 = nl.s0;
  if (u >= 0.0) {
    const double fp = eval_f(nl, x, s0);
    if (u <= s0) return u * u * u / (3.0 * s0 * s0) * fp;
    return s0 / 3.0 * fp + eval_F(nl, x, u) - eval_F(nl, x, s0);
  }
  const double fm = eval_f(nl, x, -s0);
  if (u >= -s0) return u * u * u / (3.0 * s0 * s0) * fm;
  return -s0 / 3.0 * fm + eval_F(nl, x, u) - eval_F(nl, x, -s0);
}

std::pair<double, double> splitting_expression(const Nonlinearity& nl, double x, double u, double v, double s,
                                               bool use_f) {
  const double fu = use_f ? eval_f(nl, x, u) : split_f1_f2(nl, x, u).f1;
  auto Fv = [&](double t) { return use_f ? eval_F(nl, x, t) : eval_F1(nl, x, t); };
  const double a = s * (0.5 * s + 1.0) * u;
  const double b = (1.0 + s) * v;
  const double w = (1.0 + s) * u + v;
  const double Fu = Fv(u);
  const double Fw = Fv(w);
  const double value = fu * (a + b) + Fu - Fw;
  const double scale = std::abs(fu) * (std::abs(a) + std::abs(b)) + std::abs(Fu) + std::abs(Fw);
  return {value, scale};
}

InequalityReport check_splitting_inequality(const Nonlinearity& nl, std::int64_t samples, std::uint64_t seed,
                                            double tol, bool use_f) {
  InequalityReport rep;
  std::mt19937_64 gen(seed);
  auto uni = [&] { return unit_uniform(gen()); };
  double lo = -5.0;
  double hi = 5.0;
  if (auto sup = nl.q.support()) {
    lo = sup->first;
    hi = sup->second;
  }
  const double pad = 0.25 * (hi - lo);
  auto magnitude = [&] {
    const double m = std::pow(10.0, -3.0 + 5.0 * uni());
    return uni() < 0.5 ? -m : m;
  };
  for (std::int64_t i = 0; i < samples; ++i) {
    const double x = uni() < 0.9 ? lo + (hi - lo) * uni() : lo - pad + (hi - lo + 2 * pad) * uni();
    const double u = magnitude();
    const double v = uni() < 0.1 ? 0.0 : magnitude();
    const double pick = uni();
    const double s = pick < 0.1 ? -1.0 : (pick < 0.2 ? 0.0 : -1.0 + 6.0 * uni());
    const auto [value, scale] = splitting_expression(nl, x, u, v, s, use_f);
    ++rep.samples;
    rep.max_value = std::max(rep.max_value, value);
    const double relative = scale > 0.0 ? value / scale : (value > 0.0 ? INFINITY : 0.0);
    if (relative > rep.max_relative || !rep.worst) {
      rep.max_relative = std::max(rep.max_relative, relative);
      if (relative >= rep.max_relative) rep.worst = std::vector<double>{x, u, v, s};
    }
    if (value > tol * scale) ++rep.violations;
  }
  return rep;
}

}  // namespace helmholtz::models
