#include "helmholtz/cli_io.hpp"

#include "helmholtz/boundary_spectral.hpp"
#include "helmholtz/models.hpp"
#include "helmholtz/radial_shoot.hpp"
#include "helmholtz/specfun.hpp"
#include "helmholtz/spectral_ball.hpp"
#include "helmholtz/variational_1d.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace helmholtz::cli {

namespace {

struct EchoItem {
  std::string key;
  std::function<Json()> value;
};

struct Binder {
  CLI::App* app;
  std::vector<EchoItem>* echo;

  template <class T>
  CLI::Option* opt(const std::string& key, T& ref, const std::string& desc) {
    echo->push_back({key, [&ref] { return Json(ref); }});
    return app->add_option("--" + key, ref, desc)->capture_default_str();
  }

  CLI::Option* flag(const std::string& key, bool& ref, const std::string& desc) {
    echo->push_back({key, [&ref] { return Json(ref); }});
    return app->add_flag("--" + key, ref, desc);
  }
};

struct SweepSpec {
  double a0 = 0.0;
  double a1 = 0.0;
  int n = 0;
};

std::optional<SweepSpec> parse_sweep(const std::string& s) {
  SweepSpec out;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &out.a0, &out.a1, &out.n, &tail) != 3) return std::nullopt;
  if (out.n < 1 || !std::isfinite(out.a0) || !std::isfinite(out.a1)) return std::nullopt;
  return out;
}

void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  out += format_double(v);
}

void dump_into(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_into(out, v, indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      append_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string one_line(const Json& j) {
  std::string out;
  dump_into(out, j, -1, 0);
  return out;
}

Json strings(const std::vector<std::string>& v) { return Json(v); }

void merge_warnings(std::vector<std::string>& into, const std::vector<std::string>& from) {
  into.insert(into.end(), from.begin(), from.end());
}

models::Nonlinearity load_or_zero(const RunConfig& cfg) {
  if (cfg.model_path.empty()) {
    models::Nonlinearity nl;
    nl.kind = models::Kind::Zero;
    return nl;
  }
  return models::load_model(cfg.model_path);
}

Json model_json(const models::Nonlinearity& nl) { return Json::parse(models::to_json(nl).dump()); }

Json check_json(const models::AssumptionCheck& c) {
  Json j;
  j["id"] = c.id;
  j["description"] = c.description;
  j["passed"] = c.passed;
  j["samples"] = c.samples;
  if (c.worst) {
    j["witness"] = {{"x", c.worst->x}, {"u", c.worst->u}, {"value", c.worst->value}};
  } else {
    j["witness"] = nullptr;
  }
  j["note"] = c.note;
  return j;
}

Json report_json(const models::AssumptionReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  return {{"all_passed", r.all_passed()}, {"seed", r.seed}, {"checks", checks}};
}

// ---------------------------------------------------------------------------

RunOutput run_specfun(const RunConfig& cfg) {
  const Params& p = cfg.params;
  RunOutput out;
  const specfun::BesselOrder order(p.mu);
  Json values = Json::array();
  CsvTable t{{"x", "j", "y", "jp", "yp", "abs_err_est", "wronskian_residual"}, std::vector<std::vector<double>>(7)};
  bool outside = false;
  for (double x : p.x) {
    const auto v = specfun::bessel_jy(order, x);
    const double w = v.j * v.yp - v.jp * v.y - 2.0 / (std::numbers::pi * x);
    outside = outside || !v.validated();
    values.push_back({{"x", x},
                      {"j", v.j},
                      {"y", v.y},
                      {"jp", v.jp},
                      {"yp", v.yp},
                      {"abs_err_est", v.validated() ? Json(v.abs_err_est) : Json(nullptr)},
                      {"validated", v.validated()},
                      {"wronskian_residual", w}});
    const double row[] = {x, v.j, v.y, v.jp, v.yp, v.validated() ? v.abs_err_est : NAN, w};
    for (int c = 0; c < 7; ++c) t.data[c].push_back(row[c]);
  }
  if (outside) out.envelope.warnings.push_back("some arguments lie outside the validated (mu, x) envelope");
  Json payload;
  payload["mu"] = p.mu;
  payload["values"] = values;
  if (!p.zero_range.empty()) {
    const auto which = p.kind == "y" ? specfun::CylinderCombination::second_kind()
                                     : specfun::CylinderCombination::first_kind();
    const auto z = specfun::bessel_zero_scan(order, which, p.zero_range[0], p.zero_range[1]);
    payload["zeros"] = {{"kind", p.kind},
                        {"a", p.zero_range[0]},
                        {"b", p.zero_range[1]},
                        {"roots", z.roots},
                        {"step", z.step},
                        {"min_spacing_bound", z.min_spacing_bound},
                        {"resolution_ok", z.resolution_ok}};
    merge_warnings(out.envelope.warnings, z.warnings);
  }
  out.envelope.payload = payload;
  out.tables.emplace_back("", std::move(t));
  return out;
}

RunOutput run_dtn(const RunConfig& cfg) {
  const Params& p = cfg.params;
  RunOutput out;
  const auto zs = boundary::capacity_coeffs(p.N, p.k, p.R, p.lmax);
  Json rows = Json::array();
  CsvTable t{{"ell", "re_z", "im_z"}, std::vector<std::vector<double>>(3)};
  bool all_ok = true;
  for (const auto& z : zs) {
    all_ok = all_ok && z.bounds_ok();
    rows.push_back({{"ell", z.ell},
                    {"multiplicity", boundary::harmonic_dim(p.N, z.ell)},
                    {"re", z.z.real()},
                    {"im", z.z.imag()},
                    {"re_bound_ok", z.re_bound_ok},
                    {"im_bound_ok", z.im_bound_ok},
                    {"validated", z.validated}});
    t.data[0].push_back(z.ell);
    t.data[1].push_back(z.z.real());
    t.data[2].push_back(z.z.imag());
    if (!z.validated)
      out.envelope.warnings.push_back("ell = " + std::to_string(z.ell) + ": kR outside the validated envelope");
  }
  if (!all_ok) out.envelope.warnings.push_back("a priori bounds on z_ell violated");
  out.envelope.payload = {{"kR", p.k * p.R},
                          {"coefficients", rows},
                          {"bounds_ok", all_ok},
                          {"coercivity", boundary::ktr_coercivity(p.N, p.k, p.R, p.lmax)}};
  out.tables.emplace_back("", std::move(t));
  return out;
}

RunOutput run_spectrum(const RunConfig& cfg) {
  const Params& p = cfg.params;
  RunOutput out;
  const auto s = spectral::eigenvalues(p.N, p.k, p.R, p.lmax, p.lambda_max);
  Json pairs = Json::array();
  CsvTable t{{"lambda", "ell", "radial_index", "multiplicity"}, std::vector<std::vector<double>>(4)};
  for (const auto& e : s.pairs) {
    pairs.push_back(
        {{"lambda", e.lambda}, {"ell", e.ell}, {"radial_index", e.radial_index}, {"multiplicity", e.multiplicity}});
    t.data[0].push_back(e.lambda);
    t.data[1].push_back(e.ell);
    t.data[2].push_back(e.radial_index);
    t.data[3].push_back(static_cast<double>(e.multiplicity));
  }
  merge_warnings(out.envelope.warnings, s.warnings);
  out.envelope.payload = {{"k_squared", p.k * p.k},
                          {"pairs", pairs},
                          {"j_star_lower", s.j_star_lower},
                          {"j_star_upper", s.j_star_upper},
                          {"dim_minus", s.dim_minus},
                          {"dim_zero", s.dim_zero},
                          {"complete_below", s.complete_below},
                          {"resolution_ok", s.resolution_ok}};
  out.tables.emplace_back("", std::move(t));
  return out;
}

RunOutput run_degenerate(const RunConfig& cfg) {
  const Params& p = cfg.params;
  RunOutput out;
  const auto d = spectral::degenerate_radii(p.N, p.k, p.lmax, p.r_min, p.r_max);
  Json radii = Json::array();
  for (const auto& r : d.radii) radii.push_back({{"R", r.R}, {"ell", r.ell}, {"tag", spectral::to_string(r.tag)}});
  merge_warnings(out.envelope.warnings, d.warnings);
  out.envelope.payload = {{"radii", radii}, {"resolution_ok", d.resolution_ok}};
  return out;
}

RunOutput run_extension(const RunConfig& cfg) {
  const Params& p = cfg.params;
  RunOutput out;
  const auto e = spectral::shared_extension_radii(p.N, p.k, p.R, p.ell, p.r_max);
  merge_warnings(out.envelope.warnings, e.warnings);
  out.envelope.payload = {{"radii", e.radii}, {"resolution_ok", e.resolution_ok}};
  return out;
}

Json diagnostics_json(const radial::RadialSolution& s) {
  const auto& d = s.diagnostics;
  const auto rc = radial::radiation_check(s);
  return {{"alpha", s.alpha},
          {"eps", s.eps},
          {"steps", d.steps},
          {"sup_decay", d.sup_decay},
          {"max_rho", d.max_rho},
          {"min_rho", d.min_rho},
          {"gronwall_start", d.gronwall_start},
          {"gronwall_bound", d.gronwall_bound},
          {"gronwall_ok", d.gronwall_ok},
          {"sign_changes", radial::sign_changes(s, 1.0)},
          {"radiation", {{"r_lo", rc.r_lo},
                         {"r_hi", rc.r_hi},
                         {"slope", rc.slope},
                         {"decay_factor", rc.decay_factor},
                         {"fitted_factor", rc.fitted_factor},
                         {"decays", rc.decays}}}};
}

CsvTable profile_table(const radial::RadialSolution& s) {
  return {{"r", "u", "up", "rho", "residual"}, {s.r, s.u, s.up, s.rho, s.residual}};
}

CsvTable plot_table(const radial::RadialSolution& s) { return {{"r", "v"}, {s.r, s.v}}; }

RunOutput run_shoot(const RunConfig& cfg) {
  const Params& p = cfg.params;
  RunOutput out;
  const auto nl = load_or_zero(cfg);
  radial::ShootOptions opt;
  opt.tol = p.tol;
  opt.eps = p.eps;
  Json payload;
  payload["model"] = model_json(nl);
  if (nl.radial) {
    payload["assumptions"] = report_json(models::validate_g(nl, models::make_grid(nl, cfg.seed)));
  }
  if (p.sweep.empty()) {
    const auto s = radial::shoot(nl, p.N, p.k, p.alpha, p.r_max, opt);
    merge_warnings(out.envelope.warnings, s.warnings);
    payload["solution"] = diagnostics_json(s);
    out.tables.emplace_back("", profile_table(s));
    out.tables.emplace_back("plot", plot_table(s));
  } else {
    const auto sw = *parse_sweep(p.sweep);
    const auto sols = radial::sweep(nl, p.N, p.k, sw.a0, sw.a1, sw.n, p.r_max, opt, p.threads);
    Json list = Json::array();
    char suffix[32];
    for (std::size_t i = 0; i < sols.size(); ++i) {
      for (const auto& w : sols[i].warnings)
        out.envelope.warnings.push_back("alpha = " + format_double(sols[i].alpha) + ": " + w);
      list.push_back(diagnostics_json(sols[i]));
      std::snprintf(suffix, sizeof suffix, "%03zu", i);
      out.tables.emplace_back(suffix, profile_table(sols[i]));
      out.tables.emplace_back(std::string(suffix) + "_plot", plot_table(sols[i]));
    }
    payload["sweep"] = list;
  }
  out.envelope.payload = payload;
  return out;
}

variational::Problem problem_1d(const RunConfig& cfg, const models::Nonlinearity& nl) {
  const Params& p = cfg.params;
  return variational::Problem(variational::Grid1D(p.R, p.grid), nl, p.k);
}

RunOutput run_solve1d(const RunConfig& cfg) {
  const Params& p = cfg.params;
  RunOutput out;
  const auto nl = models::load_model(cfg.model_path);
  const auto prob = problem_1d(cfg, nl);
  variational::NewtonOptions opt;
  opt.max_solutions = p.max_solutions;
  opt.tol = p.tol;
  const auto rep = variational::newton_deflated_solve(prob, opt);
  merge_warnings(out.envelope.warnings, rep.warnings);
  Json sols = Json::array();
  const variational::Grid1DSolution* least = nullptr;
  char suffix[32];
  for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
    const auto& s = rep.solutions[i];
    if (s.seed_index >= 0 && !least) least = &s;
    sols.push_back({{"index", i},
                    {"phi", s.phi},
                    {"grad_residual", s.grad_residual},
                    {"iterations", s.iterations},
                    {"seed_index", s.seed_index},
                    {"norm", prob.norm(s.u)},
                    {"dim_minus", s.index_data.dim_minus},
                    {"norm_plus", s.index_data.norm_plus},
                    {"norm_minus", s.index_data.norm_minus}});
    std::snprintf(suffix, sizeof suffix, "sol_%02zu", i);
    out.tables.emplace_back(suffix, CsvTable{{"x", "u"}, {s.grid.x, s.u}});
  }
  Json payload;
  payload["model"] = model_json(nl);
  payload["splitting"] = {{"j_star_lower", rep.splitting.j_star_lower},
                          {"j_star_upper", rep.splitting.j_star_upper},
                          {"dim_minus", rep.splitting.dim_minus},
                          {"dim_zero", rep.splitting.dim_zero}};
  payload["seeds_tried"] = rep.seeds_tried;
  payload["seeds_failed"] = rep.seeds_failed;
  payload["solutions"] = sols;
  payload["least_phi"] = least ? Json(least->phi) : Json(nullptr);
  if (p.refine && least) {
    const auto rc = variational::refinement_check(prob, *least);
    payload["refinement"] = {{"residual_coarse", rc.residual_coarse},
                             {"residual_fine", rc.residual_fine},
                             {"observed_order", rc.observed_order},
                             {"phi_n", rc.phi_n},
                             {"phi_2n", rc.phi_2n},
                             {"phi_4n", rc.phi_4n},
                             {"converged", rc.converged}};
    if (!rc.converged) out.envelope.warnings.push_back("refinement Newton did not converge");
  }
  out.envelope.payload = payload;
  return out;
}

RunOutput run_minimax(const RunConfig& cfg) {
  const Params& p = cfg.params;
  RunOutput out;
  const auto nl = models::load_model(cfg.model_path);
  const auto prob = problem_1d(cfg, nl);
  variational::MinimaxOptions opt;
  opt.m_plus = p.mplus;
  opt.tol = p.tol;
  opt.restarts = p.restarts;
  opt.max_outer = p.max_outer;
  opt.seed = cfg.seed;
  const auto m = variational::ground_state_minimax(prob, opt);
  merge_warnings(out.envelope.warnings, m.warnings);
  out.envelope.payload = {{"model", model_json(nl)},
                          {"c", m.c},
                          {"t", m.t},
                          {"outer_iterations", m.outer_iterations},
                          {"grad_norm", m.grad_norm},
                          {"coefficients", m.coefficients}};
  out.tables.emplace_back("", CsvTable{{"x", "direction", "maximizer"}, {prob.grid().x, m.direction, m.maximizer}});
  return out;
}

RunOutput run_validate(const RunConfig& cfg) {
  const Params& p = cfg.params;
  RunOutput out;
  const auto nl = models::load_model(cfg.model_path);
  const auto grid = models::make_grid(nl, cfg.seed);
  Json payload;
  payload["model"] = model_json(nl);
  payload["critical_exponent"] = models::critical_exponent(p.N);
  payload["compact"] = report_json(models::validate_f(nl, grid, p.N));
  if (nl.radial) payload["radial"] = report_json(models::validate_g(nl, grid));
  const auto ineq = models::check_splitting_inequality(nl, p.samples, cfg.seed);
  payload["splitting_inequality"] = {{"samples", ineq.samples},
                                     {"violations", ineq.violations},
                                     {"max_value", ineq.max_value},
                                     {"max_relative", ineq.max_relative},
                                     {"worst", ineq.worst ? Json(*ineq.worst) : Json(nullptr)},
                                     {"passed", ineq.passed()}};
  out.envelope.payload = payload;
  return out;
}

using Handler = RunOutput (*)(const RunConfig&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"specfun", run_specfun},     {"dtn", run_dtn},         {"spectrum", run_spectrum},
      {"degenerate-radii", run_degenerate}, {"extension-radii", run_extension}, {"shoot", run_shoot},
      {"solve1d", run_solve1d},     {"minimax", run_minimax}, {"validate-model", run_validate}};
  return h;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"specfun", "dtn",     "spectrum", "degenerate-radii", "extension-radii",
                                              "shoot",   "solve1d", "minimax",  "validate-model"};
  return names;
}

std::filesystem::path default_output_dir() {
  const char* env = std::getenv("HELMHOLTZ_OUT_DIR");
  if (env && *env) return env;
  return ".";
}

RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app("Helmholtz boundary problems: special functions, spectra, shooting and 1-D critical points",
               "helmholtz");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.allow_config_extras(CLI::config_extras_mode::error);

  RunConfig cfg;
  std::string out_dir;
  app.add_option("--seed", cfg.seed, "Seed for randomized sampling")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Output directory (default $HELMHOLTZ_OUT_DIR or .)");
  app.add_option("--name", cfg.name, "Base name of the output files (default: the subcommand)");
  app.add_flag("--timing", cfg.timing, "Record wall time in the JSON output");

  std::map<std::string, Params> params;
  std::map<std::string, std::vector<EchoItem>> echo;
  std::map<std::string, CLI::App*> subs;
  const CLI::Validator positive(
      [](std::string& s) {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s, v)) return std::string("not a number: " + s);
        return v > 0.0 && std::isfinite(v) ? std::string() : std::string("must be positive and finite, got " + s);
      },
      "POSITIVE");
  const CLI::Validator positive_tol(
      [](std::string& s) {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s, v)) return std::string("not a number: " + s);
        return v > 0.0 && std::isfinite(v) ? std::string() : std::string("tolerance must be positive, got " + s);
      },
      "TOL");

  for (const auto& name : subcommands()) {
    params[name] = Params{};
    subs[name] = nullptr;
  }
  const auto make = [&](const std::string& name, const std::string& desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->fallthrough();
    s->allow_config_extras(CLI::config_extras_mode::error);
    subs[name] = s;
    return Binder{s, &echo[name]};
  };
  const auto model_opt = [&](Binder& b, bool required) {
    auto* o = b.opt("model", cfg.model_path, "Nonlinearity JSON file");
    if (required) o->required();
    o->check(CLI::ExistingFile);
  };

  {
    auto b = make("specfun", "Bessel values J, Y, J', Y' and zeros");
    auto& p = params["specfun"];
    b.opt("mu", p.mu, "Order")->required()->check(CLI::NonNegativeNumber);
    b.opt("x", p.x, "Arguments")->required()->check(positive);
    b.opt("zeros", p.zero_range, "Scan [a, b] for zeros")->expected(2);
    b.opt("kind", p.kind, "Which function the zero scan uses")->check(CLI::IsMember({"j", "y"}));
  }
  {
    auto b = make("dtn", "Capacity coefficients z_ell(kR) of the exterior map");
    auto& p = params["dtn"];
    b.opt("N", p.N, "Dimension")->check(CLI::Range(2, 64));
    b.opt("k", p.k, "Wavenumber")->check(positive);
    b.opt("R", p.R, "Sphere radius")->check(positive);
    b.opt("lmax", p.lmax, "Highest shell")->check(CLI::NonNegativeNumber);
  }
  {
    auto b = make("spectrum", "Eigenvalues of the nonlocal ball problem and the splitting at k^2");
    auto& p = params["spectrum"];
    b.opt("N", p.N, "Dimension")->check(CLI::Range(2, 64));
    b.opt("k", p.k, "Wavenumber")->check(positive);
    b.opt("R", p.R, "Ball radius")->check(positive);
    b.opt("lmax", p.lmax, "Highest sector")->check(CLI::NonNegativeNumber);
    b.opt("lambda-max", p.lambda_max, "Upper end of the eigenvalue window")->check(positive);
  }
  {
    auto b = make("degenerate-radii", "Radii where k^2 is an eigenvalue or Y vanishes");
    auto& p = params["degenerate-radii"];
    p.r_max = 6.0;
    b.opt("N", p.N, "Dimension")->check(CLI::Range(2, 64));
    b.opt("k", p.k, "Wavenumber")->check(positive);
    b.opt("lmax", p.lmax, "Highest sector")->check(CLI::NonNegativeNumber);
    b.opt("r-min", p.r_min, "Lower end")->check(positive);
    b.opt("r-max", p.r_max, "Upper end")->check(positive);
  }
  {
    auto b = make("extension-radii", "Radii R' > R sharing the sector's radial solution");
    auto& p = params["extension-radii"];
    p.r_max = 40.0;
    b.opt("N", p.N, "Dimension")->check(CLI::Range(2, 64));
    b.opt("k", p.k, "Wavenumber")->check(positive);
    b.opt("R", p.R, "Radius")->check(positive);
    b.opt("ell", p.ell, "Sector")->check(CLI::NonNegativeNumber);
    b.opt("r-max", p.r_max, "Upper end")->check(positive);
  }
  {
    auto b = make("shoot", "Radial shooting from u(0) = alpha");
    auto& p = params["shoot"];
    p.r_max = 100.0;
    model_opt(b, false);
    b.opt("N", p.N, "Dimension")->check(CLI::Range(2, 64));
    b.opt("k", p.k, "Wavenumber")->check(positive);
    b.opt("alpha", p.alpha, "Value at the origin");
    b.opt("r-max", p.r_max, "End of the integration")->check(positive);
    b.opt("tol", p.tol, "Relative step tolerance")->check(positive_tol);
    b.opt("eps", p.eps, "Start radius (0: automatic)")->check(CLI::NonNegativeNumber);
    b.opt("sweep", p.sweep, "a0:a1:n, shoot n values of alpha")->check([](const std::string& s) {
      return parse_sweep(s) ? std::string() : std::string("expected a0:a1:n with n >= 1");
    });
    b.opt("threads", p.threads, "Workers for --sweep (0: all cores)");
  }
  {
    auto b = make("solve1d", "Critical points of the 1-D functional by deflated Newton");
    auto& p = params["solve1d"];
    p.k = 1.3;
    p.R = std::numbers::pi;
    p.tol = 1e-9;
    model_opt(b, true);
    b.opt("k", p.k, "Wavenumber")->check(positive);
    b.opt("R", p.R, "Half length of the interval")->check(positive);
    b.opt("grid", p.grid, "Number of nodes")->check(CLI::Range(16, 1 << 22));
    b.opt("max-solutions", p.max_solutions, "Stop after this many solutions")->check(CLI::PositiveNumber);
    b.opt("tol", p.tol, "Newton tolerance")->check(positive_tol);
    b.flag("refine", p.refine, "Run the two-grid check on the least nontrivial solution");
  }
  {
    auto b = make("minimax", "Ground state level by the reduced inf-sup");
    auto& p = params["minimax"];
    p.k = 1.3;
    p.R = std::numbers::pi;
    p.tol = 1e-6;
    model_opt(b, true);
    b.opt("k", p.k, "Wavenumber")->check(positive);
    b.opt("R", p.R, "Half length of the interval")->check(positive);
    b.opt("grid", p.grid, "Number of nodes")->check(CLI::Range(16, 1 << 22));
    b.opt("mplus", p.mplus, "Directions above j^* (0: n/2 - j^*)")->check(CLI::NonNegativeNumber);
    b.opt("tol", p.tol, "Gradient tolerance")->check(positive_tol);
    b.opt("restarts", p.restarts, "Random restarts")->check(CLI::NonNegativeNumber);
    b.opt("max-outer", p.max_outer, "Outer iteration budget")->check(CLI::PositiveNumber);
  }
  {
    auto b = make("validate-model", "Check a nonlinearity against the structural assumptions");
    auto& p = params["validate-model"];
    model_opt(b, true);
    b.opt("N", p.N, "Dimension")->check(CLI::Range(2, 64));
    b.opt("samples", p.samples, "Samples for the splitting inequality")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    throw UsageError{0, app.help()};
  } catch (const CLI::CallForAllHelp& e) {
    throw UsageError{0, app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw UsageError{e.get_exit_code() == 0 ? 1 : e.get_exit_code(), e.what()};
  }

  for (const auto& name : subcommands()) {
    if (!subs[name]->parsed()) continue;
    cfg.subcommand = name;
    cfg.params = params[name];
    for (const auto& item : echo[name]) cfg.echo[item.key] = item.value();
  }
  if (cfg.subcommand == "extension-radii" && !(cfg.params.r_max > cfg.params.R))
    throw UsageError{1, "--r-max: must exceed --R"};
  if (cfg.subcommand == "degenerate-radii" && !(cfg.params.r_max > cfg.params.r_min))
    throw UsageError{1, "--r-max: must exceed --r-min"};
  if (cfg.subcommand == "specfun" && cfg.params.zero_range.size() == 2 &&
      !(cfg.params.zero_range[1] > cfg.params.zero_range[0]))
    throw UsageError{1, "--zeros: need a < b"};
  cfg.out_dir = out_dir.empty() ? default_output_dir() : std::filesystem::path(out_dir);
  if (cfg.name.empty()) cfg.name = cfg.subcommand;
  return cfg;
}

std::string format_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("format_double: non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_into(out, j, indent, 0);
  return out;
}

Json ResultEnvelope::to_json() const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = config;
  j["warnings"] = strings(warnings);
  if (seconds) j["timing"] = {{"seconds", *seconds}};
  j["payload"] = payload;
  return j;
}

std::string render_csv(const ResultEnvelope& env, const CsvTable& table) {
  std::string out;
  out += "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
  out += "# command=" + env.command + "\n";
  out += "# seed=" + std::to_string(env.seed) + "\n";
  out += "# config=" + one_line(env.config) + "\n";
  std::size_t rows = table.data.empty() ? 0 : table.data.front().size();
  for (const auto& c : table.data)
    if (c.size() != rows) throw std::invalid_argument("render_csv: ragged columns");
  if (table.columns.size() != table.data.size()) throw std::invalid_argument("render_csv: header mismatch");
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < table.data.size(); ++c) {
      if (c) out += ',';
      const double v = table.data[c][i];
      if (std::isfinite(v)) out += format_double(v);
      else if (std::isnan(v)) out += "nan";
      else out += v > 0 ? "inf" : "-inf";
    }
    out += '\n';
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto dir = path.parent_path();
  if (!dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
  }
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw std::runtime_error(tmp.string() + ": " + std::strerror(errno));
    const bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size();
    const int err = errno;
    if (std::fclose(f) != 0 || !ok) {
      std::remove(tmp.c_str());
      throw std::runtime_error(tmp.string() + ": " + std::strerror(ok ? errno : err));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw std::runtime_error(path.string() + ": " + ec.message());
  }
}

RunOutput execute(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutput out = handlers().at(cfg.subcommand)(cfg);
  out.envelope.command = cfg.subcommand;
  out.envelope.config = cfg.echo;
  out.envelope.seed = cfg.seed;
  if (cfg.timing)
    out.envelope.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<std::filesystem::path> emit(const RunConfig& cfg, const RunOutput& out) {
  std::vector<std::filesystem::path> written;
  const auto json_path = cfg.out_dir / (cfg.name + ".json");
  write_atomic(json_path, dump(out.envelope.to_json()) + "\n");
  written.push_back(json_path);
  for (const auto& [suffix, table] : out.tables) {
    const auto path = cfg.out_dir / (cfg.name + (suffix.empty() ? "" : "_" + suffix) + ".csv");
    write_atomic(path, render_csv(out.envelope, table));
    written.push_back(path);
  }
  return written;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(argc, argv);
  } catch (const UsageError& e) {
    (e.code == 0 ? out : err) << e.message << (e.message.ends_with('\n') ? "" : "\n");
    return e.code;
  }
  try {
    const auto res = execute(cfg);
    for (const auto& path : emit(cfg, res)) out << path.string() << '\n';
    return 0;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const radial::ShootError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace helmholtz::cli
