#include <doctest.h>

#include "helmholtz/cli_io.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace helmholtz::cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "helmholtz");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

std::string parse_error(std::vector<std::string> args) {
  try {
    parse(std::move(args));
  } catch (const UsageError& e) {
    return e.message;
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& tag) {
  auto d = fs::temp_directory_path() / ("helmholtz_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_args(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "helmholtz");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return rc;
}

const std::string kModels = HELMHOLTZ_MODELS_DIR;

}  // namespace

TEST_CASE("parse a spectrum command") {
  const auto cfg = parse({"spectrum", "--N", "3", "--k", "2.0", "--R", "1.0", "--lmax", "8", "--lambda-max", "200"});
  CHECK(cfg.subcommand == "spectrum");
  CHECK(cfg.params.N == 3);
  CHECK(cfg.params.k == 2.0);
  CHECK(cfg.params.lmax == 8);
  CHECK(cfg.params.lambda_max == 200.0);
  CHECK(cfg.name == "spectrum");
  CHECK(cfg.echo["lambda-max"].get<double>() == 200.0);
  CHECK(cfg.echo.size() == 5);
}

TEST_CASE("usage and validation errors name the flag") {
  CHECK(parse_error({"solve1d"}).find("--model") != std::string::npos);
  const auto tol = parse_error({"shoot", "--tol", "0"});
  CHECK(tol.find("--tol") != std::string::npos);
  CHECK(tol.find("positive") != std::string::npos);
  CHECK(parse_error({"spectrum", "--bogus", "1"}).find("--bogus") != std::string::npos);
  CHECK(parse_error({"shoot", "--sweep", "1:2"}).find("--sweep") != std::string::npos);
  CHECK(!parse_error({}).empty());
}

TEST_CASE("config file values yield to flags") {
  const auto dir = scratch("config");
  const auto ini = dir / "run.ini";
  std::ofstream(ini) << "seed = 7\n[dtn]\nN = 4\nk = 2.5\n";
  const auto cfg = parse({"--config", ini.string(), "dtn", "--k", "3"});
  CHECK(cfg.seed == 7);
  CHECK(cfg.params.N == 4);
  CHECK(cfg.params.k == 3.0);
  std::ofstream(dir / "bad.ini") << "[dtn]\nlmax = 3\ncolour = 2\n";
  CHECK(parse_error({"--config", (dir / "bad.ini").string(), "dtn"}).find("colour") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("output directory from the environment") {
  ::setenv("HELMHOLTZ_OUT_DIR", "/tmp/somewhere", 1);
  CHECK(parse({"dtn"}).out_dir == fs::path("/tmp/somewhere"));
  CHECK(parse({"--out-dir", "/tmp/else", "dtn"}).out_dir == fs::path("/tmp/else"));
  ::unsetenv("HELMHOLTZ_OUT_DIR");
  CHECK(parse({"dtn"}).out_dir == fs::path("."));
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(1.0) == "1.0");
  CHECK(format_double(-3.0) == "-3.0");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1e300) == "1.0000000000000001e+300");
  CHECK_THROWS(format_double(INFINITY));
  const double vals[] = {1.0 / 3.0, std::nextafter(1.0, 2.0), 5e-324, -2.2250738585072014e-308, 123456789.125};
  for (double v : vals) {
    const double back = std::strtod(format_double(v).c_str(), nullptr);
    CHECK(std::memcmp(&back, &v, sizeof v) == 0);
  }
}

TEST_CASE("envelope JSON round-trips and writes non-finite values as null") {
  ResultEnvelope env;
  env.command = "dtn";
  env.seed = 42;
  env.config = {{"k", 0.1}, {"N", 3}};
  env.payload = {{"x", 1.0 / 3.0}, {"bad", std::numeric_limits<double>::quiet_NaN()}, {"big", INFINITY}};
  const auto text = dump(env.to_json());
  const auto back = Json::parse(text);
  CHECK(back["schema_version"] == kSchemaVersion);
  CHECK(back["seed"] == 42);
  CHECK(back["payload"]["x"].get<double>() == 1.0 / 3.0);
  CHECK(back["payload"]["bad"].is_null());
  CHECK(back["payload"]["big"].is_null());
  CHECK(back["config"]["k"].get<double>() == 0.1);
  CHECK(!back.contains("timing"));
  env.seconds = 1.5;
  CHECK(Json::parse(dump(env.to_json()))["timing"]["seconds"] == 1.5);
  CHECK(dump(env.to_json()) == dump(Json::parse(dump(env.to_json()))));
}

TEST_CASE("csv layout") {
  ResultEnvelope env;
  env.command = "shoot";
  env.seed = 3;
  env.config = {{"k", 1.0}};
  const CsvTable t{{"a", "b"}, {{1.0, 2.5}, {NAN, -INFINITY}}};
  const auto csv = render_csv(env, t);
  CHECK(csv ==
        "# schema_version=1\n# command=shoot\n# seed=3\n# config={\"k\":1.0}\n"
        "a,b\n1.0,nan\n2.5,-inf\n");
  CHECK_THROWS_AS(render_csv(env, CsvTable{{"a", "b"}, {{1.0}, {}}}), std::invalid_argument);
}

TEST_CASE("atomic writes") {
  const auto dir = scratch("atomic");
  const auto path = dir / "sub" / "out.json";
  write_atomic(path, "first");
  write_atomic(path, "second");
  CHECK(slurp(path) == "second");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "sub")) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(write_atomic("/proc/no/such/place.json", "x"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("shoot tables") {
  const auto dir = scratch("shoot");
  std::string log;
  REQUIRE(run_args({"--out-dir", dir.string(), "shoot", "--N", "3", "--k", "1", "--r-max", "12"}, &log) == 0);
  const auto csv = slurp(dir / "shoot.csv");
  CHECK(csv.find("\nr,u,up,rho,residual\n") != std::string::npos);
  CHECK(csv.find("# schema_version=1\n") == 0);
  // Plot data: second column is r u for N = 3.
  std::istringstream plot(slurp(dir / "shoot_plot.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(plot, line)) {
    if (line.empty() || line[0] == '#' || line == "r,v") continue;
    const double r = std::stod(line.substr(0, line.find(',')));
    const double v = std::stod(line.substr(line.find(',') + 1));
    if (++rows % 20 == 0) CHECK(v == doctest::Approx(std::sin(r)).epsilon(1e-7));
  }
  CHECK(rows > 100);
  const auto j = Json::parse(slurp(dir / "shoot.json"));
  CHECK(j["config"]["r-max"].get<double>() == 12.0);
  CHECK(j["payload"]["model"]["kind"] == "zero");
  fs::remove_all(dir);
}

TEST_CASE("identical runs give identical bytes") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::vector<std::string> args{"validate-model", "--model", kModels + "/shipped_power_p4.json", "--samples",
                                      "2000"};
  for (const auto& d : {a, b}) {
    auto full = args;
    full.insert(full.begin(), {"--seed", "11", "--out-dir", d.string()});
    REQUIRE(run_args(full) == 0);
  }
  CHECK(slurp(a / "validate-model.json") == slurp(b / "validate-model.json"));
  CHECK(Json::parse(slurp(a / "validate-model.json"))["seed"] == 11);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("numerical errors map to exit codes") {
  const auto dir = scratch("err");
  std::string log;
  CHECK(run_args({"--out-dir", dir.string(), "solve1d", "--model", kModels + "/shipped_power_p4.json", "--k", "0.5",
                  "--R", "3.141592653589793"},
                 &log) == 2);
  CHECK(log.find("error:") != std::string::npos);
  CHECK(run_args({"spectrum", "--help"}, &log) == 0);
  fs::remove_all(dir);
}
