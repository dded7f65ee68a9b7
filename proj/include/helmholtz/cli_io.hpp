#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace helmholtz::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Every subcommand, in the order shown by --help.
const std::vector<std::string>& subcommands();

/// Numeric parameters; each subcommand binds the subset it uses.
struct Params {
  int N = 3;
  double k = 1.0;
  double R = 1.0;
  int lmax = 8;
  double lambda_max = 100.0;
  int ell = 0;
  double r_min = 0.5;
  double r_max = 10.0;
  double mu = 0.0;
  std::vector<double> x;
  std::vector<double> zero_range;
  std::string kind = "j";
  double alpha = 1.0;
  double tol = 1e-10;
  double eps = 0.0;
  std::string sweep;
  unsigned threads = 0;
  int grid = 513;
  int max_solutions = 8;
  bool refine = false;
  int mplus = 0;
  int restarts = 3;
  int max_outer = 2000;
  std::int64_t samples = 100000;
};

struct RunConfig {
  std::string subcommand;
  Params params;
  std::string model_path;  // empty when not given
  std::filesystem::path out_dir;
  std::string name;  // output base name, defaults to the subcommand
  std::uint64_t seed = 1;
  bool timing = false;
  /// Values of the subcommand's options after file and flag merging.
  Json echo;
};

/// Thrown for bad command lines; `code` is the process exit status.
struct UsageError {
  int code = 1;
  std::string message;
};

/// Parses argv (argv[0] is the program). A `--config FILE` in TOML/INI form
/// supplies defaults that flags override; unknown keys are errors.
/// `--help` is reported as a UsageError with code 0 and the help text.
RunConfig parse_config(int argc, const char* const* argv);

/// Default output directory: $HELMHOLTZ_OUT_DIR, else the working directory.
std::filesystem::path default_output_dir();

/// 17 significant digits; ".0" is appended when the text would read as an
/// integer. Throws on non-finite input.
std::string format_double(double v);

/// Indented JSON with doubles written by format_double and non-finite values as null.
std::string dump(const Json& j, int indent = 2);

struct ResultEnvelope {
  std::string command;
  Json config;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
  Json payload;
  std::optional<double> seconds;

  Json to_json() const;
};

/// Columns of equal length; rendered with '#' lines for schema_version,
/// seed and config echo, then a header row.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;
};

std::string render_csv(const ResultEnvelope& env, const CsvTable& table);

/// Writes content to a sibling temporary and renames it over path.
/// Errors carry the system message.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct RunOutput {
  ResultEnvelope envelope;
  /// (file suffix, table); an empty suffix gives name.csv, "plot" gives name_plot.csv.
  std::vector<std::pair<std::string, CsvTable>> tables;
};

/// Runs the numerical work for a parsed config.
RunOutput execute(const RunConfig& cfg);

/// Writes name.json and the CSV tables; returns the paths in write order.
std::vector<std::filesystem::path> emit(const RunConfig& cfg, const RunOutput& out);

/// Full command-line entry point. Returns the exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace helmholtz::cli
