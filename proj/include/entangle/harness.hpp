#pragma once

// Experiment orchestration behind the entangle-lab CLI. Each command returns
// a JSON report and a CSV rendering of the same data; the binary only parses
// flags and picks the output format.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entangle/report.hpp"
#include "entangle/string_models.hpp"

namespace entangle {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolName = "entangle-lab";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSeedEnvVar = "ENTANGLE_LAB_SEED";
inline constexpr std::uint64_t kDefaultSeed = 20230101;

/// Bad user parameters; the CLI maps this (and std::invalid_argument,
/// std::domain_error) to exit code 2. InvariantError maps to exit code 3.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SeedChoice {
  std::uint64_t value = kDefaultSeed;
  std::string source = "default";  // "flag", "env" or "default"
};

/// Flag beats environment beats default. Throws ConfigError on an
/// unparsable environment value.
SeedChoice resolve_seed(std::optional<std::uint64_t> flag, const char* env_value);

/// 4 / sqrt(N): the tolerance for marginal residuals and cell deviations of
/// tables sampled with N trials per setting.
double sampled_tolerance(unsigned long long trials_per_setting);

struct CommandOutput {
  json report;
  CsvDocument csv;
};

/// Serialized report, newline-terminated.
std::string render(const CommandOutput& out, bool as_csv);

// ---------------------------------------------------------------------------

struct TableOptions {
  std::string variant = "v1";
  double p_w = 0.5;
  double p_1 = 0.5;
  double length = 1.0;
  unsigned long long trials = 0;  // per setting; 0 = analytic only
  SeedChoice seed;
  unsigned workers = 1;
  double analytic_tolerance = 1e-9;
  std::optional<double> sampled_tolerance;  // default 4 / sqrt(trials)
};

CommandOutput cmd_table(const TableOptions& opt);

/// JSON lines, one per trial, for the first `trials` trials of every setting.
std::string trace_lines(const TableOptions& opt, unsigned long long trials);

struct ScanOptions {
  std::string variant = "v4";
  std::string parameter = "p_1";  // "p_w" or "p_1"
  double start = 0.0;
  double stop = 1.0;
  unsigned steps = 101;
  std::vector<double> extra_points;  // merged into the grid, which stays sorted
  double p_w = 0.5;
  double p_1 = 0.5;
  double tolerance = 1e-9;
};

struct ScanRow {
  double value;
  ChshQuantities chsh;
  double max_marginal_residual;
};

struct Crossing {
  double level;
  double value;   // parameter value where a_chsh = level
  double a_chsh;  // a_chsh evaluated there
};

/// Grid = linspace(start, stop, steps) plus extra points, sorted with
/// duplicates removed. Throws ConfigError on bad parameter names or steps < 2.
std::vector<double> scan_grid(const ScanOptions& opt);
std::vector<ScanRow> scan_rows(const ScanOptions& opt);
/// Points of the grid's span where a_chsh equals `level`, located by
/// bisection on the closed form to full double precision.
std::vector<Crossing> find_crossings(const ScanOptions& opt, double level);

CommandOutput cmd_scan(const ScanOptions& opt);

struct QuantumOptions {
  double alpha = 0.7853981633974483;  // pi / 4
  std::string state = "singlet";      // "singlet" or "mixed"
  unsigned long long trials = 0;
  SeedChoice seed;
  unsigned workers = 1;
  unsigned scan_steps = 0;  // > 0 adds a [0, pi] scan of the axis family
};

CommandOutput cmd_quantum(const QuantumOptions& opt);

/// Samples each row of a table `trials` times; trial t of setting s uses
/// Stream::derived(seed, s, t).
EstimateResult sample_from_table(const ExperimentTable& table, unsigned long long trials, std::uint64_t seed,
                                 unsigned workers = 1);

struct BlochOptions {
  std::string subcommand = "collapse";  // collapse, average, decompose
  // collapse / average
  std::optional<double> cos_theta;      // r = (sin theta, 0, cos theta), n_+ = z
  std::optional<Vec3> r;
  Vec3 n_plus{0.0, 0.0, 1.0};
  unsigned long long trials = 100000;
  std::size_t cells = 1;                // collapse: 1 = uniform law
  std::vector<double> weights;          // collapse: explicit cell weights
  std::size_t distributions = 100000;   // average
  SeedChoice seed;
  unsigned workers = 1;
  // decompose
  std::string state = "singlet";        // singlet, mixed, product, file
  Vec3 a{0.0, 0.0, 1.0};
  Vec3 b{0.0, 0.0, 1.0};
  std::string state_file;
};

CommandOutput cmd_bloch(const BlochOptions& opt);

/// Reads {"rho": [[[re, im] or re, ...] x 4] x 4} from JSON text. Errors
/// name the byte offset (syntax) or the element path (structure) and
/// throw ConfigError. The matrix itself is not validated here; building a
/// TwoQubitState from it throws InvariantError if it is not a density matrix.
Matrix4 parse_state_json(const std::string& text, const std::string& origin);
Matrix4 load_state_file(const std::string& path);

}  // namespace entangle
