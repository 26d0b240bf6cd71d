// entangle-lab: string models, quantum reference and Bloch-machine reports.
//
//   entangle-lab table   --variant v4 --pw 0.5 --p1 0.5 [--trials N]
//   entangle-lab scan    --variant v4 --param p_1 --start 0 --stop 1 --steps 101
//   entangle-lab quantum --alpha 0.785398 [--state mixed] [--scan-steps 10000]
//   entangle-lab bloch   collapse|average|decompose ...
//
// Exit codes: 0 success, 2 configuration error, 3 numerical invariant failure.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "entangle/errors.hpp"
#include "entangle/harness.hpp"

using namespace entangle;

namespace {

void print_error(const char* kind, const std::string& message, int code) {
  json err = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << err.dump() << "\n";
}

Vec3 to_vec3(const std::vector<double>& v, const char* flag) {
  if (v.size() != 3) throw ConfigError(std::string(flag) + " takes exactly 3 numbers");
  return {v[0], v[1], v[2]};
}

struct Common {
  std::string format = "json";
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c, bool seeded) {
  cmd->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_option("--workers", c.workers, "worker threads for sampling");
  cmd->add_flag("--timing", c.timing, "add wall_time_seconds to JSON reports");
  if (seeded) cmd->add_option("--seed", c.seed, "master seed (u64)");
}

int write_output(const Common& c, CommandOutput out, double seconds) {
  if (c.timing && c.format == "json") out.report["wall_time_seconds"] = seconds;
  const std::string text = render(out, c.format == "csv");
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return std::cout ? 0 : 2;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + c.out + "'");
  f << text;
  if (!f) throw ConfigError("failed writing '" + c.out + "'");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entangle-lab: string-model, quantum and Bloch-machine experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Common common;

  TableOptions table;
  std::optional<unsigned long long> trace;
  auto* t = app.add_subcommand("table", "analytic and sampled probability tables");
  t->add_option("--variant", table.variant, "v1, v1-prebroken, v2, v3, v4");
  t->add_option("--pw", table.p_w, "probability of a white string");
  t->add_option("--p1", table.p_1, "V4: probability of selecting string 1");
  t->add_option("--length", table.length, "string length");
  t->add_option("--trials", table.trials, "Monte Carlo trials per setting (0 = analytic only)");
  t->add_option("--trace", trace, "emit JSON-lines traces of the first N trials per setting instead of a report");
  add_common(t, common, true);

  ScanOptions scan;
  auto* s = app.add_subcommand("scan", "CHSH and marginal residuals over a parameter grid");
  s->add_option("--variant", scan.variant);
  s->add_option("--param", scan.parameter, "p_w or p_1");
  s->add_option("--start", scan.start);
  s->add_option("--stop", scan.stop);
  s->add_option("--steps", scan.steps);
  s->add_option("--include", scan.extra_points, "extra grid points")->delimiter(',');
  s->add_option("--pw", scan.p_w, "fixed p_w when scanning p_1");
  s->add_option("--p1", scan.p_1, "fixed p_1 when scanning p_w");
  add_common(s, common, false);

  QuantumOptions quantum;
  auto* q = app.add_subcommand("quantum", "quantum reference on the coplanar axis family");
  q->add_option("--alpha", quantum.alpha, "angle between A and B, in [0, pi]");
  q->add_option("--state", quantum.state, "singlet or mixed");
  q->add_option("--trials", quantum.trials, "sampled trials per setting");
  q->add_option("--scan-steps", quantum.scan_steps, "scan alpha over [0, pi] with this many points");
  add_common(q, common, true);

  BlochOptions bloch;
  std::vector<double> r_vec, n_vec, a_vec, b_vec;
  std::optional<std::size_t> cells;
  auto* b = app.add_subcommand("bloch", "hidden-measurement collapse and 15-dim Bloch decomposition");
  b->add_option("mode", bloch.subcommand, "collapse, average or decompose")->required();
  b->add_option("--costheta", bloch.cos_theta, "r = (sin theta, 0, cos theta)");
  b->add_option("--r", r_vec, "Bloch vector x,y,z")->delimiter(',')->expected(3);
  b->add_option("--n", n_vec, "outcome direction n_+ as x,y,z")->delimiter(',')->expected(3);
  b->add_option("--trials", bloch.trials);
  b->add_option("--cells", cells, "piecewise cells (collapse default 1, average default 64)");
  b->add_option("--weights", bloch.weights, "explicit cell weights")->delimiter(',');
  b->add_option("--distributions", bloch.distributions, "random laws in the universal average");
  b->add_option("--state", bloch.state, "singlet, mixed, product or file");
  b->add_option("--a", a_vec, "product state: Alice Bloch vector")->delimiter(',')->expected(3);
  b->add_option("--b", b_vec, "product state: Bob Bloch vector")->delimiter(',')->expected(3);
  b->add_option("--file", bloch.state_file, "JSON density matrix {\"rho\": 4x4}");
  add_common(b, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what(), 2);
    return 2;
  }

  try {
    const SeedChoice seed = resolve_seed(common.seed, std::getenv(kSeedEnvVar));
    const auto t0 = std::chrono::steady_clock::now();
    CommandOutput out;
    if (t->parsed()) {
      table.seed = seed;
      table.workers = common.workers;
      if (trace) {
        const std::string lines = trace_lines(table, *trace);
        if (common.out.empty()) {
          std::cout << lines;
          return 0;
        }
        std::ofstream f(common.out, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file '" + common.out + "'");
        f << lines;
        return 0;
      }
      out = cmd_table(table);
    } else if (s->parsed()) {
      out = cmd_scan(scan);
    } else if (q->parsed()) {
      quantum.seed = seed;
      quantum.workers = common.workers;
      out = cmd_quantum(quantum);
    } else {
      bloch.seed = seed;
      bloch.workers = common.workers;
      if (!r_vec.empty()) bloch.r = to_vec3(r_vec, "--r");
      if (!n_vec.empty()) bloch.n_plus = to_vec3(n_vec, "--n");
      if (!a_vec.empty()) bloch.a = to_vec3(a_vec, "--a");
      if (!b_vec.empty()) bloch.b = to_vec3(b_vec, "--b");
      bloch.cells = cells.value_or(bloch.subcommand == "average" ? 64 : 1);
      out = cmd_bloch(bloch);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return write_output(common, std::move(out), secs);
  } catch (const InvariantError& e) {
    print_error("invariant", e.what(), 3);
    return 3;
  } catch (const std::invalid_argument& e) {
    print_error("config", e.what(), 2);
    return 2;
  } catch (const std::domain_error& e) {
    print_error("config", e.what(), 2);
    return 2;
  } catch (const std::exception& e) {
    print_error("internal", e.what(), 1);
    return 1;
  }
}
