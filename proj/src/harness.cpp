#include "entangle/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "entangle/errors.hpp"
#include "entangle/parallel.hpp"
#include "entangle/quantum_ref.hpp"

namespace entangle {

namespace {

constexpr std::uint64_t kCollapseDistributionDomain = 19;

json header(const char* command, const SeedChoice* seed) {
  json j = {{"schema_version", kReportSchemaVersion},
            {"tool", kToolName},
            {"version", kToolVersion},
            {"command", command}};
  if (seed) j["seed"] = {{"value", seed->value}, {"source", seed->source}};
  return j;
}

json bell_pair_json(const ChshQuantities& q) {
  return {{"classical", bell_to_json(check_bell_bounds(q, 2.0))},
          {"tsirelson", bell_to_json(check_bell_bounds(q, 2.0 * std::numbers::sqrt2))}};
}

json table_section(const ExperimentTable& table, double tolerance, bool exact) {
  const ChshQuantities q = chsh(table);
  json j = json::object();
  j["table"] = table_to_json(table);
  if (exact) j["exact"] = table_exact_json(table);
  j["chsh"] = chsh_to_json(q);
  j["bell"] = bell_pair_json(q);
  j["marginals"] = marginals_to_json(marginals(table, tolerance));
  return j;
}

void append_table_rows(CsvDocument& doc, const char* source, const ExperimentTable& table) {
  for (const Setting s : kAllSettings) {
    const auto& row = table.row(s);
    doc.rows.push_back({std::string(source), std::string(s.label()), row.pp(), row.pm(), row.mp(), row.mm(),
                        correlation(row)});
  }
}

CsvDocument table_csv_header() { return {{"source", "setting", "p_pp", "p_pm", "p_mp", "p_mm", "E"}, {}}; }

bool is_p_w(const std::string& name) { return name == "p_w" || name == "pw"; }
bool is_p_1(const std::string& name) { return name == "p_1" || name == "p1"; }

StringModelConfig scan_config(const ScanOptions& opt, double value) {
  const Variant v = parse_variant(opt.variant);
  return is_p_w(opt.parameter) ? StringModelConfig(v, value, opt.p_1) : StringModelConfig(v, opt.p_w, value);
}

double scan_a_chsh(const ScanOptions& opt, double value) { return chsh(analytic_table(scan_config(opt, value))).a_chsh; }

Variant variant_or_config_error(const std::string& name) {
  try {
    return parse_variant(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void require_workers(unsigned workers) {
  if (workers == 0) throw ConfigError("--workers must be at least 1");
}

}  // namespace

SeedChoice resolve_seed(std::optional<std::uint64_t> flag, const char* env_value) {
  if (flag) return {*flag, "flag"};
  if (env_value && *env_value) {
    const std::string_view text(env_value);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ConfigError(std::string(kSeedEnvVar) + " is not an unsigned 64-bit integer: '" + std::string(text) + "'");
    return {v, "env"};
  }
  return {};
}

double sampled_tolerance(unsigned long long trials_per_setting) {
  return 4.0 / std::sqrt(static_cast<double>(trials_per_setting));
}

std::string render(const CommandOutput& out, bool as_csv) {
  if (as_csv) return emit_csv(out.csv);
  return out.report.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

CommandOutput cmd_table(const TableOptions& opt) {
  require_workers(opt.workers);
  const StringModelConfig config(variant_or_config_error(opt.variant), opt.p_w, opt.p_1, opt.length);
  if (!(opt.analytic_tolerance >= 0.0)) throw ConfigError("analytic tolerance must be non-negative");

  CommandOutput out;
  json& r = out.report;
  r = header("table", &opt.seed);
  json cfg = {{"variant", std::string(variant_name(config.variant()))},
              {"p_w", config.p_w()},
              {"p_1", config.p_1()},
              {"length", config.length()},
              {"trials_per_setting", opt.trials},
              {"analytic_tolerance", opt.analytic_tolerance}};
  r["config"] = std::move(cfg);

  const ExperimentTable analytic = analytic_table(config);
  r["analytic"] = table_section(analytic, opt.analytic_tolerance, true);
  out.csv = table_csv_header();
  append_table_rows(out.csv, "analytic", analytic);

  if (opt.trials > 0) {
    const double tol = opt.sampled_tolerance.value_or(sampled_tolerance(opt.trials));
    if (!(tol >= 0.0)) throw ConfigError("sampled tolerance must be non-negative");
    r["config"]["sampled_tolerance"] = tol;
    const EstimateResult est = estimate_table(config, opt.trials, opt.seed.value, opt.workers);
    json sampled = table_section(est.table, tol, false);
    sampled["counts"] = counts_to_json(est.counts);
    sampled["max_abs_deviation_from_analytic"] = est.table.max_abs_deviation(analytic);
    r["sampled"] = std::move(sampled);
    append_table_rows(out.csv, "sampled", est.table);
  }
  return out;
}

std::string trace_lines(const TableOptions& opt, unsigned long long trials) {
  const StringModelConfig config(variant_or_config_error(opt.variant), opt.p_w, opt.p_1, opt.length);
  std::string out;
  for (const Setting s : kAllSettings) {
    for (unsigned long long t = 0; t < trials; ++t) {
      const TrialResult tr = trace_trial(config, s, opt.seed.value, t);
      json line = trace_to_json(tr.trace, tr.outcome);
      line["trial"] = t;
      out += line.dump();
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> scan_grid(const ScanOptions& opt) {
  if (!is_p_w(opt.parameter) && !is_p_1(opt.parameter))
    throw ConfigError("unknown scan parameter '" + opt.parameter + "' (expected p_w or p_1)");
  if (opt.steps < 2) throw ConfigError("scan needs at least 2 steps");
  if (!(std::isfinite(opt.start) && std::isfinite(opt.stop)) || opt.start > opt.stop)
    throw ConfigError("scan range must satisfy start <= stop");
  std::vector<double> grid;
  grid.reserve(opt.steps + opt.extra_points.size());
  for (unsigned i = 0; i < opt.steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(opt.steps - 1);
    grid.push_back(i + 1 == opt.steps ? opt.stop : opt.start + (opt.stop - opt.start) * t);
  }
  grid.insert(grid.end(), opt.extra_points.begin(), opt.extra_points.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<ScanRow> scan_rows(const ScanOptions& opt) {
  variant_or_config_error(opt.variant);
  std::vector<ScanRow> rows;
  for (double x : scan_grid(opt)) {
    const ExperimentTable t = analytic_table(scan_config(opt, x));
    rows.push_back({x, chsh(t), marginals(t, opt.tolerance).max_abs_residual});
  }
  return rows;
}

std::vector<Crossing> find_crossings(const ScanOptions& opt, double level) {
  const std::vector<double> grid = scan_grid(opt);
  auto f = [&](double x) { return scan_a_chsh(opt, x) - level; };
  std::vector<Crossing> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double fi = f(grid[i]);
    if (fi == 0.0) {
      out.push_back({level, grid[i], fi + level});
      continue;
    }
    if (i + 1 == grid.size()) break;
    const double fj = f(grid[i + 1]);
    if (fj == 0.0 || (fi < 0.0) == (fj < 0.0)) continue;
    double lo = grid[i], hi = grid[i + 1];
    double flo = fi;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    const double root = std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
    out.push_back({level, root, scan_a_chsh(opt, root)});
  }
  return out;
}

CommandOutput cmd_scan(const ScanOptions& opt) {
  const std::vector<ScanRow> rows = scan_rows(opt);
  const std::string pname = is_p_w(opt.parameter) ? "p_w" : "p_1";

  CommandOutput out;
  json& r = out.report;
  r = header("scan", nullptr);
  json fixed = json::object();
  if (pname != "p_w") fixed["p_w"] = opt.p_w;
  if (pname != "p_1") fixed["p_1"] = opt.p_1;
  r["config"] = {{"variant", std::string(variant_name(parse_variant(opt.variant)))},
                 {"parameter", pname},
                 {"start", opt.start},
                 {"stop", opt.stop},
                 {"steps", opt.steps},
                 {"extra_points", opt.extra_points},
                 {"fixed", std::move(fixed)},
                 {"marginal_tolerance", opt.tolerance}};

  json jrows = json::array();
  out.csv.header = {pname, "a_chsh", "b_chsh", "c_chsh", "d_chsh", "max_marginal_residual"};
  for (const auto& row : rows) {
    jrows.push_back({{pname, row.value},
                     {"chsh", chsh_to_json(row.chsh)},
                     {"max_marginal_residual", row.max_marginal_residual},
                     {"marginals_obeyed", row.max_marginal_residual <= opt.tolerance}});
    out.csv.rows.push_back(
        {row.value, row.chsh.a_chsh, row.chsh.b_chsh, row.chsh.c_chsh, row.chsh.d_chsh, row.max_marginal_residual});
  }
  r["rows"] = std::move(jrows);

  json crossings = json::array();
  for (double level : {2.0, 2.0 * std::numbers::sqrt2})
    for (const auto& c : find_crossings(opt, level))
      crossings.push_back({{"level", c.level}, {pname, c.value}, {"a_chsh", c.a_chsh}});
  r["a_chsh_crossings"] = std::move(crossings);
  return out;
}

// ---------------------------------------------------------------------------

EstimateResult sample_from_table(const ExperimentTable& table, unsigned long long trials, std::uint64_t seed,
                                 unsigned workers) {
  if (trials == 0) throw std::invalid_argument("trials per setting must be at least 1");
  SettingCounts counts{};
  for (const Setting s : kAllSettings) {
    const auto& cells = table.row(s).cells();
    std::vector<std::array<unsigned long long, 4>> partial(std::max(1u, workers), {0, 0, 0, 0});
    for_each_block(trials, workers, [&](std::size_t block, std::size_t begin, std::size_t end) {
      for (std::size_t t = begin; t < end; ++t) {
        Stream stream = Stream::derived(seed, s.index(), t);
        const double u = stream.uniform();
        std::size_t c = 0;
        double acc = cells[0];
        while (c < 3 && !(u < acc)) acc += cells[++c];
        while (cells[c] == 0.0 && c > 0) --c;  // u fell in the rounding gap above the last sum
        ++partial[block][c];
      }
    });
    for (const auto& p : partial)
      for (std::size_t c = 0; c < 4; ++c) counts[s.index()][c] += p[c];
  }
  return {ExperimentTable(JointDistribution::from_counts(counts[0]), JointDistribution::from_counts(counts[1]),
                          JointDistribution::from_counts(counts[2]), JointDistribution::from_counts(counts[3])),
          counts, trials};
}

CommandOutput cmd_quantum(const QuantumOptions& opt) {
  require_workers(opt.workers);
  if (!(opt.alpha >= 0.0 && opt.alpha <= std::numbers::pi)) throw ConfigError("alpha must lie in [0, pi]");
  TwoQubitState state = [&] {
    if (opt.state == "singlet") return singlet_state();
    if (opt.state == "mixed") return maximally_mixed_state();
    throw ConfigError("unknown quantum state '" + opt.state + "' (expected singlet or mixed)");
  }();

  const AxisQuad axes = coplanar_axes(opt.alpha);
  const ExperimentTable analytic = experiment_table(state, axes);

  CommandOutput out;
  json& r = out.report;
  r = header("quantum", &opt.seed);
  r["config"] = {{"alpha", opt.alpha}, {"state", opt.state}, {"trials_per_setting", opt.trials}, {"scan_steps", opt.scan_steps}};
  r["axes"] = {{"A", vec3_to_json(axes.a.vec())},
               {"A'", vec3_to_json(axes.a_prime.vec())},
               {"B", vec3_to_json(axes.b.vec())},
               {"B'", vec3_to_json(axes.b_prime.vec())}};
  r["analytic"] = table_section(analytic, 1e-9, false);
  out.csv = table_csv_header();
  append_table_rows(out.csv, "analytic", analytic);

  if (opt.trials > 0) {
    const EstimateResult est = sample_from_table(analytic, opt.trials, opt.seed.value, opt.workers);
    json sampled = table_section(est.table, sampled_tolerance(opt.trials), false);
    sampled["counts"] = counts_to_json(est.counts);
    sampled["max_abs_deviation_from_analytic"] = est.table.max_abs_deviation(analytic);
    r["sampled"] = std::move(sampled);
    append_table_rows(out.csv, "sampled", est.table);
  }

  if (opt.scan_steps > 0) {
    if (opt.scan_steps < 2) throw ConfigError("scan needs at least 2 steps");
    std::vector<double> grid(opt.scan_steps);
    for (unsigned i = 0; i < opt.scan_steps; ++i)
      grid[i] = std::numbers::pi * static_cast<double>(i) / static_cast<double>(opt.scan_steps - 1);
    const auto points = scan_tsirelson(state, grid);
    auto best = std::max_element(points.begin(), points.end(),
                                 [](const TsirelsonPoint& a, const TsirelsonPoint& b) { return a.max_abs < b.max_abs; });
    json rows = json::array();
    CsvDocument scan_csv{{"alpha", "a_chsh", "b_chsh", "c_chsh", "d_chsh", "max_abs_chsh"}, {}};
    for (const auto& p : points) {
      rows.push_back({{"alpha", p.angle}, {"chsh", chsh_to_json(p.chsh)}, {"max_abs", p.max_abs}});
      scan_csv.rows.push_back({p.angle, p.chsh.a_chsh, p.chsh.b_chsh, p.chsh.c_chsh, p.chsh.d_chsh, p.max_abs});
    }
    r["scan"] = {{"steps", opt.scan_steps}, {"max_abs_chsh", best->max_abs}, {"argmax_alpha", best->angle}, {"rows", std::move(rows)}};
    out.csv = std::move(scan_csv);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

CommandOutput bloch_collapse(const BlochOptions& opt) {
  if (!opt.cos_theta && !opt.r) throw ConfigError("bloch collapse needs --costheta or --r");
  if (opt.trials == 0) throw ConfigError("--trials must be at least 1");
  Vec3 rv;
  if (opt.r) {
    rv = *opt.r;
  } else {
    const double c = *opt.cos_theta;
    if (!(c >= -1.0 && c <= 1.0)) throw ConfigError("--costheta must lie in [-1, 1]");
    rv = {std::sqrt(std::max(0.0, 1.0 - c * c)), 0.0, c};
  }
  const BlochVector3 r(rv);
  const MeasurementFrame frame(opt.n_plus);

  BreakDistribution dist = BreakDistribution::uniform();
  std::string kind = "uniform";
  if (!opt.weights.empty()) {
    dist = BreakDistribution::piecewise(opt.weights);
    kind = "piecewise";
  } else if (opt.cells > 1) {
    Stream s = Stream::derived(opt.seed.value, kCollapseDistributionDomain, 0);
    dist = BreakDistribution::random_piecewise(opt.cells, s);
    kind = "random-piecewise";
  }

  const OutcomeProbabilities born = outcome_probabilities(r, frame);
  const double model_plus = dist.probability_plus(born.plus);
  const CollapseCounts counts = sample_collapses(r, frame, dist, opt.trials, opt.seed.value, opt.workers);
  const double n = static_cast<double>(opt.trials);
  const double freq_plus = static_cast<double>(counts.plus) / n;
  const double tol = sampled_tolerance(opt.trials);

  CommandOutput out;
  json& j = out.report;
  j = header("bloch", &opt.seed);
  j["config"] = {{"subcommand", "collapse"}, {"r", vec3_to_json(rv)}, {"n_plus", vec3_to_json(opt.n_plus)},
                 {"trials", opt.trials}, {"distribution", kind}, {"cells", dist.cells()}};
  if (!dist.is_uniform()) j["config"]["weights"] = dist.weights();
  j["split_point"] = 2.0 * born.plus - 1.0;
  j["born"] = {{"+", born.plus}, {"-", born.minus}};
  j["model_probability"] = {{"+", model_plus}, {"-", 1.0 - model_plus}};
  j["counts"] = {{"+", counts.plus}, {"-", counts.minus}};
  j["frequencies"] = {{"+", freq_plus}, {"-", static_cast<double>(counts.minus) / n}};
  j["deviation_from_model"] = std::abs(freq_plus - model_plus);
  j["tolerance"] = tol;
  j["within_tolerance"] = std::abs(freq_plus - model_plus) <= tol;

  out.csv = {{"outcome", "count", "frequency", "born", "model_probability"}, {}};
  out.csv.rows.push_back({std::string("+"), std::uint64_t{counts.plus}, freq_plus, born.plus, model_plus});
  out.csv.rows.push_back({std::string("-"), std::uint64_t{counts.minus}, static_cast<double>(counts.minus) / n, born.minus,
                          1.0 - model_plus});
  return out;
}

CommandOutput bloch_average(const BlochOptions& opt) {
  Vec3 rv;
  if (opt.r) {
    rv = *opt.r;
  } else {
    const double c = opt.cos_theta.value_or(0.5);
    if (!(c >= -1.0 && c <= 1.0)) throw ConfigError("--costheta must lie in [-1, 1]");
    rv = {std::sqrt(std::max(0.0, 1.0 - c * c)), 0.0, c};
  }
  if (opt.cells == 0) throw ConfigError("--cells must be at least 1");
  if (opt.distributions == 0) throw ConfigError("--distributions must be at least 1");
  const BlochVector3 r(rv);
  const MeasurementFrame frame(opt.n_plus);
  const OutcomeProbabilities born = outcome_probabilities(r, frame);
  const OutcomeProbabilities avg = universal_average(r, frame, opt.cells, opt.distributions, opt.seed.value, opt.workers);

  CommandOutput out;
  json& j = out.report;
  j = header("bloch", &opt.seed);
  j["config"] = {{"subcommand", "average"}, {"r", vec3_to_json(rv)}, {"n_plus", vec3_to_json(opt.n_plus)},
                 {"cells", opt.cells}, {"distributions", opt.distributions}};
  j["born"] = {{"+", born.plus}, {"-", born.minus}};
  j["average"] = {{"+", avg.plus}, {"-", avg.minus}};
  j["deviation_from_born"] = std::abs(avg.plus - born.plus);

  out.csv = {{"outcome", "average", "born"}, {}};
  out.csv.rows.push_back({std::string("+"), avg.plus, born.plus});
  out.csv.rows.push_back({std::string("-"), avg.minus, born.minus});
  return out;
}

CommandOutput bloch_decompose(const BlochOptions& opt) {
  TwoQubitState state = [&] {
    if (opt.state == "singlet") return singlet_state();
    if (opt.state == "mixed") return maximally_mixed_state();
    if (opt.state == "product") return product_state(opt.a, opt.b);
    if (opt.state == "file") {
      if (opt.state_file.empty()) throw ConfigError("--state file needs --file PATH");
      return TwoQubitState(load_state_file(opt.state_file));
    }
    throw ConfigError("unknown state '" + opt.state + "' (expected singlet, mixed, product or file)");
  }();

  const BlochVector15 r = decompose(state);
  const Matrix4 back = reconstruct(r);
  const double purity = trace_of_product(state.rho(), state.rho()).real();

  CommandOutput out;
  json& j = out.report;
  j = header("bloch", nullptr);
  json cfg = {{"subcommand", "decompose"}, {"state", opt.state}};
  if (opt.state == "product") {
    cfg["a"] = vec3_to_json(opt.a);
    cfg["b"] = vec3_to_json(opt.b);
  }
  if (opt.state == "file") cfg["file"] = opt.state_file;
  j["config"] = std::move(cfg);
  j["bloch15"] = bloch15_to_json(r);
  j["purity"] = purity;
  j["rank1_residual"] = connection_rank1_residual(r);
  j["reconstruction_error"] = back.max_abs_diff(state.rho());

  static constexpr std::array<const char*, 4> kOps = {"I", "s1", "s2", "s3"};
  out.csv = {{"index", "block", "generator", "value"}, {}};
  for (std::size_t i = 0; i < 15; ++i) {
    std::string block, gen;
    if (i < 3) {
      block = "alice";
      gen = std::string(kOps[i + 1]) + "xI";
    } else if (i < 6) {
      block = "bob";
      gen = std::string("Ix") + kOps[i - 2];
    } else {
      block = "conn";
      gen = std::string(kOps[(i - 6) / 3 + 1]) + "x" + kOps[(i - 6) % 3 + 1];
    }
    out.csv.rows.push_back({std::uint64_t{i + 1}, block, gen, r.components()[i]});
  }
  return out;
}

}  // namespace

CommandOutput cmd_bloch(const BlochOptions& opt) {
  require_workers(opt.workers);
  if (opt.subcommand == "collapse") return bloch_collapse(opt);
  if (opt.subcommand == "average") return bloch_average(opt);
  if (opt.subcommand == "decompose") return bloch_decompose(opt);
  throw ConfigError("unknown bloch subcommand '" + opt.subcommand + "' (expected collapse, average or decompose)");
}

Matrix4 parse_state_json(const std::string& text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(origin + ": syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("rho"))
    throw ConfigError(origin + ": at top level: expected an object with a \"rho\" member");
  const auto& rho = doc["rho"];
  if (!rho.is_array() || rho.size() != 4) throw ConfigError(origin + ": at rho: expected an array of 4 rows");
  Matrix4 m;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& row = rho[i];
    const std::string where = "rho[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != 4) throw ConfigError(origin + ": at " + where + ": expected an array of 4 entries");
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& e = row[k];
      const std::string at = where + "[" + std::to_string(k) + "]";
      if (e.is_number()) {
        m(i, k) = cplx{e.get<double>(), 0.0};
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = cplx{e[0].get<double>(), e[1].get<double>()};
      } else {
        throw ConfigError(origin + ": at " + at + ": expected a number or a [re, im] pair");
      }
    }
  }
  return m;
}

Matrix4 load_state_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open state file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_state_json(buf.str(), "state file '" + path + "'");
}

}  // namespace entangle
