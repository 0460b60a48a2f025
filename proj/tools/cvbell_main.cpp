#include <cmath>
#include <clocale>
#include <cstdint>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvbell/bell.hpp"
#include "cvbell/fock.hpp"
#include "cvbell/kernel.hpp"
#include "cvbell/manifest.hpp"
#include "cvbell/optimize.hpp"
#include "cvbell/types.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace cvbell;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitOracleConvergence = 3;
constexpr int kExitRobustness = 4;

Displacement parse_displacement(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("--alpha expects 're,im', got '" + text + "'");
  }
  try {
    std::size_t used = 0;
    const double re = std::stod(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("");
    const std::string im_part = text.substr(comma + 1);
    const double im = std::stod(im_part, &used);
    if (used != im_part.size()) throw std::invalid_argument("");
    return Displacement{re, im};
  } catch (const std::exception&) {
    throw std::invalid_argument("--alpha expects 're,im' with numeric parts, got '" + text + "'");
  }
}

json settings_to_json(const SettingTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back(json::array({json{{"re", row[0].re}, {"im", row[0].im}},
                                json{{"re", row[1].re}, {"im", row[1].im}}}));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// correlate

struct CorrelateArgs {
  int n = 0;
  double r = 0.0;
  std::vector<std::string> alphas;
  std::string out;
};

json correlate_params(const CorrelateArgs& a) {
  return json{{"n", a.n}, {"r", a.r}, {"alpha", a.alphas}, {"out", a.out}};
}

int run_correlate(const CorrelateArgs& a) {
  if (static_cast<int>(a.alphas.size()) != a.n) {
    std::cerr << "error: --alpha given " << a.alphas.size() << " times for --n " << a.n << "\n";
    return kExitUsage;
  }
  std::vector<Displacement> disp;
  disp.reserve(a.alphas.size());
  for (const std::string& s : a.alphas) {
    disp.push_back(parse_displacement(s));
  }
  const SqueezedParams params(a.n, a.r);
  const double value = squeezed_correlation(params, disp);
  const std::string line = format_full(value) + "\n";
  std::cout << line;
  if (!a.out.empty()) {
    RunManifest manifest;
    manifest.command = "correlate";
    manifest.parameters = correlate_params(a);
    manifest.timestamp = utc_timestamp();
    manifest.add_output(a.out + ".txt", line);
    manifest.save(a.out + ".manifest.json");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle-check

struct OracleArgs {
  int n = 2;
  double r = 0.0;
  int cutoff = 0;  // 0 = per-N default
  int samples = 50;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;
  std::string out;
};

json oracle_params(const OracleArgs& a) {
  return json{{"n", a.n},           {"r", a.r},     {"cutoff", a.cutoff},
              {"samples", a.samples}, {"seed", a.seed}, {"tolerance", a.tolerance},
              {"out", a.out}};
}

int default_cutoff(int n) {
  switch (n) {
    case 1: return 24;
    case 2: return 24;
    case 3: return 14;
    default: return 8;
  }
}

int run_oracle_check(const OracleArgs& a) {
  const int d = a.cutoff > 0 ? a.cutoff : default_cutoff(a.n);
  const SqueezedParams params(a.n, a.r);
  const auto ws = fock::FockWorkspace::build(params, d);
  const auto ws2 = fock::FockWorkspace::build(params, 2 * d);
  const double no_leak_gate = std::numeric_limits<double>::infinity();
  const auto state = fock::squeezed_state_vector(params, ws, no_leak_gate);
  const auto state2 = fock::squeezed_state_vector(params, ws2, no_leak_gate);

  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto sample_disc = [&]() {
    while (true) {
      const double re = unit(rng), im = unit(rng);
      if (re * re + im * im <= 1.0) return Displacement{re, im};
    }
  };

  double max_doubling = 0.0;
  double max_deviation = 0.0;
  std::vector<Displacement> disp(static_cast<std::size_t>(a.n));
  for (int s = 0; s < a.samples; ++s) {
    for (auto& alpha : disp) alpha = sample_disc();
    const double coarse = fock::displaced_parity_expectation(state.amplitudes, disp, ws);
    const double fine = fock::displaced_parity_expectation(state2.amplitudes, disp, ws2);
    const double exact = squeezed_correlation(params, disp);
    max_doubling = std::max(max_doubling, std::abs(coarse - fine));
    max_deviation = std::max(max_deviation, std::abs(exact - fine));
  }

  std::string report;
  report += "oracle-check: N=" + std::to_string(a.n) + " r=" + format_csv(a.r) +
            " cutoff=" + std::to_string(d) + " (doubled " + std::to_string(2 * d) +
            ") samples=" + std::to_string(a.samples) + " seed=" + std::to_string(a.seed) + "\n";
  report += "state leakage: " + format_csv(state.leakage) + " (d=" + std::to_string(d) +
            "), " + format_csv(state2.leakage) + " (d=" + std::to_string(2 * d) + ")\n";
  report += "max |E_d - E_2d|    = " + format_csv(max_doubling) + "\n";
  report += "max |kernel - E_2d| = " + format_csv(max_deviation) + "\n";

  int code = kExitOk;
  if (max_doubling > a.tolerance) {
    report += "result: CONVERGENCE FAILURE (doubling moved results beyond tolerance " +
              format_csv(a.tolerance) + ")\n";
    code = kExitOracleConvergence;
  } else if (max_deviation > a.tolerance) {
    report += "result: MISMATCH (kernel vs oracle beyond tolerance " + format_csv(a.tolerance) +
              ")\n";
    code = kExitCheckFailed;
  } else {
    report += "result: OK (tolerance " + format_csv(a.tolerance) + ")\n";
  }
  std::cout << report;
  if (!a.out.empty()) {
    RunManifest manifest;
    manifest.command = "oracle-check";
    manifest.parameters = oracle_params(a);
    manifest.timestamp = utc_timestamp();
    manifest.add_output(a.out + ".txt", report);
    manifest.save(a.out + ".manifest.json");
  }
  return code;
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeArgs {
  int n = 0;
  std::string form;
  std::string r_spec = "free";
  int restarts = 64;
  int max_iters = 10000;
  std::uint64_t seed = 1;
  bool use_complex = false;
  bool anchored = false;
  std::string out;
};

json optimize_params(const OptimizeArgs& a) {
  return json{{"n", a.n},           {"form", a.form},       {"r", a.r_spec},
              {"restarts", a.restarts}, {"max_iters", a.max_iters}, {"seed", a.seed},
              {"complex", a.use_complex}, {"anchored", a.anchored}, {"out", a.out}};
}

Objective objective_by_name(const std::string& name, int n) {
  if (name == "zb") return zb_objective(n);
  BellForm form;
  if (name == "chsh") {
    form = chsh_form();
  } else if (name == "mermin3") {
    form = mermin3_form();
  } else if (name == "mermin4") {
    form = mermin4_form();
  } else {
    throw std::invalid_argument("--form must be one of chsh|mermin3|mermin4|zb, got '" + name +
                                "'");
  }
  if (form.n_modes != n) {
    throw std::invalid_argument("--form " + name + " requires --n " +
                                std::to_string(form.n_modes) + ", got --n " + std::to_string(n));
  }
  return form_objective(std::move(form));
}

int run_optimize(const OptimizeArgs& a) {
  Objective objective = objective_by_name(a.form, a.n);

  OptimizerConfig config;
  config.restarts = a.restarts;
  config.max_iterations = a.max_iters;
  config.seed = a.seed;
  config.real_only = !a.use_complex;
  config.anchor_first_setting = a.anchored;

  double fixed_r = 0.0;
  if (a.r_spec == "free") {
    config.optimize_r = true;
  } else {
    try {
      std::size_t used = 0;
      fixed_r = std::stod(a.r_spec, &used);
      if (used != a.r_spec.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("--r expects a number or 'free', got '" + a.r_spec + "'");
    }
  }

  const SqueezedParams params(a.n, fixed_r);
  const OptimizationResult res = optimize_bell(params, objective, config);

  json out_json{
      {"command", "optimize"},
      {"objective", res.objective_name},
      {"n", a.n},
      {"best_value", res.best_value},
      {"classical_bound", objective.bound()},
      {"violated", res.best_value > objective.bound() + 1e-12},
      {"best_r", res.best_r},
      {"r_optimized", res.r_optimized},
      {"r_at_bound", res.r_at_bound},
      {"best_settings", settings_to_json(res.best_settings)},
      {"best_restart", res.best_restart},
      {"restart_fraction_near_best", res.restart_fraction_near_best()},
      {"config",
       {{"restarts", config.restarts},
        {"max_iterations", config.max_iterations},
        {"tolerance", config.tolerance},
        {"alpha_bound", config.alpha_bound},
        {"real_only", config.real_only},
        {"seed", config.seed},
        {"r_min", config.r_min},
        {"r_max", config.r_max},
        {"anchor_first_setting", config.anchor_first_setting}}},
  };
  json stats = json::array();
  for (const RestartStat& s : res.restart_statistics) {
    stats.push_back(json{{"final_value", s.final_value}, {"evaluations", s.evaluations}});
  }
  out_json["restart_statistics"] = stats;

  const std::string text = out_json.dump(2) + "\n";
  std::cout << text;
  if (!a.out.empty()) {
    RunManifest manifest;
    manifest.command = "optimize";
    manifest.parameters = optimize_params(a);
    manifest.timestamp = utc_timestamp();
    manifest.add_output(a.out + ".json", text);
    manifest.save(a.out + ".manifest.json");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// visibility-table

struct TableArgs {
  int n_min = 2;
  int n_max = 7;
  std::string out = "visibility_table";
  std::uint64_t seed = 1;
  int restarts = 64;
  int max_iters = 20000;
};

json table_params(const TableArgs& a) {
  return json{{"n_min", a.n_min}, {"n_max", a.n_max},     {"out", a.out},
              {"seed", a.seed},   {"restarts", a.restarts}, {"max_iters", a.max_iters}};
}

int run_visibility_table(const TableArgs& a) {
  if (a.n_min < 2 || a.n_max < a.n_min) {
    std::cerr << "error: need 2 <= --n-min <= --n-max\n";
    return kExitUsage;
  }
  OptimizerConfig config;
  config.restarts = a.restarts;
  config.max_iterations = a.max_iters;
  config.seed = a.seed;

  std::vector<int> n_range;
  for (int n = a.n_min; n <= a.n_max; ++n) n_range.push_back(n);
  const std::vector<VisibilityRow> rows = visibility_table(n_range, config);

  std::string csv = "n,v_me,v_osc,b_opt,form,argmax_r\n";
  json json_rows = json::array();
  bool robust = true;
  for (const VisibilityRow& row : rows) {
    csv += std::to_string(row.n) + "," + format_csv(row.v_me) + "," + format_csv(row.v_osc) +
           "," + format_csv(row.b_opt) + "," + row.form_used + "," + format_csv(row.argmax_r) +
           "\n";
    json_rows.push_back(json{{"n", row.n},
                             {"v_me", row.v_me},
                             {"v_osc", row.v_osc},
                             {"b_opt", row.b_opt},
                             {"bound", row.bound},
                             {"form", row.form_used},
                             {"argmax_r", row.argmax_r},
                             {"r_at_bound", row.r_at_bound},
                             {"anchored", row.anchored},
                             {"robust_fraction", row.robust_fraction},
                             {"required_fraction", row.required_fraction}});
    if (row.robust_fraction < row.required_fraction) robust = false;
  }
  const json out_json{{"command", "visibility-table"},
                      {"rows", json_rows},
                      {"config",
                       {{"restarts", config.restarts},
                        {"max_iterations", config.max_iterations},
                        {"seed", config.seed}}}};

  RunManifest manifest;
  manifest.command = "visibility-table";
  manifest.parameters = table_params(a);
  manifest.timestamp = utc_timestamp();
  manifest.add_output(a.out + ".csv", csv);
  manifest.add_output(a.out + ".json", out_json.dump(2) + "\n");
  manifest.save(a.out + ".manifest.json");

  std::cout << csv;
  if (!robust) {
    std::cerr << "error: at least one row failed its restart-robustness check\n";
    return kExitRobustness;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// rerun

int dispatch_from_manifest(const RunManifest& manifest, const std::string& out_override);

int run_rerun(const std::string& manifest_path, const std::string& out_override) {
  const RunManifest manifest =
      RunManifest::from_json(json::parse(read_text_file(manifest_path)));
  const int code = dispatch_from_manifest(manifest, out_override);
  if (code != kExitOk && code != kExitCheckFailed && code != kExitOracleConvergence &&
      code != kExitRobustness) {
    return code;
  }
  // Compare recorded checksums against the reproduced outputs.
  const std::string old_prefix = manifest.parameters.value("out", std::string{});
  const std::string new_prefix = out_override.empty() ? old_prefix : out_override;
  bool identical = true;
  for (const auto& [path, checksum] : manifest.output_checksums.items()) {
    std::string new_path = path;
    if (!old_prefix.empty() && path.rfind(old_prefix, 0) == 0) {
      new_path = new_prefix + path.substr(old_prefix.size());
    }
    const std::string fresh = fnv1a64_hex(read_text_file(new_path));
    const std::string recorded = checksum.get<std::string>();
    if (fresh != recorded) {
      std::cerr << "rerun: checksum mismatch for " << new_path << " (recorded " << recorded
                << ", got " << fresh << ")\n";
      identical = false;
    }
  }
  if (!identical) return kExitCheckFailed;
  std::cout << "rerun: outputs reproduced byte-identically (" << manifest.output_checksums.size()
            << " file(s))\n";
  return code;
}

int dispatch_from_manifest(const RunManifest& manifest, const std::string& out_override) {
  const json& p = manifest.parameters;
  if (manifest.command == "correlate") {
    CorrelateArgs a;
    a.n = p.at("n").get<int>();
    a.r = p.at("r").get<double>();
    a.alphas = p.at("alpha").get<std::vector<std::string>>();
    a.out = out_override.empty() ? p.value("out", std::string{}) : out_override;
    return run_correlate(a);
  }
  if (manifest.command == "oracle-check") {
    OracleArgs a;
    a.n = p.at("n").get<int>();
    a.r = p.at("r").get<double>();
    a.cutoff = p.value("cutoff", 0);
    a.samples = p.value("samples", 50);
    a.seed = p.value("seed", std::uint64_t{1});
    a.tolerance = p.value("tolerance", 1e-6);
    a.out = out_override.empty() ? p.value("out", std::string{}) : out_override;
    return run_oracle_check(a);
  }
  if (manifest.command == "optimize") {
    OptimizeArgs a;
    a.n = p.at("n").get<int>();
    a.form = p.at("form").get<std::string>();
    a.r_spec = p.at("r").get<std::string>();
    a.restarts = p.value("restarts", 64);
    a.max_iters = p.value("max_iters", 10000);
    a.seed = p.value("seed", std::uint64_t{1});
    a.use_complex = p.value("complex", false);
    a.anchored = p.value("anchored", false);
    a.out = out_override.empty() ? p.value("out", std::string{}) : out_override;
    return run_optimize(a);
  }
  if (manifest.command == "visibility-table") {
    TableArgs a;
    a.n_min = p.value("n_min", 2);
    a.n_max = p.value("n_max", 7);
    a.seed = p.value("seed", std::uint64_t{1});
    a.restarts = p.value("restarts", 64);
    a.max_iters = p.value("max_iters", 20000);
    a.out = out_override.empty() ? p.value("out", std::string{"visibility_table"}) : out_override;
    return run_visibility_table(a);
  }
  throw std::invalid_argument("manifest has unknown command '" + manifest.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_NUMERIC, "C");  // CSV and printed numbers stay locale-independent
  CLI::App app{"Phase-space parity correlations and Bell-quantity maximization "
               "for N-mode squeezed vacuum states"};
  app.require_subcommand(1);

  CorrelateArgs ca;
  CLI::App* correlate = app.add_subcommand("correlate", "Evaluate the closed-form correlation");
  correlate->add_option("--n", ca.n, "mode count N")->required()->check(CLI::Range(1, 10));
  correlate->add_option("--r", ca.r, "squeezing parameter")->required();
  correlate->add_option("--alpha", ca.alphas, "displacement 're,im' (repeat N times)")
      ->required();
  correlate->add_option("--out", ca.out, "output prefix (writes .txt and .manifest.json)");

  OracleArgs oa;
  CLI::App* oracle = app.add_subcommand("oracle-check", "Compare kernel against the Fock oracle");
  oracle->add_option("--n", oa.n, "mode count N (oracle supports 1..4)")
      ->required()
      ->check(CLI::Range(1, 4));
  oracle->add_option("--r", oa.r, "squeezing parameter")->required();
  oracle->add_option("--cutoff", oa.cutoff, "per-mode truncation (default per N)");
  oracle->add_option("--samples", oa.samples, "random displacement tuples")->check(CLI::Range(1, 100000));
  oracle->add_option("--seed", oa.seed, "sampling seed");
  oracle->add_option("--tolerance", oa.tolerance, "comparison tolerance");
  oracle->add_option("--out", oa.out, "output prefix");

  OptimizeArgs pa;
  CLI::App* optimize = app.add_subcommand("optimize", "Maximize a Bell quantity");
  optimize->add_option("--n", pa.n, "mode count N")->required()->check(CLI::Range(1, 10));
  optimize->add_option("--form", pa.form, "chsh|mermin3|mermin4|zb")->required();
  optimize->add_option("--r", pa.r_spec, "squeezing parameter value, or 'free'");
  optimize->add_option("--restarts", pa.restarts, "multi-start count")->check(CLI::Range(1, 100000));
  optimize->add_option("--max-iters", pa.max_iters, "iterations per local search");
  optimize->add_option("--seed", pa.seed, "restart seed");
  optimize->add_flag("--complex", pa.use_complex, "search complex displacements");
  optimize->add_flag("--anchored", pa.anchored, "pin each party's first setting to 0");
  optimize->add_option("--out", pa.out, "output prefix");

  TableArgs ta;
  CLI::App* table = app.add_subcommand("visibility-table", "Threshold-visibility table (CSV/JSON)");
  table->add_option("--n-min", ta.n_min, "smallest N (>= 2)");
  table->add_option("--n-max", ta.n_max, "largest N");
  table->add_option("--out", ta.out, "output prefix");
  table->add_option("--seed", ta.seed, "restart seed");
  table->add_option("--restarts", ta.restarts, "multi-start count");
  table->add_option("--max-iters", ta.max_iters, "iterations per local search");

  std::string rerun_manifest;
  std::string rerun_out;
  CLI::App* rerun = app.add_subcommand("rerun", "Re-execute a recorded run and verify outputs");
  rerun->add_option("--manifest", rerun_manifest, "manifest file")->required();
  rerun->add_option("--out", rerun_out, "override output prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (correlate->parsed()) return run_correlate(ca);
    if (oracle->parsed()) return run_oracle_check(oa);
    if (optimize->parsed()) return run_optimize(pa);
    if (table->parsed()) return run_visibility_table(ta);
    if (rerun->parsed()) return run_rerun(rerun_manifest, rerun_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
