/*
 * Copyright 2026 The hypfay Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypfay/equilibrium.hpp"
#include "hypfay/finite_n.hpp"
#include "hypfay/identities.hpp"
#include "hypfay/periods.hpp"
#include "hypfay/report.hpp"
#include "hypfay/suite.hpp"

namespace {

using namespace hypfay;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitConfig = 2;

struct RunConfig {
  std::string curve_path;
  double beta = 2.0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t suite_seed = SuiteOptions{}.seed;
  int samples = 20;
  int genus = 1;
  int N = 1;
  int m = 1;
  std::string identity;
  std::string output;
  std::string format = "json";
};

// Writes the report to the output path, or to stdout without one.
void emit(const RunConfig& cfg, const std::string& report, const std::string& summary) {
  if (cfg.output.empty()) {
    std::cout << report;
    if (!report.empty() && report.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw Error(ErrorKind::ConfigError, "field 'output': cannot write '" + cfg.output + "'");
  out << report;
  if (!report.empty() && report.back() != '\n') out << '\n';
  if (!summary.empty()) std::cout << summary << '\n';
}

void require_json(const RunConfig& cfg) {
  if (cfg.format != "json") throw Error(ErrorKind::ConfigError, "field 'format': only json is available here");
}

void require_positive(double v, const char* field) {
  if (!(v > 0.0)) throw Error(ErrorKind::ConfigError, std::string("field '") + field + "' must be positive");
}

int run_periods(const RunConfig& cfg) {
  require_json(cfg);
  const Curve curve = load_curve(cfg.curve_path);
  PeriodOptions opts;
  if (cfg.tol > 0.0) opts.tol = cfg.tol;
  const PeriodData pd = compute_periods(curve, opts);
  emit(cfg, periods_to_json(curve, pd), "periods written to " + cfg.output);
  return kExitOk;
}

int run_equilibrium(const RunConfig& cfg) {
  require_positive(cfg.beta, "beta");
  const Curve curve = load_curve(cfg.curve_path);
  const EquilibriumData eq = solve_equilibrium(curve);
  if (cfg.format == "csv") {
    emit(cfg, density_csv(eq), "density written to " + cfg.output);
    return kExitOk;
  }
  std::shared_ptr<const Surface> surface;
  if (curve.genus() > 0) surface = std::make_shared<Surface>(curve);
  const ConstructionReport cr = check_construction(eq, surface.get());
  const EnergyResult energy = energy_direct(eq, cfg.beta);
  auto doc = nlohmann::json::parse(equilibrium_to_json(eq, cfg.beta));
  doc["energy"] = {{"value", energy.energy},
                   {"log_energy", energy.log_energy},
                   {"potential", energy.potential},
                   {"error", energy.error}};
  doc["construction"] = {{"gap_residual", cr.gap_residual},       {"mass_error", cr.mass_error},
                         {"potential_spread", cr.potential_spread}, {"loop_equation", cr.loop_equation},
                         {"min_density", cr.min_density},           {"boutroux_a", cr.boutroux_a},
                         {"boutroux_b", cr.boutroux_b}};
  emit(cfg, doc.dump(2), "equilibrium written to " + cfg.output);
  return cr.min_density < 0.0 ? kExitVerification : kExitOk;
}

int run_theta_selftest(const RunConfig& cfg) {
  require_json(cfg);
  if (cfg.genus < 1) throw Error(ErrorKind::ConfigError, "field 'g' must be at least 1");
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-8;
  const ThetaSelftest t = theta_selftest(cfg.genus, cfg.seed, cfg.samples);
  nlohmann::json doc;
  doc["schema"] = kSchema;
  doc["genus"] = t.genus;
  doc["seed"] = cfg.seed;
  doc["samples"] = t.samples;
  doc["residuals"] = t.residuals;
  doc["max_residual"] = t.max_residual();
  doc["tol"] = tol;
  const bool ok = t.max_residual() < tol;
  emit(cfg, doc.dump(2), std::string("theta selftest ") + (ok ? "passed" : "failed"));
  return ok ? kExitOk : kExitVerification;
}

int run_verify(const RunConfig& cfg) {
  require_json(cfg);
  const auto kind = identity_from_string(cfg.identity);
  if (!kind) throw Error(ErrorKind::ConfigError, "field 'identity': unknown identity '" + cfg.identity + "'");
  if (cfg.samples < 1) throw Error(ErrorKind::ConfigError, "field 'samples' must be at least 1");
  const Curve curve = load_curve(cfg.curve_path);
  if (curve.genus() < 1) throw Error(ErrorKind::ConfigError, "field 'branch_points': identities need genus >= 1");
  IdentityContext ctx(std::make_shared<Surface>(curve));
  SamplingOptions opts;
  opts.samples = cfg.samples;
  opts.seed = cfg.seed;
  if (cfg.tol > 0.0) opts.tol = cfg.tol;
  const IdentityReport report = run_identity(*kind, ctx, opts);
  emit(cfg, report_to_json(report, curve),
       std::string(to_string(*kind)) + " max residual " + std::to_string(report.max_residual));
  return report.passed() ? kExitOk : kExitVerification;
}

int run_finite_n_cmd(const RunConfig& cfg) {
  require_json(cfg);
  FiniteNOptions opts;
  opts.beta = static_cast<int>(cfg.beta);
  if (opts.beta != cfg.beta || (opts.beta != 1 && opts.beta != 2 && opts.beta != 4)) {
    throw Error(ErrorKind::ConfigError, "field 'beta' must be 1, 2 or 4");
  }
  opts.N = cfg.N;
  opts.m = cfg.m;
  opts.seed = cfg.seed;
  opts.tol = cfg.tol;
  const FiniteNRun run = run_finite_n(opts);
  emit(cfg, finite_n_to_json(run), "finite-N max residual " + std::to_string(run.max_residual));
  return run.passed() ? kExitOk : kExitVerification;
}

int run_full_suite(const RunConfig& cfg) {
  require_json(cfg);
  SuiteOptions opts;
  opts.seed = cfg.suite_seed;
  const std::vector<CriterionResult> results = run_suite(opts);
  std::cout << suite_table(results);
  if (!cfg.output.empty()) {
    std::ofstream out(cfg.output);
    if (!out) throw Error(ErrorKind::ConfigError, "field 'output': cannot write '" + cfg.output + "'");
    out << suite_to_json(results, opts) << '\n';
  }
  return suite_passed(results) ? kExitOk : kExitVerification;
}

void add_output(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("-o,--output,--out", cfg.output, "Report path (stdout when omitted)");
  cmd->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Hyperelliptic theta identities and beta-ensemble verification"};
  app.require_subcommand(1);

  auto* periods = app.add_subcommand("periods", "Period matrix of a curve");
  periods->add_option("--curve", cfg.curve_path, "Curve JSON file")->required();
  periods->add_option("--tol", cfg.tol, "Quadrature tolerance");
  add_output(periods, cfg);

  auto* equilibrium = app.add_subcommand("equilibrium", "Equilibrium measure supported on the cuts");
  equilibrium->add_option("--curve", cfg.curve_path, "Curve JSON file")->required();
  equilibrium->add_option("--beta", cfg.beta, "Ensemble parameter");
  add_output(equilibrium, cfg);

  auto* selftest = app.add_subcommand("theta-selftest", "Theta function property checks");
  selftest->add_option("--g", cfg.genus, "Genus");
  selftest->add_option("--seed", cfg.seed, "Random seed");
  selftest->add_option("--samples", cfg.samples, "Samples per property");
  selftest->add_option("--tol", cfg.tol, "Residual tolerance");
  add_output(selftest, cfg);

  auto* verify = app.add_subcommand("verify", "Sample an identity on a curve");
  verify->add_option("--identity", cfg.identity, "fay, beta1, beta1-equiv, beta2, beta4")->required();
  verify->add_option("--curve", cfg.curve_path, "Curve JSON file")->required();
  verify->add_option("--samples", cfg.samples, "Number of samples");
  verify->add_option("--seed", cfg.seed, "Random seed");
  verify->add_option("--tol", cfg.tol, "Residual tolerance");
  add_output(verify, cfg);

  auto* finite = app.add_subcommand("finite-n", "Finite-N kernel formulas by quadrature");
  finite->add_option("--beta", cfg.beta, "1, 2 or 4");
  finite->add_option("--N", cfg.N, "Ensemble size");
  finite->add_option("--m", cfg.m, "Number of point pairs");
  finite->add_option("--seed", cfg.seed, "Random seed");
  finite->add_option("--tol", cfg.tol, "Residual tolerance");
  add_output(finite, cfg);

  auto* suite = app.add_subcommand("full-suite", "Run every acceptance criterion");
  suite->add_option("--seed", cfg.suite_seed, "Random seed");
  add_output(suite, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*periods) return run_periods(cfg);
    if (*equilibrium) return run_equilibrium(cfg);
    if (*selftest) return run_theta_selftest(cfg);
    if (*verify) return run_verify(cfg);
    if (*finite) return run_finite_n_cmd(cfg);
    if (*suite) return run_full_suite(cfg);
  } catch (const Error& e) {
    std::cerr << "hypfay: " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitVerification;
  }
  return kExitConfig;
}
