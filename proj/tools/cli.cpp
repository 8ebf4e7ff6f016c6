#include "cli.hpp"

#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmt/error.hpp"
#include "rmt/montecarlo.hpp"

namespace rmt::cli {

namespace {

std::string join_command(int argc, const char* const* argv) {
  std::ostringstream s;
  for (int i = 0; i < argc; ++i) s << (i ? " " : "") << argv[i];
  return s.str();
}

void add_workers(CLI::App* app, unsigned& workers) {
  app->add_option("--workers", workers, "Monte Carlo worker threads (default: RMT_WORKERS or 1; 0 = all cores)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inference on the singular vectors of low-rank signal-plus-noise matrices", "rmtool"};
  app.set_version_flag("--version", std::string(RMT_VERSION));
  app.require_subcommand(1);

  LawsOptions laws;
  auto* laws_cmd = app.add_subcommand("laws", "Limiting law of sqrt(n)(|<v, v_hat>|^2 - a(d))");
  laws_cmd->add_option("--d", laws.d, "signal strength")->required();
  laws_cmd->add_option("--y", laws.y, "aspect ratio M/n (implied by the vector files when given)");
  laws_cmd->add_option("--kappa3", laws.kappa3, "third cumulant of sqrt(n) x_ij")->capture_default_str();
  laws_cmd->add_option("--kappa4", laws.kappa4, "fourth cumulant of sqrt(n) x_ij")->capture_default_str();
  laws_cmd->add_option("--u-file", laws.u_file, "left vector u (CSV, one row or column)");
  laws_cmd->add_option("--v-file", laws.v_file, "right vector v (CSV, one row or column)");
  laws_cmd->add_flag("--json", laws.json, "print a JSON object");

  TestOptions test;
  auto* test_cmd = app.add_subcommand("test", "z-score test of H0: V = V0 (or v_i = v0)");
  test_cmd->add_option("--y-file", test.y_file, "observed M x n matrix Y (CSV)")->required();
  test_cmd->add_option("--u-file", test.u_file, "known left factor U, M x r (CSV)")->required();
  test_cmd->add_option("--v0-file", test.v0_file, "null right factor V0, n x r (CSV)")->required();
  auto* d_opt = test_cmd->add_option("--d", test.d, "signal strengths d_1 > ... > d_r")->delimiter(',');
  auto* est_d = test_cmd->add_flag("--estimate-d", test.estimate_d, "plug in d_hat = p^{-1} of the outliers");
  d_opt->excludes(est_d);
  auto* k_opt = test_cmd->add_option("--cumulants", test.cumulants, "noise cumulants kappa3,kappa4")->delimiter(',');
  auto* est_k = test_cmd->add_flag("--estimate-cumulants", test.estimate_cumulants, "estimate cumulants from residuals");
  k_opt->excludes(est_k);
  test_cmd->add_option("--alpha", test.alpha, "significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  test_cmd->add_option("--variant", test.variant, "S0 (single vector), S1 or S1d")->capture_default_str();
  test_cmd->add_option("--index", test.index, "component tested by S0 (zero-based)")->capture_default_str();
  test_cmd->add_flag("--json", test.json, "print the outcome as JSON");

  ReproduceOptions reproduce;
  reproduce.workers = 1;
  std::uint64_t reproduce_seed = 0;
  auto* rep_cmd = app.add_subcommand("reproduce", "Regenerate the reference tables or figure data");
  auto* table_opt = rep_cmd->add_option("--table", reproduce.table, "s1, s2, s3, s4 or s5");
  auto* figure_opt = rep_cmd->add_option("--figure", reproduce.figure, "power or meanvar");
  table_opt->excludes(figure_opt);
  rep_cmd->add_option("--n", reproduce.n, "column dimensions (default: 200 and 500)")->delimiter(',');
  rep_cmd->add_option("--reps", reproduce.reps, "replicates per cell (default 10000)");
  auto* rep_seed = rep_cmd->add_option("--seed", reproduce_seed, "base seed (required for randomized targets)");
  rep_cmd->add_option("--out", reproduce.out, "output directory")->capture_default_str();
  rep_cmd->add_flag("--check", reproduce.check, "compare against the embedded reference values");
  add_workers(rep_cmd, reproduce.workers);

  SimulateOptions simulate;
  std::uint64_t simulate_seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo config, or write a test fixture");
  auto* cfg_opt = sim_cmd->add_option("--config", simulate.config, "experiment config (JSON)");
  auto* fix_opt = sim_cmd->add_option("--fixture", simulate.fixture, "null or alternative");
  cfg_opt->excludes(fix_opt);
  auto* sim_seed = sim_cmd->add_option("--seed", simulate_seed, "seed")->required();
  sim_cmd->add_option("--out", simulate.out, "report path (--config) or directory (--fixture)")->required();
  add_workers(sim_cmd, simulate.workers);

  try {
    reproduce.workers = simulate.workers = default_workers();
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (rep_seed->count() > 0) reproduce.seed = reproduce_seed;
  if (sim_seed->count() > 0) simulate.seed = simulate_seed;
  const std::string command = join_command(argc, argv);

  try {
    if (laws_cmd->parsed()) return cmd_laws(laws, out);
    if (test_cmd->parsed()) {
      if (test.d.empty() == !test.estimate_d) throw InvalidInput("give exactly one of --d or --estimate-d");
      if (test.cumulants.empty() == !test.estimate_cumulants) {
        throw InvalidInput("give exactly one of --cumulants or --estimate-cumulants");
      }
      return cmd_test(test, out);
    }
    if (rep_cmd->parsed()) return cmd_reproduce(reproduce, command, out);
    if (sim_cmd->parsed()) return cmd_simulate(simulate, command, out);
  } catch (const ExperimentError& e) {
    err << "error: " << e.what() << "\n";
    return kRegime;
  } catch (const RegimeError& e) {
    err << "regime error: " << e.what() << "\n";
    return kRegime;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace rmt::cli
