#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edfq/errors.hpp"
#include "edfq/harness.hpp"
#include "edfq/io.hpp"
#include "edfq/oracle.hpp"
#include "edfq/version.hpp"

namespace fs = std::filesystem;
using edfq::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitVerdict = 4;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// --set key.path=value, value parsed as JSON with string fallback
void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw edfq::ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // plain string
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw edfq::ConfigError("--set: empty key segment in '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

struct CommonArgs {
  std::string config_path;
  std::string manifest_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int grid = 0;

  // resolved input document: manifest config, else config file, plus overrides
  json resolve(const char* expected_command) const {
    json doc;
    if (!manifest_path.empty()) {
      const json manifest = edfq::io::load_manifest(manifest_path);
      if (manifest.at("command") != expected_command)
        throw edfq::ConfigError(std::string("manifest was produced by '") +
                                manifest.at("command").get<std::string>() + "', expected '" +
                                expected_command + "'");
      doc = manifest.at("config");
    } else if (!config_path.empty()) {
      doc = edfq::io::load_json_file(config_path);
    } else {
      throw edfq::ConfigError("either --config or --from-manifest is required");
    }
    try {
      for (const std::string& o : overrides) apply_override(doc, o);
      if (seed_set) doc["seed"] = seed;
      if (grid > 0) doc["grid"] = grid;
    } catch (const json::exception& e) {
      throw edfq::ConfigError(std::string("bad --set override: ") + e.what());
    }
    return doc;
  }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_config = true) {
  if (with_config) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--from-manifest", args.manifest_path,
                    "rerun from a previous run's manifest.json");
    cmd->add_option("--set", args.overrides, "override config keys, e.g. --set lambda=2")
        ->take_all();
    cmd->add_option("--seed", args.seed, "override the seed")->each([&args](const std::string&) {
      args.seed_set = true;
    });
    cmd->add_option("--grid", args.grid, "output/solver grid resolution");
  }
  cmd->add_option("--out", args.out_dir, "output directory (default: out)");
}

void write_manifest_first(const fs::path& out, const char* command, const json& resolved,
                          std::vector<std::string> outputs) {
  edfq::io::RunManifest manifest;
  manifest.command = command;
  manifest.version = edfq::kVersion;
  manifest.created_utc = utc_now();
  manifest.out_dir = out.string();
  manifest.config = resolved;
  manifest.outputs = std::move(outputs);
  edfq::io::write_manifest(out, manifest);
}

int cmd_simulate(const CommonArgs& args) {
  const json resolved = args.resolve("simulate");
  edfq::ModelConfig config = edfq::io::parse_config(resolved);
  const fs::path out(args.out_dir);
  write_manifest_first(out, "simulate", resolved,
                       {"events.csv", "paths.csv", "snapshots/", "summary.json"});

  edfq::sim::SimOptions options;
  options.output_grid = resolved.value("grid", 512);
  options.snapshot_count = resolved.value("snapshots", 32);
  options.event_cap = resolved.value("event_cap", options.event_cap);
  options.frontier_update_on_idle_arrival =
      resolved.value("frontier_update_on_idle_arrival", true);
  std::string patience_note;
  if (!config.patience_law.valid_fluid_patience(&patience_note))
    std::cerr << "note: patience law fails the fluid-limit assumptions (" << patience_note
              << "); the simulation is exact, but fluid comparisons are unavailable\n";
  edfq::RngStream init_rng = edfq::sim::make_initial_rng(config.params);
  edfq::sim::SimState state =
      edfq::sim::build_initial_state(config.initial, config.params, init_rng);
  edfq::sim::SimLaws laws = edfq::sim::make_laws(config, config.params);
  const edfq::sim::SimTrace trace = edfq::sim::run(std::move(state), config.params, laws, options);

  edfq::io::write_events_csv(out / "events.csv", trace.events);
  edfq::io::write_paths_csv(out / "paths.csv", trace);
  edfq::io::write_snapshots(out / "snapshots", trace);

  json summary;
  summary["arrivals"] = trace.arrivals;
  summary["departures"] = trace.departures;
  summary["reneged"] = trace.reneged;
  summary["busy_time"] = trace.busy_time;
  if (trace.first_empty_time) summary["first_empty_time"] = *trace.first_empty_time;
  std::ofstream(out / "summary.json") << summary.dump(2) << "\n";
  std::cout << "simulate: N=" << config.params.n_scale << " events=" << trace.events.size()
            << " R=" << trace.reneged << " -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_fluid(const CommonArgs& args) {
  const json resolved = args.resolve("fluid");
  edfq::ModelConfig config = edfq::io::parse_config(resolved);
  const fs::path out(args.out_dir);
  write_manifest_first(out, "fluid", resolved, {"fluid.csv", "tails/", "summary.json"});

  const int grid = resolved.value("grid", 4096);
  const double dt = config.params.horizon / grid;
  edfq::fluid::FluidProblem prob(config.params.lambda, config.params.mu, config.patience_law,
                                 config.initial, config.params.horizon, dt);
  const bool super_or_critical = config.params.lambda >= config.params.mu;
  const edfq::fluid::FluidSolution sol =
      super_or_critical ? edfq::fluid::fluid_qr(prob) : edfq::fluid::fluid_subcritical(prob);
  edfq::io::write_fluid_csv(out / "fluid.csv", sol);

  json summary;
  summary["regime"] = edfq::to_string(config.params.regime());
  const double ys = edfq::y_star(config.patience_law, config.params.lambda, config.params.mu);
  if (std::isfinite(ys)) summary["y_star"] = ys;
  if (sol.t_empty) summary["T_bar"] = *sol.t_empty;
  if (super_or_critical) {
    const int tails = resolved.value("snapshots", 8);
    std::vector<double> times;
    for (int i = 0; i <= tails; ++i)
      times.push_back(config.params.horizon * i / tails);
    const double a_max = prob.q0.support_upper() + 1.0;
    edfq::io::write_fluid_tails(out / "tails", sol, times, a_max, 256);
    summary["frontier_hypotheses_hold"] = prob.frontier_hypotheses_hold();
  }
  std::ofstream(out / "summary.json") << summary.dump(2) << "\n";
  std::cout << "fluid: regime=" << edfq::to_string(config.params.regime()) << " grid=" << grid
            << " -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_compare(const CommonArgs& args) {
  const json resolved = args.resolve("compare");
  edfq::harness::ExperimentPlan plan = edfq::io::parse_plan(resolved);
  const fs::path out(args.out_dir);
  write_manifest_first(out, "compare", resolved, {"report.json", "reps.csv"});

  const edfq::harness::ConvergenceReport report = edfq::harness::run_experiment(plan);
  std::vector<edfq::harness::VerdictDetail> verdicts;
  bool all_pass = true;
  for (const std::string& metric : plan.metrics) {
    verdicts.push_back(edfq::harness::trend_verdict(report, metric, plan.rule));
    all_pass = all_pass && verdicts.back().verdict == edfq::harness::Verdict::Pass;
  }
  edfq::io::write_report_json(out / "report.json", report, verdicts);
  edfq::io::write_reps_csv(out / "reps.csv", report);
  for (const auto& v : verdicts) {
    std::cout << "compare: " << v.metric << " "
              << (v.verdict == edfq::harness::Verdict::Pass ? "PASS" : "FAIL");
    std::cout << " means=[";
    for (std::size_t i = 0; i < v.means.size(); ++i)
      std::cout << (i ? " " : "") << edfq::io::fmt_double(v.means[i]);
    std::cout << "]\n";
  }
  return all_pass ? kExitOk : kExitVerdict;
}

int cmd_example(double mu, double theta, double horizon, int grid, const std::string& out_dir) {
  edfq::oracle::ExampleParams params{mu, theta};
  params.validate();
  if (!(horizon > 0.0)) throw edfq::ConfigError("horizon must be > 0");
  const fs::path out(out_dir);
  const json resolved{{"mu", mu}, {"theta", theta}, {"horizon", horizon}, {"grid", grid}};
  write_manifest_first(out, "example", resolved, {"oracle.csv"});

  const auto detected = edfq::oracle::example_case(params);
  std::cout << "example: " << edfq::oracle::to_string(detected);
  if (detected == edfq::oracle::ExampleCase::Case3b) {
    const auto [a1, a2] = edfq::oracle::find_a1_a2(params);
    std::cout << " a1=" << edfq::io::fmt_double(a1) << " a2=" << edfq::io::fmt_double(a2);
  }
  std::cout << "\n";

  // same column layout as fluid.csv so the files diff directly
  std::ofstream csv(out / "oracle.csv");
  csv << "t,psi,h,eta,phi\n";
  for (int k = 0; k <= grid; ++k) {
    const double t = horizon * k / grid;
    const auto [phi, eta] = edfq::oracle::example_phi_eta(params, t);
    csv << edfq::io::fmt_double(t) << "," << edfq::io::fmt_double(1.0 + (1.0 - mu) * t) << ","
        << edfq::io::fmt_double(edfq::oracle::example_h(params, 0.0, t)) << ","
        << edfq::io::fmt_double(eta) << "," << edfq::io::fmt_double(phi) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EDF-b queue simulator, fluid-limit solver and convergence harness"};
  app.set_version_flag("--version", edfq::kVersion);
  app.require_subcommand(1);

  CommonArgs sim_args, fluid_args, compare_args;
  auto* sim_cmd = app.add_subcommand("simulate", "run one EDF-b simulation and export its trace");
  add_common(sim_cmd, sim_args);
  auto* fluid_cmd = app.add_subcommand("fluid", "solve the fluid limit on a time grid");
  add_common(fluid_cmd, fluid_args);
  auto* compare_cmd =
      app.add_subcommand("compare", "multi-N convergence experiment against the fluid limit");
  compare_cmd->add_option("--plan", compare_args.config_path, "JSON plan file");
  add_common(compare_cmd, compare_args);

  double ex_mu = 1.0, ex_theta = 1.0, ex_horizon = 10.0;
  int ex_grid = 4096;
  std::string ex_out = "out";
  auto* example_cmd =
      app.add_subcommand("example", "closed-form oracle curves for the worked configuration");
  example_cmd->add_option("--mu", ex_mu, "service rate, in (0, 1]")->required();
  example_cmd->add_option("--theta", ex_theta, "patience rate, > 0")->required();
  example_cmd->add_option("--horizon", ex_horizon, "time horizon");
  example_cmd->add_option("--grid", ex_grid, "grid resolution");
  example_cmd->add_option("--out", ex_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(sim_args);
    if (fluid_cmd->parsed()) return cmd_fluid(fluid_args);
    if (compare_cmd->parsed()) return cmd_compare(compare_args);
    if (example_cmd->parsed())
      return cmd_example(ex_mu, ex_theta, ex_horizon, ex_grid, ex_out);
  } catch (const edfq::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const edfq::AssumptionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
