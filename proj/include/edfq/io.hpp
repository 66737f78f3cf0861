#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "edfq/fluid.hpp"
#include "edfq/harness.hpp"
#include "edfq/model_config.hpp"
#include "edfq/simulator.hpp"

namespace edfq::io {

using nlohmann::json;

// shortest decimal that round-trips the double
std::string fmt_double(double v);

DistributionSpec parse_law(const json& j, const std::string& context);
json law_to_json(const DistributionSpec& d);

// Config schema (unknown keys rejected): lambda, mu, N, N_list, horizon, seed,
// arrival_law, service_law, patience_law, initial_measure, frontier0,
// grid, snapshots, event_cap
ModelConfig parse_config(const json& j);

// Plan schema: config, N_list, replications, kappa, frontier_eps,
// frontier_pass_fraction, cf_mass_max, grid, snapshots, threads, metrics,
// thresholds{final_ratio, inversion_tol, inversions_allowed}
harness::ExperimentPlan parse_plan(const json& j);

json load_json_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::string version;
  std::string created_utc;
  std::string out_dir;
  json config;  // resolved snapshot (config or plan, per command)
  std::vector<std::string> outputs;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
json load_manifest(const std::filesystem::path& path);

void write_events_csv(const std::filesystem::path& path, const std::vector<sim::Event>& events);
void write_paths_csv(const std::filesystem::path& path, const sim::SimTrace& trace);
void write_measure_csv(const std::filesystem::path& path, const FiniteMeasure& m,
                       int grid_points = 256);
// one CSV per snapshot plus an index file
void write_snapshots(const std::filesystem::path& dir, const sim::SimTrace& trace);
void write_fluid_csv(const std::filesystem::path& path, const fluid::FluidSolution& sol);
void write_fluid_tails(const std::filesystem::path& dir, const fluid::FluidSolution& sol,
                       const std::vector<double>& times, double a_max, int points);
void write_report_json(const std::filesystem::path& path, const harness::ConvergenceReport& report,
                       const std::vector<harness::VerdictDetail>& verdicts);
void write_reps_csv(const std::filesystem::path& path, const harness::ConvergenceReport& report);

}  // namespace edfq::io
