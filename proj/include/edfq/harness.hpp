#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edfq/fluid.hpp"
#include "edfq/model_config.hpp"
#include "edfq/simulator.hpp"

namespace edfq::harness {

struct TrendRule {
  int inversions_allowed = 1;
  double inversion_tol = 0.2;  // inversion magnitude < tol * larger value
  double final_ratio = 0.5;    // mean at max N <= final_ratio * mean at min N
};

struct ExperimentPlan {
  ModelConfig config;
  std::vector<int> n_list;
  int replications = 20;
  double kappa = -1.0;  // frontier comparison left cutoff; < 0 = auto
  double frontier_eps = 0.1;
  double frontier_pass_fraction = 0.95;
  double cf_mass_max = 0.05;
  int grid = 512;
  int snapshots = 32;
  int threads = 0;  // 0 = hardware concurrency
  TrendRule rule;
  std::vector<std::string> metrics;  // subset of {err_Q, err_R, err_F, err_M}

  void validate() const;
};

struct RepResult {
  int n_scale = 0;
  std::uint64_t seed = 0;
  double err_q = 0.0;
  double err_r = 0.0;
  double err_f = 0.0;  // NaN when the frontier comparison is disabled
  double err_m = 0.0;  // NaN when the measure comparison is disabled
  bool frontier_bound_ok = true;
  double cf_mass_sup = 0.0;
  std::optional<double> first_empty;
  bool queue_emptied = false;
};

struct MetricStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
};

struct ConvergenceReport {
  std::vector<int> n_list;
  std::vector<std::vector<RepResult>> reps;  // reps[i] for n_list[i]
  double y_star = 0.0;                       // +inf when lambda <= mu
  std::optional<double> t_empty;             // fluid T-bar (subcritical)
  double kappa = 0.0;
  Regime regime = Regime::Critical;

  std::vector<double> metric_values(std::size_t n_index, const std::string& metric) const;
  MetricStats stats(std::size_t n_index, const std::string& metric) const;
  std::vector<double> means(const std::string& metric) const;
  double frontier_bound_fraction(std::size_t n_index) const;
  double empty_fraction(std::size_t n_index) const;
};

enum class Verdict { Pass, Fail };

struct VerdictDetail {
  Verdict verdict = Verdict::Fail;
  std::string metric;
  std::vector<double> means;
  std::string reason;
};

// runs the full (N x replication) grid against a single precomputed fluid
// solution; deterministic given config.params.seed, replications in parallel
ConvergenceReport run_experiment(const ExperimentPlan& plan);

// Pass iff means are nonincreasing across consecutive N (at most
// rule.inversions_allowed inversions, each < rule.inversion_tol of the larger
// value) and mean at max N <= rule.final_ratio * mean at min N.
VerdictDetail trend_verdict(const ConvergenceReport& report, const std::string& metric,
                            const TrendRule& rule = {});

std::uint64_t replication_seed(std::uint64_t base, std::size_t n_index, int replication);

}  // namespace edfq::harness
