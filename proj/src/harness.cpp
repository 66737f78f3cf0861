#include "edfq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "edfq/errors.hpp"
#include "edfq/numerics.hpp"

namespace edfq::harness {

void ExperimentPlan::validate() const {
  config.validate();
  if (n_list.size() < 3) throw ConfigError("N_list needs at least 3 entries");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw ConfigError("N_list must be strictly increasing");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (grid < 2) throw ConfigError("grid must be >= 2");
  if (!(rule.final_ratio >= 0.0)) throw ConfigError("thresholds.final_ratio must be >= 0");
  if (!(rule.inversion_tol >= 0.0)) throw ConfigError("thresholds.inversion_tol must be >= 0");
}

std::uint64_t replication_seed(std::uint64_t base, std::size_t n_index, int replication) {
  return splitmix64(splitmix64(base) ^ splitmix64(0x5151ULL + 1000003ULL * n_index +
                                                  static_cast<std::uint64_t>(replication)));
}

std::vector<double> ConvergenceReport::metric_values(std::size_t n_index,
                                                     const std::string& metric) const {
  std::vector<double> vals;
  for (const RepResult& r : reps.at(n_index)) {
    double v;
    if (metric == "err_Q") v = r.err_q;
    else if (metric == "err_R") v = r.err_r;
    else if (metric == "err_F") v = r.err_f;
    else if (metric == "err_M") v = r.err_m;
    else if (metric == "cf_mass") v = r.cf_mass_sup;
    else throw std::invalid_argument("unknown metric: " + metric);
    if (!std::isnan(v)) vals.push_back(v);
  }
  return vals;
}

MetricStats ConvergenceReport::stats(std::size_t n_index, const std::string& metric) const {
  auto vals = metric_values(n_index, metric);
  MetricStats s;
  if (vals.empty()) {
    s.mean = s.min = s.max = s.q50 = s.q90 = std::nan("");
    return s;
  }
  std::sort(vals.begin(), vals.end());
  double sum = 0.0;
  for (double v : vals) sum += v;
  s.mean = sum / static_cast<double>(vals.size());
  s.min = vals.front();
  s.max = vals.back();
  auto quant = [&](double q) {
    const double pos = q * static_cast<double>(vals.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, vals.size() - 1);
    return vals[lo] + (pos - static_cast<double>(lo)) * (vals[hi] - vals[lo]);
  };
  s.q50 = quant(0.5);
  s.q90 = quant(0.9);
  return s;
}

std::vector<double> ConvergenceReport::means(const std::string& metric) const {
  std::vector<double> m;
  for (std::size_t i = 0; i < n_list.size(); ++i) m.push_back(stats(i, metric).mean);
  return m;
}

double ConvergenceReport::frontier_bound_fraction(std::size_t n_index) const {
  const auto& rs = reps.at(n_index);
  if (rs.empty()) return 0.0;
  double ok = 0.0;
  for (const RepResult& r : rs) ok += r.frontier_bound_ok ? 1.0 : 0.0;
  return ok / static_cast<double>(rs.size());
}

double ConvergenceReport::empty_fraction(std::size_t n_index) const {
  const auto& rs = reps.at(n_index);
  if (rs.empty()) return 0.0;
  double c = 0.0;
  for (const RepResult& r : rs) c += r.queue_emptied ? 1.0 : 0.0;
  return c / static_cast<double>(rs.size());
}

namespace {

RepResult run_one(const ExperimentPlan& plan, const fluid::FluidSolution& sol, int n_scale,
                  std::uint64_t seed, double y_star_value, double kappa) {
  const bool super_or_critical = plan.config.params.lambda >= plan.config.params.mu;
  SystemParams params = plan.config.params;
  params.n_scale = n_scale;
  params.seed = seed;

  RngStream init_rng = sim::make_initial_rng(params);
  sim::SimState state = sim::build_initial_state(plan.config.initial, params, init_rng);
  sim::SimLaws laws = sim::make_laws(plan.config, params);
  sim::SimOptions options;
  options.output_grid = plan.grid;
  options.snapshot_count = plan.snapshots;
  sim::SimTrace trace = sim::run(std::move(state), params, laws, options);

  RepResult res;
  res.n_scale = n_scale;
  res.seed = seed;
  res.first_empty = trace.first_empty_time;
  res.queue_emptied = trace.first_empty_time.has_value();

  double eq = 0.0, er = 0.0, ef = 0.0;
  for (std::size_t j = 0; j < trace.grid.size(); ++j) {
    const double t = trace.grid[j];
    const double phi = super_or_critical ? sol.phi_at(t) : sol.phi_bar_at(t);
    eq = std::max(eq, std::abs(trace.q_scaled[j] - phi));
    er = std::max(er, std::abs(trace.r_scaled[j] - sol.eta_at(t)));
    if (super_or_critical && t >= kappa)
      ef = std::max(ef, std::abs(trace.frontier[j] - sol.frontier_at(t)));
  }
  res.err_q = eq;
  res.err_r = er;
  res.err_f = super_or_critical ? ef : std::nan("");

  if (super_or_critical) {
    double em = 0.0;
    for (const sim::SnapshotRow& row : trace.snapshots) {
      if (row.time < kappa) continue;
      em = std::max(em, kolmogorov_distance(row.queue_scaled, sol.limit_measure(row.time)));
    }
    res.err_m = em;
  } else {
    res.err_m = std::nan("");
  }

  res.frontier_bound_ok = trace.sup_frontier() <= y_star_value + plan.frontier_eps;
  double cf = 0.0;
  for (const sim::SnapshotRow& row : trace.snapshots) cf = std::max(cf, row.cf_mass_scaled);
  res.cf_mass_sup = cf;
  return res;
}

}  // namespace

ConvergenceReport run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const auto& cfg = plan.config;
  std::string why;
  if (!cfg.patience_law.valid_fluid_patience(&why))
    throw ConfigError("fluid comparison refused: " + why);

  const bool super_or_critical = cfg.params.lambda >= cfg.params.mu;
  fluid::FluidProblem prob(cfg.params.lambda, cfg.params.mu, cfg.patience_law, cfg.initial,
                           cfg.params.horizon);
  fluid::FluidSolution sol =
      super_or_critical ? fluid::fluid_qr(prob) : fluid::fluid_subcritical(prob);

  ConvergenceReport report;
  report.n_list = plan.n_list;
  report.regime = cfg.params.regime();
  report.t_empty = sol.t_empty;
  report.y_star = y_star(cfg.patience_law, cfg.params.lambda, cfg.params.mu);
  report.kappa = plan.kappa >= 0.0
                     ? plan.kappa
                     : (prob.frontier_hypotheses_hold() ? 0.0 : 0.05 * cfg.params.horizon);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = plan.threads > 0 ? static_cast<unsigned>(plan.threads) : hw;

  for (std::size_t i = 0; i < plan.n_list.size(); ++i) {
    const int n_scale = plan.n_list[i];
    std::vector<RepResult> results(static_cast<std::size_t>(plan.replications));
    std::vector<std::future<RepResult>> futures;
    for (int r = 0; r < plan.replications; ++r) {
      const std::uint64_t seed = replication_seed(cfg.params.seed, i, r);
      futures.push_back(std::async(
          workers > 1 ? std::launch::async : std::launch::deferred,
          [&plan, &sol, n_scale, seed, &report] {
            return run_one(plan, sol, n_scale, seed, report.y_star, report.kappa);
          }));
      if (futures.size() == workers || r + 1 == plan.replications) {
        for (std::size_t f = 0; f < futures.size(); ++f) {
          const std::size_t idx = static_cast<std::size_t>(r) + 1 - futures.size() + f;
          results[idx] = futures[f].get();
        }
        futures.clear();
      }
    }
    report.reps.push_back(std::move(results));
  }
  return report;
}

VerdictDetail trend_verdict(const ConvergenceReport& report, const std::string& metric,
                            const TrendRule& rule) {
  if (report.n_list.size() < 3)
    throw std::invalid_argument("trend_verdict needs at least 3 N values");
  VerdictDetail detail;
  detail.metric = metric;
  detail.means = report.means(metric);
  const auto& m = detail.means;
  for (double v : m) {
    if (std::isnan(v)) {
      detail.reason = "metric unavailable in this regime";
      detail.verdict = Verdict::Fail;
      return detail;
    }
  }

  int inversions = 0;
  std::ostringstream why;
  bool ok = true;
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (m[i] > m[i - 1]) {
      ++inversions;
      const double larger = std::max(m[i], m[i - 1]);
      if (inversions > rule.inversions_allowed) {
        ok = false;
        why << "more than " << rule.inversions_allowed << " inversion(s); ";
      }
      if (!(m[i] - m[i - 1] < rule.inversion_tol * larger)) {
        ok = false;
        why << "inversion at N=" << report.n_list[i] << " exceeds " << rule.inversion_tol
            << " of the larger value; ";
      }
    }
  }
  if (!(m.back() <= rule.final_ratio * m.front())) {
    ok = false;
    why << "final mean " << m.back() << " > " << rule.final_ratio << " * first mean " << m.front()
        << "; ";
  }
  detail.verdict = ok ? Verdict::Pass : Verdict::Fail;
  detail.reason = ok ? "nonincreasing trend with sufficient final reduction" : why.str();
  return detail;
}

}  // namespace edfq::harness
