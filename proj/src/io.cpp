#include "edfq/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "edfq/errors.hpp"

namespace edfq::io {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

double require_number(const json& j, const std::string& key, const std::string& context) {
  if (!j.contains(key)) throw ConfigError(context + ": missing key '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(context + ": key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

DistributionSpec parse_law(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError(context + ": law must be an object with a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exponential") {
    check_keys(j, {"kind", "rate"}, context);
    return DistributionSpec::exponential(require_number(j, "rate", context));
  }
  if (kind == "uniform") {
    check_keys(j, {"kind", "lo", "hi"}, context);
    return DistributionSpec::uniform(require_number(j, "lo", context),
                                     require_number(j, "hi", context));
  }
  if (kind == "weibull") {
    check_keys(j, {"kind", "shape", "scale"}, context);
    return DistributionSpec::weibull(require_number(j, "shape", context),
                                     require_number(j, "scale", context));
  }
  if (kind == "hyper_exponential") {
    check_keys(j, {"kind", "weights", "rates"}, context);
    if (!j.contains("weights") || !j.contains("rates"))
      throw ConfigError(context + ": hyper_exponential needs weights and rates");
    return DistributionSpec::hyper_exponential(j.at("weights").get<std::vector<double>>(),
                                               j.at("rates").get<std::vector<double>>());
  }
  if (kind == "deterministic") {
    check_keys(j, {"kind", "value"}, context);
    return DistributionSpec::deterministic(require_number(j, "value", context));
  }
  if (kind == "empirical_grid") {
    check_keys(j, {"kind", "points", "cdf"}, context);
    if (!j.contains("points") || !j.contains("cdf"))
      throw ConfigError(context + ": empirical_grid needs points and cdf");
    return DistributionSpec::empirical_grid(j.at("points").get<std::vector<double>>(),
                                            j.at("cdf").get<std::vector<double>>());
  }
  throw ConfigError(context + ": unknown law kind '" + kind + "'");
}

json law_to_json(const DistributionSpec& d) {
  json j;
  switch (d.kind()) {
    case DistKind::Exponential:
      j = {{"kind", "exponential"}, {"rate", d.param0()}};
      break;
    case DistKind::Uniform:
      j = {{"kind", "uniform"}, {"lo", d.param0()}, {"hi", d.param1()}};
      break;
    case DistKind::Weibull:
      j = {{"kind", "weibull"}, {"shape", d.param0()}, {"scale", d.param1()}};
      break;
    case DistKind::HyperExponential:
      j = {{"kind", "hyper_exponential"}, {"weights", d.values_a()}, {"rates", d.values_b()}};
      break;
    case DistKind::Deterministic:
      j = {{"kind", "deterministic"}, {"value", d.param0()}};
      break;
    case DistKind::EmpiricalGrid:
      j = {{"kind", "empirical_grid"}, {"points", d.values_a()}, {"cdf", d.values_b()}};
      break;
  }
  return j;
}

namespace {

FiniteMeasure parse_initial_measure(const json& j) {
  const std::string ctx = "initial_measure";
  if (!j.is_object()) throw ConfigError(ctx + " must be an object");
  if (j.contains("law")) {
    check_keys(j, {"mass", "law"}, ctx);
    return FiniteMeasure::scaled_law(parse_law(j.at("law"), ctx + ".law"),
                                     require_number(j, "mass", ctx));
  }
  if (j.contains("points")) {
    check_keys(j, {"points", "tails"}, ctx);
    return FiniteMeasure::tail_grid(j.at("points").get<std::vector<double>>(),
                                    j.at("tails").get<std::vector<double>>());
  }
  if (j.contains("mass")) {
    check_keys(j, {"mass"}, ctx);
    if (require_number(j, "mass", ctx) != 0.0)
      throw ConfigError(ctx + ": nonzero mass needs a 'law' or 'points'/'tails'");
    return FiniteMeasure::zero();
  }
  throw ConfigError(ctx + ": expected {mass, law}, {points, tails} or {mass: 0}");
}

}  // namespace

ModelConfig parse_config(const json& j) {
  check_keys(j,
             {"lambda", "mu", "N", "N_list", "horizon", "seed", "arrival_law", "service_law",
              "patience_law", "initial_measure", "frontier0", "grid", "snapshots", "event_cap",
              "frontier_update_on_idle_arrival"},
             "config");
  ModelConfig c;
  c.params.lambda = require_number(j, "lambda", "config");
  c.params.mu = require_number(j, "mu", "config");
  c.params.horizon = require_number(j, "horizon", "config");
  c.params.seed = j.value("seed", 0ULL);
  if (j.contains("N_list")) c.n_list = j.at("N_list").get<std::vector<int>>();
  if (j.contains("N")) {
    c.params.n_scale = j.at("N").get<int>();
  } else if (!c.n_list.empty()) {
    c.params.n_scale = c.n_list.front();
  }
  if (!j.contains("patience_law")) throw ConfigError("config: missing key 'patience_law'");
  c.patience_law = parse_law(j.at("patience_law"), "patience_law");
  if (j.contains("arrival_law")) c.arrival_law = parse_law(j.at("arrival_law"), "arrival_law");
  if (j.contains("service_law")) c.service_law = parse_law(j.at("service_law"), "service_law");
  if (j.contains("initial_measure")) c.initial.q0 = parse_initial_measure(j.at("initial_measure"));
  if (j.contains("frontier0")) c.initial.frontier0 = require_number(j, "frontier0", "config");
  c.validate();
  return c;
}

harness::ExperimentPlan parse_plan(const json& j) {
  check_keys(j,
             {"config", "N_list", "replications", "kappa", "frontier_eps",
              "frontier_pass_fraction", "cf_mass_max", "grid", "snapshots", "threads", "metrics",
              "thresholds"},
             "plan");
  if (!j.contains("config")) throw ConfigError("plan: missing key 'config'");
  harness::ExperimentPlan p;
  p.config = parse_config(j.at("config"));
  if (j.contains("N_list")) p.n_list = j.at("N_list").get<std::vector<int>>();
  else p.n_list = p.config.n_list;
  p.replications = j.value("replications", 20);
  p.kappa = j.value("kappa", -1.0);
  p.frontier_eps = j.value("frontier_eps", 0.1);
  p.frontier_pass_fraction = j.value("frontier_pass_fraction", 0.95);
  p.cf_mass_max = j.value("cf_mass_max", 0.05);
  p.grid = j.value("grid", 512);
  p.snapshots = j.value("snapshots", 32);
  p.threads = j.value("threads", 0);
  if (j.contains("metrics")) p.metrics = j.at("metrics").get<std::vector<std::string>>();
  else p.metrics = {"err_Q", "err_R"};
  if (j.contains("thresholds")) {
    const json& th = j.at("thresholds");
    check_keys(th, {"final_ratio", "inversion_tol", "inversions_allowed"}, "plan.thresholds");
    p.rule.final_ratio = th.value("final_ratio", 0.5);
    p.rule.inversion_tol = th.value("inversion_tol", 0.2);
    p.rule.inversions_allowed = th.value("inversions_allowed", 1);
  }
  p.validate();
  return p;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  json j;
  j["tool"] = "edfq";
  j["version"] = manifest.version;
  j["command"] = manifest.command;
  j["created_utc"] = manifest.created_utc;
  j["out_dir"] = manifest.out_dir;
  j["config"] = manifest.config;
  j["outputs"] = manifest.outputs;
  auto out = open_out(dir / "manifest.json");
  out << j.dump(2) << "\n";
}

json load_manifest(const std::filesystem::path& path) {
  json j = load_json_file(path);
  if (!j.contains("config") || !j.contains("command"))
    throw ConfigError("not a run manifest: " + path.string());
  return j;
}

void write_events_csv(const std::filesystem::path& path, const std::vector<sim::Event>& events) {
  auto out = open_out(path);
  out << "time,kind,customer\n";
  for (const sim::Event& e : events)
    out << fmt_double(e.time) << "," << sim::to_string(e.kind) << "," << e.customer << "\n";
}

void write_paths_csv(const std::filesystem::path& path, const sim::SimTrace& trace) {
  auto out = open_out(path);
  out << "t,Q_scaled,R_scaled,X_scaled,F,C,Z\n";
  for (std::size_t j = 0; j < trace.grid.size(); ++j) {
    out << fmt_double(trace.grid[j]) << "," << fmt_double(trace.q_scaled[j]) << ","
        << fmt_double(trace.r_scaled[j]) << "," << fmt_double(trace.x_scaled[j]) << ","
        << fmt_double(trace.frontier[j]) << "," << fmt_double(trace.current[j]) << ","
        << fmt_double(trace.head_lead[j]) << "\n";
  }
}

void write_measure_csv(const std::filesystem::path& path, const FiniteMeasure& m,
                       int grid_points) {
  auto out = open_out(path);
  out << "a,tail\n";
  if (m.has_atoms()) {
    out << fmt_double(0.0) << "," << fmt_double(m.tail(0.0)) << "\n";
    for (double a : m.breakpoints())
      out << fmt_double(a) << "," << fmt_double(m.tail(a)) << "\n";
  } else {
    const double upper = m.support_upper();
    for (int i = 0; i <= grid_points; ++i) {
      const double a = upper * i / grid_points;
      out << fmt_double(a) << "," << fmt_double(m.tail(a)) << "\n";
    }
  }
}

void write_snapshots(const std::filesystem::path& dir, const sim::SimTrace& trace) {
  std::filesystem::create_directories(dir);
  auto index = open_out(dir / "index.csv");
  index << "snapshot,t,cf_mass_scaled,queue_file,potential_file\n";
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    const auto& row = trace.snapshots[i];
    char qname[40], pname[40];
    std::snprintf(qname, sizeof(qname), "queue_%04zu.csv", i);
    std::snprintf(pname, sizeof(pname), "potential_%04zu.csv", i);
    write_measure_csv(dir / qname, row.queue_scaled);
    write_measure_csv(dir / pname, row.potential_scaled);
    index << i << "," << fmt_double(row.time) << "," << fmt_double(row.cf_mass_scaled) << ","
          << qname << "," << pname << "\n";
  }
}

void write_fluid_csv(const std::filesystem::path& path, const fluid::FluidSolution& sol) {
  auto out = open_out(path);
  const bool has_frontier = !sol.frontier.empty();
  out << (has_frontier ? "t,psi,h,eta,phi,F\n" : "t,psi,h,eta,phi,phi_bar\n");
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    out << fmt_double(sol.t[k]) << "," << fmt_double(sol.psi[k]) << "," << fmt_double(sol.h[k])
        << "," << fmt_double(sol.eta[k]) << "," << fmt_double(sol.phi[k]) << ",";
    if (has_frontier)
      out << fmt_double(sol.frontier[k]);
    else
      out << fmt_double(sol.phi_bar_at(sol.t[k]));
    out << "\n";
  }
}

void write_fluid_tails(const std::filesystem::path& dir, const fluid::FluidSolution& sol,
                       const std::vector<double>& times, double a_max, int points) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < times.size(); ++i) {
    char name[40];
    std::snprintf(name, sizeof(name), "tail_%04zu.csv", i);
    auto out = open_out(dir / name);
    out << "a,tail\n";
    for (int k = 0; k <= points; ++k) {
      const double a = a_max * k / points;
      out << fmt_double(a) << "," << fmt_double(sol.limit_tail(times[i], a)) << "\n";
    }
  }
}

void write_report_json(const std::filesystem::path& path, const harness::ConvergenceReport& report,
                       const std::vector<harness::VerdictDetail>& verdicts) {
  json j;
  j["N_list"] = report.n_list;
  j["regime"] = to_string(report.regime);
  j["kappa"] = report.kappa;
  if (std::isfinite(report.y_star)) j["y_star"] = report.y_star;
  if (report.t_empty) j["T_bar"] = *report.t_empty;
  json per_n = json::array();
  for (std::size_t i = 0; i < report.n_list.size(); ++i) {
    json row;
    row["N"] = report.n_list[i];
    for (const char* metric : {"err_Q", "err_R", "err_F", "err_M", "cf_mass"}) {
      const auto s = report.stats(i, metric);
      if (std::isnan(s.mean)) continue;
      row[metric] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"q50", s.q50},
                     {"q90", s.q90}};
    }
    row["frontier_bound_fraction"] = report.frontier_bound_fraction(i);
    row["emptied_fraction"] = report.empty_fraction(i);
    per_n.push_back(row);
  }
  j["per_N"] = per_n;
  json verdicts_json = json::array();
  for (const auto& v : verdicts) {
    verdicts_json.push_back({{"metric", v.metric},
                             {"verdict", v.verdict == harness::Verdict::Pass ? "pass" : "fail"},
                             {"means", v.means},
                             {"reason", v.reason}});
  }
  j["verdicts"] = verdicts_json;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_reps_csv(const std::filesystem::path& path, const harness::ConvergenceReport& report) {
  auto out = open_out(path);
  out << "N,seed,err_Q,err_R,err_F,err_M,frontier_bound_ok,cf_mass_sup,first_empty,queue_emptied\n";
  for (std::size_t i = 0; i < report.n_list.size(); ++i) {
    for (const auto& r : report.reps[i]) {
      out << r.n_scale << "," << r.seed << "," << fmt_double(r.err_q) << "," << fmt_double(r.err_r)
          << "," << fmt_double(r.err_f) << "," << fmt_double(r.err_m) << ","
          << (r.frontier_bound_ok ? 1 : 0) << "," << fmt_double(r.cf_mass_sup) << ",";
      if (r.first_empty) out << fmt_double(*r.first_empty);
      out << "," << (r.queue_emptied ? 1 : 0) << "\n";
    }
  }
}

}  // namespace edfq::io
