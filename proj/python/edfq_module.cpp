#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edfq/fluid.hpp"
#include "edfq/harness.hpp"
#include "edfq/io.hpp"
#include "edfq/oracle.hpp"
#include "edfq/simulator.hpp"
#include "edfq/version.hpp"

namespace py = pybind11;
using edfq::io::json;

namespace {

py::dict trace_to_dict(const edfq::sim::SimTrace& trace) {
  py::dict d;
  d["t"] = trace.grid;
  d["Q_scaled"] = trace.q_scaled;
  d["R_scaled"] = trace.r_scaled;
  d["X_scaled"] = trace.x_scaled;
  d["F"] = trace.frontier;
  d["C"] = trace.current;
  d["Z"] = trace.head_lead;
  d["arrivals"] = trace.arrivals;
  d["departures"] = trace.departures;
  d["reneged"] = trace.reneged;
  d["busy_time"] = trace.busy_time;
  py::list events;
  for (const auto& e : trace.events)
    events.append(py::make_tuple(e.time, edfq::sim::to_string(e.kind), e.customer));
  d["events"] = events;
  if (trace.first_empty_time) d["first_empty_time"] = *trace.first_empty_time;
  py::list snaps;
  for (const auto& row : trace.snapshots) {
    py::dict s;
    s["t"] = row.time;
    s["cf_mass_scaled"] = row.cf_mass_scaled;
    s["queue_mass_scaled"] = row.queue_scaled.total_mass();
    snaps.append(s);
  }
  d["snapshots"] = snaps;
  return d;
}

edfq::ModelConfig config_from_string(const std::string& config_json) {
  return edfq::io::parse_config(json::parse(config_json));
}

py::dict simulate(const std::string& config_json, int n_scale, std::uint64_t seed, int grid,
                  int snapshots) {
  edfq::ModelConfig config = config_from_string(config_json);
  if (n_scale > 0) config.params.n_scale = n_scale;
  if (seed != 0) config.params.seed = seed;
  edfq::sim::SimOptions options;
  options.output_grid = grid;
  options.snapshot_count = snapshots;
  edfq::RngStream init_rng = edfq::sim::make_initial_rng(config.params);
  edfq::sim::SimState state =
      edfq::sim::build_initial_state(config.initial, config.params, init_rng);
  edfq::sim::SimLaws laws = edfq::sim::make_laws(config, config.params);
  return trace_to_dict(edfq::sim::run(std::move(state), config.params, laws, options));
}

py::dict fluid_solve(const std::string& config_json, int grid) {
  edfq::ModelConfig config = config_from_string(config_json);
  edfq::fluid::FluidProblem prob(config.params.lambda, config.params.mu, config.patience_law,
                                 config.initial, config.params.horizon,
                                 config.params.horizon / grid);
  const bool super_or_critical = config.params.lambda >= config.params.mu;
  const edfq::fluid::FluidSolution sol =
      super_or_critical ? edfq::fluid::fluid_qr(prob) : edfq::fluid::fluid_subcritical(prob);
  py::dict d;
  d["t"] = sol.t;
  d["psi"] = sol.psi;
  d["h"] = sol.h;
  d["eta"] = sol.eta;
  d["phi"] = sol.phi;
  if (!sol.frontier.empty()) d["F"] = sol.frontier;
  if (sol.t_empty) d["T_bar"] = *sol.t_empty;
  return d;
}

py::dict compare(const std::string& plan_json) {
  const edfq::harness::ExperimentPlan plan = edfq::io::parse_plan(json::parse(plan_json));
  const edfq::harness::ConvergenceReport report = edfq::harness::run_experiment(plan);
  py::dict d;
  d["N_list"] = report.n_list;
  if (report.t_empty) d["T_bar"] = *report.t_empty;
  d["y_star"] = report.y_star;
  d["kappa"] = report.kappa;
  py::dict means;
  for (const char* metric : {"err_Q", "err_R", "err_F", "err_M", "cf_mass"})
    means[metric] = report.means(metric);
  d["means"] = means;
  py::dict verdicts;
  bool all_pass = true;
  for (const std::string& metric : plan.metrics) {
    const auto v = edfq::harness::trend_verdict(report, metric, plan.rule);
    verdicts[metric.c_str()] = v.verdict == edfq::harness::Verdict::Pass;
    all_pass = all_pass && v.verdict == edfq::harness::Verdict::Pass;
  }
  d["verdicts"] = verdicts;
  d["all_pass"] = all_pass;
  return d;
}

py::dict example(double mu, double theta, const std::vector<double>& times) {
  const edfq::oracle::ExampleParams p{mu, theta};
  py::dict d;
  d["case"] = edfq::oracle::to_string(edfq::oracle::example_case(p));
  if (edfq::oracle::example_case(p) == edfq::oracle::ExampleCase::Case3b) {
    const auto [a1, a2] = edfq::oracle::find_a1_a2(p);
    d["a1"] = a1;
    d["a2"] = a2;
  }
  std::vector<double> phi, eta;
  for (double t : times) {
    const auto [ph, et] = edfq::oracle::example_phi_eta(p, t);
    phi.push_back(ph);
    eta.push_back(et);
  }
  d["phi"] = phi;
  d["eta"] = eta;
  return d;
}

}  // namespace

PYBIND11_MODULE(_edfq, m) {
  m.doc() = "EDF-b queue simulator and fluid-limit solver";
  m.attr("__version__") = edfq::kVersion;

  py::class_<edfq::DistributionSpec>(m, "DistributionSpec")
      .def_static("exponential", &edfq::DistributionSpec::exponential, py::arg("rate"))
      .def_static("uniform", &edfq::DistributionSpec::uniform, py::arg("lo"), py::arg("hi"))
      .def_static("weibull", &edfq::DistributionSpec::weibull, py::arg("shape"), py::arg("scale"))
      .def_static("hyper_exponential", &edfq::DistributionSpec::hyper_exponential,
                  py::arg("weights"), py::arg("rates"))
      .def_static("deterministic", &edfq::DistributionSpec::deterministic, py::arg("value"))
      .def_static("empirical_grid", &edfq::DistributionSpec::empirical_grid, py::arg("points"),
                  py::arg("cdf_values"))
      .def("cdf", &edfq::DistributionSpec::cdf)
      .def("tail", &edfq::DistributionSpec::tail)
      .def("mean", &edfq::DistributionSpec::mean)
      .def("tail_integral", &edfq::DistributionSpec::tail_integral)
      .def("quantile", &edfq::DistributionSpec::quantile)
      .def("y_max", &edfq::DistributionSpec::y_max);

  py::class_<edfq::FiniteMeasure>(m, "FiniteMeasure")
      .def_static("point_masses", &edfq::FiniteMeasure::point_masses, py::arg("atoms"))
      .def_static("tail_grid", &edfq::FiniteMeasure::tail_grid, py::arg("points"),
                  py::arg("tails"))
      .def_static(
          "scaled_law",
          [](const edfq::DistributionSpec& law, double mass) {
            return edfq::FiniteMeasure::scaled_law(law, mass);
          },
          py::arg("law"), py::arg("mass"))
      .def("tail", &edfq::FiniteMeasure::tail)
      .def("total_mass", &edfq::FiniteMeasure::total_mass)
      .def("quantile", &edfq::FiniteMeasure::quantile)
      .def("scaled", &edfq::FiniteMeasure::scaled);

  m.def("y_star", &edfq::y_star, py::arg("patience"), py::arg("lambda_"), py::arg("mu"),
        "sup{y < y_max : lambda G(y) < mu}; inf when lambda <= mu");
  m.def("kolmogorov_distance", &edfq::kolmogorov_distance, py::arg("m1"), py::arg("m2"),
        py::arg("refine") = 1024);
  m.def("prohorov_upper_bound", &edfq::prohorov_upper_bound, py::arg("m1"), py::arg("m2"),
        py::arg("grid_step"));

  m.def("simulate", &simulate, py::arg("config_json"), py::arg("n_scale") = 0,
        py::arg("seed") = 0, py::arg("grid") = 512, py::arg("snapshots") = 32,
        "run one EDF-b simulation from a JSON config string");
  m.def("fluid_solve", &fluid_solve, py::arg("config_json"), py::arg("grid") = 4096,
        "solve the fluid limit from a JSON config string");
  m.def("compare", &compare, py::arg("plan_json"),
        "run a multi-N convergence experiment from a JSON plan string");
  m.def("example", &example, py::arg("mu"), py::arg("theta"), py::arg("times"),
        "closed-form oracle curves for the worked configuration");
  m.def("chi", [](const std::string& config_json, double x, double t) {
    edfq::ModelConfig config = config_from_string(config_json);
    edfq::fluid::FluidProblem prob(config.params.lambda, config.params.mu, config.patience_law,
                                   config.initial, config.params.horizon);
    return prob.chi(x, t);
  });
}
