#include "edfq/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edfq/errors.hpp"
#include "edfq/numerics.hpp"

namespace edfq::fluid {

FluidProblem::FluidProblem(double lambda_, double mu_, DistributionSpec patience_,
                           InitialCondition initial, double horizon_, double dt_)
    : lambda(lambda_),
      mu(mu_),
      patience(std::move(patience_)),
      q0(initial.q0),
      frontier0(initial.frontier0),
      horizon(horizon_),
      dt(dt_ > 0.0 ? dt_ : horizon_ / 4096.0) {
  if (!(lambda > 0.0) || !(mu > 0.0)) throw ConfigError("lambda and mu must be > 0");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
  std::string why;
  if (!patience.valid_fluid_patience(&why))
    throw AssumptionViolation("patience law: " + why);
  if (lambda > mu) {
    const double ys = y_star(patience, lambda, mu);
    if (!patience.continuous_at(ys))
      throw AssumptionViolation("patience cdf must be continuous at y*");
  }
  initial.validate_for_fluid(lambda, mu, patience);
}

double FluidProblem::h_potential(double x, double t) const {
  if (!(x >= 0.0) || !(t >= 0.0)) throw std::invalid_argument("h_potential needs x, t >= 0");
  return q0.tail(x + t) + lambda * patience.tail_integral(x, x + t);
}

double FluidProblem::chi(double x, double t) const {
  if (!(x > 0.0)) throw std::invalid_argument("chi needs x > 0");
  if (h_potential(0.0, t) <= x) return 0.0;
  double hi = 1.0;
  int guard = 0;
  while (h_potential(hi, t) > x) {
    hi *= 2.0;
    if (++guard > 60) throw BracketNotFound("chi: H(y, t) stays above x");
  }
  return num::bisect([&](double y) { return h_potential(y, t) - x; }, 0.0, hi, 1e-9);
}

bool FluidProblem::frontier_hypotheses_hold() const {
  if (q0_mass() <= 0.0) return false;
  // y_{0min} = 0
  if (q0.quantile(1e-12) > 1e-9) return false;
  // y_{0max} >= y_max
  const double ymax = patience.y_max();
  const double y0max = q0.support_upper();
  if (std::isfinite(ymax) && y0max + 1e-12 < ymax) return false;
  // G0bar strictly decreasing on the support (probed on a coarse grid)
  const int probes = 32;
  double prev = q0.tail(0.0);
  for (int i = 1; i <= probes; ++i) {
    const double a = y0max * i / probes;
    const double cur = q0.tail(a);
    if (cur >= prev && prev > 1e-9 * q0_mass()) return false;
    prev = cur;
  }
  return true;
}

std::pair<std::vector<double>, std::vector<double>> solve_sp(const std::vector<double>& psi,
                                                             const std::vector<double>& h) {
  if (psi.size() != h.size())
    throw GridMismatch("psi and h must share the grid (" + std::to_string(psi.size()) + " vs " +
                       std::to_string(h.size()) + ")");
  std::vector<double> eta(psi.size());
  std::vector<double> phi(psi.size());
  double running = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    running = std::max(running, psi[k] - h[k]);
    eta[k] = std::max(running, 0.0);
    phi[k] = psi[k] - eta[k];
  }
  return {std::move(phi), std::move(eta)};
}

namespace {

FluidSolution solve_on_grid(const FluidProblem& prob) {
  FluidSolution sol{prob, {}, {}, {}, {}, {}, {}, std::nullopt};
  const auto n = static_cast<std::size_t>(std::lround(prob.horizon / prob.dt));
  sol.t.resize(n + 1);
  sol.psi.resize(n + 1);
  sol.h.resize(n + 1);
  const double q0 = prob.q0_mass();
  for (std::size_t k = 0; k <= n; ++k) {
    const double tk = prob.horizon * static_cast<double>(k) / static_cast<double>(n);
    sol.t[k] = tk;
    sol.psi[k] = q0 + (prob.lambda - prob.mu) * tk;
    sol.h[k] = prob.h_potential(0.0, tk);
  }
  auto [phi, eta] = solve_sp(sol.psi, sol.h);
  sol.phi = std::move(phi);
  sol.eta = std::move(eta);
  return sol;
}

double interp(const std::vector<double>& grid, const std::vector<double>& vals, double time) {
  if (grid.empty()) throw std::out_of_range("empty fluid grid");
  if (time <= grid.front()) return vals.front();
  if (time >= grid.back()) return vals.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), time);
  const std::size_t j = static_cast<std::size_t>(it - grid.begin());
  const double w = (time - grid[j - 1]) / (grid[j] - grid[j - 1]);
  return vals[j - 1] + w * (vals[j] - vals[j - 1]);
}

// continuous-time eta: grid running max extended over the partial cell by
// subsampling the smooth input psi - h
double eta_continuous(const FluidSolution& sol, double time) {
  const auto& t = sol.t;
  if (time <= t.front()) return sol.eta.front();
  if (time >= t.back()) return sol.eta.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t j = static_cast<std::size_t>(it - t.begin());
  double running = sol.eta[j - 1];
  const double q0 = sol.problem.q0_mass();
  const int sub = 64;
  for (int i = 1; i <= sub; ++i) {
    const double s = t[j - 1] + (time - t[j - 1]) * i / sub;
    const double gap = q0 + (sol.problem.lambda - sol.problem.mu) * s - sol.problem.h_potential(0.0, s);
    running = std::max(running, gap);
  }
  return std::max(running, 0.0);
}

}  // namespace

double FluidSolution::psi_at(double time) const { return interp(t, psi, time); }
double FluidSolution::h_at(double time) const { return interp(t, h, time); }
double FluidSolution::eta_at(double time) const { return interp(t, eta, time); }
double FluidSolution::phi_at(double time) const { return interp(t, phi, time); }

double FluidSolution::phi_bar_at(double time) const {
  if (t_empty && time > *t_empty) return 0.0;
  return std::max(phi_at(time), 0.0);
}

double FluidSolution::frontier_at(double time) const {
  if (frontier.empty())
    throw RegimeError("frontier is not defined for the subcritical fluid limit");
  return interp(t, frontier, time);
}

double FluidSolution::limit_tail(double time, double a) const {
  const double f = frontier_at(time);
  return problem.h_potential(std::max(f, a), time);
}

FiniteMeasure FluidSolution::limit_measure(double time) const {
  const double f = frontier_at(time);
  const FluidProblem prob = problem;  // self-contained copy for the closure
  const double mass = prob.h_potential(f, time);
  return FiniteMeasure::analytic(
      [prob, f, time](double a) { return prob.h_potential(std::max(f, a), time); }, mass);
}

FluidSolution fluid_qr(const FluidProblem& prob) {
  if (prob.lambda < prob.mu)
    throw AssumptionViolation("fluid_qr requires lambda >= mu (critical or supercritical regime)");
  if (!(prob.q0_mass() > 0.0))
    throw AssumptionViolation("initial measure must have positive mass when lambda >= mu");
  FluidSolution sol = solve_on_grid(prob);
  sol.frontier.resize(sol.t.size());
  // phi >= min(Q(0), min h) > 0 here, so chi is well defined
  for (std::size_t k = 0; k < sol.t.size(); ++k)
    sol.frontier[k] = prob.chi(sol.phi[k], sol.t[k]);
  return sol;
}

const std::vector<double>& fluid_frontier(const FluidSolution& sol) {
  if (sol.frontier.empty())
    throw RegimeError("frontier is not defined for the subcritical fluid limit");
  return sol.frontier;
}

FluidSolution fluid_subcritical(const FluidProblem& prob) {
  if (!(prob.lambda < prob.mu))
    throw AssumptionViolation("fluid_subcritical requires lambda < mu");
  FluidSolution sol = solve_on_grid(prob);
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    if (sol.phi[k] <= 0.0) {
      if (k == 0) {
        sol.t_empty = 0.0;
        break;
      }
      // refine between the bracketing grid nodes on the continuous evaluator
      auto phi_cont = [&](double s) {
        return prob.q0_mass() + (prob.lambda - prob.mu) * s - eta_continuous(sol, s);
      };
      sol.t_empty = num::bisect(phi_cont, sol.t[k - 1], sol.t[k], 1e-9);
      break;
    }
  }
  return sol;
}

}  // namespace edfq::fluid
