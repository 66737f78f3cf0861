#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "edfq/model_config.hpp"

namespace edfq::fluid {

// Fluid-scale problem data. Construction validates the standing assumptions:
// patience cdf strictly increasing on (0, y_max) with G(0) = 0 (rejects
// deterministic patience), continuity at y* when lambda > mu, and a
// continuous initial cumulative supported above frontier0.
struct FluidProblem {
  double lambda;
  double mu;
  DistributionSpec patience;
  FiniteMeasure q0;
  double frontier0;
  double horizon;
  double dt;

  FluidProblem(double lambda, double mu, DistributionSpec patience, InitialCondition initial,
               double horizon, double dt = 0.0);

  double q0_mass() const { return q0.total_mass(); }
  double initial_tail(double x) const { return q0.tail(x); }

  // H(x, t) = G0bar(x + t) + lambda * integral of Gbar over [x, x + t]
  double h_potential(double x, double t) const;

  // inf{y >= 0 : H(y, t) <= x}; bracketing + bisection, abs tol 1e-9 in y
  double chi(double x, double t) const;

  // y_{0min} = 0, G0bar strictly decreasing, y_{0max} >= y_max
  bool frontier_hypotheses_hold() const;
};

struct FluidSolution {
  FluidProblem problem;
  std::vector<double> t;
  std::vector<double> psi;
  std::vector<double> h;
  std::vector<double> eta;
  std::vector<double> phi;
  std::vector<double> frontier;     // empty in the subcritical regime
  std::optional<double> t_empty;    // T-bar; only set in the subcritical regime

  double psi_at(double time) const;
  double h_at(double time) const;
  double eta_at(double time) const;
  double phi_at(double time) const;
  double phi_bar_at(double time) const;  // phi truncated to 0 after T-bar
  double frontier_at(double time) const;

  // tail of the limit measure: H(F(t) v a, t); requires lambda >= mu
  double limit_tail(double time, double a) const;
  FiniteMeasure limit_measure(double time) const;
};

// eta = running max of (psi - h)^+, phi = psi - eta, on a common grid
std::pair<std::vector<double>, std::vector<double>> solve_sp(const std::vector<double>& psi,
                                                             const std::vector<double>& h);

// critical / supercritical fluid limit of (Q/N, R/N); requires lambda >= mu
FluidSolution fluid_qr(const FluidProblem& prob);

// subcritical limit: same SP, phi truncated at its first zero T-bar (refined
// by bisection on the continuous evaluator); requires lambda < mu
FluidSolution fluid_subcritical(const FluidProblem& prob);

// F(t_k) = chi(phi(t_k), t_k) on the grid (already populated by fluid_qr)
const std::vector<double>& fluid_frontier(const FluidSolution& sol);

}  // namespace edfq::fluid
