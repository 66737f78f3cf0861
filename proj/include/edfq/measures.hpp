#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "edfq/distributions.hpp"

namespace edfq {

enum class MeasureRepr { PointMasses, TailGrid, Analytic };

// Finite measure on [0, inf) represented through its right tail a -> m(a, inf).
// Immutable; evaluators are pure.
class FiniteMeasure {
 public:
  // atoms: (location >= 0, weight > 0); sorted and merged on construction
  static FiniteMeasure point_masses(std::vector<std::pair<double, double>> atoms);
  // points strictly increasing, tails nonincreasing and >= 0; linear between knots
  static FiniteMeasure tail_grid(std::vector<double> points, std::vector<double> tails);
  static FiniteMeasure analytic(std::function<double(double)> tail, double total_mass,
                                std::function<double(double)> quantile = {},
                                double support_hint = -1.0);
  // mass * law tail, with the law's quantile for sampling
  static FiniteMeasure scaled_law(const DistributionSpec& law, double mass);
  static FiniteMeasure zero();

  MeasureRepr repr() const { return repr_; }
  double total_mass() const { return mass_; }

  double tail(double a) const;         // m((a, inf))
  double tail_closed(double a) const;  // m([a, inf))
  double mass_interval_oc(double a, double b) const { return tail(a) - tail(b); }  // m((a, b])
  double mass_interval_cc(double a, double b) const;                               // m([a, b])

  // x with m([0, x]) = u * total_mass, u in [0, 1)
  double quantile(double u) const;

  FiniteMeasure scaled(double factor) const;

  // locations where the tail can kink or jump (atoms / grid knots)
  std::vector<double> breakpoints() const;
  // a with tail(a) <= eps * total_mass
  double support_upper(double eps = 1e-12) const;
  bool has_atoms() const { return repr_ == MeasureRepr::PointMasses; }

 private:
  FiniteMeasure() = default;
  MeasureRepr repr_ = MeasureRepr::PointMasses;
  double mass_ = 0.0;
  // point masses: locations + suffix weight sums; tail grid: points + tails
  std::vector<double> xs_;
  std::vector<double> ws_;      // atom weights (PointMasses only)
  std::vector<double> suffix_;  // suffix sums, suffix_[i] = sum of ws_[i..]
  std::vector<double> tails_;   // TailGrid values
  std::function<double(double)> tail_fn_;
  std::function<double(double)> quantile_fn_;
  double support_hint_ = -1.0;
};

// sup over a >= 0 of |m1(a,inf) - m2(a,inf)|, evaluated at atom locations
// (both one-sided values) plus a refinement grid for continuous parts
double kolmogorov_distance(const FiniteMeasure& m1, const FiniteMeasure& m2, int refine = 1024);

// Upper bound for the Prohorov distance via grid search over epsilon with
// closed half-line test sets [a, inf) and [0, a] in both directions.
// The returned value exceeds the half-line relaxation by at most grid_step.
double prohorov_upper_bound(const FiniteMeasure& m1, const FiniteMeasure& m2, double grid_step);

struct MeasurePath {
  std::vector<double> times;
  std::vector<FiniteMeasure> measures;
};

}  // namespace edfq
