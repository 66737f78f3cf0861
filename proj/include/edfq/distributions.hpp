#pragma once

#include <string>
#include <vector>

#include "edfq/rng.hpp"

namespace edfq {

enum class DistKind {
  Exponential,
  Uniform,
  Weibull,
  HyperExponential,
  Deterministic,
  EmpiricalGrid,
};

std::string to_string(DistKind k);

// Parametric law on [0, inf). Immutable after construction; all evaluators are
// pure. EmpiricalGrid interpolates the cdf piecewise-linearly between knots;
// a duplicated knot encodes a jump.
class DistributionSpec {
 public:
  static DistributionSpec exponential(double rate);
  static DistributionSpec uniform(double lo, double hi);
  static DistributionSpec weibull(double shape, double scale);
  static DistributionSpec hyper_exponential(std::vector<double> weights, std::vector<double> rates);
  static DistributionSpec deterministic(double value);
  static DistributionSpec empirical_grid(std::vector<double> points, std::vector<double> cdf_values);

  DistKind kind() const { return kind_; }

  double cdf(double x) const;
  double tail(double x) const { return 1.0 - cdf(x); }
  double mean() const;

  // integral of tail over [a, b]; closed form where the kind admits one,
  // adaptive quadrature (abs tol 1e-10) otherwise
  double tail_integral(double a, double b) const;

  // smallest x with cdf(x) >= u, u in [0, 1)
  double quantile(double u) const;
  double sample(RngStream& rng) const { return quantile(rng.uniform01()); }

  // inf{x : cdf(x) = 1}; +inf for laws with unbounded support
  double y_max() const;

  bool continuous_at(double x) const;
  // strictly increasing cdf on (0, y_max) with cdf(0) = 0 and no jump at 0
  bool valid_fluid_patience(std::string* why = nullptr) const;

  // accessors used by serialization
  const std::vector<double>& values_a() const { return a_; }
  const std::vector<double>& values_b() const { return b_; }
  double param0() const { return p0_; }
  double param1() const { return p1_; }

 private:
  DistributionSpec(DistKind k, double p0, double p1) : kind_(k), p0_(p0), p1_(p1) {}
  DistKind kind_;
  double p0_ = 0.0;
  double p1_ = 0.0;
  std::vector<double> a_;  // weights / grid points
  std::vector<double> b_;  // rates / cdf values
};

// sup{y < y_max : lambda * G(y) < mu}; +inf when lambda <= mu
double y_star(const DistributionSpec& g, double lambda, double mu);

}  // namespace edfq
