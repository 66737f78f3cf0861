#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edfq/distributions.hpp"
#include "edfq/measures.hpp"

namespace edfq {

enum class Regime { Subcritical, Critical, Supercritical };

std::string to_string(Regime r);

struct SystemParams {
  double lambda = 1.0;  // fluid arrival rate; the N-th system uses N * lambda
  double mu = 1.0;      // fluid service rate; the N-th system uses N * mu
  int n_scale = 1;      // N
  double horizon = 1.0;
  std::uint64_t seed = 0;

  Regime regime() const {
    if (lambda > mu) return Regime::Supercritical;
    if (lambda < mu) return Regime::Subcritical;
    return Regime::Critical;
  }
  void validate() const;
};

// Fluid initial state: measure Q0 on (frontier0, inf) plus the frontier seed F(0).
struct InitialCondition {
  FiniteMeasure q0 = FiniteMeasure::zero();
  double frontier0 = 0.0;

  double mass() const { return q0.total_mass(); }
  void validate() const;
  // additional checks required before fluid comparison: continuous cumulative,
  // support above frontier0, frontier0 <= y* when lambda > mu
  void validate_for_fluid(double lambda, double mu, const DistributionSpec& patience) const;
};

struct ModelConfig {
  SystemParams params;
  std::vector<int> n_list;
  DistributionSpec arrival_law = DistributionSpec::exponential(1.0);  // unit-mean shape
  DistributionSpec service_law = DistributionSpec::exponential(1.0);  // unit-mean shape
  DistributionSpec patience_law = DistributionSpec::exponential(1.0);
  InitialCondition initial;

  void validate() const;
};

}  // namespace edfq
