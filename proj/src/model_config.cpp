#include "edfq/model_config.hpp"

#include <cmath>

#include "edfq/errors.hpp"
#include "edfq/numerics.hpp"

namespace edfq {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "?";
}

void SystemParams::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (!(mu > 0.0)) throw ConfigError("mu must be > 0");
  if (n_scale < 1) throw ConfigError("N must be >= 1");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
}

void InitialCondition::validate() const {
  if (!(frontier0 >= 0.0)) throw ConfigError("frontier0 must be >= 0");
  if (mass() > 0.0) {
    // Q0([0, frontier0]) = 0
    const double below = mass() - q0.tail(frontier0);
    if (below > 1e-9 * std::max(1.0, mass()))
      throw ConfigError("initial measure has mass at or below frontier0");
  }
}

void InitialCondition::validate_for_fluid(double lambda, double mu,
                                          const DistributionSpec& patience) const {
  validate();
  if (q0.has_atoms() && mass() > 0.0)
    throw AssumptionViolation(
        "initial measure must have a continuous cumulative function (point masses rejected)");
  if (lambda > mu) {
    const double ys = y_star(patience, lambda, mu);
    if (frontier0 > ys + 1e-12)
      throw AssumptionViolation("frontier0 must lie in [0, y*] when lambda > mu");
  }
}

void ModelConfig::validate() const {
  params.validate();
  initial.validate();
  if (!(arrival_law.mean() > 0.0) || !std::isfinite(arrival_law.mean()))
    throw ConfigError("arrival law must have positive finite mean");
  if (!(service_law.mean() > 0.0) || !std::isfinite(service_law.mean()))
    throw ConfigError("service law must have positive finite mean");
  if (!(patience_law.mean() > 0.0)) throw ConfigError("patience law must have positive mean");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw ConfigError("N_list entries must be >= 1");
    if (i > 0 && n_list[i] <= n_list[i - 1])
      throw ConfigError("N_list must be strictly increasing");
  }
}

}  // namespace edfq
