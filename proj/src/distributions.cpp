#include "edfq/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "edfq/errors.hpp"
#include "edfq/numerics.hpp"

namespace edfq {

std::string to_string(DistKind k) {
  switch (k) {
    case DistKind::Exponential: return "exponential";
    case DistKind::Uniform: return "uniform";
    case DistKind::Weibull: return "weibull";
    case DistKind::HyperExponential: return "hyper_exponential";
    case DistKind::Deterministic: return "deterministic";
    case DistKind::EmpiricalGrid: return "empirical_grid";
  }
  return "?";
}

DistributionSpec DistributionSpec::exponential(double rate) {
  if (!(rate > 0.0)) throw ConfigError("exponential rate must be > 0");
  return {DistKind::Exponential, rate, 0.0};
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo)) throw ConfigError("uniform needs 0 <= lo < hi");
  return {DistKind::Uniform, lo, hi};
}

DistributionSpec DistributionSpec::weibull(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw ConfigError("weibull needs shape > 0 and scale > 0");
  return {DistKind::Weibull, shape, scale};
}

DistributionSpec DistributionSpec::hyper_exponential(std::vector<double> weights,
                                                     std::vector<double> rates) {
  if (weights.empty() || weights.size() != rates.size())
    throw ConfigError("hyper_exponential needs matching nonempty weights and rates");
  double wsum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !(rates[i] > 0.0))
      throw ConfigError("hyper_exponential weights and rates must be > 0");
    wsum += weights[i];
  }
  for (auto& w : weights) w /= wsum;
  DistributionSpec d(DistKind::HyperExponential, 0.0, 0.0);
  d.a_ = std::move(weights);
  d.b_ = std::move(rates);
  return d;
}

DistributionSpec DistributionSpec::deterministic(double value) {
  if (!(value >= 0.0)) throw ConfigError("deterministic value must be >= 0");
  return {DistKind::Deterministic, value, 0.0};
}

DistributionSpec DistributionSpec::empirical_grid(std::vector<double> points,
                                                  std::vector<double> cdf_values) {
  if (points.size() < 2 || points.size() != cdf_values.size())
    throw ConfigError("empirical_grid needs >= 2 matching points and cdf values");
  if (!(points.front() >= 0.0)) throw ConfigError("empirical_grid points must be >= 0");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i] < points[i - 1]) throw ConfigError("empirical_grid points must be nondecreasing");
    if (cdf_values[i] < cdf_values[i - 1])
      throw ConfigError("empirical_grid cdf values must be nondecreasing");
  }
  if (!(cdf_values.front() >= 0.0) || std::abs(cdf_values.back() - 1.0) > 1e-9)
    throw ConfigError("empirical_grid cdf must lie in [0,1] and reach 1 at the last knot");
  cdf_values.back() = 1.0;
  DistributionSpec d(DistKind::EmpiricalGrid, 0.0, 0.0);
  d.a_ = std::move(points);
  d.b_ = std::move(cdf_values);
  return d;
}

double DistributionSpec::cdf(double x) const {
  if (x < 0.0) return 0.0;
  switch (kind_) {
    case DistKind::Exponential:
      return -std::expm1(-p0_ * x);
    case DistKind::Uniform:
      if (x <= p0_) return 0.0;
      if (x >= p1_) return 1.0;
      return (x - p0_) / (p1_ - p0_);
    case DistKind::Weibull:
      return -std::expm1(-std::pow(x / p1_, p0_));
    case DistKind::HyperExponential: {
      double s = 0.0;
      for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * std::exp(-b_[i] * x);
      return 1.0 - s;
    }
    case DistKind::Deterministic:
      return x >= p0_ ? 1.0 : 0.0;
    case DistKind::EmpiricalGrid: {
      if (x < a_.front()) return 0.0;
      if (x >= a_.back()) return b_.back();
      // right-continuous: at a duplicated knot take the last stored value
      auto it = std::upper_bound(a_.begin(), a_.end(), x);
      const std::size_t j = static_cast<std::size_t>(it - a_.begin());
      const double x1 = a_[j - 1], x2 = a_[j];
      const double v1 = b_[j - 1], v2 = b_[j];
      if (x2 == x1) return v2;
      return v1 + (v2 - v1) * (x - x1) / (x2 - x1);
    }
  }
  return 0.0;
}

double DistributionSpec::mean() const {
  switch (kind_) {
    case DistKind::Exponential: return 1.0 / p0_;
    case DistKind::Uniform: return 0.5 * (p0_ + p1_);
    case DistKind::Weibull: return p1_ * std::tgamma(1.0 + 1.0 / p0_);
    case DistKind::HyperExponential: {
      double s = 0.0;
      for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] / b_[i];
      return s;
    }
    case DistKind::Deterministic: return p0_;
    case DistKind::EmpiricalGrid: return tail_integral(0.0, a_.back());
  }
  return 0.0;
}

double DistributionSpec::tail_integral(double a, double b) const {
  if (!(0.0 <= a) || !(a <= b)) throw std::invalid_argument("tail_integral needs 0 <= a <= b");
  if (a == b) return 0.0;
  switch (kind_) {
    case DistKind::Exponential:
      return (std::exp(-p0_ * a) - std::exp(-p0_ * b)) / p0_;
    case DistKind::Uniform: {
      // tail is 1 on [0, lo], linear down to 0 on [lo, hi], then 0
      auto anti = [&](double x) {  // integral of tail over [0, x]
        if (x <= p0_) return x;
        if (x >= p1_) return p0_ + 0.5 * (p1_ - p0_);
        const double u = (x - p0_) / (p1_ - p0_);
        return p0_ + (p1_ - p0_) * (u - 0.5 * u * u);
      };
      return anti(b) - anti(a);
    }
    case DistKind::Weibull:
      return num::adaptive_simpson([&](double u) { return tail(u); }, a, b, 1e-10);
    case DistKind::HyperExponential: {
      double s = 0.0;
      for (std::size_t i = 0; i < a_.size(); ++i)
        s += a_[i] * (std::exp(-b_[i] * a) - std::exp(-b_[i] * b)) / b_[i];
      return s;
    }
    case DistKind::Deterministic:
      return std::max(0.0, std::min(b, p0_) - std::min(a, p0_));
    case DistKind::EmpiricalGrid: {
      // tail is piecewise linear between knots; trapezoid per segment is exact
      double total = 0.0;
      double prev_x = a;
      double prev_t = tail(a);
      for (std::size_t j = 0; j < a_.size(); ++j) {
        const double x = a_[j];
        if (x <= prev_x) continue;
        if (x >= b) break;
        total += 0.5 * (prev_t + tail(x)) * (x - prev_x);
        prev_x = x;
        prev_t = tail(x);
      }
      total += 0.5 * (prev_t + tail(b)) * (b - prev_x);
      return total;
    }
  }
  return 0.0;
}

double DistributionSpec::quantile(double u) const {
  if (!(u >= 0.0) || !(u < 1.0)) throw std::invalid_argument("quantile needs u in [0,1)");
  switch (kind_) {
    case DistKind::Exponential:
      return -std::log1p(-u) / p0_;
    case DistKind::Uniform:
      return p0_ + u * (p1_ - p0_);
    case DistKind::Weibull:
      return p1_ * std::pow(-std::log1p(-u), 1.0 / p0_);
    case DistKind::HyperExponential: {
      // no elementary inverse; monotone bisection on the cdf
      if (u == 0.0) return 0.0;
      double hi = 1.0;
      while (cdf(hi) < u) hi *= 2.0;
      return num::bisect([&](double x) { return cdf(x) - u; }, 0.0, hi, 1e-12);
    }
    case DistKind::Deterministic:
      return p0_;
    case DistKind::EmpiricalGrid: {
      if (u <= b_.front()) return a_.front();
      auto it = std::lower_bound(b_.begin(), b_.end(), u);
      std::size_t j = static_cast<std::size_t>(it - b_.begin());
      const double v1 = b_[j - 1], v2 = b_[j];
      if (v2 == v1) return a_[j];
      return a_[j - 1] + (a_[j] - a_[j - 1]) * (u - v1) / (v2 - v1);
    }
  }
  return 0.0;
}

double DistributionSpec::y_max() const {
  switch (kind_) {
    case DistKind::Exponential:
    case DistKind::Weibull:
    case DistKind::HyperExponential:
      return num::kInf;
    case DistKind::Uniform:
      return p1_;
    case DistKind::Deterministic:
      return p0_;
    case DistKind::EmpiricalGrid: {
      for (std::size_t j = 0; j < b_.size(); ++j)
        if (b_[j] >= 1.0) return a_[j];
      return a_.back();
    }
  }
  return num::kInf;
}

bool DistributionSpec::continuous_at(double x) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(x));
  switch (kind_) {
    case DistKind::Deterministic:
      return std::abs(x - p0_) > tol;
    case DistKind::EmpiricalGrid:
      for (std::size_t j = 1; j < a_.size(); ++j)
        if (a_[j] == a_[j - 1] && b_[j] != b_[j - 1] && std::abs(a_[j] - x) <= tol) return false;
      return true;
    default:
      return true;
  }
}

bool DistributionSpec::valid_fluid_patience(std::string* why) const {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (cdf(0.0) != 0.0) return fail("G(0) must be 0");
  if (!continuous_at(0.0)) return fail("G must be continuous at 0");
  switch (kind_) {
    case DistKind::Exponential:
    case DistKind::Weibull:
    case DistKind::HyperExponential:
      return true;
    case DistKind::Uniform:
      if (p0_ > 0.0) return fail("G flat on (0, lo): not strictly increasing below y_max");
      return true;
    case DistKind::Deterministic:
      return fail("deterministic patience: G is not strictly increasing and jumps at the value");
    case DistKind::EmpiricalGrid: {
      if (a_.front() > 0.0 && b_.front() == 0.0)
        return fail("G flat on (0, first knot): not strictly increasing");
      const double ymax = y_max();
      for (std::size_t j = 1; j < a_.size(); ++j) {
        if (a_[j - 1] >= ymax) break;
        if (a_[j] > a_[j - 1] && b_[j] == b_[j - 1] && b_[j] < 1.0)
          return fail("G flat between knots inside (0, y_max)");
      }
      return true;
    }
  }
  return true;
}

double y_star(const DistributionSpec& g, double lambda, double mu) {
  if (!(lambda > 0.0) || !(mu > 0.0)) throw std::invalid_argument("y_star needs lambda, mu > 0");
  if (lambda <= mu) return num::kInf;
  const double target = mu / lambda;  // in (0, 1)
  const double ymax = g.y_max();
  double hi = std::isfinite(ymax) ? ymax : 1.0;
  if (!std::isfinite(ymax)) {
    while (g.cdf(hi) < target) hi *= 2.0;
  }
  return num::bisect_boundary([&](double y) { return g.cdf(y) < target; }, 0.0, hi, 1e-12);
}

}  // namespace edfq
