#include "edfq/oracle.hpp"

#include <cmath>

#include "edfq/errors.hpp"
#include "edfq/numerics.hpp"

namespace edfq::oracle {

void ExampleParams::validate() const {
  if (!(mu > 0.0) || !(mu <= 1.0)) throw ConfigError("example requires mu in (0, 1]");
  if (!(theta > 0.0)) throw ConfigError("example requires theta > 0");
}

std::string to_string(ExampleCase c) {
  switch (c) {
    case ExampleCase::Case1: return "case1";
    case ExampleCase::Case2: return "case2";
    case ExampleCase::Case3a: return "case3a";
    case ExampleCase::Case3b: return "case3b";
  }
  return "?";
}

double case3_threshold(double theta) {
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::invalid_argument("case3_threshold needs theta in (0, 1)");
  return std::exp(std::log1p(-theta) + theta / (1.0 - theta) * std::log(theta));
}

ExampleCase example_case(const ExampleParams& p) {
  p.validate();
  if (p.theta >= 1.0) return ExampleCase::Case1;
  if (p.mu == 1.0) return ExampleCase::Case2;
  return 1.0 - p.mu >= case3_threshold(p.theta) ? ExampleCase::Case3a : ExampleCase::Case3b;
}

namespace {

// f(s) = 1 - mu + e^{-s} - e^{-theta s}; eta' in the Case-1 formula
double f_slope(const ExampleParams& p, double s) {
  return 1.0 - p.mu + std::exp(-s) - std::exp(-p.theta * s);
}

// A(s) = integral of f over [0, s]
double f_antiderivative(const ExampleParams& p, double s) {
  return (1.0 - p.mu) * s + (1.0 - std::exp(-s)) + (std::exp(-p.theta * s) - 1.0) / p.theta;
}

// eta along the always-reflecting branch: psi(t) - H(0, t)
double eta_case1(const ExampleParams& p, double t) {
  return 1.0 - 1.0 / p.theta + (1.0 - p.mu) * t - std::exp(-t) +
         std::exp(-p.theta * t) / p.theta;
}

double psi(const ExampleParams& p, double t) { return 1.0 + (1.0 - p.mu) * t; }

}  // namespace

std::pair<double, double> find_a1_a2(const ExampleParams& p) {
  if (example_case(p) != ExampleCase::Case3b)
    throw RegimeError("a1, a2 exist only in Case3b");
  // f decreases to its minimum at s_min and increases afterwards
  const double s_min = std::log(1.0 / p.theta) / (1.0 - p.theta);
  if (!(f_slope(p, 0.0) > 0.0) || !(f_slope(p, s_min) < 0.0))
    throw RootNotFound("a1: no sign change up to the minimizer (regime misclassified?)");
  const double a1 = num::bisect([&](double s) { return f_slope(p, s); }, 0.0, s_min, 1e-10);

  // second zero of f, beyond which A increases for good
  double hi = s_min;
  int guard = 0;
  while (f_slope(p, hi) < 0.0) {
    hi *= 2.0;
    if (++guard > 60) throw RootNotFound("a2: f never recovers above 0");
  }
  const double z2 = num::bisect([&](double s) { return f_slope(p, s); }, s_min, hi, 1e-12);

  const double level = f_antiderivative(p, a1);
  double hi2 = std::max(2.0 * z2, z2 + 1.0);
  guard = 0;
  while (f_antiderivative(p, hi2) < level) {
    hi2 *= 2.0;
    if (++guard > 60) throw RootNotFound("a2: A never recovers to A(a1)");
  }
  const double a2 =
      num::bisect([&](double s) { return f_antiderivative(p, s) - level; }, z2, hi2, 1e-10);
  return {a1, a2};
}

std::pair<double, double> example_phi_eta(const ExampleParams& p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  switch (example_case(p)) {
    case ExampleCase::Case1:
    case ExampleCase::Case3a: {
      const double eta = eta_case1(p, t);
      return {psi(p, t) - eta, eta};
    }
    case ExampleCase::Case2:
      return {1.0, 0.0};
    case ExampleCase::Case3b: {
      const auto [a1, a2] = find_a1_a2(p);
      double eta;
      if (t <= a1 || t >= a2) {
        eta = eta_case1(p, t);
      } else {
        eta = eta_case1(p, a1);
      }
      return {psi(p, t) - eta, eta};
    }
  }
  return {0.0, 0.0};
}

double example_h(const ExampleParams& p, double x, double t) {
  return std::exp(-x - t) + std::exp(-p.theta * x) * (1.0 - std::exp(-p.theta * t)) / p.theta;
}

}  // namespace edfq::oracle
