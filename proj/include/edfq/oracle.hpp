#pragma once

#include <string>
#include <utility>

namespace edfq::oracle {

// Closed forms for the worked configuration with lambda = 1, Q(0) = 1,
// initial tail e^{-x} and patience cdf 1 - e^{-theta x}.
struct ExampleParams {
  double mu;     // in (0, 1]
  double theta;  // > 0
  void validate() const;
};

enum class ExampleCase { Case1, Case2, Case3a, Case3b };

std::string to_string(ExampleCase c);

ExampleCase example_case(const ExampleParams& p);

// (1 - theta) * theta^{theta / (1 - theta)}, evaluated in log space; the
// Case-3 flat-reflection threshold for theta < 1
double case3_threshold(double theta);

// a1: smallest zero of f(s) = 1 - mu + e^{-s} - e^{-theta s};
// a2: largest s with A(s) = A(a1) where A is the antiderivative of f.
// Only defined in Case3b.
std::pair<double, double> find_a1_a2(const ExampleParams& p);

// closed-form fluid pair (phi(t), eta(t)) for the detected case
std::pair<double, double> example_phi_eta(const ExampleParams& p, double t);

double example_h(const ExampleParams& p, double x, double t);

}  // namespace edfq::oracle
