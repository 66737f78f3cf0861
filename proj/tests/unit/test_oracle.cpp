#include <doctest.h>

#include <cmath>

#include "edfq/errors.hpp"
#include "edfq/oracle.hpp"

using namespace edfq;
using namespace edfq::oracle;

namespace {

double f_of(const ExampleParams& p, double s) {
  return 1.0 - p.mu + std::exp(-s) - std::exp(-p.theta * s);
}

double a_of(const ExampleParams& p, double s) {
  return (1.0 - p.mu) * s + (1.0 - std::exp(-s)) + (std::exp(-p.theta * s) - 1.0) / p.theta;
}

}  // namespace

TEST_CASE("case classification") {
  CHECK(example_case({0.5, 2.0}) == ExampleCase::Case1);
  CHECK(example_case({1.0, 2.0}) == ExampleCase::Case1);
  CHECK(example_case({1.0, 0.5}) == ExampleCase::Case2);
  // threshold at theta = 0.5: (1 - 0.5) * 0.5^{0.5/0.5} = 0.25
  CHECK(case3_threshold(0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(example_case({0.99, 0.5}) == ExampleCase::Case3b);  // 1 - mu = 0.01 < 0.25
  CHECK(example_case({0.9, 0.5}) == ExampleCase::Case3b);   // 1 - mu = 0.10 < 0.25
  CHECK(example_case({0.7, 0.5}) == ExampleCase::Case3a);   // 1 - mu = 0.30 >= 0.25
  CHECK_THROWS_AS(example_case({1.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(example_case({0.5, 0.0}), ConfigError);
}

TEST_CASE("phi and eta closed forms") {
  SUBCASE("case 2 is flat") {
    const ExampleParams p{1.0, 0.5};
    for (double t : {0.0, 0.3, 1.0, 5.0, 20.0}) {
      const auto [phi, eta] = example_phi_eta(p, t);
      CHECK(phi == 1.0);
      CHECK(eta == 0.0);
    }
  }
  SUBCASE("case 1 starts at the initial mass") {
    const ExampleParams p{0.5, 2.0};
    const auto [phi0, eta0] = example_phi_eta(p, 0.0);
    CHECK(phi0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eta0 == doctest::Approx(0.0).epsilon(1e-14));
    // formula check at a generic point
    const double t = 1.7;
    const auto [phi, eta] = example_phi_eta(p, t);
    CHECK(phi == doctest::Approx(0.5 + std::exp(-t) - 0.5 * std::exp(-2.0 * t)));
    CHECK(eta ==
          doctest::Approx(1.0 - 0.5 + 0.5 * t - std::exp(-t) + 0.5 * std::exp(-2.0 * t)));
    // phi + eta reconstructs psi
    CHECK(phi + eta == doctest::Approx(1.0 + (1.0 - p.mu) * t).epsilon(1e-13));
  }
  SUBCASE("case 3a equals the case 1 formulas") {
    const ExampleParams p{0.7, 0.5};
    for (double t : {0.2, 1.1, 4.0}) {
      const auto [phi, eta] = example_phi_eta(p, t);
      CHECK(eta == doctest::Approx(1.0 - 1.0 / p.theta + (1.0 - p.mu) * t - std::exp(-t) +
                                   std::exp(-p.theta * t) / p.theta));
      CHECK(phi + eta == doctest::Approx(1.0 + (1.0 - p.mu) * t));
    }
  }
  SUBCASE("case 3b is flat on [a1, a2]") {
    const ExampleParams p{0.99, 0.5};
    const auto [a1, a2] = find_a1_a2(p);
    const auto eta_a1 = example_phi_eta(p, a1).second;
    for (double w : {0.1, 0.5, 0.9}) {
      const double t = a1 + w * (a2 - a1);
      CHECK(example_phi_eta(p, t).second == doctest::Approx(eta_a1).epsilon(1e-12));
    }
    // outside the window the running formula resumes
    const double t_after = a2 + 0.5;
    CHECK(example_phi_eta(p, t_after).second ==
          doctest::Approx(1.0 - 1.0 / p.theta + (1.0 - p.mu) * t_after - std::exp(-t_after) +
                          std::exp(-p.theta * t_after) / p.theta));
  }
}

TEST_CASE("a1 and a2 defining properties") {
  const ExampleParams p{0.99, 0.5};
  const auto [a1, a2] = find_a1_a2(p);
  CHECK(a2 > a1);
  CHECK(std::abs(f_of(p, a1)) < 1e-9);
  CHECK(std::abs(a_of(p, a2) - a_of(p, a1)) < 1e-9);
  // f stays positive before a1 (fine scan)
  for (double s = 1e-4; s < a1; s += a1 / 2000.0) CHECK(f_of(p, s) > 0.0);
}

TEST_CASE("a1 and a2 against a dense-grid oracle") {
  const ExampleParams p{0.99, 0.5};
  const auto [a1, a2] = find_a1_a2(p);

  // dense scan at step 1e-6 for the first sign change of f
  double a1_scan = -1.0;
  for (double s = 1e-6; s < 5.0; s += 1e-6) {
    if (f_of(p, s) <= 0.0) {
      a1_scan = s;
      break;
    }
  }
  REQUIRE(a1_scan > 0.0);
  CHECK(std::abs(a1 - a1_scan) < 1e-5);

  // dense scan beyond the dip for A(s) recovering to A(a1); with mu = 0.99
  // the drift 1 - mu = 0.01 is tiny, so the recovery lands near s = 100
  const double level = a_of(p, a1_scan);
  double a2_scan = -1.0;
  for (double s = a1_scan + 1e-4; s < 150.0; s += 1e-4) {
    if (f_of(p, s) > 0.0 && a_of(p, s) >= level) {
      a2_scan = s;
      break;
    }
  }
  REQUIRE(a2_scan > 0.0);
  CHECK(std::abs(a2 - a2_scan) < 5e-4);
}

TEST_CASE("a1 a2 regime guard") {
  CHECK_THROWS_AS(find_a1_a2({0.5, 2.0}), RegimeError);
  CHECK_THROWS_AS(find_a1_a2({0.7, 0.5}), RegimeError);  // Case3a
}

TEST_CASE("case boundary: case 2 meets case 1 as theta approaches 1") {
  // at mu = 1 the case-1 eta vanishes as theta -> 1-, so phi -> 1 = case-2 phi
  for (double t : {0.5, 2.0}) {
    const auto [phi_c2, eta_c2] = example_phi_eta({1.0, 0.9999}, t);
    const ExampleParams almost1{1.0, 1.0};
    const auto [phi_c1, eta_c1] = example_phi_eta(almost1, t);
    CHECK(phi_c2 == 1.0);
    CHECK(std::abs(phi_c1 - phi_c2) < 2e-4);
    CHECK(std::abs(eta_c1 - eta_c2) < 2e-4);
  }
}

TEST_CASE("example H closed form") {
  const ExampleParams p{0.5, 1.0};
  // theta = 1 collapses H to e^{-x}
  for (double x : {0.0, 0.5, 2.0})
    for (double t : {0.0, 1.0, 3.0})
      CHECK(example_h(p, x, t) == doctest::Approx(std::exp(-x)).epsilon(1e-13));
}
