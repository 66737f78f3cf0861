#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "edfq/errors.hpp"
#include "edfq/fluid.hpp"
#include "edfq/oracle.hpp"
#include "edfq/rng.hpp"

using namespace edfq;
using namespace edfq::fluid;

namespace {

InitialCondition example_initial() {
  InitialCondition ic;
  ic.q0 = FiniteMeasure::scaled_law(DistributionSpec::exponential(1.0), 1.0);
  ic.frontier0 = 0.0;
  return ic;
}

FluidProblem example_problem(double mu, double theta, double horizon = 10.0, double dt = 0.0) {
  return FluidProblem(1.0, mu, DistributionSpec::exponential(theta), example_initial(), horizon,
                      dt);
}

// piecewise-linear path with random knots, |values| <= range
std::vector<double> random_pl(RngStream& rng, const std::vector<double>& grid, double start,
                              double range) {
  const int knots = 3 + static_cast<int>(rng.uniform01() * 6);
  std::vector<double> kx{grid.front()}, kv{start};
  for (int i = 1; i <= knots; ++i) {
    kx.push_back(grid.front() + (grid.back() - grid.front()) * i / knots);
    kv.push_back(range * (2.0 * rng.uniform01() - 1.0));
  }
  std::vector<double> out;
  out.reserve(grid.size());
  std::size_t seg = 1;
  for (double t : grid) {
    while (seg + 1 < kx.size() && t > kx[seg]) ++seg;
    const double w = (t - kx[seg - 1]) / (kx[seg] - kx[seg - 1]);
    out.push_back(kv[seg - 1] + w * (kv[seg] - kv[seg - 1]));
  }
  return out;
}

}  // namespace

TEST_CASE("H closed form for the worked configuration") {
  const auto prob = example_problem(0.5, 0.7);
  const oracle::ExampleParams p{0.5, 0.7};
  for (double x : {0.0, 0.3, 1.0, 2.5})
    for (double t : {0.0, 0.2, 1.0, 4.0})
      CHECK(prob.h_potential(x, t) == doctest::Approx(oracle::example_h(p, x, t)).epsilon(1e-12));
  // t = 0 reduces to the initial tail
  for (double x : {0.0, 0.4, 2.0})
    CHECK(prob.h_potential(x, 0.0) == doctest::Approx(std::exp(-x)).epsilon(1e-13));
  // monotone in x
  RngStream rng(17);
  for (int i = 0; i < 50; ++i) {
    const double t = 5.0 * rng.uniform01();
    double x1 = 3.0 * rng.uniform01();
    double x2 = 3.0 * rng.uniform01();
    if (x1 > x2) std::swap(x1, x2);
    CHECK(prob.h_potential(x2, t) <= prob.h_potential(x1, t) + 1e-12);
  }
}

TEST_CASE("transport equation residual is O(dt)") {
  // forward differences; residual |dH/dt - dH/dx - lambda Gbar(x)| = O(step)
  const auto prob = example_problem(0.5, 0.7);
  auto residual = [&](double x, double t, double step) {
    const double dt_term = (prob.h_potential(x, t + step) - prob.h_potential(x, t)) / step;
    const double dx_term = (prob.h_potential(x + step, t) - prob.h_potential(x, t)) / step;
    return std::abs(dt_term - dx_term - prob.lambda * prob.patience.tail(x));
  };
  for (double step : {1e-2, 1e-3}) {
    double worst = 0.0;
    for (double x = 0.1; x <= 2.0; x += 0.17)
      for (double t = 0.1; t <= 4.0; t += 0.23) worst = std::max(worst, residual(x, t, step));
    CHECK(worst <= 5.0 * step);
  }
}

TEST_CASE("solve_sp closed forms") {
  SUBCASE("linear ramp against a flat barrier") {
    std::vector<double> grid, psi, h;
    for (int k = 0; k <= 1000; ++k) {
      const double t = 3.0 * k / 1000;
      grid.push_back(t);
      psi.push_back(t);
      h.push_back(1.0);
    }
    const auto [phi, eta] = solve_sp(psi, h);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(eta[k] == doctest::Approx(std::max(grid[k] - 1.0, 0.0)).epsilon(1e-12));
      CHECK(phi[k] == doctest::Approx(std::min(grid[k], 1.0)).epsilon(1e-12));
    }
  }
  SUBCASE("inactive barrier returns psi") {
    std::vector<double> psi{0.0, 0.5, 0.2, 0.7};
    std::vector<double> h{1.0, 1.0, 1.0, 1.0};
    const auto [phi, eta] = solve_sp(psi, h);
    CHECK(phi == psi);
    for (double e : eta) CHECK(e == 0.0);
  }
  SUBCASE("grid mismatch") {
    std::vector<double> psi{0.0, 1.0};
    std::vector<double> h{0.0};
    CHECK_THROWS_AS(solve_sp(psi, h), GridMismatch);
  }
}

TEST_CASE("skorohod properties on random piecewise-linear inputs") {
  RngStream rng(2024);
  std::vector<double> grid;
  for (int k = 0; k <= 512; ++k) grid.push_back(k / 512.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto h = random_pl(rng, grid, 1.0 + rng.uniform01(), 2.0);
    auto psi = random_pl(rng, grid, h.front() * rng.uniform01(), 2.0);
    double modulus = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k)
      modulus = std::max(modulus, std::abs(psi[k] - h[k] - psi[k - 1] + h[k - 1]));
    const auto [phi, eta] = solve_sp(psi, h);
    CHECK(eta.front() == 0.0);  // psi(0) <= h(0) by construction
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(phi[k] <= h[k] + 1e-9);
      CHECK(phi[k] == psi[k] - eta[k]);
      if (k > 0) {
        CHECK(eta[k] >= eta[k - 1]);
        // discrete complementarity: growth only at the barrier
        if (eta[k] > eta[k - 1] + 1e-12) CHECK(std::abs(phi[k] - h[k]) <= modulus + 1e-9);
      }
    }
    // Lipschitz property of the map, constant 2
    auto psi2 = psi;
    double sup_in = 0.0;
    for (std::size_t k = 0; k < psi2.size(); ++k) {
      const double bump = 0.3 * (2.0 * rng.uniform01() - 1.0);
      psi2[k] += bump;
      sup_in = std::max(sup_in, std::abs(bump));
    }
    const auto [phi2, eta2] = solve_sp(psi2, h);
    double sup_out = 0.0;
    for (std::size_t k = 0; k < phi2.size(); ++k)
      sup_out = std::max(sup_out, std::abs(phi2[k] - phi[k]));
    CHECK(sup_out <= 2.0 * sup_in + 1e-12);
  }
}

TEST_CASE("fluid_qr matches the closed-form oracle") {
  struct Point {
    double mu, theta;
  };
  for (const Point pt : {Point{0.5, 2.0}, Point{1.0, 0.5}, Point{0.9, 0.5}, Point{0.99, 0.5}}) {
    const auto prob = example_problem(pt.mu, pt.theta, 10.0, 10.0 / 4096.0);
    const auto sol = fluid_qr(prob);
    const oracle::ExampleParams p{pt.mu, pt.theta};
    double worst_phi = 0.0, worst_eta = 0.0;
    for (std::size_t k = 0; k < sol.t.size(); ++k) {
      const auto [phi, eta] = oracle::example_phi_eta(p, sol.t[k]);
      worst_phi = std::max(worst_phi, std::abs(phi - sol.phi[k]));
      worst_eta = std::max(worst_eta, std::abs(eta - sol.eta[k]));
    }
    CHECK(worst_phi <= 1e-6);
    CHECK(worst_eta <= 1e-6);
  }
}

TEST_CASE("chi inverts H") {
  SUBCASE("closed-form inversion at theta = 1") {
    // H(y, t) = e^{-y}: chi(x, t) = -ln x for x <= 1
    const auto prob = example_problem(0.5, 1.0);
    for (double x : {0.05, 0.3, 0.9})
      for (double t : {0.0, 1.0, 6.0}) {
        const double byformula = -std::log(x);
        CHECK(prob.chi(x, t) == doctest::Approx(byformula).epsilon(1e-7));
      }
  }
  SUBCASE("x at or above H(0,t) maps to zero") {
    const auto prob = example_problem(0.5, 2.0);
    for (double t : {0.0, 1.0, 4.0}) {
      const double h0 = prob.h_potential(0.0, t);
      CHECK(prob.chi(h0, t) == 0.0);
      CHECK(prob.chi(h0 + 0.5, t) == 0.0);
    }
  }
  SUBCASE("defining identity on random points") {
    const auto prob = example_problem(0.7, 0.6);
    RngStream rng(9);
    for (int i = 0; i < 60; ++i) {
      const double t = 8.0 * rng.uniform01();
      const double x = 0.02 + rng.uniform01();
      const double y = prob.chi(x, t);
      if (y > 0.0) CHECK(prob.h_potential(y, t) == doctest::Approx(x).epsilon(1e-8));
    }
  }
}

TEST_CASE("frontier on the grid") {
  // case 1: phi = H(0, .) so the frontier is identically zero
  {
    const auto sol = fluid_qr(example_problem(0.5, 2.0, 5.0));
    for (double f : sol.frontier) CHECK(std::abs(f) <= 1e-7);
  }
  // case 2 (critical): frontier solves H(F(t), t) = 1
  {
    const auto prob = example_problem(1.0, 0.5, 5.0);
    const auto sol = fluid_qr(prob);
    CHECK(sol.frontier.front() == doctest::Approx(0.0).epsilon(1e-9));
    for (std::size_t k = 0; k < sol.t.size(); k += 97) {
      const double f = sol.frontier[k];
      if (f > 0.0)
        CHECK(prob.h_potential(f, sol.t[k]) == doctest::Approx(1.0).epsilon(1e-7));
    }
    // continuity on the grid: increments bounded by a modulus estimate
    double max_step = 0.0;
    for (std::size_t k = 1; k < sol.t.size(); ++k)
      max_step = std::max(max_step, std::abs(sol.frontier[k] - sol.frontier[k - 1]));
    CHECK(max_step < 0.05);
    // the frontier rises toward the stationary level 2 ln 2
    CHECK(sol.frontier.back() > 1.0);
    CHECK(sol.frontier.back() < 2.0 * std::log(2.0));
  }
}

TEST_CASE("limit measure evaluator") {
  const auto prob = example_problem(1.0, 0.5, 5.0);
  const auto sol = fluid_qr(prob);
  for (double t : {0.0, 1.0, 3.0}) {
    // a = 0 recovers the fluid queue mass
    CHECK(sol.limit_tail(t, 0.0) == doctest::Approx(sol.phi_at(t)).epsilon(1e-7));
    // beyond the support the tail vanishes
    CHECK(sol.limit_tail(t, 60.0) < 1e-12);
    // t = 0 with F(0) = 0 reduces to the initial tail
    CHECK(sol.limit_tail(0.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-7));
  }
}

TEST_CASE("phi stays above min(Q0, min H) in the non-subcritical regimes") {
  for (double mu : {0.5, 1.0}) {
    const auto prob = example_problem(mu, 0.8, 6.0);
    const auto sol = fluid_qr(prob);
    double min_h = 1e300;
    for (double h : sol.h) min_h = std::min(min_h, h);
    const double floor_value = std::min(prob.q0_mass(), min_h);
    CHECK(floor_value > 0.0);
    for (double p : sol.phi) CHECK(p >= floor_value - 1e-9);
  }
}

TEST_CASE("subcritical truncation") {
  SUBCASE("drift-only closed form") {
    // lambda small, mu = 1, initial tail e^{-x}: psi stays under the barrier,
    // eta = 0 and phi(t) = 1 - (mu - lambda) t until it hits zero
    InitialCondition ic = example_initial();
    FluidProblem prob(0.5, 1.0, DistributionSpec::exponential(2.0), ic, 5.0);
    const auto sol = fluid_subcritical(prob);
    REQUIRE(sol.t_empty.has_value());
    CHECK(*sol.t_empty == doctest::Approx(2.0).epsilon(1e-8));
    for (std::size_t k = 0; k < sol.t.size(); k += 123) {
      const double expect = std::max(1.0 - 0.5 * sol.t[k], 0.0);
      CHECK(sol.phi_bar_at(sol.t[k]) == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK(sol.eta.back() == 0.0);
  }
  SUBCASE("dense-grid oracle for psi = 1 - t against h = e^{-t}") {
    // lambda = 0, Q(0) = 1, G0bar = e^{-x}, mu = 1: psi(t) = 1 - t, h(t) = e^{-t};
    // eta(t) = sup_{s<=t}(1 - s - e^{-s})^+. The dense-grid oracle decides the
    // path (1 - s - e^{-s} = -s^2/2 + O(s^3) stays nonpositive, so eta = 0 and
    // phi = psi crosses zero at t = 1). The engine cannot take lambda = 0, so
    // compare solve_sp directly.
    const int n = 4096;
    std::vector<double> psi(n + 1), h(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double t = 3.0 * k / n;
      psi[static_cast<std::size_t>(k)] = 1.0 - t;
      h[static_cast<std::size_t>(k)] = std::exp(-t);
    }
    const auto [phi, eta] = solve_sp(psi, h);
    // dense-grid (x100) oracle
    const int dense = 100 * n;
    double running = 0.0;
    std::vector<double> eta_oracle;
    for (int k = 0; k <= n; ++k) eta_oracle.push_back(0.0);
    int idx = 0;
    for (int k = 0; k <= dense; ++k) {
      const double t = 3.0 * k / dense;
      running = std::max(running, 1.0 - t - std::exp(-t));
      if (k % 100 == 0) eta_oracle[static_cast<std::size_t>(idx++)] = std::max(running, 0.0);
    }
    double worst = 0.0;
    double first_zero = -1.0;
    for (int k = 0; k <= n; ++k) {
      worst = std::max(worst, std::abs(eta[static_cast<std::size_t>(k)] -
                                       eta_oracle[static_cast<std::size_t>(k)]));
      if (first_zero < 0.0 && phi[static_cast<std::size_t>(k)] <= 0.0)
        first_zero = 3.0 * k / n;
    }
    CHECK(worst < 1e-6);
    CHECK(eta.back() == 0.0);
    CHECK(first_zero == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("t_empty grows as the drift gap closes") {
    InitialCondition ic = example_initial();
    double prev = 0.0;
    for (double lambda : {0.25, 0.5, 0.75, 0.9}) {
      FluidProblem prob(lambda, 1.0, DistributionSpec::exponential(2.0), ic, 40.0);
      const auto sol = fluid_subcritical(prob);
      REQUIRE(sol.t_empty.has_value());
      CHECK(*sol.t_empty > prev);
      prev = *sol.t_empty;
    }
  }
  SUBCASE("wrong regime") {
    CHECK_THROWS_AS(fluid_subcritical(example_problem(0.5, 1.0)), AssumptionViolation);
    InitialCondition ic = example_initial();
    FluidProblem prob(0.5, 1.0, DistributionSpec::exponential(2.0), ic, 5.0);
    CHECK_THROWS_AS(fluid_qr(prob), AssumptionViolation);
  }
}

TEST_CASE("grid refinement self-consistency") {
  const auto coarse = fluid_qr(example_problem(0.9, 0.5, 10.0, 10.0 / 2048.0));
  const auto fine = fluid_qr(example_problem(0.9, 0.5, 10.0, 10.0 / 4096.0));
  double worst = 0.0;
  for (std::size_t k = 0; k < coarse.t.size(); ++k) {
    worst = std::max(worst, std::abs(coarse.phi[k] - fine.phi_at(coarse.t[k])));
    worst = std::max(worst, std::abs(coarse.eta[k] - fine.eta_at(coarse.t[k])));
    worst = std::max(worst, std::abs(coarse.frontier[k] - fine.frontier_at(coarse.t[k])));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("assumption gates") {
  InitialCondition ic = example_initial();
  SUBCASE("deterministic patience is rejected") {
    CHECK_THROWS_AS(
        FluidProblem(1.0, 0.5, DistributionSpec::deterministic(1.0), ic, 5.0),
        AssumptionViolation);
  }
  SUBCASE("patience jump at y_star is rejected for lambda > mu") {
    const auto jumpy =
        DistributionSpec::empirical_grid({0.0, 1.0, 1.0, 2.0}, {0.0, 0.3, 0.6, 1.0});
    // mu/lambda = 0.5 falls inside the jump at y = 1
    CHECK_THROWS_AS(FluidProblem(2.0, 1.0, jumpy, ic, 5.0), AssumptionViolation);
  }
  SUBCASE("point-mass initial measure is rejected") {
    InitialCondition atoms;
    atoms.q0 = FiniteMeasure::point_masses({{1.0, 1.0}});
    CHECK_THROWS_AS(FluidProblem(1.0, 0.5, DistributionSpec::exponential(1.0), atoms, 5.0),
                    AssumptionViolation);
  }
  SUBCASE("frontier0 above y_star is rejected in the supercritical regime") {
    InitialCondition shifted;
    shifted.q0 = FiniteMeasure::tail_grid({1.0, 2.0, 3.0}, {1.0, 0.4, 0.0});
    shifted.frontier0 = 1.0;
    // y* = ln 2 < 1 for lambda = 2, mu = 1, exponential(1) patience
    CHECK_THROWS_AS(FluidProblem(2.0, 1.0, DistributionSpec::exponential(1.0), shifted, 5.0),
                    AssumptionViolation);
  }
  SUBCASE("frontier hypotheses detection") {
    CHECK(example_problem(0.5, 2.0).frontier_hypotheses_hold());
    InitialCondition shifted;
    shifted.q0 = FiniteMeasure::tail_grid({0.5, 1.0, 2.0}, {1.0, 0.6, 0.0});
    shifted.frontier0 = 0.5;
    FluidProblem prob(1.0, 1.0, DistributionSpec::exponential(1.0), shifted, 5.0);
    CHECK_FALSE(prob.frontier_hypotheses_hold());  // y_{0min} = 0.5 > 0
  }
}
