#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "nsreg/initial_conditions.hpp"
#include "nsreg/norms.hpp"
#include "nsreg/solver.hpp"

using namespace nsreg;

namespace {

double max_abs(const ScalarField& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, max_abs_diff(a[c], b[c]));
  return m;
}

VectorField shear(const Grid& g, double amplitude) {
  return VectorField::sample(g, [amplitude](double, double y, double) {
    return std::array<double, 3>{amplitude * std::sin(y), 0.0, 0.0};
  });
}

SolverState run(SolverState s, const SolverConfig& cfg) {
  const long steps = step_count(s.time, cfg.t_end, cfg.dt);
  for (long i = 0; i < steps; ++i) s = step(s, cfg);
  return s;
}

}  // namespace

TEST(NonlinearTerm, VanishesForShear) {
  const Grid g(16);
  const auto n = nonlinear_term(shear(g, 1.0));
  for (int c = 0; c < 3; ++c) EXPECT_LT(max_abs(n[c]), 1e-14);
}

TEST(NonlinearTerm, TaylorGreenMatchesClosedForm) {
  // u.grad u = (sin 2x cos^2 z / 2, sin 2y cos^2 z / 2, 0) for the Taylor-Green field.
  const Grid g(16);
  const auto n = nonlinear_term(initial_taylor_green(g));
  const auto expect = VectorField::sample(g, [](double x, double y, double z) {
    const double c2 = std::cos(z) * std::cos(z);
    return std::array<double, 3>{0.5 * std::sin(2 * x) * c2, 0.5 * std::sin(2 * y) * c2, 0.0};
  });
  EXPECT_LT(max_abs_diff(n, expect), 1e-13);
}

TEST(Pressure, TaylorGreenClosedForm) {
  const Grid g(16);
  const auto p = recover_pressure(initial_taylor_green(g));
  const auto expect = ScalarField::sample(g, [](double x, double y, double z) {
    return (std::cos(2 * x) + std::cos(2 * y)) * (std::cos(2 * z) + 2.0) / 16.0;
  });
  EXPECT_LT(max_abs_diff(p, expect), 1e-10);
}

TEST(Pressure, ShearHasNoPressure) {
  const Grid g(16);
  EXPECT_LT(max_abs(recover_pressure(shear(g, 2.0))), 1e-14);
}

TEST(Step, HeatDecayOfShearIsExact) {
  const Grid g(16);
  const SolverConfig cfg{0.1, 0.05, 1.0, 0.5};
  const auto out = run({0.0, shear(g, 1.0), 0}, cfg);
  EXPECT_EQ(out.step_index, 20);
  EXPECT_NEAR(out.time, 1.0, 1e-12);
  const auto expect = shear(g, std::exp(-0.1));
  EXPECT_LT(max_abs_diff(out.velocity, expect), 1e-9);
}

TEST(Step, PreservesDivergenceAndDissipatesEnergy) {
  const Grid g(16);
  const SolverConfig cfg{0.05, 0.01, 0.1, 0.5};
  SolverState s{0.0, initial_random_divfree(g, 3, 2, 10.0), 0};
  double energy = lq_norm(s.velocity, 2.0);
  for (int i = 0; i < 10; ++i) {
    s = step(s, cfg);
    EXPECT_LT(max_abs(divergence(s.velocity)), 1e-11);
    const double e = lq_norm(s.velocity, 2.0);
    EXPECT_LT(e, energy);
    energy = e;
  }
}

TEST(Step, GalileanShearShowsFourthOrder) {
  // (e^{-nu t} sin(y - Vt), V, 0) is an exact solution; the advection phase
  // is what the Runge-Kutta stages have to integrate.
  const Grid g(16);
  const double nu = 0.5, V = 2.0, T = 1.0;
  auto exact = [&](double t) {
    return VectorField::sample(g, [&](double, double y, double) {
      return std::array<double, 3>{std::exp(-nu * t) * std::sin(y - V * t), V, 0.0};
    });
  };
  double err[2];
  for (int i = 0; i < 2; ++i) {
    const SolverConfig cfg{nu, 0.04 / (1 << i), T, 0.5};
    const auto out = run({0.0, exact(0.0), 0}, cfg);
    err[i] = max_abs_diff(out.velocity, exact(T));
  }
  EXPECT_GT(err[0] / err[1], 12.0);
  EXPECT_LT(err[0] / err[1], 20.0);
}

TEST(Step, TaylorGreenSelfConvergence) {
  const Grid g(16);
  const double nu = 0.05, T = 0.5;
  const auto ref = run({0.0, initial_taylor_green(g), 0}, {nu, 0.125 / 16, T, 0.5});
  double err[2];
  for (int i = 0; i < 2; ++i) {
    const auto out = run({0.0, initial_taylor_green(g), 0}, {nu, 0.125 / (1 << i), T, 0.5});
    err[i] = max_abs_diff(out.velocity, ref.velocity);
  }
  EXPECT_GT(err[0] / err[1], 12.0);
  EXPECT_LT(err[0] / err[1], 20.0);
}

TEST(Step, RefusesCflViolation) {
  const Grid g(16);
  const SolverConfig cfg{0.1, 1.0, 1.0, 0.5};
  try {
    step({0.0, shear(g, 1.0), 0}, cfg);
    FAIL() << "expected a CFL error";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.tag(), "cfl");
    EXPECT_NE(std::string(e.what()).find("CFL number"), std::string::npos);
  }
  EXPECT_NEAR(cfl_number(shear(g, 1.0), 0.1), 0.1 / g.spacing(), 1e-12);
}

TEST(Step, AbortsOnNonFiniteVelocity) {
  const Grid g(8);
  auto u = shear(g, 1.0);
  u[1][3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(step({0.0, u, 0}, {0.1, 0.01, 1.0, 0.5}), NumericalError);
}

TEST(Step, ConfigValidation) {
  EXPECT_THROW((SolverConfig{0.0, 0.01, 1.0, 0.5}.validate()), std::invalid_argument);
  EXPECT_THROW((SolverConfig{0.1, -0.01, 1.0, 0.5}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((SolverConfig{0.1, 0.01, 1.0, 0.5}.validate()));
}

TEST(Step, StepCount) {
  EXPECT_EQ(step_count(0.0, 0.5, 0.005), 100);
  EXPECT_EQ(step_count(0.0, 0.0, 0.1), 0);
  EXPECT_EQ(step_count(0.25, 0.5, 0.005), 50);
}
