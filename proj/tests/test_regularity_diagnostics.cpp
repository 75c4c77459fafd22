#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "nsreg/diagnostics.hpp"
#include "nsreg/direction.hpp"
#include "nsreg/exponents.hpp"
#include "nsreg/gronwall.hpp"
#include "nsreg/initial_conditions.hpp"
#include "nsreg/norms.hpp"

using namespace nsreg;

namespace {

constexpr double pi = std::numbers::pi;

Exponent ex(const char* s) { return Exponent::parse(s); }

// Fields with a known direction: u = w(rho) * direction, with a Gaussian
// window narrow enough to be periodic to roundoff.
double window(double r2) { return std::exp(-r2 / 0.36); }

VectorField radial_field(const Grid& g) {
  return VectorField::sample(g, [](double x, double y, double z) {
    const double a = x - pi, b = y - pi, c = z - pi;
    const double w = window(a * a + b * b + c * c);
    return std::array<double, 3>{w * a, w * b, w * c};
  });
}

VectorField swirl_field(const Grid& g) {
  return VectorField::sample(g, [](double x, double y, double) {
    const double a = x - pi, b = y - pi;
    const double w = window(a * a + b * b);
    return std::array<double, 3>{-w * b, w * a, 0.0};
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Norms

TEST(Norms, ConstantFieldNorms) {
  const Grid g(8);
  const auto f = ScalarField::sample(g, [](double, double, double) { return 2.0; });
  const double vol = Grid::volume();
  EXPECT_NEAR(lq_norm(f, 1.0), 2.0 * vol, 1e-10);
  EXPECT_NEAR(lq_norm(f, 2.0), 2.0 * std::sqrt(vol), 1e-10);
  EXPECT_NEAR(lq_norm(f, 3.0), 2.0 * std::cbrt(vol), 1e-10);
  EXPECT_EQ(lq_norm(f, kInfinity), 2.0);
  EXPECT_THROW(lq_norm(f, 0.5), std::invalid_argument);
}

TEST(Norms, SineL2AndMaskedMax) {
  const Grid g(16);
  const auto f = ScalarField::sample(g, [](double x, double, double) { return std::sin(x); });
  // |sin x|_2^2 = pi * (2 pi)^2
  EXPECT_NEAR(lq_norm(f, 2.0), std::sqrt(4.0 * pi * pi * pi), 1e-12);
  Mask mask(g.points(), false);
  for (std::size_t i = 0; i < g.points(); ++i) mask[i] = std::abs(f[i]) < 0.5;
  EXPECT_LT(lq_norm(f, kInfinity, mask), 0.5);
  EXPECT_EQ(lq_norm(f, 4.0, Mask(g.points(), false)), 0.0);
}

TEST(Norms, LargeExponentIsStable) {
  const Grid g(8);
  auto f = ScalarField::sample(g, [](double x, double, double) { return 1e200 * (1.0 + std::cos(x)); });
  EXPECT_TRUE(std::isfinite(lq_norm(f, 9.0)));
  f *= 1e-300;
  EXPECT_GT(lq_norm(f, 9.0), 0.0);
}

TEST(MixedNorm, ConstantSeries) {
  std::vector<TimeSample> s;
  for (int i = 0; i <= 10; ++i) s.push_back({0.1 * i, 3.0});
  EXPECT_NEAR(mixed_norm_accumulate(s, 2.0), 3.0 * std::sqrt(1.0), 1e-12);
  EXPECT_NEAR(mixed_norm_accumulate(s, 4.0), 3.0, 1e-12);
  EXPECT_EQ(mixed_norm_accumulate(s, kInfinity), 3.0);
}

TEST(MixedNorm, TrapezoidOnLinearIsExact) {
  MixedNormAccumulator acc(1.0);
  for (int i = 0; i <= 4; ++i) acc.add(0.25 * i, 2.0 * 0.25 * i);
  EXPECT_NEAR(acc.integral(), 1.0, 1e-15);
}

TEST(MixedNorm, RejectsBadSamples) {
  MixedNormAccumulator acc(2.0);
  acc.add(0.0, 1.0);
  EXPECT_THROW(acc.add(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(acc.add(1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(acc.add(1.0, std::nan("")), std::invalid_argument);
  EXPECT_THROW(MixedNormAccumulator(0.5), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Exponents

TEST(Exponents, ParseAndPrint) {
  EXPECT_TRUE(ex("inf").is_infinite());
  EXPECT_EQ(ex("8/3").str(), "8/3");
  EXPECT_EQ(ex("1.5").str(), "3/2");
  EXPECT_EQ(ex("6").str(), "6");
  EXPECT_THROW(ex("abc"), std::invalid_argument);
  EXPECT_THROW(ex("-2"), std::invalid_argument);
  EXPECT_THROW(ex("1/0"), std::invalid_argument);
}

TEST(Exponents, RationalArithmeticIsExact) {
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(2, 4), Rational(1, 2));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_EQ(Rational(3, 8).reciprocal(), Rational(8, 3));
}

TEST(Admissibility, Examples) {
  EXPECT_TRUE(check_admissibility({ex("inf"), ex("6")}).admissible());
  EXPECT_TRUE(check_admissibility({ex("8"), ex("12")}).admissible());
  EXPECT_TRUE(check_admissibility({ex("inf"), ex("inf")}).admissible());

  const auto r46 = check_admissibility({ex("4"), ex("6")});
  EXPECT_FALSE(r46.admissible());
  EXPECT_EQ(r46.first_violation(), "2/p+3/q = 1 > 1/2");

  const auto low_q = check_admissibility({ex("inf"), ex("5")});
  EXPECT_FALSE(low_q.admissible());
  EXPECT_FALSE(low_q.checks[1].satisfied);
  EXPECT_EQ(low_q.checks[1].name, "q >= 6");

  const auto low_p = check_admissibility({ex("3"), ex("inf")});
  EXPECT_FALSE(low_p.checks[2].satisfied);
}

TEST(Budget, EndpointCase) {
  const auto b = exponent_budget(ex("inf"), ex("6"), ex("6"));
  EXPECT_TRUE(b.valid());
  EXPECT_EQ(b.a.str(), "2");
  EXPECT_EQ(b.p_bar.str(), "2");
  EXPECT_EQ(b.q_bar.str(), "3");
  EXPECT_EQ(b.r.str(), "3");
  EXPECT_EQ(b.theta, Rational(1, 2));
  EXPECT_EQ(Rational(2) * b.p_bar.reciprocal() + Rational(3) * b.q_bar.reciprocal(), Rational(2));
  EXPECT_EQ(b.theta.reciprocal(), Rational(2));
}

TEST(Budget, InteriorCase) {
  const auto b = assemble_budget(ex("4"), ex("inf"), ex("4"));
  EXPECT_EQ(b.a.str(), "8/3");
  EXPECT_EQ(b.p_bar.str(), "8/5");
  EXPECT_EQ(b.q_bar.str(), "4");
  EXPECT_EQ(b.theta, Rational(5, 8));
  EXPECT_TRUE(b.valid());
  EXPECT_EQ(b.gronwall_power(), 1.6);
}

TEST(Budget, ReciprocalIdentitiesHoldAcrossGrid) {
  const char* ps[] = {"4", "5", "8", "12", "inf"};
  const char* qs[] = {"6", "8", "12", "24", "inf"};
  const char* bs[] = {"2", "3", "4", "5", "6"};
  for (auto p : ps)
    for (auto q : qs)
      for (auto bb : bs) {
        const auto b = assemble_budget(ex(p), ex(q), ex(bb));
        for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(b.checks[i].satisfied) << p << " " << q << " " << bb;
        EXPECT_TRUE(b.checks[5].satisfied);
        EXPECT_TRUE(b.checks[6].satisfied);
      }
}

TEST(Budget, RejectsInadmissibleAndOutOfRange) {
  try {
    exponent_budget(ex("4"), ex("6"), ex("6"));
    FAIL() << "expected rejection";
  } catch (const InadmissibleCriterion& e) {
    EXPECT_NE(std::string(e.what()).find("2/p+3/q = 1 > 1/2"), std::string::npos);
  }
  EXPECT_THROW(assemble_budget(ex("inf"), ex("6"), ex("7")), std::invalid_argument);
  EXPECT_THROW(assemble_budget(ex("inf"), ex("6"), ex("3/2")), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Direction field

TEST(Direction, RadialFieldHasDivergenceTwoOverR) {
  const Grid g(64);
  const auto u = radial_field(g);
  const auto dd = direction_divergence(u, {1e-12, 0.05});
  const auto expect = ScalarField::sample(g, [](double x, double y, double z) {
    return 2.0 / std::sqrt((x - pi) * (x - pi) + (y - pi) * (y - pi) + (z - pi) * (z - pi));
  });
  double worst = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < g.points(); ++n) {
    if (!dd.mask[n]) continue;
    ++count;
    worst = std::max(worst, std::abs(dd.value[n] - expect[n]) / expect[n]);
  }
  EXPECT_GT(count, 100u);
  EXPECT_LT(worst, 1e-8);
}

TEST(Direction, SwirlIsDirectionSolenoidal) {
  const Grid g(64);
  const auto u = swirl_field(g);
  const auto dd = direction_divergence(u, {1e-12, 0.05});
  double worst = 0.0;
  for (std::size_t n = 0; n < g.points(); ++n) {
    if (dd.mask[n]) worst = std::max(worst, std::abs(dd.value[n]));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Direction, ShearDirectionIsConstantAwayFromZeros) {
  const Grid g(16);
  const auto u = VectorField::sample(g, [](double, double y, double) { return std::array<double, 3>{std::sin(y), 0, 0}; });
  const auto sf = speed_field(u, DirectionFloors{});
  const auto w = weighted_direction_divergence(sf, u);
  for (double v : w.values()) EXPECT_LT(std::abs(v), 1e-14);
}

TEST(Direction, ZeroFieldIsDegenerate) {
  const Grid g(8);
  const VectorField u(g);
  const auto dd = direction_divergence(u);
  EXPECT_TRUE(dd.degenerate);
  for (double v : dd.value.values()) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(identity_residual(u).degenerate);
  EXPECT_EQ(identity_residual(u).value, 0.0);
}

TEST(Direction, FloorValidation) {
  EXPECT_THROW((DirectionFloors{0.0, 0.01}.validate()), std::invalid_argument);
  EXPECT_THROW((DirectionFloors{1e-12, 1.0}.validate()), std::invalid_argument);
}

TEST(Identity, TaylorGreenAtRoundoff) {
  for (std::size_t n : {16u, 32u}) {
    const Grid g(n);
    EXPECT_LT(identity_residual(initial_taylor_green(g)).value, 1e-12);
  }
}

TEST(Identity, RandomFieldSmallAndShrinksWithResolution) {
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {16u, 32u, 64u}) {
    const Grid g(n);
    const double r = identity_residual(initial_random_divfree(g, 21, 3, 1.0)).value;
    EXPECT_LT(r, prev) << "n = " << n;
    prev = r;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(Identity, DetectsCompressibleField) {
  // For div u != 0 the residual is |div u| over the mask.
  const Grid g(32);
  const auto u = VectorField::sample(g, [](double x, double, double) { return std::array<double, 3>{2.0 + std::sin(x), 0, 0}; });
  EXPECT_NEAR(identity_residual(u).value, 1.0, 1e-3);
}

TEST(SymmetricPart, AntisymmetricFormVanishes) {
  const Grid g(32);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto u = initial_random_divfree(g, seed, 3, 1.0);
    const auto chk = symmetric_part_check(u);
    EXPECT_GT(chk.scale, 0.0);
    EXPECT_LE(chk.antisymmetric_form, 1e-12 * chk.scale);
    const auto [full, sym] = streamline_flux_forms(u);
    for (std::size_t n = 0; n < g.points(); ++n) ASSERT_NEAR(full[n], sym[n], 1e-12 * chk.scale);
  }
}

// ---------------------------------------------------------------------------
// Diagnostics

TEST(Diagnostics, TaylorGreenClosedForms) {
  const Grid g(32);
  const auto budget = exponent_budget(ex("inf"), ex("6"), ex("6"));
  const auto rec = snapshot_diagnostics(0.0, initial_taylor_green(g), budget, {});
  EXPECT_NEAR(rec.energy, pi * pi * pi, 1e-10);
  EXPECT_NEAR(rec.grad_sq, 6.0 * pi * pi * pi, 1e-10);
  EXPECT_NEAR(rec.flux, rec.flux_gradient_form, 1e-10 * rec.flux);
  EXPECT_LT(rec.identity_residual, 1e-12);
  EXPECT_GT(rec.dirdiv_Lq, 0.0);
  EXPECT_GT(rec.weighted_dirdiv, 0.0);
  EXPECT_NEAR(rec.serrin_l9, lq_norm(initial_taylor_green(g), 9.0), 0.0);
}

TEST(Diagnostics, TrackerAccumulatesMonotonically) {
  const Grid g(16);
  const auto budget = assemble_budget(ex("8"), ex("12"), ex("6"));
  DiagnosticsTracker tracker(budget, {});
  const auto u = initial_taylor_green(g);
  double prev_serrin = 0.0;
  for (int i = 0; i < 4; ++i) {
    auto v = u;
    v *= 1.0 / (1.0 + i);
    const auto& rec = tracker.observe(0.1 * i, v);
    EXPECT_GE(rec.serrin_accum, prev_serrin);
    prev_serrin = rec.serrin_accum;
  }
  // Constant-in-time |u|_9 scaled by 1/(1+i): compare against a direct trapezoid.
  const double l9 = lq_norm(u, 9.0);
  double expect = 0.0;
  for (int i = 1; i < 4; ++i) expect += 0.05 * (std::pow(l9 / i, 3) + std::pow(l9 / (i + 1), 3));
  EXPECT_NEAR(tracker.records().back().serrin_accum, expect, 1e-12 * expect);
}

TEST(Diagnostics, EnergyBalanceOfExactDecay) {
  // E(t) = E0 e^{-2 nu t}, grad_sq = 2 E / nu-free factor k^2 = 1: dE/dt = -nu |grad u|^2.
  std::vector<DiagnosticsRecord> recs;
  const double nu = 0.3, E0 = 2.0;
  for (int i = 0; i <= 100; ++i) {
    DiagnosticsRecord r;
    r.time = 0.01 * i;
    r.energy = E0 * std::exp(-2 * nu * r.time);
    r.grad_sq = 2.0 * r.energy;
    recs.push_back(r);
  }
  const auto res = energy_balance_residuals(recs, nu);
  ASSERT_EQ(res.size(), 100u);
  for (double v : res) EXPECT_LT(v, 1e-6 * E0);  // trapezoid error ~ dt^3
}

TEST(PressureProbe, FiniteAndScaleInvariant) {
  const Grid g(32);
  const auto u = initial_random_divfree(g, 4, 3, 1.0);
  const double a = pressure_bound_probe(u, 4.0);
  auto v = u;
  v *= 7.0;
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(pressure_bound_probe(v, 4.0), a, 1e-12 * a);
  EXPECT_EQ(pressure_bound_probe(VectorField(g), 4.0), 0.0);
  EXPECT_THROW(pressure_bound_probe(u, 1.0), std::invalid_argument);
}

TEST(SerrinMonitor, AdditiveOverWindows) {
  SerrinMonitor full, first, second;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.1 * i, v = 1.0 + std::sin(t);
    full.observe_norm(t, v);
    if (i <= 5) first.observe_norm(t, v);
    if (i >= 5) second.observe_norm(t, v);
  }
  EXPECT_NEAR(first.accumulated() + second.accumulated(), full.accumulated(), 1e-14 * full.accumulated());
}

// ---------------------------------------------------------------------------
// Gronwall

namespace {

std::vector<DiagnosticsRecord> synthetic(const std::vector<double>& G, const std::vector<double>& weighted,
                                         const std::vector<double>& flux, double dt) {
  std::vector<DiagnosticsRecord> out(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) {
    out[i].time = dt * i;
    out[i].l3_cubed = G[i];
    out[i].weighted_dirdiv = weighted[i];
    out[i].flux = flux[i];
  }
  return out;
}

}  // namespace

TEST(Gronwall, ZeroRunIsTrivial) {
  const auto budget = exponent_budget(ex("inf"), ex("6"), ex("6"));
  const auto recs = synthetic({0, 0, 0}, {0, 0, 0}, {0, 0, 0}, 0.1);
  const auto rep = gronwall_check(recs, budget, {1.0, 1e-8, {}});
  EXPECT_TRUE(rep.feasible);
  EXPECT_EQ(rep.constant, 0.0);
  for (double m : rep.margins) EXPECT_EQ(m, 0.0);
  EXPECT_TRUE(rep.envelope_dominates);
}

TEST(Gronwall, FitsGrowthRate) {
  // G = e^{t}, rate^{1/theta} = 1 everywhere. The trapezoid margin gives the
  // minimal C = tanh(h/2)/(h/2), just below the continuous rate 1, so the
  // exponential envelope only dominates once C reaches 1.
  const auto budget = exponent_budget(ex("inf"), ex("6"), ex("6"));  // 1/theta = 2
  std::vector<double> G, w, f;
  for (int i = 0; i <= 20; ++i) {
    G.push_back(std::exp(0.05 * i));
    w.push_back(1.0);
    f.push_back(0.0);
  }
  const auto rep = gronwall_check(synthetic(G, w, f, 0.05), budget, {1.0, 1e-8, {}});
  EXPECT_TRUE(rep.feasible);
  EXPECT_NEAR(rep.constant, std::tanh(0.025) / 0.025, 1e-8);
  for (double m : rep.margins) EXPECT_GE(m, -1e-8);
  EXPECT_FALSE(rep.envelope_dominates);

  const auto exact = gronwall_check(synthetic(G, w, f, 0.05), budget, {1.0, 1e-8, 1.0});
  EXPECT_TRUE(exact.envelope_dominates);

  const auto tight = gronwall_check(synthetic(G, w, f, 0.05), budget, {1.0, 1e-8, 0.5});
  EXPECT_EQ(tight.constant, 0.5);
  EXPECT_LT(*std::min_element(tight.margins.begin(), tight.margins.end()), 0.0);
  EXPECT_FALSE(tight.envelope_dominates);
}

TEST(Gronwall, GrowthWithoutDriverIsInfeasible) {
  const auto budget = exponent_budget(ex("inf"), ex("6"), ex("6"));
  const auto rep = gronwall_check(synthetic({1, 2}, {0, 0}, {0, 0}, 0.1), budget, {1.0, 1e-8, {}});
  EXPECT_FALSE(rep.feasible);
  EXPECT_TRUE(std::isinf(rep.constant));
}

TEST(Gronwall, DecayingShearNeedsNoConstant) {
  // Shear: weighted criterion vanishes, G decays faster than the flux term can offset.
  const auto budget = exponent_budget(ex("inf"), ex("6"), ex("6"));
  const double nu = 0.1;
  std::vector<double> G, w, f;
  for (int i = 0; i <= 10; ++i) {
    const double decay = std::exp(-3 * nu * 0.1 * i);
    G.push_back(8.0 / 9.0 * decay);
    w.push_back(0.0);
    f.push_back(4.0 / 3.0 * decay);
  }
  const auto rep = gronwall_check(synthetic(G, w, f, 0.1), budget, {nu, 1e-8, {}});
  EXPECT_TRUE(rep.feasible);
  EXPECT_EQ(rep.constant, 0.0);
  for (double m : rep.margins) EXPECT_GT(m, 0.0);
}

TEST(Gronwall, RejectsNonMonotoneTime) {
  const auto budget = exponent_budget(ex("inf"), ex("6"), ex("6"));
  auto recs = synthetic({1, 1}, {0, 0}, {0, 0}, 0.1);
  recs[1].time = 0.0;
  EXPECT_THROW(gronwall_check(recs, budget, {1.0, 1e-8, {}}), std::invalid_argument);
}
