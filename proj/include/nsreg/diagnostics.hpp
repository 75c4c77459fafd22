#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nsreg/direction.hpp"
#include "nsreg/exponents.hpp"
#include "nsreg/norms.hpp"
#include "nsreg/solver.hpp"
#include "nsreg/spectral_ops.hpp"

namespace nsreg {

/// One row of the per-step time series.
struct DiagnosticsRecord {
  double time = 0.0;
  double energy = 0.0;             // |u|_2^2 / 2
  double grad_sq = 0.0;            // |grad u|_2^2
  double l3_cubed = 0.0;           // int |u|^3 / 3
  double flux = 0.0;               // int |u| |grad|u||^2
  double dirdiv_Lq = 0.0;          // |div(u/|u|)|_q over the mask
  double weighted_dirdiv = 0.0;    // ||u| div(u/|u|)|_{q_bar}
  double serrin_l9 = 0.0;          // |u|_9
  double criterion_accum = 0.0;    // int |div(u/|u|)|_q^p dt  (running max when p = inf)
  double serrin_accum = 0.0;       // int |u|_9^3 dt
  double identity_residual = 0.0;  // masked sup of the direction identity residual
  double gronwall_margin = 0.0;    // filled in once the Gronwall constant is known

  // Not part of the CSV schema.
  double flux_gradient_form = 0.0;  // (4/9) int |grad |u|^{3/2}|^2
  bool degenerate = false;
};

/// Instantaneous quantities of one velocity field (no accumulators).
inline DiagnosticsRecord snapshot_diagnostics(double time, const VectorField& u, const ExponentBudget& budget,
                                              const DirectionFloors& floors) {
  const Grid& g = u.grid();
  const double h3 = g.cell_volume();
  const GradientTensor grad = velocity_gradient(u);
  const SpeedField sf = speed_field(u, grad, floors);

  DiagnosticsRecord rec;
  rec.time = time;
  rec.degenerate = sf.degenerate;
  double energy = 0.0, grad_sq = 0.0, cubic = 0.0, flux = 0.0, flux_grad = 0.0;
  for (std::size_t n = 0; n < g.points(); ++n) {
    const double s2 = u[0][n] * u[0][n] + u[1][n] * u[1][n] + u[2][n] * u[2][n];
    energy += s2;
    cubic += s2 * std::sqrt(s2);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) grad_sq += grad[i][j][n] * grad[i][j][n];
    }
    const double gm2 = sf.speed_grad[0][n] * sf.speed_grad[0][n] + sf.speed_grad[1][n] * sf.speed_grad[1][n] +
                       sf.speed_grad[2][n] * sf.speed_grad[2][n];
    flux += sf.speed[n] * gm2;
    // grad m^{3/2} = (3/2) m^{1/2} grad m
    const double c = 1.5 * std::sqrt(sf.speed[n]);
    flux_grad += c * c * gm2;
  }
  rec.energy = 0.5 * h3 * energy;
  rec.grad_sq = h3 * grad_sq;
  rec.l3_cubed = h3 * cubic / 3.0;
  rec.flux = sf.max_speed == 0.0 ? 0.0 : h3 * flux;
  rec.flux_gradient_form = sf.max_speed == 0.0 ? 0.0 : 4.0 / 9.0 * h3 * flux_grad;
  rec.serrin_l9 = lq_norm(u, 9.0);

  if (sf.max_speed > 0.0) {
    const auto dd = direction_divergence(sf, u);
    rec.dirdiv_Lq = sf.degenerate ? 0.0 : lq_norm(dd.value, budget.q.value(), dd.mask);
    ScalarField weighted(g);
    for (std::size_t n = 0; n < g.points(); ++n) weighted[n] = sf.speed[n] * dd.value[n];
    rec.weighted_dirdiv = lq_norm(weighted, budget.q_bar.value());
    rec.identity_residual = identity_residual(sf, u).value;
  }
  return rec;
}

/// Sequential per-run diagnostics with the running time accumulators.
class DiagnosticsTracker {
 public:
  DiagnosticsTracker(ExponentBudget budget, DirectionFloors floors)
      : budget_(std::move(budget)), floors_(floors), criterion_(budget_.p.value()), serrin_(3.0) {}

  const DiagnosticsRecord& observe(double time, const VectorField& u) {
    DiagnosticsRecord rec = snapshot_diagnostics(time, u, budget_, floors_);
    criterion_.add(time, rec.dirdiv_Lq);
    serrin_.add(time, rec.serrin_l9);
    rec.criterion_accum = criterion_.integral();
    rec.serrin_accum = serrin_.integral();
    records_.push_back(rec);
    return records_.back();
  }

  const std::vector<DiagnosticsRecord>& records() const noexcept { return records_; }
  std::vector<DiagnosticsRecord>& records() noexcept { return records_; }
  const ExponentBudget& budget() const noexcept { return budget_; }
  const MixedNormAccumulator& criterion_accumulator() const noexcept { return criterion_; }
  const MixedNormAccumulator& serrin_accumulator() const noexcept { return serrin_; }

 private:
  ExponentBudget budget_;
  DirectionFloors floors_;
  MixedNormAccumulator criterion_;
  MixedNormAccumulator serrin_;
  std::vector<DiagnosticsRecord> records_;
};

/// Per-step discrete energy balance |E_{m+1} - E_m + nu int |grad u|^2 dt|,
/// time integral by the trapezoid rule.
inline std::vector<double> energy_balance_residuals(const std::vector<DiagnosticsRecord>& records, double viscosity) {
  std::vector<double> out;
  for (std::size_t m = 1; m < records.size(); ++m) {
    const auto& a = records[m - 1];
    const auto& b = records[m];
    const double dissipated = viscosity * 0.5 * (b.time - a.time) * (a.grad_sq + b.grad_sq);
    out.push_back(std::abs(b.energy - a.energy + dissipated));
  }
  return out;
}

/// |P|_{3r/4} / |u|_{3r/2}^2 with P recovered by the Poisson solve; 0 for u = 0.
inline double pressure_bound_probe(const VectorField& u, double r) {
  if (!(r > 4.0 / 3.0) || !std::isfinite(r)) {
    throw std::invalid_argument("pressure probe requires 4/3 < r < inf, got " + std::to_string(r));
  }
  const double denom = lq_norm(u, 1.5 * r);
  if (denom == 0.0) return 0.0;
  const ScalarField p = recover_pressure(u);
  return lq_norm(p, 0.75 * r) / (denom * denom);
}

/// L^9 norm of |u| per snapshot and the running int |u|_9^3 dt.
class SerrinMonitor {
 public:
  double observe(double time, const VectorField& u) {
    const double l9 = lq_norm(u, 9.0);
    acc_.add(time, l9);
    return l9;
  }
  double observe_norm(double time, double l9) {
    acc_.add(time, l9);
    return l9;
  }
  double accumulated() const noexcept { return acc_.integral(); }

 private:
  MixedNormAccumulator acc_{3.0};
};

}  // namespace nsreg
