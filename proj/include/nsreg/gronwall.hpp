#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nsreg/diagnostics.hpp"
#include "nsreg/exponents.hpp"

namespace nsreg {

/// Tracks the differential inequality
///   dG/dt + (7/16) nu int |u||grad|u||^2 <= C ||u| div(u/|u|)|_{q_bar}^{1/theta} G,   G = int |u|^3/3,
/// along a sampled run, and its Gronwall closure G(t) <= G(t0) exp(C int |.|^{1/theta} dt).
struct GronwallReport {
  double constant = 0.0;        // fitted (or supplied) C
  bool feasible = true;         // some finite C satisfies every margin
  std::vector<double> margins;  // one per interval [t_{m-1}, t_m]
  std::vector<double> envelope; // one per sample
  bool envelope_dominates = true;
};

struct GronwallOptions {
  double viscosity = 1.0;
  double slack = 1e-8;
  std::optional<double> constant;  // fit when empty
};

inline GronwallReport gronwall_check(std::span<const DiagnosticsRecord> records, const ExponentBudget& budget,
                                     const GronwallOptions& opts) {
  for (std::size_t m = 1; m < records.size(); ++m) {
    if (!(records[m].time > records[m - 1].time)) {
      throw std::invalid_argument("gronwall_check: time stamps must be strictly increasing");
    }
  }
  const double power = budget.gronwall_power();
  const std::size_t n = records.size();
  std::vector<double> rate(n), G(n);
  for (std::size_t m = 0; m < n; ++m) {
    rate[m] = std::pow(records[m].weighted_dirdiv, power);
    G[m] = records[m].l3_cubed;
  }

  // margin_m(C) = C X_m - Y_m, trapezoid averages over the interval.
  std::vector<double> X, Y;
  for (std::size_t m = 1; m < n; ++m) {
    const double dt = records[m].time - records[m - 1].time;
    X.push_back(0.5 * (rate[m - 1] * G[m - 1] + rate[m] * G[m]));
    const double dissipation = 7.0 / 16.0 * opts.viscosity * 0.5 * (records[m - 1].flux + records[m].flux);
    Y.push_back((G[m] - G[m - 1]) / dt + dissipation);
  }

  GronwallReport report;
  if (opts.constant) {
    report.constant = *opts.constant;
  } else {
    double c = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (X[i] > 0.0) {
        c = std::max(c, (Y[i] - opts.slack) / X[i]);
      } else if (Y[i] > opts.slack) {
        report.feasible = false;
      }
    }
    report.constant = report.feasible ? c : std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < X.size(); ++i) {
    // 0.0 - Y keeps an exact zero margin positive.
    report.margins.push_back(X[i] == 0.0 ? 0.0 - Y[i] : report.constant * X[i] - Y[i]);
  }

  double integral = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    if (m > 0) integral += 0.5 * (records[m].time - records[m - 1].time) * (rate[m - 1] + rate[m]);
    const double env = (G[0] == 0.0 || integral == 0.0) ? G[0] : G[0] * std::exp(report.constant * integral);
    report.envelope.push_back(env);
    if (G[m] > report.envelope.back()) report.envelope_dominates = false;
  }
  return report;
}

}  // namespace nsreg
