#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nsreg/field.hpp"
#include "nsreg/norms.hpp"
#include "nsreg/spectral_ops.hpp"

namespace nsreg {

namespace detail {

inline double gradient_l2_squared(const ScalarField& f) {
  const VectorField g = gradient(f);
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (double v : g[c].values()) s += v * v;
  }
  return s * f.grid().cell_volume();
}

inline void require_mean_zero(const ScalarField& f, const char* where) {
  double mean = 0.0, peak = 0.0;
  for (double v : f.values()) {
    mean += v;
    peak = std::max(peak, std::abs(v));
  }
  mean /= static_cast<double>(f.size());
  if (std::abs(mean) > 1e-10 * std::max(peak, 1e-300)) {
    throw std::invalid_argument(std::string(where) + ": field must have zero mean on the box");
  }
}

}  // namespace detail

/// |f|_6 / |grad f|_2 for mean-zero f; ensemble maxima estimate the box
/// Sobolev constant.
inline double sobolev_ratio(const ScalarField& f) {
  const double g2 = detail::gradient_l2_squared(f);
  if (!(g2 > 0.0)) throw std::invalid_argument("sobolev_ratio: constant field has zero gradient");
  detail::require_mean_zero(f, "sobolev_ratio");
  return lq_norm(f, 6.0) / std::sqrt(g2);
}

/// theta with theta/2 + (1 - theta)/6 = 1/r.
inline double interpolation_theta(double r) { return 3.0 / r - 0.5; }

inline void require_lemma_exponent(double r) {
  if (!(r >= 2.0 && r < 6.0)) throw std::invalid_argument("exponent r must lie in [2, 6), got " + std::to_string(r));
}

/// |f|_r^2 / ((|f|_2^2)^theta (|f|_6^2)^(1-theta)); at most 1 by Holder.
inline double interpolation_check(const ScalarField& f, double r) {
  require_lemma_exponent(r);
  const double theta = interpolation_theta(r);
  const double l2 = lq_norm(f, 2.0), l6 = lq_norm(f, 6.0), lr = lq_norm(f, r);
  if (l2 == 0.0) throw std::invalid_argument("interpolation_check: zero field");
  return (lr * lr) / (std::pow(l2 * l2, theta) * std::pow(l6 * l6, 1.0 - theta));
}

/// (ab, theta a^{1/theta} + (1 - theta) b^{1/(1-theta)}); the first never exceeds the second.
inline std::pair<double, double> young_split(double a, double b, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("young_split: theta must lie in (0, 1)");
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("young_split: a, b must be >= 0");
  return {a * b, theta * std::pow(a, 1.0 / theta) + (1.0 - theta) * std::pow(b, 1.0 / (1.0 - theta))};
}

/// 9 logarithmically spaced points from 1e-2 to 1e2.
inline std::vector<double> default_beta_grid() {
  std::vector<double> out;
  for (int i = 0; i <= 8; ++i) out.push_back(std::pow(10.0, -2.0 + 0.5 * i));
  return out;
}

struct LemmaReport {
  double r = 2.0;
  double theta = 1.0;
  std::vector<double> beta_grid;
  double fitted_constant = 0.0;
  std::size_t worst_member = 0;
  double worst_beta = 0.0;
  std::size_t ensemble_size = 0;
  bool holds = true;  // inequality re-verified with the fitted constant for every (f, beta)
};

/// Minimal C with beta |f|_r^2 <= |grad f|_2^2 / 4 + C beta^{1/theta} |f|_2^2,
/// given the three norms.
inline double lemma_minimal_constant(double lr_sq, double grad_sq, double l2_sq, double beta, double theta) {
  return std::max(0.0, (beta * lr_sq - 0.25 * grad_sq) / (std::pow(beta, 1.0 / theta) * l2_sq));
}

/// Fits the smallest constant for which the interpolation-Sobolev inequality
/// holds over every ensemble member and every beta. Constants are those of the
/// periodic box, not of the whole space.
inline LemmaReport lemma1_verify(std::span<const ScalarField> ensemble, double r, std::vector<double> beta_grid) {
  if (ensemble.empty()) throw std::invalid_argument("lemma1_verify: empty ensemble");
  require_lemma_exponent(r);
  if (beta_grid.empty()) throw std::invalid_argument("lemma1_verify: empty beta grid");
  for (double b : beta_grid) {
    if (!(b > 0.0)) throw std::invalid_argument("lemma1_verify: beta must be > 0");
  }

  LemmaReport report;
  report.r = r;
  report.theta = interpolation_theta(r);
  report.beta_grid = std::move(beta_grid);
  report.ensemble_size = ensemble.size();

  struct Norms {
    double lr_sq, grad_sq, l2_sq;
  };
  std::vector<Norms> norms;
  for (const auto& f : ensemble) {
    detail::require_mean_zero(f, "lemma1_verify");
    const double l2 = lq_norm(f, 2.0);
    if (l2 == 0.0) throw std::invalid_argument("lemma1_verify: zero ensemble member");
    const double lr = lq_norm(f, r);
    norms.push_back({lr * lr, detail::gradient_l2_squared(f), l2 * l2});
  }

  bool first = true;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    for (double beta : report.beta_grid) {
      const double c = lemma_minimal_constant(norms[i].lr_sq, norms[i].grad_sq, norms[i].l2_sq, beta, report.theta);
      if (first || c > report.fitted_constant) {
        report.fitted_constant = c;
        report.worst_member = i;
        report.worst_beta = beta;
        first = false;
      }
    }
  }

  for (const auto& nm : norms) {
    for (double beta : report.beta_grid) {
      const double lhs = beta * nm.lr_sq;
      const double rhs = 0.25 * nm.grad_sq + report.fitted_constant * std::pow(beta, 1.0 / report.theta) * nm.l2_sq;
      // A few ulps of slack: rhs is the fitted bound re-assembled in floating point.
      if (lhs > rhs * (1.0 + 1e-12)) report.holds = false;
    }
  }
  return report;
}

}  // namespace nsreg
