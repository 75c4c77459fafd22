#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsreg/field.hpp"

namespace nsreg {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Pointwise selection of grid nodes; empty means "everywhere".
using Mask = std::vector<bool>;

/// Grid-quadrature L^q norm (h^3 sum |f|^q)^(1/q); q = inf gives the grid max.
/// With a mask, only selected nodes contribute.
inline double lq_norm(std::span<const double> values, double cell_volume, double q, const Mask& mask = {}) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: exponent must be >= 1, got " + std::to_string(q));
  if (!mask.empty() && mask.size() != values.size()) throw std::invalid_argument("lq_norm: mask size mismatch");
  auto selected = [&](std::size_t i) { return mask.empty() || mask[i]; };
  double peak = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (selected(i)) peak = std::max(peak, std::abs(values[i]));
  }
  if (std::isinf(q) || peak == 0.0) return peak;
  // Scale by the peak so that large q neither overflows nor underflows.
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (selected(i)) sum += std::pow(std::abs(values[i]) / peak, q);
  }
  return peak * std::pow(cell_volume * sum, 1.0 / q);
}

inline double lq_norm(const ScalarField& f, double q, const Mask& mask = {}) {
  return lq_norm(f.values(), f.grid().cell_volume(), q, mask);
}

/// L^q norm of |u|.
inline double lq_norm(const VectorField& u, double q, const Mask& mask = {}) { return lq_norm(u.magnitude(), q, mask); }

/// h^3 sum f.
inline double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

/// Running time aggregate of a spatial norm series for L^p_t(L^q_x).
/// Finite p: trapezoid integral of value^p. p = inf: running max.
class MixedNormAccumulator {
 public:
  explicit MixedNormAccumulator(double p) : p_(p) {
    if (!(p >= 1.0)) throw std::invalid_argument("mixed norm: time exponent must be >= 1");
  }

  void add(double t, double value) {
    if (!std::isfinite(value) || value < 0.0) throw std::invalid_argument("mixed norm: sample must be finite and >= 0");
    if (has_sample_ && !(t > last_t_)) {
      throw std::invalid_argument("mixed norm: time samples must be strictly increasing");
    }
    if (std::isinf(p_)) {
      integral_ = std::max(integral_, value);
    } else {
      const double powered = std::pow(value, p_);
      if (has_sample_) integral_ += 0.5 * (t - last_t_) * (last_powered_ + powered);
      last_powered_ = powered;
    }
    last_t_ = t;
    has_sample_ = true;
  }

  double p() const noexcept { return p_; }
  /// int value^p dt so far (running max for p = inf).
  double integral() const noexcept { return integral_; }
  /// The mixed norm so far: integral^(1/p).
  double norm() const { return std::isinf(p_) ? integral_ : std::pow(integral_, 1.0 / p_); }

 private:
  double p_;
  double integral_ = 0.0;
  double last_t_ = 0.0;
  double last_powered_ = 0.0;
  bool has_sample_ = false;
};

struct TimeSample {
  double time;
  double value;
};

/// L^p in time of a sampled series of spatial norms.
inline double mixed_norm_accumulate(std::span<const TimeSample> series, double p) {
  MixedNormAccumulator acc(p);
  for (const auto& s : series) acc.add(s.time, s.value);
  return acc.norm();
}

}  // namespace nsreg
