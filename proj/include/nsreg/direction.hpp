#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "nsreg/fft.hpp"
#include "nsreg/field.hpp"
#include "nsreg/norms.hpp"
#include "nsreg/spectral_ops.hpp"

namespace nsreg {

/// Regularization of |u| near its zeros. The floor is m = max(|u|, eps) with
/// eps = epsilon_rel * max|u|; the mask keeps nodes with |u| >= mask_delta * max|u|.
struct DirectionFloors {
  double epsilon_rel = 1e-12;
  double mask_delta = 1e-2;

  void validate() const {
    if (!(epsilon_rel > 0.0)) throw std::invalid_argument("epsilon_rel must be > 0");
    if (!(mask_delta > 0.0 && mask_delta < 1.0)) throw std::invalid_argument("mask_delta must lie in (0, 1)");
  }
};

using GradientTensor = std::array<std::array<ScalarField, 3>, 3>;

/// |u| and its gradient, regularized by the floor. Shared by the criterion
/// quantity and the L^3 estimate chain so both see the same m.
struct SpeedField {
  ScalarField speed;       // m = max(|u|, eps)
  VectorField speed_grad;  // grad m, zero where the floor is active
  ScalarField divergence;  // div u
  Mask mask;               // |u| >= delta max|u|
  double max_speed = 0.0;
  double epsilon = 0.0;
  bool degenerate = false;  // u == 0 or empty mask
};

/// grad |u| = (grad u)^T u / |u| assembled from spectral derivatives of the
/// band-limited velocity, never by differentiating |u| itself.
inline SpeedField speed_field(const VectorField& u, const GradientTensor& grad, const DirectionFloors& floors) {
  floors.validate();
  const Grid& g = u.grid();
  SpeedField out{ScalarField(g), VectorField(g), ScalarField(g), Mask(g.points(), false)};
  const ScalarField mag = u.magnitude();
  for (double v : mag.values()) out.max_speed = std::max(out.max_speed, v);
  out.epsilon = floors.epsilon_rel * out.max_speed;
  const double mask_level = floors.mask_delta * out.max_speed;
  bool any = false;
  for (std::size_t n = 0; n < g.points(); ++n) {
    out.divergence[n] = grad[0][0][n] + grad[1][1][n] + grad[2][2][n];
    const double s = mag[n];
    if (out.max_speed == 0.0) continue;
    if (s >= out.epsilon && s > 0.0) {
      out.speed[n] = s;
      for (int j = 0; j < 3; ++j) {
        out.speed_grad[j][n] = (u[0][n] * grad[0][j][n] + u[1][n] * grad[1][j][n] + u[2][n] * grad[2][j][n]) / s;
      }
    } else {
      out.speed[n] = out.epsilon;
    }
    if (s >= mask_level) {
      out.mask[n] = true;
      any = true;
    }
  }
  out.degenerate = !any;
  return out;
}

inline SpeedField speed_field(const VectorField& u, const DirectionFloors& floors) {
  return speed_field(u, velocity_gradient(u), floors);
}

struct DirectionDivergence {
  ScalarField value;  // div(u/m)
  Mask mask;
  bool degenerate = false;
};

/// div(u/m) = div(u)/m - u.grad(m)/m^2.
inline DirectionDivergence direction_divergence(const SpeedField& sf, const VectorField& u) {
  const Grid& g = u.grid();
  DirectionDivergence out{ScalarField(g), sf.mask, sf.degenerate};
  if (sf.max_speed == 0.0) return out;
  for (std::size_t n = 0; n < g.points(); ++n) {
    const double m = sf.speed[n];
    const double stream = u[0][n] * sf.speed_grad[0][n] + u[1][n] * sf.speed_grad[1][n] + u[2][n] * sf.speed_grad[2][n];
    out.value[n] = sf.divergence[n] / m - stream / (m * m);
  }
  return out;
}

inline DirectionDivergence direction_divergence(const VectorField& u, const DirectionFloors& floors = {}) {
  return direction_divergence(speed_field(u, floors), u);
}

/// |u| div(u/|u|) = -(u/|u|).grad|u| on the regularized field: m div(u/m).
inline ScalarField weighted_direction_divergence(const SpeedField& sf, const VectorField& u) {
  ScalarField out(u.grid());
  if (sf.max_speed == 0.0) return out;
  const auto dd = direction_divergence(sf, u);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = sf.speed[n] * dd.value[n];
  return out;
}

struct IdentityResidual {
  double value = 0.0;
  bool degenerate = false;
};

/// sup over the mask of | m div(u/m) + (u/m).grad|u| |. The left term comes
/// from the direction divergence; grad|u| on the right is taken along the
/// streamline route grad(|u|^2) / (2m), differentiating the sampled |u|^2
/// spectrally. For divergence-free u the two cancel up to discretization error.
inline IdentityResidual identity_residual(const SpeedField& sf, const VectorField& u) {
  IdentityResidual out;
  out.degenerate = sf.degenerate;
  if (sf.degenerate) return out;
  const Grid& g = u.grid();
  const auto dd = direction_divergence(sf, u);

  ScalarField speed_sq(g);
  for (std::size_t n = 0; n < g.points(); ++n) speed_sq[n] = u[0][n] * u[0][n] + u[1][n] * u[1][n] + u[2][n] * u[2][n];
  const VectorField grad_speed_sq = gradient(speed_sq);

  for (std::size_t n = 0; n < g.points(); ++n) {
    if (!sf.mask[n]) continue;
    const double m = sf.speed[n];
    double streamline = 0.0;
    for (int j = 0; j < 3; ++j) streamline += (u[j][n] / m) * (grad_speed_sq[j][n] / (2.0 * m));
    out.value = std::max(out.value, std::abs(m * dd.value[n] + streamline));
  }
  return out;
}

inline IdentityResidual identity_residual(const VectorField& u, const DirectionFloors& floors = {}) {
  return identity_residual(speed_field(u, floors), u);
}

struct SymmetricPartCheck {
  double antisymmetric_form = 0.0;  // sup |u^T Omega u|
  double scale = 0.0;               // max|u|^2 * max|grad u|
};

/// Measures the antisymmetric quadratic form u^T Omega(u) u with
/// Omega = (grad u - grad u^T)/2, which vanishes identically.
inline SymmetricPartCheck symmetric_part_check(const VectorField& u) {
  const GradientTensor grad = velocity_gradient(u);
  SymmetricPartCheck out;
  double umax = 0.0, gmax = 0.0;
  for (std::size_t n = 0; n < u.grid().points(); ++n) {
    double form = 0.0, g2 = 0.0, u2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      u2 += u[i][n] * u[i][n];
      for (int j = 0; j < 3; ++j) {
        const double omega = 0.5 * (grad[i][j][n] - grad[j][i][n]);
        form += u[i][n] * omega * u[j][n];
        g2 += grad[i][j][n] * grad[i][j][n];
      }
    }
    out.antisymmetric_form = std::max(out.antisymmetric_form, std::abs(form));
    umax = std::max(umax, u2);
    gmax = std::max(gmax, std::sqrt(g2));
  }
  out.scale = umax * gmax;
  return out;
}

/// Pointwise -u^T (grad u) u and -u^T D(u) u.
inline std::pair<ScalarField, ScalarField> streamline_flux_forms(const VectorField& u) {
  const GradientTensor grad = velocity_gradient(u);
  ScalarField full(u.grid()), sym(u.grid());
  for (std::size_t n = 0; n < u.grid().points(); ++n) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        a += u[i][n] * grad[i][j][n] * u[j][n];
        b += u[i][n] * 0.5 * (grad[i][j][n] + grad[j][i][n]) * u[j][n];
      }
    }
    full[n] = -a;
    sym[n] = -b;
  }
  return {std::move(full), std::move(sym)};
}

}  // namespace nsreg
