#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "nsreg/error.hpp"
#include "nsreg/fft.hpp"
#include "nsreg/field.hpp"
#include "nsreg/spectral_ops.hpp"

namespace nsreg {

struct SolverConfig {
  double viscosity = 1.0;
  double dt = 1e-3;
  double t_end = 1.0;
  double cfl_limit = 0.5;

  void validate() const {
    if (!(viscosity > 0.0) || !std::isfinite(viscosity)) throw std::invalid_argument("viscosity must be > 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
    if (!std::isfinite(t_end)) throw std::invalid_argument("t_end must be finite");
    if (!(cfl_limit > 0.0)) throw std::invalid_argument("cfl_limit must be > 0");
  }
};

struct SolverState {
  double time = 0.0;
  VectorField velocity;
  long step_index = 0;
};

namespace detail {

/// The six independent products u_i u_j, transformed and dealiased.
/// Index order: 00 01 02 11 12 22.
inline std::array<SpectralField, 6> velocity_products(const VectorField& u) {
  const Grid& g = u.grid();
  std::array<SpectralField, 6> out{SpectralField(g), SpectralField(g), SpectralField(g),
                                   SpectralField(g), SpectralField(g), SpectralField(g)};
  ScalarField prod(g);
  int slot = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j, ++slot) {
      const auto a = u[i].values();
      const auto b = u[j].values();
      auto p = prod.values();
      for (std::size_t n = 0; n < p.size(); ++n) p[n] = a[n] * b[n];
      out[slot] = dealias(transform_forward(prod));
    }
  }
  return out;
}

inline int product_slot(int i, int j) {
  if (i > j) std::swap(i, j);
  static constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[i][j];
}

}  // namespace detail

/// div(u (x) u) in spectral form: products in real space, derivatives in
/// spectral space, 2/3 dealiased.
inline SpectralVector nonlinear_term(const SpectralVector& u_hat) {
  const VectorField u = transform_inverse(dealias(u_hat));
  const auto products = detail::velocity_products(u);
  const Grid& g = u.grid();
  SpectralVector out{SpectralField(g), SpectralField(g), SpectralField(g)};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out[i] += derivative(products[detail::product_slot(i, j)], j);
  }
  return out;
}

inline VectorField nonlinear_term(const VectorField& u) {
  return transform_inverse(nonlinear_term(transform_forward(u)));
}

/// Pressure from -Lap P = sum_ij d_i d_j (u_i u_j), zero-mean gauge.
inline ScalarField recover_pressure(const VectorField& u) {
  const auto products = detail::velocity_products(u);
  const Grid& g = u.grid();
  SpectralField p_hat(g);
  const std::size_t n = g.n(), nz = g.spectral_nz();
  for (std::size_t i = 0; i < n; ++i) {
    const double kx = derivative_symbol(g, g.wavenumber(i));
    for (std::size_t j = 0; j < n; ++j) {
      const double ky = derivative_symbol(g, g.wavenumber(j));
      for (std::size_t k = 0; k < nz; ++k) {
        const double kz = derivative_symbol(g, static_cast<int>(k));
        const double kv[3] = {kx, ky, kz};
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;
        const std::size_t idx = g.spectral_index(i, j, k);
        std::complex<double> s = 0.0;
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) s += kv[a] * kv[b] * products[detail::product_slot(a, b)][idx];
        }
        // |k|^2 P = -k_a k_b Q_ab
        p_hat[idx] = -s / k2;
      }
    }
  }
  return transform_inverse(p_hat);
}

/// CFL number dt max|u| / h.
inline double cfl_number(const VectorField& u, double dt) {
  double umax = 0.0;
  const auto mag = u.magnitude();
  for (double v : mag.values()) umax = std::max(umax, v);
  return dt * umax / u.grid().spacing();
}

namespace detail {

inline void apply_decay(SpectralVector& v, double factor_time, double viscosity) {
  for (auto& comp : v) {
    detail::for_each_wavevector(comp, [&](double kx, double ky, double kz, int, int, int, std::complex<double>& c) {
      c *= std::exp(-viscosity * (kx * kx + ky * ky + kz * kz) * factor_time);
    });
  }
}

// d/dt u_hat = -P[div(u (x) u)]
inline SpectralVector projected_rhs(const SpectralVector& u_hat) {
  SpectralVector n = leray_project(dealias(nonlinear_term(u_hat)));
  for (auto& c : n) c *= -1.0;
  return n;
}

inline SpectralVector axpy(const SpectralVector& x, double a, const SpectralVector& y) {
  SpectralVector out = x;
  for (int c = 0; c < 3; ++c) {
    auto o = out[c].coefficients();
    const auto yc = y[c].coefficients();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += a * yc[i];
  }
  return out;
}

}  // namespace detail

/// Advances one step: classical four-stage Runge-Kutta on the projected
/// nonlinear term, with diffusion integrated exactly by exp(-nu |k|^2 t).
inline SolverState step(const SolverState& state, const SolverConfig& cfg) {
  const double dt = cfg.dt;
  const double cfl = cfl_number(state.velocity, dt);
  if (cfl > cfg.cfl_limit) {
    std::ostringstream os;
    os.precision(17);
    os << "CFL number " << cfl << " exceeds limit " << cfg.cfl_limit << " at step " << state.step_index;
    throw NumericalError(os.str(), "cfl");
  }
  const double nu = cfg.viscosity;
  const SpectralVector u0 = dealias(leray_project(transform_forward(state.velocity)));

  // Integrating-factor RK4: with E_h = exp(-nu k^2 dt/2), E = E_h^2,
  //   k1 = N(u), k2 = N(E_h (u + dt/2 k1)), k3 = N(E_h u + dt/2 k2),
  //   k4 = N(E u + dt E_h k3), u' = E u + dt/6 (E k1 + 2 E_h (k2 + k3) + k4).
  const SpectralVector k1 = detail::projected_rhs(u0);

  SpectralVector half_u0 = u0;
  detail::apply_decay(half_u0, 0.5 * dt, nu);
  SpectralVector stage = detail::axpy(u0, 0.5 * dt, k1);
  detail::apply_decay(stage, 0.5 * dt, nu);
  SpectralVector k2 = detail::projected_rhs(stage);

  SpectralVector k3 = detail::projected_rhs(detail::axpy(half_u0, 0.5 * dt, k2));

  SpectralVector k3_decayed = k3;
  detail::apply_decay(k3_decayed, 0.5 * dt, nu);
  SpectralVector full_u0 = half_u0;
  detail::apply_decay(full_u0, 0.5 * dt, nu);
  const SpectralVector k4 = detail::projected_rhs(detail::axpy(full_u0, dt, k3_decayed));

  SpectralVector k1_decayed = k1;
  detail::apply_decay(k1_decayed, dt, nu);
  SpectralVector mid = detail::axpy(k2, 1.0, k3);
  detail::apply_decay(mid, 0.5 * dt, nu);

  SpectralVector next = detail::axpy(full_u0, dt / 6.0, k1_decayed);
  next = detail::axpy(next, dt / 3.0, mid);
  next = detail::axpy(next, dt / 6.0, k4);

  SolverState out{state.time + dt, transform_inverse(next), state.step_index + 1};
  for (int c = 0; c < 3; ++c) {
    for (double v : out.velocity[c].values()) {
      if (!std::isfinite(v)) {
        throw NumericalError("non-finite velocity after step " + std::to_string(out.step_index), "nan");
      }
    }
  }
  return out;
}

/// Number of fixed steps needed to go from t0 to t_end.
inline long step_count(double t0, double t_end, double dt) {
  const double steps = (t_end - t0) / dt;
  return steps <= 0.0 ? 0 : static_cast<long>(std::llround(steps));
}

}  // namespace nsreg
