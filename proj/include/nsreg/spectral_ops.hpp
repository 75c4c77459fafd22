#pragma once

#include <cmath>
#include <complex>

#include "nsreg/fft.hpp"
#include "nsreg/field.hpp"

namespace nsreg {

/// Derivative symbol of a signed wavenumber. The Nyquist mode has no real
/// derivative and maps to zero.
inline double derivative_symbol(const Grid& grid, int k) noexcept {
  return grid.is_nyquist(k) ? 0.0 : static_cast<double>(k);
}

namespace detail {

template <class F>
void for_each_wavevector(SpectralField& f, F&& fn) {
  const Grid& g = f.grid();
  f.for_each_mode([&](int kx, int ky, int kz, std::complex<double>& c) {
    fn(derivative_symbol(g, kx), derivative_symbol(g, ky), derivative_symbol(g, kz), kx, ky, kz, c);
  });
}

inline double axis_symbol(double kx, double ky, double kz, int axis) noexcept {
  return axis == 0 ? kx : (axis == 1 ? ky : kz);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spectral-space operators

/// Zeros every mode with some |k_i| > dealias_fraction * n / 2.
inline SpectralField dealias(SpectralField f) {
  const double cutoff = f.grid().dealias_cutoff();
  f.for_each_mode([cutoff](int kx, int ky, int kz, std::complex<double>& c) {
    if (std::abs(kx) > cutoff || std::abs(ky) > cutoff || std::abs(kz) > cutoff) c = 0.0;
  });
  return f;
}

inline SpectralVector dealias(SpectralVector v) {
  for (auto& c : v) c = dealias(std::move(c));
  return v;
}

inline SpectralField derivative(SpectralField f, int axis) {
  detail::for_each_wavevector(f, [axis](double kx, double ky, double kz, int, int, int,
                                        std::complex<double>& c) {
    c *= std::complex<double>(0.0, detail::axis_symbol(kx, ky, kz, axis));
  });
  return f;
}

inline SpectralVector gradient(const SpectralField& f) {
  return {derivative(f, 0), derivative(f, 1), derivative(f, 2)};
}

inline SpectralField divergence(const SpectralVector& v) {
  require_same_grid(v[0].grid(), v[1].grid(), "divergence");
  require_same_grid(v[0].grid(), v[2].grid(), "divergence");
  SpectralField out = derivative(v[0], 0);
  out += derivative(v[1], 1);
  out += derivative(v[2], 2);
  return out;
}

inline SpectralVector curl(const SpectralVector& v) {
  require_same_grid(v[0].grid(), v[1].grid(), "curl");
  require_same_grid(v[0].grid(), v[2].grid(), "curl");
  SpectralVector out{derivative(v[2], 1), derivative(v[0], 2), derivative(v[1], 0)};
  const SpectralField a = derivative(v[1], 2), b = derivative(v[2], 0), c = derivative(v[0], 1);
  for (std::size_t i = 0; i < out[0].size(); ++i) {
    out[0][i] -= a[i];
    out[1][i] -= b[i];
    out[2][i] -= c[i];
  }
  return out;
}

/// Multiplies by -|k|^2 (same symbol as divergence of gradient).
inline SpectralField laplacian(SpectralField f) {
  detail::for_each_wavevector(f, [](double kx, double ky, double kz, int, int, int,
                                    std::complex<double>& c) { c *= -(kx * kx + ky * ky + kz * kz); });
  return f;
}

/// Removes the gradient part: v - k (k.v) / |k|^2. The k = 0 mode is untouched.
inline SpectralVector leray_project(SpectralVector v) {
  require_same_grid(v[0].grid(), v[1].grid(), "leray_project");
  require_same_grid(v[0].grid(), v[2].grid(), "leray_project");
  const Grid& g = v[0].grid();
  const std::size_t n = g.n(), nz = g.spectral_nz();
  for (std::size_t i = 0; i < n; ++i) {
    const double kx = derivative_symbol(g, g.wavenumber(i));
    for (std::size_t j = 0; j < n; ++j) {
      const double ky = derivative_symbol(g, g.wavenumber(j));
      for (std::size_t k = 0; k < nz; ++k) {
        const double kz = derivative_symbol(g, static_cast<int>(k));
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;
        const std::size_t idx = g.spectral_index(i, j, k);
        const std::complex<double> kdotv = kx * v[0][idx] + ky * v[1][idx] + kz * v[2][idx];
        v[0][idx] -= kx * kdotv / k2;
        v[1][idx] -= ky * kdotv / k2;
        v[2][idx] -= kz * kdotv / k2;
      }
    }
  }
  return v;
}

/// sum_k |F_k|^2 over the full (conjugate-completed) wavenumber set.
inline double spectral_energy_sum(const SpectralField& f) {
  const int nyq = static_cast<int>(f.grid().n() / 2);
  double sum = 0.0;
  f.for_each_mode([&](int, int, int kz, const std::complex<double>& c) {
    const double w = (kz == 0 || kz == nyq) ? 1.0 : 2.0;
    sum += w * std::norm(c);
  });
  return sum;
}

/// L2 norm over the box computed from the coefficients (Parseval).
inline double spectral_l2_norm(const SpectralField& f) {
  return std::sqrt(Grid::volume() * spectral_energy_sum(f));
}

inline double spectral_l2_norm(const SpectralVector& v) {
  double s = 0.0;
  for (const auto& c : v) s += spectral_energy_sum(c);
  return std::sqrt(Grid::volume() * s);
}

/// Largest coefficient magnitude.
inline double spectral_max_abs(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.coefficients()) m = std::max(m, std::abs(c));
  return m;
}

// ---------------------------------------------------------------------------
// Real-space wrappers

inline VectorField gradient(const ScalarField& f) { return transform_inverse(gradient(transform_forward(f))); }

inline ScalarField divergence(const VectorField& v) { return transform_inverse(divergence(transform_forward(v))); }

inline VectorField curl(const VectorField& v) { return transform_inverse(curl(transform_forward(v))); }

inline ScalarField laplacian(const ScalarField& f) { return transform_inverse(laplacian(transform_forward(f))); }

inline VectorField leray_project(const VectorField& v) {
  return transform_inverse(leray_project(transform_forward(v)));
}

inline ScalarField dealias(const ScalarField& f) { return transform_inverse(dealias(transform_forward(f))); }

inline VectorField dealias(const VectorField& v) { return transform_inverse(dealias(transform_forward(v))); }

/// Full velocity gradient G[i][j] = d u_i / d x_j.
inline std::array<std::array<ScalarField, 3>, 3> velocity_gradient(const SpectralVector& u_hat) {
  auto grad_row = [](const SpectralField& c) {
    return std::array<ScalarField, 3>{transform_inverse(derivative(c, 0)), transform_inverse(derivative(c, 1)),
                                      transform_inverse(derivative(c, 2))};
  };
  return {grad_row(u_hat[0]), grad_row(u_hat[1]), grad_row(u_hat[2])};
}

inline std::array<std::array<ScalarField, 3>, 3> velocity_gradient(const VectorField& u) {
  return velocity_gradient(transform_forward(u));
}

}  // namespace nsreg
