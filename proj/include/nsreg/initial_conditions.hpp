#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsreg/fft.hpp"
#include "nsreg/field.hpp"
#include "nsreg/spectral_ops.hpp"

namespace nsreg {

/// (sin x cos y cos z, -cos x sin y cos z, 0).
inline VectorField initial_taylor_green(const Grid& grid) {
  return VectorField::sample(grid, [](double x, double y, double z) {
    return std::array<double, 3>{std::sin(x) * std::cos(y) * std::cos(z),
                                 -std::cos(x) * std::sin(y) * std::cos(z), 0.0};
  });
}

namespace detail {

// Random modes are drawn over a fixed wavenumber box whose size depends only on
// the spectrum peak, in a fixed order. Fields with the same seed therefore
// share every coefficient across resolutions; finer grids merely keep more of
// the (exponentially small) tail.
inline int random_mode_extent(int spectrum_peak) { return 7 * spectrum_peak; }

// Mode amplitude envelope k exp(-(k/k_p)^2), i.e. an energy spectrum peaking near k_p.
inline double mode_envelope(double k, double peak) { return k * std::exp(-(k / peak) * (k / peak)); }

inline void check_spectrum_peak(const Grid& grid, int spectrum_peak) {
  if (spectrum_peak < 1 || static_cast<double>(spectrum_peak) > grid.dealias_cutoff()) {
    throw std::invalid_argument("spectrum peak " + std::to_string(spectrum_peak) +
                                " outside [1, dealias cutoff " + std::to_string(grid.dealias_cutoff()) + "]");
  }
}

/// Draws `components` Hermitian-symmetrized Gaussian spectral fields.
inline std::vector<SpectralField> random_spectral(const Grid& grid, std::uint64_t seed, int spectrum_peak,
                                                  int components) {
  const int extent = random_mode_extent(spectrum_peak);
  const int side = 2 * extent + 1;
  const std::size_t box = static_cast<std::size_t>(side) * side * side;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<std::complex<double>>> draws(components, std::vector<std::complex<double>>(box));
  for (auto& comp : draws) {
    for (auto& z : comp) {
      const double re = normal(rng);
      const double im = normal(rng);
      z = {re, im};
    }
  }
  auto box_index = [extent, side](int kx, int ky, int kz) {
    return (static_cast<std::size_t>(kx + extent) * side + static_cast<std::size_t>(ky + extent)) * side +
           static_cast<std::size_t>(kz + extent);
  };

  const double cutoff = grid.dealias_cutoff();
  const double peak = spectrum_peak;
  std::vector<SpectralField> out(components, SpectralField(grid));
  for (int c = 0; c < components; ++c) {
    out[c].for_each_mode([&](int kx, int ky, int kz, std::complex<double>& coeff) {
      if (std::abs(kx) > extent || std::abs(ky) > extent || kz > extent) return;
      if (std::abs(kx) > cutoff || std::abs(ky) > cutoff || kz > cutoff) return;
      if (grid.is_nyquist(kx) || grid.is_nyquist(ky) || grid.is_nyquist(kz)) return;
      const double k = std::sqrt(double(kx * kx + ky * ky + kz * kz));
      if (k == 0.0) return;
      const auto& d = draws[c];
      const std::complex<double> sym = 0.5 * (d[box_index(kx, ky, kz)] + std::conj(d[box_index(-kx, -ky, -kz)]));
      coeff = mode_envelope(k, peak) * sym;
    });
  }
  return out;
}

}  // namespace detail

/// Band-limited Gaussian divergence-free field, Leray-projected and rescaled to
/// the requested L2 norm. Deterministic in `seed`.
inline VectorField initial_random_divfree(const Grid& grid, std::uint64_t seed, int spectrum_peak, double amplitude) {
  detail::check_spectrum_peak(grid, spectrum_peak);
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("amplitude must be finite and non-negative");
  }
  auto comps = detail::random_spectral(grid, seed, spectrum_peak, 3);
  SpectralVector u_hat = leray_project(SpectralVector{std::move(comps[0]), std::move(comps[1]), std::move(comps[2])});
  const double norm = spectral_l2_norm(u_hat);
  const double scale = norm > 0.0 ? amplitude / norm : 0.0;
  for (auto& c : u_hat) c *= scale;
  return transform_inverse(u_hat);
}

/// Mean-zero band-limited Gaussian scalar field with unit L2 norm.
inline ScalarField random_band_limited_scalar(const Grid& grid, std::uint64_t seed, int spectrum_peak) {
  detail::check_spectrum_peak(grid, spectrum_peak);
  auto comps = detail::random_spectral(grid, seed, spectrum_peak, 1);
  const double norm = spectral_l2_norm(comps[0]);
  comps[0] *= 1.0 / norm;
  return transform_inverse(comps[0]);
}

}  // namespace nsreg
