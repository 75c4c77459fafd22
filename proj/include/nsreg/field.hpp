#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsreg {

/// Uniform n^3 grid on the periodic box [0, 2pi)^3. Integer wavenumbers
/// {-n/2+1, ..., n/2} per axis; spectral storage keeps kz >= 0 only.
class Grid {
 public:
  explicit Grid(std::size_t n, double dealias_fraction = 2.0 / 3.0)
      : n_(n), dealias_fraction_(dealias_fraction) {
    if (n < 4 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("grid size must be a power of two >= 4, got " +
                                  std::to_string(n));
    }
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
      throw std::invalid_argument("dealias fraction must lie in (0, 1]");
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t points() const noexcept { return n_ * n_ * n_; }
  std::size_t spectral_nz() const noexcept { return n_ / 2 + 1; }
  std::size_t spectral_points() const noexcept { return n_ * n_ * spectral_nz(); }

  static constexpr double box_length() noexcept { return 2.0 * std::numbers::pi; }
  double spacing() const noexcept { return box_length() / static_cast<double>(n_); }
  double cell_volume() const noexcept { return std::pow(spacing(), 3); }
  static double volume() noexcept { return std::pow(box_length(), 3); }

  double dealias_fraction() const noexcept { return dealias_fraction_; }
  /// Modes with any |k_i| above this value are removed by dealiasing.
  double dealias_cutoff() const noexcept {
    return dealias_fraction_ * static_cast<double>(n_) / 2.0;
  }

  /// Signed wavenumber of an x/y storage index.
  int wavenumber(std::size_t index) const noexcept {
    const auto i = static_cast<long>(index);
    const auto n = static_cast<long>(n_);
    return static_cast<int>(i <= n / 2 ? i : i - n);
  }
  /// Storage index of a signed x/y wavenumber.
  std::size_t index_of(int k) const noexcept {
    const auto n = static_cast<long>(n_);
    return static_cast<std::size_t>(k >= 0 ? k : k + n);
  }
  bool is_nyquist(int k) const noexcept { return std::abs(k) == static_cast<int>(n_ / 2); }

  std::size_t real_index(std::size_t ix, std::size_t iy, std::size_t iz) const noexcept {
    return (ix * n_ + iy) * n_ + iz;
  }
  std::size_t spectral_index(std::size_t ix, std::size_t iy, std::size_t kz) const noexcept {
    return (ix * n_ + iy) * spectral_nz() + kz;
  }
  double coordinate(std::size_t i) const noexcept { return static_cast<double>(i) * spacing(); }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n_ == b.n_ && a.dealias_fraction_ == b.dealias_fraction_;
  }

 private:
  std::size_t n_;
  double dealias_fraction_;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(where) + ": grid mismatch (" +
                                std::to_string(a.n()) + " vs " + std::to_string(b.n()) + ")");
  }
}

/// Real samples on the grid, row-major with z fastest.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid) : grid_(grid), values_(grid.points(), 0.0) {}
  ScalarField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.points()) {
      throw std::invalid_argument("scalar field size does not match grid");
    }
  }

  /// Samples f(x, y, z) at the grid nodes.
  template <class F>
  static ScalarField sample(const Grid& grid, F&& f) {
    ScalarField out(grid);
    const std::size_t n = grid.n();
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid.coordinate(i);
      for (std::size_t j = 0; j < n; ++j) {
        const double y = grid.coordinate(j);
        for (std::size_t k = 0; k < n; ++k) {
          out.values_[grid.real_index(i, j, k)] = f(x, y, grid.coordinate(k));
        }
      }
    }
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  ScalarField& operator+=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField +=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField -=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  ScalarField& operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
  }
  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

class VectorField {
 public:
  explicit VectorField(const Grid& grid) : components_{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}
  VectorField(ScalarField u1, ScalarField u2, ScalarField u3)
      : components_{std::move(u1), std::move(u2), std::move(u3)} {
    require_same_grid(components_[0].grid(), components_[1].grid(), "VectorField");
    require_same_grid(components_[0].grid(), components_[2].grid(), "VectorField");
  }

  template <class F>
  static VectorField sample(const Grid& grid, F&& f) {
    VectorField out(grid);
    const std::size_t n = grid.n();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          const std::array<double, 3> v = f(grid.coordinate(i), grid.coordinate(j), grid.coordinate(k));
          const std::size_t idx = grid.real_index(i, j, k);
          for (int c = 0; c < 3; ++c) out.components_[c][idx] = v[c];
        }
      }
    }
    return out;
  }

  const Grid& grid() const noexcept { return components_[0].grid(); }
  const ScalarField& operator[](int c) const noexcept { return components_[c]; }
  ScalarField& operator[](int c) noexcept { return components_[c]; }

  /// Pointwise Euclidean magnitude |u|.
  ScalarField magnitude() const {
    ScalarField out(grid());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double a = components_[0][i], b = components_[1][i], c = components_[2][i];
      out[i] = std::sqrt(a * a + b * b + c * c);
    }
    return out;
  }

  VectorField& operator+=(const VectorField& o) {
    for (int c = 0; c < 3; ++c) components_[c] += o.components_[c];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    for (int c = 0; c < 3; ++c) components_[c] -= o.components_[c];
    return *this;
  }
  VectorField& operator*=(double s) noexcept {
    for (auto& comp : components_) comp *= s;
    return *this;
  }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }

  friend bool operator==(const VectorField&, const VectorField&) = default;

 private:
  std::array<ScalarField, 3> components_;
};

/// Fourier coefficients F_k with f(x) = sum_k F_k exp(i k.x), stored over the
/// kz >= 0 half space. Conjugate symmetry supplies the rest.
class SpectralField {
 public:
  using value_type = std::complex<double>;

  explicit SpectralField(const Grid& grid) : grid_(grid), coeffs_(grid.spectral_points()) {}

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const value_type> coefficients() const noexcept { return coeffs_; }
  std::span<value_type> coefficients() noexcept { return coeffs_; }
  value_type operator[](std::size_t i) const noexcept { return coeffs_[i]; }
  value_type& operator[](std::size_t i) noexcept { return coeffs_[i]; }

  /// Coefficient at an arbitrary signed wavenumber, using conjugate symmetry
  /// for kz < 0.
  value_type at(int kx, int ky, int kz) const {
    const int n = static_cast<int>(grid_.n());
    auto wrap = [n](int k) { return ((k % n) + n) % n; };
    if (kz < 0) {
      return std::conj(at(-kx, -ky, -kz));
    }
    if (kz > n / 2) throw std::out_of_range("kz beyond Nyquist");
    return coeffs_[grid_.spectral_index(static_cast<std::size_t>(wrap(kx)),
                                        static_cast<std::size_t>(wrap(ky)),
                                        static_cast<std::size_t>(kz))];
  }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_, "SpectralField +=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(double s) noexcept {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  /// Visits every stored coefficient with its signed wavenumber.
  template <class F>
  void for_each_mode(F&& f) {
    const std::size_t n = grid_.n(), nz = grid_.spectral_nz();
    for (std::size_t i = 0; i < n; ++i) {
      const int kx = grid_.wavenumber(i);
      for (std::size_t j = 0; j < n; ++j) {
        const int ky = grid_.wavenumber(j);
        for (std::size_t k = 0; k < nz; ++k) {
          f(kx, ky, static_cast<int>(k), coeffs_[(i * n + j) * nz + k]);
        }
      }
    }
  }
  template <class F>
  void for_each_mode(F&& f) const {
    const std::size_t n = grid_.n(), nz = grid_.spectral_nz();
    for (std::size_t i = 0; i < n; ++i) {
      const int kx = grid_.wavenumber(i);
      for (std::size_t j = 0; j < n; ++j) {
        const int ky = grid_.wavenumber(j);
        for (std::size_t k = 0; k < nz; ++k) {
          f(kx, ky, static_cast<int>(k), coeffs_[(i * n + j) * nz + k]);
        }
      }
    }
  }

 private:
  Grid grid_;
  std::vector<value_type> coeffs_;
};

using SpectralVector = std::array<SpectralField, 3>;

}  // namespace nsreg
