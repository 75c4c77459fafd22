#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <utility>
#include <vector>

#include "nsreg/error.hpp"
#include "nsreg/field.hpp"

namespace nsreg {

namespace detail {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  PlanPair() = default;
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
  ~PlanPair() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

// FFTW planning is not thread safe; execution with the new-array interface is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  void set_threads(int threads) {
    std::lock_guard lock(mutex_);
    threads = std::max(1, threads);
    if (threads == threads_) return;
    if (!threads_initialized_) {
      fftw_init_threads();
      threads_initialized_ = true;
    }
    threads_ = threads;
    plans_.clear();
  }
  int threads() const {
    std::lock_guard lock(mutex_);
    return threads_;
  }

  const PlanPair& plans(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return *it->second;
    if (threads_initialized_) fftw_plan_with_nthreads(threads_);
    const int dim = static_cast<int>(n);
    const std::size_t real_size = n * n * n;
    const std::size_t spec_size = n * n * (n / 2 + 1);
    double* real = fftw_alloc_real(real_size);
    fftw_complex* spec = fftw_alloc_complex(spec_size);
    auto pair = std::make_unique<PlanPair>();
    // ESTIMATE keeps the chosen algorithm, and hence the bits, reproducible.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    pair->forward = fftw_plan_dft_r2c_3d(dim, dim, dim, real, spec, flags);
    pair->inverse = fftw_plan_dft_c2r_3d(dim, dim, dim, spec, real, flags | FFTW_DESTROY_INPUT);
    fftw_free(real);
    fftw_free(spec);
    return *plans_.emplace(n, std::move(pair)).first->second;
  }

 private:
  PlanCache() = default;
  mutable std::mutex mutex_;
  std::map<std::size_t, std::unique_ptr<PlanPair>> plans_;
  int threads_ = 1;
  bool threads_initialized_ = false;
};

}  // namespace detail

/// Caps the number of threads FFTW may use for subsequently created plans.
inline void set_fft_threads(int threads) { detail::PlanCache::instance().set_threads(threads); }

inline void require_finite(const ScalarField& f, const char* where) {
  const auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream os;
      os << where << ": non-finite value " << v[i] << " at index " << i;
      throw NumericalError(os.str(), "non_finite");
    }
  }
}

/// Forward transform, normalized so that cos(x) has coefficient 1/2 at k = (+-1, 0, 0).
inline SpectralField transform_forward(const ScalarField& f) {
  require_finite(f, "transform_forward");
  const Grid& grid = f.grid();
  SpectralField out(grid);
  const auto& plans = detail::PlanCache::instance().plans(grid.n());
  // r2c does not modify its input, FFTW just lacks the const.
  fftw_execute_dft_r2c(plans.forward, const_cast<double*>(f.values().data()),
                       reinterpret_cast<fftw_complex*>(out.coefficients().data()));
  out *= 1.0 / static_cast<double>(grid.points());
  return out;
}

inline ScalarField transform_inverse(const SpectralField& spec) {
  const Grid& grid = spec.grid();
  std::vector<std::complex<double>> scratch(spec.coefficients().begin(), spec.coefficients().end());
  ScalarField out(grid);
  const auto& plans = detail::PlanCache::instance().plans(grid.n());
  fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.values().data());
  return out;
}

inline SpectralVector transform_forward(const VectorField& v) {
  return {transform_forward(v[0]), transform_forward(v[1]), transform_forward(v[2])};
}

inline VectorField transform_inverse(const SpectralVector& v) {
  return VectorField(transform_inverse(v[0]), transform_inverse(v[1]), transform_inverse(v[2]));
}

}  // namespace nsreg
