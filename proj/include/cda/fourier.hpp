/**
 * @file fourier.hpp
 * @brief Half-spectrum storage for real periodic fields and an FFTW-backed
 *        real transform.
 *
 * A real field sampled on n grid points is stored as the n/2+1 complex
 * coefficients u_m, m = 0..n/2, interleaved (re, im) in a flat double array
 * of length n+2. Negative modes are implied by u_{-m} = conj(u_m). The
 * normalisation is u(x_j) = sum_m u_m exp(i k_m x_j), so a unit sine of mode m
 * has coefficient -i/2.
 */
#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "cda/errors.hpp"

namespace cda {

struct FourierLayout {
  std::size_t grid = 0;         ///< Number of real-space points (even).
  double domain_length = 1.0;   ///< Period L.

  std::size_t modes() const noexcept { return grid / 2 + 1; }
  std::size_t storage() const noexcept { return 2 * modes(); }
  double wavenumber(std::size_t m) const noexcept {
    return 2.0 * std::numbers::pi * static_cast<double>(m) / domain_length;
  }

  /// L^2([0, L]) inner product of two half-spectra (Parseval).
  double inner(std::span<const double> a, std::span<const double> b) const noexcept {
    const std::size_t nyq = grid / 2;
    double s = a[0] * b[0] + a[1] * b[1];
    for (std::size_t m = 1; m < nyq; ++m) {
      s += 2.0 * (a[2 * m] * b[2 * m] + a[2 * m + 1] * b[2 * m + 1]);
    }
    s += a[2 * nyq] * b[2 * nyq] + a[2 * nyq + 1] * b[2 * nyq + 1];
    return domain_length * s;
  }
};

namespace detail {

struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// Planning is not thread-safe in FFTW; execution with the new-array interface is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline FftPlans plans_for(std::size_t n) {
  static std::map<std::size_t, FftPlans> cache;
  std::lock_guard lock(fftw_planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> real(n);
  std::vector<std::complex<double>> spec(n / 2 + 1);
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
  const int ni = static_cast<int>(n);
  FftPlans p;
  p.forward = fftw_plan_dft_r2c_1d(ni, real.data(), cplx, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.inverse = fftw_plan_dft_c2r_1d(ni, cplx, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p.forward == nullptr || p.inverse == nullptr) throw Error("FFTW planning failed");
  cache.emplace(n, p);
  return p;
}

}  // namespace detail

/// Real <-> half-spectrum transform of fixed size. Cheap to copy; safe to use
/// from several threads at once.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    if (n < 4 || n % 2 != 0) throw DimensionError("RealFft: grid size must be even and >= 4");
    plans_ = detail::plans_for(n);
  }

  std::size_t size() const noexcept { return n_; }

  /// grid (n values) -> normalised half-spectrum (n + 2 values).
  void forward(std::span<const double> grid, std::span<double> spectrum) const {
    check(grid.size() == n_ && spectrum.size() == n_ + 2);
    std::vector<double> in(grid.begin(), grid.end());
    fftw_execute_dft_r2c(plans_.forward, in.data(),
                         reinterpret_cast<fftw_complex*>(spectrum.data()));
    const double scale = 1.0 / static_cast<double>(n_);
    for (double& x : spectrum) x *= scale;
  }

  /// half-spectrum -> grid values. The input is not modified.
  void inverse(std::span<const double> spectrum, std::span<double> grid) const {
    check(grid.size() == n_ && spectrum.size() == n_ + 2);
    std::vector<double> scratch(spectrum.begin(), spectrum.end());
    fftw_execute_dft_c2r(plans_.inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                         grid.data());
  }

 private:
  static void check(bool ok) {
    if (!ok) throw DimensionError("RealFft: buffer length mismatch");
  }

  std::size_t n_;
  detail::FftPlans plans_;
};

}  // namespace cda
