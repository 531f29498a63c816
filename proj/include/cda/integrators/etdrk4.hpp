/**
 * @file etdrk4.hpp
 * @brief Fourth-order exponential time differencing Runge-Kutta (Cox-Matthews)
 *        for diagonal-linear spectral systems.
 *
 * Solves y' = diag(sigma) y + N(t, y) where y is a half-spectrum (two doubles
 * per mode) or a concatenation of such blocks, each block with its own
 * symbol. The phi-function coefficients are evaluated by a complex contour
 * mean, which stays accurate as h*sigma -> 0.
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "cda/errors.hpp"

namespace cda {

struct EtdCoefficients {
  double h = 0.0;
  std::vector<double> e;       ///< exp(h sigma)
  std::vector<double> e_half;  ///< exp(h sigma / 2)
  std::vector<double> q;       ///< h phi_1(h sigma / 2) / 2
  std::vector<double> f1, f2, f3;

  std::size_t modes() const noexcept { return e.size(); }

  static EtdCoefficients compute(std::span<const double> symbol, double h) {
    constexpr int kContour = 64;
    EtdCoefficients c;
    c.h = h;
    const std::size_t n = symbol.size();
    c.e.resize(n);
    c.e_half.resize(n);
    c.q.resize(n);
    c.f1.resize(n);
    c.f2.resize(n);
    c.f3.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
      const double hl = h * symbol[m];
      c.e[m] = std::exp(hl);
      c.e_half[m] = std::exp(0.5 * hl);
      std::complex<double> q{}, a{}, b{}, g{};
      for (int j = 0; j < kContour; ++j) {
        // Upper half of the unit circle; real symbols make the mean real.
        const double theta = std::numbers::pi * (j + 0.5) / kContour;
        const std::complex<double> z = hl + std::polar(1.0, theta);
        const std::complex<double> ez = std::exp(z);
        const std::complex<double> z3 = z * z * z;
        q += (std::exp(0.5 * z) - 1.0) / z;
        a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        b += (2.0 + z + ez * (z - 2.0)) / z3;
        g += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
      }
      c.q[m] = h * (q / double(kContour)).real();
      c.f1[m] = h * (a / double(kContour)).real();
      c.f2[m] = h * (b / double(kContour)).real();
      c.f3[m] = h * (g / double(kContour)).real();
    }
    return c;
  }
};

/// Block ETDRK4 stepper with reusable stage storage.
class Etdrk4 {
 public:
  /// Advances y by coeffs[0]->h. y holds coeffs.size() blocks of 2*modes
  /// doubles. `nl(t, y, out)` evaluates the explicit part of every block.
  template <typename Nonlinear>
  void step(Nonlinear&& nl, double t, std::span<double> y,
            std::span<const EtdCoefficients* const> coeffs) {
    const std::size_t blocks = coeffs.size();
    const std::size_t block = 2 * coeffs[0]->modes();
    if (y.size() != blocks * block) throw DimensionError("Etdrk4: state/block size mismatch");
    const double h = coeffs[0]->h;
    resize(y.size());

    nl(t, std::span<const double>(y), std::span<double>(nv_));
    for_each(coeffs, block, [&](std::size_t i, const EtdCoefficients& c, std::size_t m) {
      a_[i] = c.e_half[m] * y[i] + c.q[m] * nv_[i];
    });
    nl(t + 0.5 * h, std::span<const double>(a_), std::span<double>(na_));
    for_each(coeffs, block, [&](std::size_t i, const EtdCoefficients& c, std::size_t m) {
      b_[i] = c.e_half[m] * y[i] + c.q[m] * na_[i];
    });
    nl(t + 0.5 * h, std::span<const double>(b_), std::span<double>(nb_));
    for_each(coeffs, block, [&](std::size_t i, const EtdCoefficients& c, std::size_t m) {
      c_[i] = c.e_half[m] * a_[i] + c.q[m] * (2.0 * nb_[i] - nv_[i]);
    });
    nl(t + h, std::span<const double>(c_), std::span<double>(nc_));
    for_each(coeffs, block, [&](std::size_t i, const EtdCoefficients& c, std::size_t m) {
      y[i] = c.e[m] * y[i] + c.f1[m] * nv_[i] + 2.0 * c.f2[m] * (na_[i] + nb_[i]) +
             c.f3[m] * nc_[i];
    });
  }

 private:
  void resize(std::size_t n) {
    if (nv_.size() == n) return;
    for (auto* v : {&a_, &b_, &c_, &nv_, &na_, &nb_, &nc_}) v->assign(n, 0.0);
  }

  template <typename Fn>
  static void for_each(std::span<const EtdCoefficients* const> coeffs, std::size_t block, Fn&& fn) {
    for (std::size_t b = 0; b < coeffs.size(); ++b) {
      const EtdCoefficients& c = *coeffs[b];
      const std::size_t base = b * block;
      for (std::size_t i = 0; i < block; ++i) fn(base + i, c, i / 2);
    }
  }

  std::vector<double> a_, b_, c_, nv_, na_, nb_, nc_;
};

}  // namespace cda
