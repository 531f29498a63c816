/**
 * @file kse.hpp
 * @brief Pseudospectral Kuramoto-Sivashinsky model on a periodic domain.
 *
 *   du/dt = -c1 u'' - c2 u u' - c3 u'''' + eps u^(6)
 *
 * States are half-spectra (see fourier.hpp). Linear terms are diagonal,
 * f = diag(sigma(c)) u + N(u; c) with sigma_m = c1 k^2 - c3 k^4 - eps k^6 and
 * N = -c2 (u^2 / 2)'. Quadratic products are dealiased with the 2/3 rule.
 * The eps term models unresolved dissipation in the truth only; it is not a
 * parameter.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cda/errors.hpp"
#include "cda/fourier.hpp"
#include "cda/types.hpp"

namespace cda {

struct KseConstants {
  double domain_length = 100.0;
  std::size_t grid = 1024;
  double epsilon = 0.0;
};

class Kse {
 public:
  static constexpr std::size_t kParams = 3;

  explicit Kse(KseConstants k = {}) : k_(k), fft_(check(k).grid) {
    layout_.grid = k_.grid;
    layout_.domain_length = k_.domain_length;
    dealias_cutoff_ = k_.grid / 3;
  }

  const KseConstants& constants() const noexcept { return k_; }
  const FourierLayout& layout() const noexcept { return layout_; }
  const RealFft& fft() const noexcept { return fft_; }
  std::size_t dimension() const noexcept { return layout_.storage(); }
  std::size_t param_count() const noexcept { return kParams; }
  std::size_t dealias_cutoff() const noexcept { return dealias_cutoff_; }
  double epsilon() const noexcept { return k_.epsilon; }

  /// sigma_m(c) for m = 0..grid/2.
  std::vector<double> linear_symbol(const ParamVector& c) const {
    std::vector<double> s(layout_.modes());
    for (std::size_t m = 0; m < s.size(); ++m) {
      const double k2 = sq(layout_.wavenumber(m));
      s[m] = c[0] * k2 - c[2] * k2 * k2 - k_.epsilon * k2 * k2 * k2;
    }
    return s;
  }

  /// -c2 (x^2/2)'.
  void nonlinear(std::span<const double> x, const ParamVector& c, std::span<double> out) const {
    product_derivative(x, x, out);
    scale(out, -0.5 * c[1]);
  }

  /// -c2 (x w)', the linearisation of `nonlinear` about x.
  void nonlinear_jvp(std::span<const double> x, const ParamVector& c, std::span<const double> w,
                     std::span<double> out) const {
    product_derivative(x, w, out);
    scale(out, -c[1]);
  }

  void rhs(std::span<const double> x, const ParamVector& c, std::span<double> out) const {
    nonlinear(x, c, out);
    add_diagonal(linear_symbol(c), x, out);
  }

  void jacobian_vector_product(std::span<const double> x, const ParamVector& c,
                               std::span<const double> w, std::span<double> out) const {
    nonlinear_jvp(x, c, w, out);
    add_diagonal(linear_symbol(c), w, out);
  }

  /// (-x'', -x x', -x'''') for i = 0, 1, 2.
  void param_derivative(std::span<const double> x, const ParamVector&, std::size_t i,
                        std::span<double> out) const {
    switch (i) {
      case 0: derivative(x, 2, out); scale(out, -1.0); break;
      case 1: product_derivative(x, x, out); scale(out, -0.5); break;
      case 2: derivative(x, 4, out); scale(out, -1.0); break;
      default: throw DomainError("Kse::param_derivative: index out of range");
    }
  }

  /// Spectral derivative of order p: multiplies mode m by (i k_m)^p.
  void derivative(std::span<const double> x, int p, std::span<double> out) const {
    for (std::size_t m = 0; m < layout_.modes(); ++m) {
      const double k = layout_.wavenumber(m);
      const double re = x[2 * m];
      const double im = x[2 * m + 1];
      double mag = std::pow(k, p);
      // i^p cycles through 1, i, -1, -i.
      switch (((p % 4) + 4) % 4) {
        case 0: out[2 * m] = mag * re; out[2 * m + 1] = mag * im; break;
        case 1: out[2 * m] = -mag * im; out[2 * m + 1] = mag * re; break;
        case 2: out[2 * m] = -mag * re; out[2 * m + 1] = -mag * im; break;
        default: out[2 * m] = mag * im; out[2 * m + 1] = -mag * re; break;
      }
    }
    enforce_real(out);
  }

  /// (a b)' with both factors and the result truncated to |m| <= grid/3.
  void product_derivative(std::span<const double> a, std::span<const double> b,
                          std::span<double> out) const {
    const std::size_t n = k_.grid;
    std::vector<double> ga(n), gb(n), spec(layout_.storage());
    std::vector<double> trunc(a.begin(), a.end());
    truncate(trunc);
    fft_.inverse(trunc, ga);
    if (a.data() == b.data()) {
      gb = ga;
    } else {
      trunc.assign(b.begin(), b.end());
      truncate(trunc);
      fft_.inverse(trunc, gb);
    }
    for (std::size_t j = 0; j < n; ++j) ga[j] *= gb[j];
    fft_.forward(ga, spec);
    truncate(spec);
    derivative(spec, 1, out);
  }

  StateVector to_grid(const StateVector& spectrum) const {
    StateVector g(k_.grid);
    fft_.inverse(spectrum.span(), g.span());
    return g;
  }

  StateVector from_grid(const StateVector& grid) const {
    StateVector s(layout_.storage());
    fft_.forward(grid.span(), s.span());
    enforce_real(s.span());
    return s;
  }

  /// Zeroes the imaginary parts that a real field cannot carry (mode 0 and Nyquist).
  void enforce_real(std::span<double> x) const {
    x[1] = 0.0;
    x[2 * (layout_.modes() - 1) + 1] = 0.0;
  }

  /// Largest violation of the real-field constraint.
  double reality_defect(std::span<const double> x) const {
    return std::max(std::abs(x[1]), std::abs(x[2 * (layout_.modes() - 1) + 1]));
  }

  /// Grid coordinates x_j = j L / n.
  std::vector<double> grid_points() const {
    std::vector<double> xs(k_.grid);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      xs[j] = k_.domain_length * static_cast<double>(j) / static_cast<double>(k_.grid);
    }
    return xs;
  }

 private:
  static const KseConstants& check(const KseConstants& k) {
    if (!(k.domain_length > 0.0)) throw DomainError("Kse: domain length must be positive");
    if (k.grid < 8 || (k.grid & (k.grid - 1)) != 0) {
      throw DomainError("Kse: grid must be a power of two >= 8");
    }
    return k;
  }

  static double sq(double x) { return x * x; }

  static void scale(std::span<double> x, double s) {
    for (double& v : x) v *= s;
  }

  void add_diagonal(const std::vector<double>& symbol, std::span<const double> x,
                    std::span<double> out) const {
    for (std::size_t m = 0; m < symbol.size(); ++m) {
      out[2 * m] += symbol[m] * x[2 * m];
      out[2 * m + 1] += symbol[m] * x[2 * m + 1];
    }
  }

  void truncate(std::span<double> x) const {
    for (std::size_t m = dealias_cutoff_ + 1; m < layout_.modes(); ++m) {
      x[2 * m] = 0.0;
      x[2 * m + 1] = 0.0;
    }
  }

  KseConstants k_;
  RealFft fft_;
  FourierLayout layout_;
  std::size_t dealias_cutoff_ = 0;
};

}  // namespace cda
