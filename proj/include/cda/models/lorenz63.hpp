/**
 * @file lorenz63.hpp
 * @brief Lorenz '63 with parameters (sigma, rho, beta) = (c1, c2, c3).
 */
#pragma once

#include <cstddef>
#include <span>

#include "cda/types.hpp"

namespace cda {

class Lorenz63 {
 public:
  static constexpr std::size_t kDimension = 3;
  static constexpr std::size_t kParams = 3;

  std::size_t dimension() const noexcept { return kDimension; }
  std::size_t param_count() const noexcept { return kParams; }

  void rhs(std::span<const double> x, const ParamVector& c, std::span<double> out) const {
    out[0] = -c[0] * (x[0] - x[1]);
    out[1] = x[0] * (c[1] - x[2]) - x[1];
    out[2] = x[0] * x[1] - c[2] * x[2];
  }

  void jacobian_vector_product(std::span<const double> x, const ParamVector& c,
                               std::span<const double> w, std::span<double> out) const {
    out[0] = -c[0] * (w[0] - w[1]);
    out[1] = w[0] * (c[1] - x[2]) - x[0] * w[2] - w[1];
    out[2] = w[0] * x[1] + x[0] * w[1] - c[2] * w[2];
  }

  void param_derivative(std::span<const double> x, const ParamVector&, std::size_t i,
                        std::span<double> out) const {
    out[0] = out[1] = out[2] = 0.0;
    switch (i) {
      case 0: out[0] = -(x[0] - x[1]); break;
      case 1: out[1] = x[0]; break;
      case 2: out[2] = -x[2]; break;
      default: break;
    }
  }
};

}  // namespace cda
