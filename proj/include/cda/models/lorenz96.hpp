/**
 * @file lorenz96.hpp
 * @brief Two-layer Lorenz '96 model.
 *
 * Parameters (c1, c2) are the slow/fast coupling and the large-scale damping.
 * State layout: the `sites` large-scale values first, then for each site k
 * its `fast_per_site` small-scale values at index sites + k * J + j.
 *
 *   dX_k/dt   = X_{k+1}(X_{k-1} - X_{k+2}) + c1 X_k sum_j Y_kj - c2 X_k + F
 *   dY_kj/dt  = -d_j Y_kj - c1 X_k^2
 *
 * The advection term is the mirrored form X_{k+1}(X_{k-1} - X_{k+2}); it
 * conserves sum X_k^2 just like the classical one.
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cda/errors.hpp"
#include "cda/types.hpp"

namespace cda {

struct Lorenz96Constants {
  std::size_t sites = 40;                             ///< I
  std::size_t fast_per_site = 5;                      ///< J
  std::vector<double> damping{0.2, 0.5, 1.0, 2.0, 5.0};  ///< d_j
  /// 8 is the usual chaotic regime.
  double forcing = 8.0;
};

class Lorenz96 {
 public:
  static constexpr std::size_t kParams = 2;

  explicit Lorenz96(Lorenz96Constants k = {}) : k_(std::move(k)) {
    if (k_.sites < 4) throw DomainError("Lorenz96: need at least 4 sites");
    if (k_.damping.size() != k_.fast_per_site) {
      throw DomainError("Lorenz96: damping length must equal fast_per_site");
    }
    for (double d : k_.damping) {
      if (!(d > 0.0)) throw DomainError("Lorenz96: damping must be positive");
    }
  }

  const Lorenz96Constants& constants() const noexcept { return k_; }
  std::size_t sites() const noexcept { return k_.sites; }
  std::size_t fast_per_site() const noexcept { return k_.fast_per_site; }
  std::size_t dimension() const noexcept { return k_.sites * (1 + k_.fast_per_site); }
  std::size_t param_count() const noexcept { return kParams; }

  std::size_t fast_index(std::size_t site, std::size_t j) const noexcept {
    return k_.sites + site * k_.fast_per_site + j;
  }

  void rhs(std::span<const double> x, const ParamVector& c, std::span<double> out) const {
    const std::size_t n = k_.sites;
    const std::size_t nj = k_.fast_per_site;
    for (std::size_t k = 0; k < n; ++k) {
      const double xk = x[k];
      double fast_sum = 0.0;
      for (std::size_t j = 0; j < nj; ++j) fast_sum += x[fast_index(k, j)];
      out[k] = x[(k + 1) % n] * (x[(k + n - 1) % n] - x[(k + 2) % n]) + c[0] * fast_sum * xk -
               c[1] * xk + k_.forcing;
      for (std::size_t j = 0; j < nj; ++j) {
        out[fast_index(k, j)] = -k_.damping[j] * x[fast_index(k, j)] - c[0] * xk * xk;
      }
    }
  }

  void jacobian_vector_product(std::span<const double> x, const ParamVector& c,
                               std::span<const double> w, std::span<double> out) const {
    const std::size_t n = k_.sites;
    const std::size_t nj = k_.fast_per_site;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t kp1 = (k + 1) % n;
      const std::size_t km1 = (k + n - 1) % n;
      const std::size_t kp2 = (k + 2) % n;
      double fast_sum = 0.0;
      double fast_tangent_sum = 0.0;
      for (std::size_t j = 0; j < nj; ++j) {
        fast_sum += x[fast_index(k, j)];
        fast_tangent_sum += w[fast_index(k, j)];
      }
      out[k] = w[kp1] * (x[km1] - x[kp2]) + x[kp1] * (w[km1] - w[kp2]) +
               c[0] * (fast_tangent_sum * x[k] + fast_sum * w[k]) - c[1] * w[k];
      for (std::size_t j = 0; j < nj; ++j) {
        out[fast_index(k, j)] = -k_.damping[j] * w[fast_index(k, j)] - 2.0 * c[0] * x[k] * w[k];
      }
    }
  }

  void param_derivative(std::span<const double> x, const ParamVector&, std::size_t i,
                        std::span<double> out) const {
    const std::size_t n = k_.sites;
    const std::size_t nj = k_.fast_per_site;
    for (std::size_t k = 0; k < n; ++k) {
      if (i == 0) {
        double fast_sum = 0.0;
        for (std::size_t j = 0; j < nj; ++j) fast_sum += x[fast_index(k, j)];
        out[k] = fast_sum * x[k];
        for (std::size_t j = 0; j < nj; ++j) out[fast_index(k, j)] = -x[k] * x[k];
      } else {
        out[k] = -x[k];
        for (std::size_t j = 0; j < nj; ++j) out[fast_index(k, j)] = 0.0;
      }
    }
  }

 private:
  Lorenz96Constants k_;
};

}  // namespace cda
