/**
 * @file rk4.hpp
 * @brief Classical fourth-order Runge-Kutta step for autonomous systems.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cda/errors.hpp"
#include "cda/types.hpp"

namespace cda {

/// Reusable RK4 stage storage. `f(y, dydt)` evaluates the vector field.
class Rk4 {
 public:
  explicit Rk4(std::size_t n = 0) { resize(n); }

  void resize(std::size_t n) {
    tmp_.assign(n, 0.0);
    k1_.assign(n, 0.0);
    k2_.assign(n, 0.0);
    k3_.assign(n, 0.0);
    k4_.assign(n, 0.0);
  }

  template <typename F>
  void step(F&& f, std::span<double> y, double dt) {
    const std::size_t n = y.size();
    if (tmp_.size() != n) resize(n);
    const double half = 0.5 * dt;
    const double sixth = dt / 6.0;

    f(std::span<const double>(y), std::span<double>(k1_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + half * k1_[i];
    f(std::span<const double>(tmp_), std::span<double>(k2_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + half * k2_[i];
    f(std::span<const double>(tmp_), std::span<double>(k3_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
    f(std::span<const double>(tmp_), std::span<double>(k4_));
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += sixth * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

 private:
  std::vector<double> tmp_, k1_, k2_, k3_, k4_;
};

/// One RK4 step of y' = f(y). Throws DivergenceError on a non-finite result.
template <typename F>
StateVector rk4_step(F&& f, const StateVector& y, double dt) {
  if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be positive");
  StateVector out = y;
  Rk4 rk(y.size());
  rk.step(f, out.span(), dt);
  if (!out.all_finite()) throw DivergenceError("rk4_step", dt);
  return out;
}

}  // namespace cda
