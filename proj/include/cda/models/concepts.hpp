/**
 * @file concepts.hpp
 * @brief Parametric dynamical system interface.
 *
 * Models are written in explicit form du/dt = f(u; c). Every model provides
 * f, its state Jacobian applied to a tangent vector, and its partial
 * derivative with respect to each parameter. Spectral models additionally
 * split f into a diagonal linear symbol and an explicit remainder so that
 * stiff terms can be integrated exactly.
 */
#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cda/errors.hpp"
#include "cda/types.hpp"

namespace cda {

template <typename M>
concept DynamicalModel = requires(const M& m, std::span<const double> x, const ParamVector& c,
                                  std::span<double> out, std::size_t i) {
  { m.dimension() } -> std::convertible_to<std::size_t>;
  { m.param_count() } -> std::convertible_to<std::size_t>;
  m.rhs(x, c, out);
  m.jacobian_vector_product(x, c, x, out);
  m.param_derivative(x, c, i, out);
};

/// f(x; c) = diag(linear_symbol(c)) x + nonlinear(x; c), with the symbol given
/// per Fourier mode of a half-spectrum layout.
template <typename M>
concept SpectralModel = DynamicalModel<M> && requires(const M& m, std::span<const double> x,
                                                      const ParamVector& c, std::span<double> out) {
  { m.layout() };
  { m.linear_symbol(c) } -> std::convertible_to<std::vector<double>>;
  m.nonlinear(x, c, out);
  m.nonlinear_jvp(x, c, x, out);
};

namespace detail {

inline void check_length(const char* what, std::size_t got, std::size_t want) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

template <DynamicalModel M>
void check_args(const M& m, std::span<const double> x, const ParamVector& c) {
  check_length("state", x.size(), m.dimension());
  check_length("parameters", c.size(), m.param_count());
}

}  // namespace detail

template <DynamicalModel M>
StateVector rhs(const M& model, const StateVector& x, const ParamVector& c) {
  detail::check_args(model, x.span(), c);
  if (!x.all_finite() || !c.all_finite()) throw DomainError("rhs: non-finite input");
  StateVector out(model.dimension());
  model.rhs(x.span(), c, out.span());
  return out;
}

template <DynamicalModel M>
StateVector jacobian_vector_product(const M& model, const StateVector& x, const ParamVector& c,
                                    const StateVector& w) {
  detail::check_args(model, x.span(), c);
  detail::check_length("tangent", w.size(), model.dimension());
  StateVector out(model.dimension());
  model.jacobian_vector_product(x.span(), c, w.span(), out.span());
  return out;
}

template <DynamicalModel M>
StateVector param_derivative(const M& model, const StateVector& x, const ParamVector& c,
                             std::size_t i) {
  detail::check_args(model, x.span(), c);
  if (i >= model.param_count()) throw DomainError("param_derivative: index out of range");
  StateVector out(model.dimension());
  model.param_derivative(x.span(), c, i, out.span());
  return out;
}

}  // namespace cda
