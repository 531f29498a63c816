/**
 * @file spectral.hpp
 * @brief Single nudged step of a spectral model against an external truth source.
 */
#pragma once

#include <span>
#include <vector>

#include "cda/errors.hpp"
#include "cda/integrators/etdrk4.hpp"
#include "cda/models/concepts.hpp"
#include "cda/observation.hpp"
#include "cda/types.hpp"

namespace cda {

/// Advances dv/dt = f(v; c) - mu I_h (v - u(t)) by one ETDRK4 step of size dt
/// starting at time t. `truth(time)` returns u at any stage time (t, t+dt/2,
/// t+dt) as a half-spectrum.
template <SpectralModel M, typename TruthSource>
StateVector spectral_step(const M& model, const StateVector& v, const ParamVector& c, double mu,
                          const ObservationOperator& op, TruthSource&& truth, double t,
                          double dt) {
  if (!(dt > 0.0)) throw DomainError("spectral_step: dt must be positive");
  if (!(mu >= 0.0)) throw DomainError("spectral_step: mu must be >= 0");
  detail::check_args(model, v.span(), c);
  detail::check_length("observation operator", op.dimension(), model.dimension());

  const std::size_t n = model.dimension();
  std::vector<double> gain(n);
  for (std::size_t j = 0; j < n; ++j) gain[j] = mu * op.mask()[j];
  std::vector<double> symbol = model.linear_symbol(c);
  for (std::size_t m = 0; m < symbol.size(); ++m) symbol[m] -= gain[2 * m];
  const EtdCoefficients coeffs = EtdCoefficients::compute(symbol, dt);
  const EtdCoefficients* blocks[] = {&coeffs};

  auto nonlinear = [&](double time, std::span<const double> y, std::span<double> out) {
    model.nonlinear(y, c, out);
    if (mu == 0.0) return;
    const auto& u = truth(time);
    detail::check_length("truth snapshot", u.size(), n);
    for (std::size_t j = 0; j < n; ++j) out[j] += gain[j] * u[j];
  };

  StateVector out = v;
  Etdrk4 stepper;
  stepper.step(nonlinear, t, out.span(), blocks);
  if (!out.all_finite()) throw DivergenceError("nudged", t + dt);
  return out;
}

}  // namespace cda
