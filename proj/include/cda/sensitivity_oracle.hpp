/**
 * @file sensitivity_oracle.hpp
 * @brief Central finite-difference estimate of dv/dc_i for validating the
 *        directly simulated sensitivities.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cda/errors.hpp"
#include "cda/integrators/coupled.hpp"
#include "cda/models/concepts.hpp"
#include "cda/observation.hpp"
#include "cda/types.hpp"

namespace cda {

struct TangentSample {
  double time;
  StateVector tangent;
};

struct OracleSetup {
  ParamVector truth_params;
  StateVector truth0;
  StateVector nudged0;
  IntegratorConfig integrator;
  double sample_interval = 0.1;
};

/// [v(c + delta e_i) - v(c - delta e_i)] / (2 delta) sampled every
/// `sample_interval` up to `horizon`. Both perturbed runs are nudged toward
/// the same truth trajectory (the truth block does not depend on c).
template <DynamicalModel M>
std::vector<TangentSample> fd_sensitivity_oracle(const M& model, const ParamVector& c,
                                                 std::size_t i, double delta, double horizon,
                                                 const ObservationOperator& op,
                                                 const OracleSetup& setup) {
  if (!(delta > 0.0)) throw DomainError("oracle: delta must be positive");
  if (!(horizon > 0.0)) throw DomainError("oracle: horizon must be positive");
  if (!(setup.sample_interval > 0.0)) throw DomainError("oracle: sample interval must be positive");
  if (i >= model.param_count()) throw DomainError("oracle: parameter index out of range");

  ParamVector plus = c;
  ParamVector minus = c;
  plus[i] += delta;
  minus[i] -= delta;
  CoupledIntegrator<M> up(model, setup.truth_params, plus, setup.integrator, op);
  CoupledIntegrator<M> down(model, setup.truth_params, minus, setup.integrator, op);

  CoupledState a{setup.truth0, setup.nudged0, std::nullopt, 0.0};
  CoupledState b = a;
  std::vector<TangentSample> out;
  const auto samples = static_cast<std::size_t>(std::floor(horizon / setup.sample_interval + 1e-9));
  for (std::size_t k = 1; k <= samples; ++k) {
    up.advance(a, setup.sample_interval, SensitivityMode::None);
    down.advance(b, setup.sample_interval, SensitivityMode::None);
    StateVector tangent(model.dimension());
    for (std::size_t j = 0; j < tangent.size(); ++j) {
      tangent[j] = (a.nudged[j] - b.nudged[j]) / (2.0 * delta);
    }
    out.push_back({static_cast<double>(k) * setup.sample_interval, std::move(tangent)});
  }
  return out;
}

}  // namespace cda
