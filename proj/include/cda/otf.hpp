/**
 * @file otf.hpp
 * @brief Leading-order large-mu approximation of the observed sensitivities.
 *
 * After the nudging transient, I_h w_i(t) ~ (1/mu) I_h df/dc_i(v(t); c). No
 * extra integration is needed; the stack is rebuilt from the current nudged
 * state at each update.
 */
#pragma once

#include <cstddef>
#include <vector>

#include "cda/models/concepts.hpp"
#include "cda/observation.hpp"
#include "cda/types.hpp"

namespace cda {

template <DynamicalModel M>
SensitivityStack otf_observed_sensitivity(const M& model, const StateVector& v,
                                          const ParamVector& c, const NudgingStrength& mu,
                                          const ObservationOperator& op,
                                          std::vector<std::size_t> params) {
  mu.require_positive();
  detail::check_args(model, v.span(), c);
  detail::check_length("observation operator", op.dimension(), model.dimension());
  const std::size_t n = model.dimension();
  const std::vector<double> mu_full = mu.expand(n);

  SensitivityStack stack;
  stack.source = SensitivitySource::OTF;
  StateVector derivative(n);
  for (std::size_t p : params) {
    if (p >= model.param_count()) throw DomainError("otf: parameter index out of range");
    model.param_derivative(v.span(), c, p, derivative.span());
    StateVector column(n);
    const auto mask = op.mask();
    for (std::size_t j = 0; j < n; ++j) column[j] = mask[j] * derivative[j] / mu_full[j];
    stack.columns.push_back(std::move(column));
  }
  stack.params = std::move(params);
  return stack;
}

template <DynamicalModel M>
SensitivityStack otf_observed_sensitivity(const M& model, const StateVector& v,
                                          const ParamVector& c, const NudgingStrength& mu,
                                          const ObservationOperator& op) {
  return otf_observed_sensitivity(model, v, c, mu, op, all_indices(model.param_count()));
}

}  // namespace cda
