/**
 * @file experiment.hpp
 * @brief Relax-then-punch experiment loop.
 *
 * Each cycle integrates the coupled system for `update_interval`, evaluates
 * E and the sensitivities (DS or OTF) at the update time, applies the rule
 * and restarts the DS sensitivities from zero.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "cda/errors.hpp"
#include "cda/estimation.hpp"
#include "cda/harness/config.hpp"
#include "cda/harness/run_log.hpp"
#include "cda/integrators/coupled.hpp"
#include "cda/otf.hpp"

namespace cda {

/// Integration blew up; `partial()` holds every record written before it did.
class ExperimentDiverged : public DivergenceError {
 public:
  ExperimentDiverged(const DivergenceError& cause, RunLog partial)
      : DivergenceError(cause.subsystem(), cause.time()), partial_(std::move(partial)) {}

  const RunLog& partial() const noexcept { return partial_; }

 private:
  RunLog partial_;
};

namespace detail {

template <DynamicalModel M>
RunLog run_typed(const ExperimentConfig& cfg, const M& truth_model, const M& model) {
  const ObservationOperator op = make_observation(cfg.model, cfg.observation, cfg.observed_modes);
  const std::vector<std::size_t> active = cfg.estimated_indices();
  CoupledIntegrator<M> integrator(truth_model, model, cfg.truth_params, cfg.initial_params,
                                  cfg.integrator(), op, active);

  CoupledState state;
  state.truth = make_initial_state(cfg.truth_ic, cfg.truth_spec(), cfg.seed, 0);
  state.nudged = make_initial_state(cfg.nudged_ic, cfg.model, cfg.seed, 1);

  RunLog log;
  log.param_count = model.param_count();
  ParamVector c = cfg.initial_params;
  const std::size_t updates = cfg.update_count();
  const bool dense = cfg.dense_interval > 0.0;
  const auto chunks =
      dense ? static_cast<std::size_t>(std::ceil(cfg.update_interval / cfg.dense_interval - 1e-9))
            : std::size_t{1};

  try {
    if (dense) {
      log.dense.push_back({0.0, std::sqrt(op.observed_distance_squared(state.nudged.span(),
                                                                       state.truth.span()))});
    }
    for (std::size_t k = 1; k <= updates; ++k) {
      const double start = static_cast<double>(k - 1) * cfg.update_interval;
      for (std::size_t j = 1; j <= chunks; ++j) {
        const double target =
            j == chunks ? static_cast<double>(k) * cfg.update_interval
                        : start + static_cast<double>(j) * cfg.dense_interval;
        integrator.advance(state, target - state.time, cfg.sensitivity);
        state.time = target;
        if (dense) {
          log.dense.push_back({target, std::sqrt(op.observed_distance_squared(
                                           state.nudged.span(), state.truth.span()))});
        }
      }

      UpdateDiagnostics diag;
      SensitivityStack w;
      if (cfg.sensitivity == SensitivityMode::DS) {
        w = *state.sensitivities;
      } else if (cfg.sensitivity == SensitivityMode::OTF) {
        w = otf_observed_sensitivity(model, state.nudged, c, cfg.mu, op, active);
      }
      c = apply_update(cfg.rule, c, state.nudged, state.truth, w, op, cfg.clamp_factor, diag);

      UpdateRecord rec;
      rec.time = state.time;
      rec.error = diag.error;
      rec.params = c.values();
      rec.param_error = distance(c.span(), cfg.truth_params.span());
      rec.skipped = diag.skipped;
      rec.clamped = diag.clamped;
      log.records.push_back(std::move(rec));

      if (cfg.rule.kind != UpdateRule::Kind::None) integrator.set_params(c);
      if (state.sensitivities) state.sensitivities->set_zero();
    }
  } catch (const DivergenceError& e) {
    throw ExperimentDiverged(e, std::move(log));
  }
  return log;
}

}  // namespace detail

inline RunLog run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const AnyModel model = make_model(cfg.model);
  const AnyModel truth = make_model(cfg.truth_spec());
  return std::visit(
      [&](const auto& m) -> RunLog {
        using M = std::decay_t<decltype(m)>;
        const M* t = std::get_if<M>(&truth);
        if (t == nullptr) throw ConfigError("truth and nudged models must be the same family");
        return detail::run_typed(cfg, *t, m);
      },
      model);
}

struct SweepOutcome {
  RunLog log;
  bool diverged = false;
  std::string error;  ///< non-empty when the run failed
};

/// Runs independent experiments concurrently (bounded by the hardware thread
/// count); results come back in input order.
inline std::vector<SweepOutcome> run_sweep(const std::vector<ExperimentConfig>& configs) {
  auto run_one = [](const ExperimentConfig& cfg) {
    SweepOutcome out;
    try {
      out.log = run_experiment(cfg);
    } catch (const ExperimentDiverged& e) {
      out.log = e.partial();
      out.diverged = true;
      out.error = e.what();
    } catch (const Error& e) {
      out.error = e.what();
    }
    return out;
  };
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  std::vector<SweepOutcome> results(configs.size());
  for (std::size_t base = 0; base < configs.size(); base += width) {
    std::vector<std::future<SweepOutcome>> batch;
    const std::size_t end = std::min(configs.size(), base + width);
    for (std::size_t i = base; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, run_one, std::cref(configs[i])));
    }
    for (std::size_t i = base; i < end; ++i) results[i] = batch[i - base].get();
  }
  return results;
}

}  // namespace cda
