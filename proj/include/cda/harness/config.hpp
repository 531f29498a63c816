/**
 * @file config.hpp
 * @brief Experiment configuration and initial-condition construction.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cda/errors.hpp"
#include "cda/estimation.hpp"
#include "cda/integrators/coupled.hpp"
#include "cda/models/model_spec.hpp"
#include "cda/types.hpp"

namespace cda {

enum class InitialKind { Zero, Fixed, RandomNormal, KseReference };

inline std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::Zero: return "zero";
    case InitialKind::Fixed: return "fixed";
    case InitialKind::RandomNormal: return "random-normal";
    case InitialKind::KseReference: return "kse-reference";
  }
  return "?";
}

inline InitialKind parse_initial_kind(const std::string& s) {
  if (s == "zero") return InitialKind::Zero;
  if (s == "fixed") return InitialKind::Fixed;
  if (s == "random-normal" || s == "random") return InitialKind::RandomNormal;
  if (s == "kse-reference") return InitialKind::KseReference;
  throw ConfigError("unknown initial condition '" + s + "'");
}

struct InitialCondition {
  InitialKind kind = InitialKind::Zero;
  std::vector<double> values;  ///< Fixed only; state storage layout

  static InitialCondition zero() { return {}; }
  static InitialCondition fixed(std::vector<double> v) { return {InitialKind::Fixed, std::move(v)}; }
  static InitialCondition random_normal() { return {InitialKind::RandomNormal, {}}; }
  static InitialCondition kse_reference() { return {InitialKind::KseReference, {}}; }
};

inline std::string to_string(ObservationChoice o) {
  switch (o) {
    case ObservationChoice::Identity: return "identity";
    case ObservationChoice::LargeScaleOnly: return "large-scale";
    case ObservationChoice::LowFourierModes: return "low-modes";
  }
  return "?";
}

inline ObservationChoice parse_observation(const std::string& s) {
  if (s == "identity" || s == "full") return ObservationChoice::Identity;
  if (s == "large-scale") return ObservationChoice::LargeScaleOnly;
  if (s == "low-modes") return ObservationChoice::LowFourierModes;
  throw ConfigError("unknown observation '" + s + "'");
}

struct ExperimentConfig {
  std::string name = "custom";
  ModelSpec model{};                        ///< nudged model
  std::optional<ModelSpec> truth_model;     ///< defaults to `model`
  ParamVector truth_params;                 ///< gamma
  ParamVector initial_params;               ///< c at t = 0
  std::vector<std::size_t> estimated;       ///< parameter indices updated; empty = all
  NudgingStrength mu = NudgingStrength::scalar(100.0);
  double update_interval = 0.5;             ///< time between parameter updates
  double t_final = 50.0;
  double dt = 0.0;                          ///< inner step; 0 selects the model default
  UpdateRule rule{};
  SensitivityMode sensitivity = SensitivityMode::OTF;
  ObservationChoice observation = ObservationChoice::Identity;
  std::size_t observed_modes = 32;          ///< LowFourierModes cutoff
  std::uint64_t seed = 0;
  InitialCondition truth_ic{};
  InitialCondition nudged_ic{};
  double dense_interval = 0.0;              ///< >0 records |I_h(v-u)| at this spacing
  double clamp_factor = 10.0;               ///< reject steps changing |c| by more than this
  double convergence_tolerance = 1e-4;      ///< parameter error regarded as converged
  bool relative_tolerance = false;          ///< tolerance applies to |c-gamma|/|gamma|

  const ModelSpec& truth_spec() const { return truth_model ? *truth_model : model; }

  std::vector<std::size_t> estimated_indices() const {
    return estimated.empty() ? all_indices(model.param_count()) : estimated;
  }

  double inner_dt() const {
    if (dt > 0.0) return dt;
    return model.is_spectral() ? 1e-2 : 1e-3;
  }

  std::size_t update_count() const {
    return static_cast<std::size_t>(std::floor(t_final / update_interval + 1e-9));
  }

  IntegratorConfig integrator() const {
    IntegratorConfig ic;
    ic.scheme = model.is_spectral() ? Scheme::SemiImplicitSpectral : Scheme::RK4;
    ic.dt = inner_dt();
    ic.mu = mu;
    return ic;
  }

  /// Throws ConfigError on an invalid configuration; returns advisory warnings.
  std::vector<std::string> validate() const {
    std::vector<std::string> warnings;
    const std::size_t n = model.param_count();
    if (truth_params.size() != truth_spec().param_count()) {
      throw ConfigError("gamma must have " + std::to_string(truth_spec().param_count()) + " entries");
    }
    if (initial_params.size() != n) {
      throw ConfigError("c0 must have " + std::to_string(n) + " entries");
    }
    if (truth_spec().is_spectral() != model.is_spectral() ||
        truth_spec().dimension() != model.dimension()) {
      throw ConfigError("truth and nudged models must share a state layout");
    }
    for (std::size_t i : estimated) {
      if (i >= n) throw ConfigError("estimated parameter index out of range");
    }
    if (!(update_interval > 0.0)) throw ConfigError("dt_update must be positive");
    if (!(t_final >= update_interval)) throw ConfigError("t_final must be >= dt_update");
    if (!(dense_interval >= 0.0)) throw ConfigError("dense_interval must be >= 0");
    rule.validate();
    if (rule.kind != UpdateRule::Kind::None && sensitivity == SensitivityMode::None) {
      throw ConfigError("an update rule needs sensitivities (ds or otf)");
    }
    if (rule.kind != UpdateRule::Kind::None || sensitivity == SensitivityMode::OTF) {
      mu.require_positive();
    }
    integrator().validate();
    if (truth_ic.kind == InitialKind::KseReference && !truth_spec().is_spectral()) {
      throw ConfigError("kse-reference initial condition needs a KSE model");
    }
    if (nudged_ic.kind == InitialKind::KseReference && !model.is_spectral()) {
      throw ConfigError("kse-reference initial condition needs a KSE model");
    }
    if (mu.min() > 0.0 && update_interval < 10.0 / mu.min()) {
      warnings.push_back("dt_update is shorter than 10/mu; the error may not have relaxed");
    }
    return warnings;
  }
};

/// Six-mode periodic reference field on [0, L].
inline double kse_reference_field(double x, double length) {
  const double p = std::numbers::pi * x / length;
  return std::sin(6.0 * p) + 0.1 * std::cos(p) - 0.2 * std::sin(3.0 * p) +
         0.05 * std::cos(15.0 * p) + 0.7 * std::sin(18.0 * p) - std::cos(13.0 * p);
}

/// Builds an initial state. `stream` separates truth (0) and nudged (1) draws.
inline StateVector make_initial_state(const InitialCondition& ic, const ModelSpec& spec,
                                      std::uint64_t seed, std::uint64_t stream) {
  const std::size_t n = spec.dimension();
  switch (ic.kind) {
    case InitialKind::Zero: return StateVector(n);
    case InitialKind::Fixed:
      if (ic.values.size() != n) {
        throw ConfigError("fixed initial condition needs " + std::to_string(n) + " values");
      }
      return StateVector(ic.values);
    case InitialKind::RandomNormal: {
      std::seed_seq seq{seed, stream};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> normal(0.0, 1.0);
      if (!spec.is_spectral()) {
        StateVector x(n);
        for (double& v : x) v = normal(rng);
        return x;
      }
      const Kse kse(spec.kse_constants());
      StateVector grid(spec.kse.grid);
      for (double& v : grid) v = normal(rng);
      return kse.from_grid(grid);
    }
    case InitialKind::KseReference: {
      const Kse kse(spec.kse_constants());
      StateVector grid(spec.kse.grid);
      const auto xs = kse.grid_points();
      for (std::size_t j = 0; j < xs.size(); ++j) {
        grid[j] = kse_reference_field(xs[j], spec.kse.domain_length);
      }
      return kse.from_grid(grid);
    }
  }
  throw ConfigError("unknown initial condition");
}

}  // namespace cda
