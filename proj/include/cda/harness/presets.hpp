/**
 * @file presets.hpp
 * @brief Named experiment configurations for the Lorenz '63, Lorenz '96 and
 *        Kuramoto-Sivashinsky studies.
 *
 * Preset names have the form `figN[-RULE][-MODE][-muX][-epsX][-seedX]` with
 * RULE in {gd, newton, lm, none} and MODE in {ds, otf, none}:
 *
 *   fig1  L63 plateau error with c1 perturbed by a factor (1 + eps), no updates
 *   fig2  fig1 at eps = 0.5 with a random normal nudged initial state
 *   fig3  L63 parameter recovery from c0 = gamma/2, mu = 100
 *   fig4  fig3 with a different mu (-mu20, -mu50, ...)
 *   fig5  two-layer L96, large scales observed, mu = 50
 *   fig6  KSE, c1 only, 32 observed modes, mu = 25
 *   fig7  KSE, all three parameters from c0 = (2, 2, 2)
 *   fig8  KSE with an eps u^(6) truth perturbation the model does not have
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cda/errors.hpp"
#include "cda/harness/config.hpp"

namespace cda {

inline std::vector<std::string> preset_names() {
  return {"fig1-none-none", "fig2-none-none", "fig3-gd-ds",     "fig3-gd-otf",
          "fig3-newton-ds", "fig3-newton-otf", "fig3-lm-ds",    "fig3-lm-otf",
          "fig4-lm-ds-mu20", "fig4-lm-otf-mu20", "fig4-lm-otf-mu50", "fig5-newton-ds",
          "fig5-newton-otf", "fig5-lm-ds",     "fig5-lm-otf",    "fig6-newton-ds",
          "fig6-newton-otf", "fig6-lm-ds",     "fig6-lm-otf",    "fig7-newton-otf",
          "fig7-lm-otf",    "fig8-none-none",  "fig8-lm-otf",    "fig8-newton-otf"};
}

namespace detail {

struct PresetName {
  int figure = 0;
  std::string rule;
  std::string mode;
  std::optional<double> mu;
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;
};

inline double parse_suffix_number(const std::string& token, std::size_t prefix,
                                  const std::string& name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token.substr(prefix), &used);
    if (used + prefix != token.size()) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("unknown preset '" + name + "'");
  }
}

inline PresetName parse_preset_name(const std::string& name) {
  PresetName p;
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= name.size()) {
    const std::size_t dash = name.find('-', start);
    tokens.push_back(name.substr(start, dash == std::string::npos ? std::string::npos : dash - start));
    if (dash == std::string::npos) break;
    start = dash + 1;
  }
  if (tokens.empty() || tokens[0].size() != 4 || tokens[0].rfind("fig", 0) != 0 ||
      tokens[0][3] < '1' || tokens[0][3] > '8') {
    throw ConfigError("unknown preset '" + name + "'");
  }
  p.figure = tokens[0][3] - '0';
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t == "gd" || t == "newton" || t == "lm" || (t == "none" && p.rule.empty())) {
      if (!p.rule.empty()) throw ConfigError("unknown preset '" + name + "'");
      p.rule = t;
    } else if (t == "ds" || t == "otf" || t == "none") {
      if (!p.mode.empty()) throw ConfigError("unknown preset '" + name + "'");
      p.mode = t;
    } else if (t.rfind("mu", 0) == 0) {
      p.mu = parse_suffix_number(t, 2, name);
    } else if (t.rfind("eps", 0) == 0) {
      p.eps = parse_suffix_number(t, 3, name);
    } else if (t.rfind("seed", 0) == 0) {
      p.seed = static_cast<std::uint64_t>(parse_suffix_number(t, 4, name));
    } else {
      throw ConfigError("unknown preset '" + name + "'");
    }
  }
  return p;
}

inline ExperimentConfig lorenz63_base() {
  ExperimentConfig c;
  c.model.kind = ModelKind::Lorenz63;
  c.truth_params = ParamVector{10.0, 28.0, 8.0 / 3.0};
  c.initial_params = ParamVector{5.0, 14.0, 4.0 / 3.0};
  c.mu = NudgingStrength::scalar(100.0);
  c.update_interval = 0.5;
  c.t_final = 50.0;
  c.observation = ObservationChoice::Identity;
  c.truth_ic = InitialCondition::fixed({0.0, 1.0, -1.0});
  c.nudged_ic = InitialCondition::zero();
  c.rule = UpdateRule::levenberg_marquardt(1e-6);
  c.rule.learning_rate = 30.0;
  c.sensitivity = SensitivityMode::OTF;
  c.convergence_tolerance = 1e-4;
  c.relative_tolerance = true;
  return c;
}

inline ExperimentConfig kse_base() {
  ExperimentConfig c;
  c.model.kind = ModelKind::KSE;
  c.model.kse = KseConstants{100.0, 1024, 0.0};
  c.truth_params = ParamVector{1.0, 1.0, 1.0};
  c.initial_params = ParamVector{0.5, 1.0, 1.0};
  c.mu = NudgingStrength::scalar(25.0);
  c.update_interval = 0.5;
  c.observation = ObservationChoice::LowFourierModes;
  c.observed_modes = 32;
  c.truth_ic = InitialCondition::kse_reference();
  c.nudged_ic = InitialCondition::zero();
  c.rule = UpdateRule::newton_root();
  c.sensitivity = SensitivityMode::OTF;
  return c;
}

}  // namespace detail

/// Returns the configuration for a named preset; throws ConfigError for
/// unknown names.
inline ExperimentConfig preset_config(const std::string& name) {
  const detail::PresetName p = detail::parse_preset_name(name);
  ExperimentConfig c;
  std::string rule = p.rule;
  std::string mode = p.mode;

  switch (p.figure) {
    case 1:
    case 2: {
      c = detail::lorenz63_base();
      const double eps = p.eps.value_or(0.5);
      c.initial_params = ParamVector{10.0 * (1.0 + eps), 28.0, 8.0 / 3.0};
      c.update_interval = 0.5;
      c.t_final = p.figure == 1 ? 20.0 : 5.0;
      c.dense_interval = 0.01;
      if (p.figure == 2) c.nudged_ic = InitialCondition::random_normal();
      if (rule.empty()) rule = "none";
      if (mode.empty()) mode = "none";
      break;
    }
    case 3:
    case 4:
      c = detail::lorenz63_base();
      if (p.figure == 4) c.convergence_tolerance = 1e-3;
      if (rule.empty()) rule = "lm";
      if (mode.empty()) mode = "otf";
      break;
    case 5:
      c.model.kind = ModelKind::Lorenz96TwoLayer;
      c.model.lorenz96 = Lorenz96Constants{};
      c.truth_params = ParamVector{0.01, 0.5};
      c.initial_params = ParamVector{0.005, 0.25};
      c.mu = NudgingStrength::scalar(50.0);
      c.update_interval = 0.5;
      c.t_final = 200.0;
      c.observation = ObservationChoice::LargeScaleOnly;
      c.truth_ic = InitialCondition::random_normal();
      c.nudged_ic = InitialCondition::zero();
      c.rule = UpdateRule::levenberg_marquardt(1e-6);
      c.convergence_tolerance = 1e-3;
      if (rule.empty()) rule = "lm";
      if (mode.empty()) mode = "otf";
      break;
    case 6:
      c = detail::kse_base();
      c.estimated = {0};
      c.t_final = 50.0;
      c.convergence_tolerance = 1e-3;
      if (rule.empty()) rule = "newton";
      if (mode.empty()) mode = "otf";
      break;
    case 7:
      c = detail::kse_base();
      c.initial_params = ParamVector{2.0, 2.0, 2.0};
      c.t_final = 100.0;
      c.convergence_tolerance = 1e-2;
      if (rule.empty()) rule = "lm";
      if (mode.empty()) mode = "otf";
      break;
    case 8: {
      c = detail::kse_base();
      ModelSpec truth = c.model;
      truth.kind = ModelKind::KSEPerturbed;
      truth.kse.epsilon = p.eps.value_or(1e-3);
      c.truth_model = truth;
      c.initial_params = ParamVector{1.0, 1.0, 1.0};
      c.t_final = 100.0;
      c.dense_interval = 0.1;
      c.convergence_tolerance = 1e-2;
      if (rule.empty()) rule = "lm";
      if (mode.empty()) mode = "otf";
      break;
    }
    default: throw ConfigError("unknown preset '" + name + "'");
  }

  c.name = name;
  const double rate = c.rule.learning_rate;
  const double lambda = c.rule.damping;
  c.rule.kind = parse_rule_kind(rule);
  c.rule.learning_rate = rate;
  c.rule.damping = lambda;
  c.sensitivity = parse_sensitivity_mode(mode);
  if (c.rule.kind == UpdateRule::Kind::None && p.mode.empty()) {
    c.sensitivity = SensitivityMode::None;
  }
  if (p.mu) c.mu = NudgingStrength::scalar(*p.mu);
  if (p.seed) c.seed = *p.seed;
  return c;
}

}  // namespace cda
