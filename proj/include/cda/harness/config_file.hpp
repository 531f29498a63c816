/**
 * @file config_file.hpp
 * @brief Flat `key = value` overrides for ExperimentConfig.
 *
 * Lines are `key = value`; `#` starts a comment. Lists are comma separated.
 * Keys: name model truth_model gamma c0 estimate mu dt_update t_final dt rule
 * r lambda sensitivity observation modes seed truth_ic truth_ic_values
 * nudged_ic nudged_ic_values dense_interval clamp_factor tolerance
 * tolerance_relative sites fast_per_site damping forcing domain_length grid
 * epsilon.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cda/errors.hpp"
#include "cda/harness/config.hpp"
#include "cda/harness/run_log.hpp"

namespace cda {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(parse_double(item));
    } catch (const IoError&) {
      throw ConfigError("bad number '" + item + "' for key '" + key + "'");
    }
  }
  return out;
}

inline double parse_scalar(const std::string& key, const std::string& value) {
  const auto v = parse_list(key, value);
  if (v.size() != 1) throw ConfigError("key '" + key + "' takes a single number");
  return v[0];
}

inline std::size_t parse_count(const std::string& key, const std::string& value) {
  const double v = parse_scalar(key, value);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ConfigError("key '" + key + "' takes a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

inline ModelSpec& truth_spec_for_edit(ExperimentConfig& cfg) {
  if (!cfg.truth_model) cfg.truth_model = cfg.model;
  return *cfg.truth_model;
}

}  // namespace detail

/// Applies one override. Unknown keys are a ConfigError.
inline void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "name") {
    cfg.name = value;
  } else if (key == "model") {
    const ModelKind k = parse_model_kind(value);
    const bool had_separate_truth = cfg.truth_model.has_value();
    cfg.model.kind = k;
    if (had_separate_truth && cfg.truth_model->is_spectral() != cfg.model.is_spectral()) {
      cfg.truth_model.reset();
    }
  } else if (key == "truth_model") {
    ModelSpec t = cfg.model;
    if (cfg.truth_model) t = *cfg.truth_model;
    t.kind = parse_model_kind(value);
    cfg.truth_model = t;
  } else if (key == "gamma") {
    cfg.truth_params = ParamVector(parse_list(key, value));
  } else if (key == "c0") {
    cfg.initial_params = ParamVector(parse_list(key, value));
  } else if (key == "estimate") {
    cfg.estimated.clear();
    if (value != "all") {
      for (double v : parse_list(key, value)) {
        if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
          throw ConfigError("estimate takes 1-based parameter indices");
        }
        cfg.estimated.push_back(static_cast<std::size_t>(v) - 1);
      }
    }
  } else if (key == "mu") {
    const auto v = parse_list(key, value);
    if (v.empty()) throw ConfigError("mu needs a value");
    cfg.mu = v.size() == 1 ? NudgingStrength::scalar(v[0]) : NudgingStrength::per_component(v);
  } else if (key == "dt_update") {
    cfg.update_interval = parse_scalar(key, value);
  } else if (key == "t_final") {
    cfg.t_final = parse_scalar(key, value);
  } else if (key == "dt") {
    cfg.dt = parse_scalar(key, value);
  } else if (key == "rule") {
    cfg.rule.kind = parse_rule_kind(value);
  } else if (key == "r") {
    cfg.rule.learning_rate = parse_scalar(key, value);
  } else if (key == "lambda") {
    cfg.rule.damping = parse_scalar(key, value);
  } else if (key == "sensitivity") {
    cfg.sensitivity = parse_sensitivity_mode(value);
  } else if (key == "observation") {
    cfg.observation = parse_observation(value);
  } else if (key == "modes") {
    cfg.observed_modes = parse_count(key, value);
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_count(key, value));
  } else if (key == "truth_ic") {
    cfg.truth_ic.kind = parse_initial_kind(value);
  } else if (key == "truth_ic_values") {
    cfg.truth_ic = InitialCondition::fixed(parse_list(key, value));
  } else if (key == "nudged_ic") {
    cfg.nudged_ic.kind = parse_initial_kind(value);
  } else if (key == "nudged_ic_values") {
    cfg.nudged_ic = InitialCondition::fixed(parse_list(key, value));
  } else if (key == "dense_interval") {
    cfg.dense_interval = parse_scalar(key, value);
  } else if (key == "clamp_factor") {
    cfg.clamp_factor = parse_scalar(key, value);
  } else if (key == "tolerance") {
    cfg.convergence_tolerance = parse_scalar(key, value);
  } else if (key == "tolerance_relative") {
    if (value != "true" && value != "false") throw ConfigError("tolerance_relative takes true or false");
    cfg.relative_tolerance = value == "true";
  } else if (key == "sites" || key == "fast_per_site" || key == "forcing" || key == "damping") {
    for (ModelSpec* s : {&cfg.model, cfg.truth_model ? &*cfg.truth_model : nullptr}) {
      if (s == nullptr) continue;
      if (key == "sites") s->lorenz96.sites = parse_count(key, value);
      if (key == "fast_per_site") s->lorenz96.fast_per_site = parse_count(key, value);
      if (key == "forcing") s->lorenz96.forcing = parse_scalar(key, value);
      if (key == "damping") s->lorenz96.damping = parse_list(key, value);
    }
  } else if (key == "domain_length" || key == "grid") {
    for (ModelSpec* s : {&cfg.model, cfg.truth_model ? &*cfg.truth_model : nullptr}) {
      if (s == nullptr) continue;
      if (key == "domain_length") s->kse.domain_length = parse_scalar(key, value);
      if (key == "grid") s->kse.grid = parse_count(key, value);
    }
  } else if (key == "epsilon") {
    truth_spec_for_edit(cfg).kse.epsilon = parse_scalar(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

inline void apply_overrides(ExperimentConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_override(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
}

inline void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  apply_overrides(cfg, in);
}

/// Writes the configuration in the same key = value form.
inline std::string dump_config(const ExperimentConfig& cfg) {
  using detail::join;
  std::ostringstream o;
  o << "name = " << cfg.name << '\n';
  o << "model = " << to_string(cfg.model.kind) << '\n';
  if (cfg.truth_model) o << "truth_model = " << to_string(cfg.truth_model->kind) << '\n';
  o << "gamma = " << join(cfg.truth_params.values()) << '\n';
  o << "c0 = " << join(cfg.initial_params.values()) << '\n';
  o << "estimate = ";
  if (cfg.estimated.empty()) {
    o << "all";
  } else {
    for (std::size_t i = 0; i < cfg.estimated.size(); ++i) o << (i ? "," : "") << cfg.estimated[i] + 1;
  }
  o << '\n';
  o << "mu = " << join(cfg.mu.values()) << '\n';
  o << "dt_update = " << format_double(cfg.update_interval) << '\n';
  o << "t_final = " << format_double(cfg.t_final) << '\n';
  o << "dt = " << format_double(cfg.inner_dt()) << '\n';
  o << "rule = " << to_string(cfg.rule.kind) << '\n';
  o << "r = " << format_double(cfg.rule.learning_rate) << '\n';
  o << "lambda = " << format_double(cfg.rule.damping) << '\n';
  o << "sensitivity = " << to_string(cfg.sensitivity) << '\n';
  o << "observation = " << to_string(cfg.observation) << '\n';
  o << "modes = " << cfg.observed_modes << '\n';
  o << "seed = " << cfg.seed << '\n';
  o << "truth_ic = " << to_string(cfg.truth_ic.kind) << '\n';
  if (cfg.truth_ic.kind == InitialKind::Fixed) o << "truth_ic_values = " << join(cfg.truth_ic.values) << '\n';
  o << "nudged_ic = " << to_string(cfg.nudged_ic.kind) << '\n';
  if (cfg.nudged_ic.kind == InitialKind::Fixed) o << "nudged_ic_values = " << join(cfg.nudged_ic.values) << '\n';
  o << "dense_interval = " << format_double(cfg.dense_interval) << '\n';
  o << "clamp_factor = " << format_double(cfg.clamp_factor) << '\n';
  o << "tolerance = " << format_double(cfg.convergence_tolerance) << '\n';
  o << "tolerance_relative = " << (cfg.relative_tolerance ? "true" : "false") << '\n';
  if (cfg.model.kind == ModelKind::Lorenz96TwoLayer) {
    o << "sites = " << cfg.model.lorenz96.sites << '\n';
    o << "fast_per_site = " << cfg.model.lorenz96.fast_per_site << '\n';
    o << "damping = " << join(cfg.model.lorenz96.damping) << '\n';
    o << "forcing = " << format_double(cfg.model.lorenz96.forcing) << '\n';
  }
  if (cfg.model.is_spectral()) {
    o << "domain_length = " << format_double(cfg.model.kse.domain_length) << '\n';
    o << "grid = " << cfg.model.kse.grid << '\n';
    if (cfg.truth_spec().kind == ModelKind::KSEPerturbed) {
      o << "epsilon = " << format_double(cfg.truth_spec().kse.epsilon) << '\n';
    }
  }
  return o.str();
}

}  // namespace cda
