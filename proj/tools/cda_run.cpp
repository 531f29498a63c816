// Command-line driver: runs one experiment and writes its RunLog as CSV.
//
// Exit codes: 0 success, 1 configuration error, 2 divergence.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cda/cda.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kDiverged = 2;

void print_summary(const cda::RunLog& log, std::ostream& os) {
  if (log.records.empty()) {
    os << "no updates recorded\n";
    return;
  }
  const auto& last = log.records.back();
  os << "updates: " << log.records.size() << "  t=" << last.time << "  E=" << last.error
     << "  |c-gamma|=" << last.param_error << "  c=(";
  for (std::size_t i = 0; i < last.params.size(); ++i) os << (i ? ", " : "") << last.params[i];
  os << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nudging-based on-the-fly parameter estimation"};

  std::string preset;
  std::string config_path;
  std::optional<std::string> model, rule, sensitivity;
  std::optional<std::vector<double>> mu;
  std::optional<double> dt_update, t_final;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool dense_log = false;
  bool list_presets = false;
  bool print_config = false;
  std::vector<std::string> sets;

  app.add_option("--preset", preset, "Named experiment, e.g. fig3-lm-otf");
  app.add_option("--config", config_path, "key = value override file")->check(CLI::ExistingFile);
  app.add_option("--model", model, "lorenz63 | lorenz96 | kse | kse-perturbed");
  app.add_option("--rule", rule, "gd | newton | lm | none");
  app.add_option("--sensitivity", sensitivity, "ds | otf | none");
  app.add_option("--mu", mu, "Nudging coefficient (one value, or one per component)")->delimiter(',');
  app.add_option("--dt-update", dt_update, "Time between parameter updates");
  app.add_option("--t-final", t_final, "Final time");
  app.add_option("--seed", seed, "Seed for random initial conditions");
  app.add_option("--set", sets, "Extra key=value override (repeatable)");
  app.add_option("--out", out_path, "RunLog CSV path");
  app.add_flag("--dense-log", dense_log, "Also record |I_h(v-u)| between updates");
  app.add_flag("--list-presets", list_presets, "List preset names and exit");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (list_presets) {
    for (const auto& name : cda::preset_names()) std::cout << name << '\n';
    return 0;
  }

  cda::ExperimentConfig cfg;
  std::vector<std::string> warnings;
  try {
    cfg = preset.empty() ? cda::preset_config("fig3-lm-otf") : cda::preset_config(preset);
    if (preset.empty()) cfg.name = "custom";
    if (!config_path.empty()) cda::apply_config_file(cfg, config_path);
    if (model) cda::apply_override(cfg, "model", *model);
    if (rule) cda::apply_override(cfg, "rule", *rule);
    if (sensitivity) cda::apply_override(cfg, "sensitivity", *sensitivity);
    if (mu) {
      cfg.mu = mu->size() == 1 ? cda::NudgingStrength::scalar(mu->front())
                               : cda::NudgingStrength::per_component(*mu);
    }
    if (dt_update) cfg.update_interval = *dt_update;
    if (t_final) cfg.t_final = *t_final;
    if (seed) cfg.seed = *seed;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw cda::ConfigError("--set expects key=value, got " + kv);
      cda::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (dense_log && cfg.dense_interval <= 0.0) cfg.dense_interval = cfg.update_interval / 10.0;
    if (!dense_log) cfg.dense_interval = 0.0;
    if (print_config) {
      std::cout << cda::dump_config(cfg);
      return 0;
    }
    warnings = cfg.validate();
  } catch (const cda::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

  cda::RunLog log;
  int status = 0;
  try {
    log = cda::run_experiment(cfg);
  } catch (const cda::ExperimentDiverged& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    log = e.partial();
    status = kDiverged;
  } catch (const cda::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const cda::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  if (!out_path.empty()) {
    try {
      cda::write_run_log(log, out_path, dense_log);
    } catch (const cda::IoError& e) {
      std::cerr << "i/o error: " << e.what() << '\n';
      return kConfigError;
    }
  }
  print_summary(log, std::cout);
  return status;
}
