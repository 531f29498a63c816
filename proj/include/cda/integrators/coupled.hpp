/**
 * @file coupled.hpp
 * @brief Joint integration of the truth, the nudged copy and (optionally) the
 *        directly simulated sensitivities.
 *
 *   du/dt  = f(u; gamma)
 *   dv/dt  = f(v; c) - mu I_h (v - u)
 *   dw_i/dt = Df(v; c) w_i + df/dc_i(v; c) - mu I_h w_i
 *
 * ODE models integrate the stacked vector (u, v, w_1..w_n) with RK4, the
 * nudging term inside the right-hand side. Spectral models use block ETDRK4;
 * mu I_h joins the diagonal linear operator of the nudged and sensitivity
 * blocks and mu I_h u is an explicit forcing.
 *
 * The truth block never reads the other blocks, so its trajectory is
 * bit-identical whatever sensitivity mode is requested.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cda/errors.hpp"
#include "cda/integrators/etdrk4.hpp"
#include "cda/integrators/rk4.hpp"
#include "cda/models/concepts.hpp"
#include "cda/observation.hpp"
#include "cda/types.hpp"

namespace cda {

enum class Scheme { RK4, SemiImplicitSpectral };
enum class SensitivityMode { DS, OTF, None };

inline std::string to_string(SensitivityMode m) {
  switch (m) {
    case SensitivityMode::DS: return "ds";
    case SensitivityMode::OTF: return "otf";
    case SensitivityMode::None: return "none";
  }
  return "?";
}

inline SensitivityMode parse_sensitivity_mode(const std::string& s) {
  if (s == "ds") return SensitivityMode::DS;
  if (s == "otf") return SensitivityMode::OTF;
  if (s == "none") return SensitivityMode::None;
  throw ConfigError("unknown sensitivity mode '" + s + "'");
}

struct IntegratorConfig {
  Scheme scheme = Scheme::RK4;
  double dt = 1e-3;
  NudgingStrength mu = NudgingStrength::scalar(0.0);
  /// Drop the df/dc_i forcing of the sensitivity equations (homogeneous part only).
  bool sensitivity_source = true;

  static constexpr double kRk4StabilityLimit = 2.5;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("integrator: dt must be positive");
    for (double m : mu.values()) {
      if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("integrator: mu must be >= 0");
    }
    if (scheme == Scheme::RK4 && mu.max() * dt > kRk4StabilityLimit) {
      throw ConfigError("integrator: mu*dt exceeds the RK4 stability limit " +
                        std::to_string(kRk4StabilityLimit));
    }
  }
};

struct CoupledState {
  StateVector truth;
  StateVector nudged;
  std::optional<SensitivityStack> sensitivities;
  double time = 0.0;
};

template <DynamicalModel M>
class CoupledIntegrator {
 public:
  CoupledIntegrator(M truth_model, M model, ParamVector truth_params, ParamVector params,
                    IntegratorConfig cfg, ObservationOperator op,
                    std::vector<std::size_t> sensitivity_params)
      : truth_model_(std::move(truth_model)),
        model_(std::move(model)),
        gamma_(std::move(truth_params)),
        c_(std::move(params)),
        cfg_(std::move(cfg)),
        op_(std::move(op)),
        sens_params_(std::move(sensitivity_params)) {
    cfg_.validate();
    const std::size_t n = model_.dimension();
    detail::check_length("truth model dimension", truth_model_.dimension(), n);
    detail::check_length("observation operator", op_.dimension(), n);
    detail::check_length("truth parameters", gamma_.size(), truth_model_.param_count());
    detail::check_length("parameters", c_.size(), model_.param_count());
    for (std::size_t p : sens_params_) {
      if (p >= model_.param_count()) throw DomainError("sensitivity parameter out of range");
    }
    const std::vector<double> mu = cfg_.mu.expand(n);
    gain_.resize(n);
    for (std::size_t i = 0; i < n; ++i) gain_[i] = mu[i] * op_.mask()[i];

    if constexpr (SpectralModel<M>) {
      if (cfg_.scheme != Scheme::SemiImplicitSpectral) {
        throw ConfigError("spectral models require the semi-implicit spectral scheme");
      }
      if (!cfg_.mu.is_scalar()) throw ConfigError("spectral models take a scalar mu");
      truth_coeffs_ = EtdCoefficients::compute(truth_model_.linear_symbol(gamma_), cfg_.dt);
    } else {
      if (cfg_.scheme != Scheme::RK4) throw ConfigError("ODE models require the RK4 scheme");
    }
    rebuild();
  }

  CoupledIntegrator(M model, ParamVector truth_params, ParamVector params, IntegratorConfig cfg,
                    ObservationOperator op)
      : CoupledIntegrator(model, model, std::move(truth_params), std::move(params),
                          std::move(cfg), std::move(op), all_indices(model.param_count())) {}

  const M& model() const noexcept { return model_; }
  const M& truth_model() const noexcept { return truth_model_; }
  const ParamVector& params() const noexcept { return c_; }
  const ParamVector& truth_params() const noexcept { return gamma_; }
  const IntegratorConfig& config() const noexcept { return cfg_; }
  const ObservationOperator& observation() const noexcept { return op_; }
  const std::vector<std::size_t>& sensitivity_params() const noexcept { return sens_params_; }

  /// Replaces c. Spectral models recompute their exponential coefficients.
  void set_params(const ParamVector& c) {
    detail::check_length("parameters", c.size(), model_.param_count());
    c_ = c;
    rebuild();
  }

  /// Advances every block by `duration`, split into ceil(duration/dt) steps
  /// with the last one shortened. In DS mode an absent stack is created at zero.
  void advance(CoupledState& s, double duration, SensitivityMode mode) const {
    const std::size_t n = model_.dimension();
    detail::check_length("truth", s.truth.size(), n);
    detail::check_length("nudged", s.nudged.size(), n);
    if (!(duration > 0.0)) throw DomainError("advance: duration must be positive");

    std::size_t cols = 0;
    if (mode == SensitivityMode::DS) {
      if (!s.sensitivities) {
        s.sensitivities = SensitivityStack::zeros(n, sens_params_, SensitivitySource::DS);
      }
      if (s.sensitivities->params != sens_params_) {
        throw DimensionError("sensitivity stack does not match the integrator's parameters");
      }
      cols = s.sensitivities->size();
    }

    const std::size_t blocks = 2 + cols;
    std::vector<double> y(blocks * n);
    std::copy(s.truth.begin(), s.truth.end(), y.begin());
    std::copy(s.nudged.begin(), s.nudged.end(), y.begin() + n);
    for (std::size_t i = 0; i < cols; ++i) {
      const auto& w = s.sensitivities->columns[i];
      std::copy(w.begin(), w.end(), y.begin() + (2 + i) * n);
    }

    const auto steps = static_cast<std::size_t>(std::ceil(duration / cfg_.dt - 1e-9));
    const double last = duration - static_cast<double>(steps - 1) * cfg_.dt;
    double t = s.time;
    if constexpr (SpectralModel<M>) {
      Etdrk4 stepper;
      for (std::size_t k = 0; k < steps; ++k) {
        const bool short_step = (k + 1 == steps) && std::abs(last - cfg_.dt) > 1e-12 * cfg_.dt;
        if (short_step) {
          const EtdCoefficients tc =
              EtdCoefficients::compute(truth_model_.linear_symbol(gamma_), last);
          const EtdCoefficients nc = EtdCoefficients::compute(nudged_symbol_, last);
          step_blocks(stepper, y, blocks, tc, nc);
          t += last;
        } else {
          step_blocks(stepper, y, blocks, truth_coeffs_, nudged_coeffs_);
          t += cfg_.dt;
        }
        check_finite(y, blocks, t);
      }
    } else {
      Rk4 rk(y.size());
      auto field = [&](std::span<const double> yy, std::span<double> dy) {
        ode_field(yy, dy, cols);
      };
      for (std::size_t k = 0; k < steps; ++k) {
        const double h = (k + 1 == steps) ? last : cfg_.dt;
        rk.step(field, std::span<double>(y), h);
        t += h;
        check_finite(y, blocks, t);
      }
    }

    std::copy(y.begin(), y.begin() + n, s.truth.begin());
    std::copy(y.begin() + n, y.begin() + 2 * n, s.nudged.begin());
    for (std::size_t i = 0; i < cols; ++i) {
      auto& w = s.sensitivities->columns[i];
      std::copy(y.begin() + (2 + i) * n, y.begin() + (3 + i) * n, w.begin());
    }
    s.time += duration;
  }

 private:
  void rebuild() {
    if constexpr (SpectralModel<M>) {
      nudged_symbol_ = model_.linear_symbol(c_);
      for (std::size_t m = 0; m < nudged_symbol_.size(); ++m) nudged_symbol_[m] -= gain_[2 * m];
      nudged_coeffs_ = EtdCoefficients::compute(nudged_symbol_, cfg_.dt);
    }
  }

  void ode_field(std::span<const double> y, std::span<double> dy, std::size_t cols) const {
    const std::size_t n = model_.dimension();
    auto u = y.subspan(0, n);
    auto v = y.subspan(n, n);
    truth_model_.rhs(u, gamma_, dy.subspan(0, n));
    auto dv = dy.subspan(n, n);
    model_.rhs(v, c_, dv);
    for (std::size_t j = 0; j < n; ++j) dv[j] -= gain_[j] * (v[j] - u[j]);
    if (cols == 0) return;
    std::vector<double> source(n);
    for (std::size_t i = 0; i < cols; ++i) {
      auto w = y.subspan((2 + i) * n, n);
      auto dw = dy.subspan((2 + i) * n, n);
      model_.jacobian_vector_product(v, c_, w, dw);
      if (cfg_.sensitivity_source) {
        model_.param_derivative(v, c_, sens_params_[i], source);
        for (std::size_t j = 0; j < n; ++j) dw[j] += source[j];
      }
      for (std::size_t j = 0; j < n; ++j) dw[j] -= gain_[j] * w[j];
    }
  }

  void step_blocks(Etdrk4& stepper, std::vector<double>& y, std::size_t blocks,
                     const EtdCoefficients& truth, const EtdCoefficients& nudged) const
    requires SpectralModel<M>
  {
    std::vector<const EtdCoefficients*> coeffs(blocks, &nudged);
    coeffs[0] = &truth;
    const std::size_t n = model_.dimension();
    auto nonlinear = [&](double, std::span<const double> yy, std::span<double> out) {
      auto u = yy.subspan(0, n);
      auto v = yy.subspan(n, n);
      truth_model_.nonlinear(u, gamma_, out.subspan(0, n));
      auto nv = out.subspan(n, n);
      model_.nonlinear(v, c_, nv);
      for (std::size_t j = 0; j < n; ++j) nv[j] += gain_[j] * u[j];
      std::vector<double> source(n);
      for (std::size_t i = 0; i + 2 < blocks; ++i) {
        auto w = yy.subspan((2 + i) * n, n);
        auto nw = out.subspan((2 + i) * n, n);
        model_.nonlinear_jvp(v, c_, w, nw);
        if (cfg_.sensitivity_source) {
          model_.param_derivative(v, c_, sens_params_[i], source);
          for (std::size_t j = 0; j < n; ++j) nw[j] += source[j];
        }
      }
    };
    stepper.step(nonlinear, 0.0, std::span<double>(y), coeffs);
  }

  void check_finite(const std::vector<double>& y, std::size_t blocks, double t) const {
    const std::size_t n = model_.dimension();
    for (std::size_t b = 0; b < blocks; ++b) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(y[b * n + j])) {
          std::string name = b == 0 ? "truth" : b == 1 ? "nudged"
                                                       : "sensitivity[" + std::to_string(b - 2) + "]";
          throw DivergenceError(name, t);
        }
      }
    }
  }

  M truth_model_;
  M model_;
  ParamVector gamma_;
  ParamVector c_;
  IntegratorConfig cfg_;
  ObservationOperator op_;
  std::vector<std::size_t> sens_params_;
  std::vector<double> gain_;
  std::vector<double> nudged_symbol_;
  EtdCoefficients truth_coeffs_;
  EtdCoefficients nudged_coeffs_;
};

/// Convenience wrapper: same model for truth and nudged copy, all parameters
/// carried in the sensitivity stack.
template <DynamicalModel M>
CoupledState advance_coupled(const M& model, CoupledState state, const ParamVector& c,
                             const ParamVector& gamma, const IntegratorConfig& cfg,
                             const ObservationOperator& op, double duration,
                             SensitivityMode mode) {
  CoupledIntegrator<M> integrator(model, gamma, c, cfg, op);
  integrator.advance(state, duration, mode);
  return state;
}

}  // namespace cda
