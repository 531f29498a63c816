/**
 * @file estimation.hpp
 * @brief Error functional, gradient and Gauss-Newton assembly from a
 *        sensitivity stack, and the parameter update rules.
 *
 * With r = I_h(v - u) and observed sensitivities I_h w_i:
 *
 *   E      = 1/2 <r, r>
 *   g_i    = <r, I_h w_i>
 *   G_ij   = <I_h w_i, I_h w_j>
 *
 *   gradient descent     c - rate g
 *   Newton root (m = 2)  c - (2E / |g|^2) g
 *   Levenberg-Marquardt  c - (G + lambda I)^{-1} g     (lambda = 0: Gauss-Newton)
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cda/errors.hpp"
#include "cda/observation.hpp"
#include "cda/types.hpp"

namespace cda {

/// Updates are skipped below this |g|^2 (or CHL denominator magnitude).
inline constexpr double kSkipThreshold = 1e-14;

struct UpdateRule {
  enum class Kind { GradientDescent, NewtonRoot, LevenbergMarquardt, None };

  Kind kind = Kind::None;
  double learning_rate = 30.0;  ///< r, gradient descent only
  double damping = 1e-6;        ///< lambda, Levenberg-Marquardt only

  static UpdateRule gradient_descent(double r) { return {Kind::GradientDescent, r, 1e-6}; }
  static UpdateRule newton_root() { return {Kind::NewtonRoot, 30.0, 1e-6}; }
  static UpdateRule levenberg_marquardt(double lambda) {
    return {Kind::LevenbergMarquardt, 30.0, lambda};
  }
  static UpdateRule none() { return {}; }

  void validate() const {
    if (kind == Kind::GradientDescent && !(learning_rate > 0.0)) {
      throw ConfigError("gradient descent needs a positive learning rate");
    }
    if (kind == Kind::LevenbergMarquardt && !(damping >= 0.0)) {
      throw ConfigError("Levenberg-Marquardt damping must be >= 0");
    }
  }
};

inline std::string to_string(UpdateRule::Kind k) {
  switch (k) {
    case UpdateRule::Kind::GradientDescent: return "gd";
    case UpdateRule::Kind::NewtonRoot: return "newton";
    case UpdateRule::Kind::LevenbergMarquardt: return "lm";
    case UpdateRule::Kind::None: return "none";
  }
  return "?";
}

inline UpdateRule::Kind parse_rule_kind(const std::string& s) {
  if (s == "gd") return UpdateRule::Kind::GradientDescent;
  if (s == "newton") return UpdateRule::Kind::NewtonRoot;
  if (s == "lm" || s == "gn") return UpdateRule::Kind::LevenbergMarquardt;
  if (s == "none") return UpdateRule::Kind::None;
  throw ConfigError("unknown update rule '" + s + "'");
}

struct UpdateDiagnostics {
  double error = 0.0;
  std::vector<double> gradient;
  Eigen::MatrixXd gn_matrix;
  std::vector<double> step;
  bool skipped = false;
  bool clamped = false;
};

/// Result of a rule that may decline to move.
struct UpdateResult {
  ParamVector params;
  bool skipped = false;
};

inline double error_functional(const StateVector& v, const StateVector& u,
                               const ObservationOperator& op) {
  if (v.size() != u.size()) throw DimensionError("error_functional: length mismatch");
  return 0.5 * op.observed_distance_squared(v.span(), u.span());
}

inline std::vector<double> assemble_gradient(const StateVector& v, const StateVector& u,
                                             const SensitivityStack& w,
                                             const ObservationOperator& op) {
  if (v.size() != u.size()) throw DimensionError("assemble_gradient: length mismatch");
  std::vector<double> residual(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) residual[j] = v[j] - u[j];
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g[i] = op.observed_inner(residual, w.columns[i].span());
  return g;
}

inline Eigen::MatrixXd assemble_gn_matrix(const SensitivityStack& w,
                                          const ObservationOperator& op) {
  const auto n = static_cast<Eigen::Index>(w.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      g(i, j) = op.observed_inner(w.columns[i].span(), w.columns[j].span());
      g(j, i) = g(i, j);
    }
  }
  return g;
}

inline ParamVector update_gradient_descent(const ParamVector& c, const std::vector<double>& g,
                                           double rate) {
  if (!(rate > 0.0)) throw DomainError("gradient descent: rate must be positive");
  if (g.size() != c.size()) throw DimensionError("gradient descent: length mismatch");
  ParamVector out = c;
  for (std::size_t i = 0; i < c.size(); ++i) out[i] -= rate * g[i];
  return out;
}

/// Multiplicity-2 Newton root step along the steepest-descent direction.
inline UpdateResult update_newton_root(const ParamVector& c, double error,
                                       const std::vector<double>& g) {
  if (g.size() != c.size()) throw DimensionError("newton root: length mismatch");
  double g2 = 0.0;
  for (double x : g) g2 += x * x;
  if (g2 < kSkipThreshold) return {c, true};
  const double scale = 2.0 * error / g2;
  ParamVector out = c;
  for (std::size_t i = 0; i < c.size(); ++i) out[i] -= scale * g[i];
  return {out, false};
}

inline ParamVector update_levenberg_marquardt(const ParamVector& c, const std::vector<double>& g,
                                              const Eigen::MatrixXd& gn, double lambda) {
  const auto n = static_cast<Eigen::Index>(c.size());
  if (g.size() != c.size() || gn.rows() != n || gn.cols() != n) {
    throw DimensionError("levenberg-marquardt: size mismatch");
  }
  if (!(lambda >= 0.0)) throw DomainError("levenberg-marquardt: lambda must be >= 0");
  const Eigen::MatrixXd a = gn + lambda * Eigen::MatrixXd::Identity(n, n);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw SolverError("Gauss-Newton system is singular; use a positive damping lambda");
  }
  const Eigen::VectorXd step = lu.solve(Eigen::Map<const Eigen::VectorXd>(g.data(), n));
  ParamVector out = c;
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] -= step(i);
  return out;
}

/// Closed-form single-parameter update for dv/dt + c L v + F(v) + mu I_h(v-u) = 0:
///   c + mu |I_h(v-u)|^2 / <I_h(v-u), L v>.
/// Skipped when the pairing is below the skip threshold in magnitude.
struct ScalarUpdate {
  double value;
  bool skipped = false;
};

inline ScalarUpdate chl_update(double c, const StateVector& v, const StateVector& u,
                               const StateVector& lv, double mu, const ObservationOperator& op) {
  if (!(mu > 0.0)) throw DomainError("chl_update: mu must be positive");
  if (v.size() != u.size() || lv.size() != v.size()) {
    throw DimensionError("chl_update: length mismatch");
  }
  std::vector<double> r(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) r[j] = v[j] - u[j];
  const double num = op.observed_inner(r, r);
  if (num == 0.0) return {c, false};
  const double den = op.observed_inner(r, lv.span());
  if (std::abs(den) < kSkipThreshold) return {c, true};
  return {c + mu * num / den, false};
}

/// Applies `rule` to the parameters listed in `w.params`, leaving the rest of
/// `c` untouched. Steps that change |c| by more than `clamp_factor` (either
/// way) are rejected and flagged.
inline ParamVector apply_update(const UpdateRule& rule, const ParamVector& c,
                                const StateVector& v, const StateVector& u,
                                const SensitivityStack& w, const ObservationOperator& op,
                                double clamp_factor, UpdateDiagnostics& diag) {
  diag = {};
  diag.error = error_functional(v, u, op);
  if (rule.kind == UpdateRule::Kind::None) {
    diag.step.assign(c.size(), 0.0);
    return c;
  }
  diag.gradient = assemble_gradient(v, u, w, op);
  diag.gn_matrix = assemble_gn_matrix(w, op);

  ParamVector active(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) active[i] = c[w.params[i]];

  ParamVector next;
  switch (rule.kind) {
    case UpdateRule::Kind::GradientDescent:
      next = update_gradient_descent(active, diag.gradient, rule.learning_rate);
      break;
    case UpdateRule::Kind::NewtonRoot: {
      UpdateResult r = update_newton_root(active, diag.error, diag.gradient);
      next = std::move(r.params);
      diag.skipped = r.skipped;
      break;
    }
    case UpdateRule::Kind::LevenbergMarquardt:
      if (diag.error == 0.0) {
        next = active;
        break;
      }
      next = update_levenberg_marquardt(active, diag.gradient, diag.gn_matrix, rule.damping);
      break;
    case UpdateRule::Kind::None: break;
  }

  ParamVector out = c;
  for (std::size_t i = 0; i < w.size(); ++i) out[w.params[i]] = next[i];
  if (!out.all_finite()) {
    diag.skipped = true;
    out = c;
  }

  const double before = euclidean_norm(c.span());
  const double after = euclidean_norm(out.span());
  if (clamp_factor > 0.0 && before > 0.0 &&
      (after > clamp_factor * before || after * clamp_factor < before)) {
    diag.clamped = true;
    out = c;
  }
  diag.step.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) diag.step[i] = out[i] - c[i];
  return out;
}

}  // namespace cda
