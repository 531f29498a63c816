/**
 * @file types.hpp
 * @brief Value types: states, parameter vectors, nudging strengths and
 *        sensitivity stacks.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cda/errors.hpp"

namespace cda {

/// Flat real array tagged with its domain role so that states and parameter
/// vectors cannot be mixed up.
template <typename Tag>
class RealArray {
 public:
  RealArray() = default;
  explicit RealArray(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  explicit RealArray(std::vector<double> values) : values_(std::move(values)) {}
  RealArray(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  std::span<double> span() noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }
  operator std::span<const double>() const noexcept { return values_; }

  const std::vector<double>& values() const& noexcept { return values_; }
  std::vector<double> values() && noexcept { return std::move(values_); }

  bool all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
  }

  friend bool operator==(const RealArray&, const RealArray&) = default;

 private:
  std::vector<double> values_;
};

struct StateTag {};
struct ParamTag {};

/// Model state (truth u, nudged v, or a tangent vector). Layout is owned by the model.
using StateVector = RealArray<StateTag>;
/// Parameter vector (c or gamma).
using ParamVector = RealArray<ParamTag>;

inline double euclidean_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// Nudging coefficient mu: a single value or one value per state component.
class NudgingStrength {
 public:
  NudgingStrength() = default;

  static NudgingStrength scalar(double mu) { return NudgingStrength({mu}); }
  static NudgingStrength per_component(std::vector<double> mu) {
    if (mu.empty()) throw DomainError("nudging strength: empty vector");
    return NudgingStrength(std::move(mu));
  }

  bool is_scalar() const noexcept { return values_.size() == 1; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Coefficient acting on state component `i`.
  double at(std::size_t i) const { return is_scalar() ? values_[0] : values_.at(i); }

  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  double min() const { return *std::min_element(values_.begin(), values_.end()); }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double m) { return m == 0.0; });
  }

  /// Throws DomainError unless every component is strictly positive.
  void require_positive() const {
    for (double m : values_) {
      if (!(m > 0.0)) throw DomainError("nudging coefficient must be positive");
    }
  }

  /// Expands to one coefficient per component of a state of length n.
  std::vector<double> expand(std::size_t n) const {
    if (!is_scalar() && values_.size() != n) {
      throw DimensionError("nudging strength has " + std::to_string(values_.size()) +
                           " components, state has " + std::to_string(n));
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
    return out;
  }

 private:
  explicit NudgingStrength(std::vector<double> mu) : values_(std::move(mu)) {}
  std::vector<double> values_{0.0};
};

enum class SensitivitySource { DS, OTF };

/// Tangent vectors w_i = dv/dc_i, one per estimated parameter.
struct SensitivityStack {
  std::vector<StateVector> columns;
  /// Parameter index each column differentiates with respect to.
  std::vector<std::size_t> params;
  SensitivitySource source = SensitivitySource::DS;

  std::size_t size() const noexcept { return columns.size(); }

  static SensitivityStack zeros(std::size_t state_dim, std::vector<std::size_t> params,
                                SensitivitySource source) {
    SensitivityStack s;
    s.columns.assign(params.size(), StateVector(state_dim));
    s.params = std::move(params);
    s.source = source;
    return s;
  }

  void set_zero() {
    for (auto& c : columns) std::fill(c.begin(), c.end(), 0.0);
  }
};

/// 0, 1, ..., n-1.
inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace cda
