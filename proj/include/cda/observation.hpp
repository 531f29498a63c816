/**
 * @file observation.hpp
 * @brief Linear projection observation operators and the L^2 inner product of
 *        the state layout they act on.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cda/errors.hpp"
#include "cda/fourier.hpp"
#include "cda/types.hpp"

namespace cda {

enum class ObservationKind { Identity, LargeScaleOnly, LowFourierModes };

/// Orthogonal projection onto an observed subspace. Every supported operator
/// is diagonal in the state's storage basis, so it is represented by a 0/1 mask.
class ObservationOperator {
 public:
  /// Full observation of an N-dimensional Euclidean state.
  static ObservationOperator identity(std::size_t dimension) {
    ObservationOperator op(ObservationKind::Identity, dimension);
    op.mask_.assign(dimension, 1.0);
    op.rank_ = dimension;
    return op;
  }

  /// Observes the leading `observed` components (the large-scale block of a
  /// two-layer Lorenz '96 state) and nothing else.
  static ObservationOperator large_scale_only(std::size_t observed, std::size_t dimension) {
    if (observed > dimension) throw DimensionError("large_scale_only: observed > dimension");
    ObservationOperator op(ObservationKind::LargeScaleOnly, dimension);
    op.mask_.assign(dimension, 0.0);
    for (std::size_t i = 0; i < observed; ++i) op.mask_[i] = 1.0;
    op.rank_ = observed;
    return op;
  }

  /// Keeps Fourier modes with index |m| <= cutoff of a half-spectrum field.
  static ObservationOperator low_fourier_modes(std::size_t cutoff, const FourierLayout& layout) {
    if (cutoff > layout.grid / 2) throw DomainError("low_fourier_modes: cutoff above Nyquist");
    ObservationOperator op(ObservationKind::LowFourierModes, layout.storage());
    op.layout_ = layout;
    op.cutoff_ = cutoff;
    op.mask_.assign(layout.storage(), 0.0);
    for (std::size_t m = 0; m <= cutoff; ++m) {
      op.mask_[2 * m] = 1.0;
      op.mask_[2 * m + 1] = 1.0;
    }
    // Mode 0 (and Nyquist, if kept) carry one real degree of freedom.
    op.rank_ = 2 * cutoff + 1 - (cutoff == layout.grid / 2 ? 1 : 0);
    return op;
  }

  ObservationKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t rank() const noexcept { return rank_; }
  std::size_t cutoff() const noexcept { return cutoff_; }
  const std::optional<FourierLayout>& fourier_layout() const noexcept { return layout_; }

  /// 1 on observed storage slots, 0 elsewhere.
  std::span<const double> mask() const noexcept { return mask_; }
  bool observes(std::size_t i) const { return mask_.at(i) != 0.0; }

  void apply(std::span<const double> x, std::span<double> out) const {
    require(x.size());
    require(out.size());
    for (std::size_t i = 0; i < dimension_; ++i) out[i] = mask_[i] * x[i];
  }

  StateVector operator()(const StateVector& x) const {
    StateVector out(x.size());
    apply(x.span(), out.span());
    return out;
  }

  /// L^2 inner product of the layout: Euclidean for ODE states, Parseval over
  /// [0, L] for Fourier states.
  double inner(std::span<const double> a, std::span<const double> b) const {
    require(a.size());
    require(b.size());
    if (layout_) return layout_->inner(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  /// <I_h a, I_h b>.
  double observed_inner(std::span<const double> a, std::span<const double> b) const {
    require(a.size());
    require(b.size());
    if (layout_) {
      std::vector<double> pa(a.size()), pb(b.size());
      apply(a, pa);
      apply(b, pb);
      return layout_->inner(pa, pb);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += mask_[i] * a[i] * b[i];
    return s;
  }

  /// <I_h (a - b), I_h (a - b)>.
  double observed_distance_squared(std::span<const double> a, std::span<const double> b) const {
    require(a.size());
    require(b.size());
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return observed_inner(d, d);
  }

 private:
  ObservationOperator(ObservationKind kind, std::size_t dimension)
      : kind_(kind), dimension_(dimension) {}

  void require(std::size_t n) const {
    if (n != dimension_) {
      throw DimensionError("observation operator expects length " + std::to_string(dimension_) +
                           ", got " + std::to_string(n));
    }
  }

  ObservationKind kind_;
  std::size_t dimension_;
  std::size_t rank_ = 0;
  std::size_t cutoff_ = 0;
  std::optional<FourierLayout> layout_;
  std::vector<double> mask_;
};

/// I_h x.
inline StateVector observe(const ObservationOperator& op, const StateVector& x) { return op(x); }

}  // namespace cda
