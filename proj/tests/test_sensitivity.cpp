#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace cda {
namespace {

/// du/dt = -c u.
struct ScalarDecay {
  std::size_t dimension() const { return 1; }
  std::size_t param_count() const { return 1; }
  void rhs(std::span<const double> x, const ParamVector& c, std::span<double> out) const {
    out[0] = -c[0] * x[0];
  }
  void jacobian_vector_product(std::span<const double>, const ParamVector& c,
                               std::span<const double> w, std::span<double> out) const {
    out[0] = -c[0] * w[0];
  }
  void param_derivative(std::span<const double> x, const ParamVector&, std::size_t,
                        std::span<double> out) const {
    out[0] = -x[0];
  }
};

static_assert(DynamicalModel<ScalarDecay>);

IntegratorConfig config(Scheme scheme, double dt, double mu) {
  IntegratorConfig cfg;
  cfg.scheme = scheme;
  cfg.dt = dt;
  cfg.mu = NudgingStrength::scalar(mu);
  return cfg;
}

/// DS columns for parameter i sampled at the oracle's times.
template <typename M>
std::vector<StateVector> ds_samples(const M& model, const ParamVector& c, std::size_t i,
                                    double horizon, const ObservationOperator& op,
                                    const OracleSetup& setup) {
  CoupledIntegrator<M> integ(model, model, setup.truth_params, c, setup.integrator, op, {i});
  CoupledState s{setup.truth0, setup.nudged0, std::nullopt, 0.0};
  std::vector<StateVector> out;
  const auto samples = static_cast<std::size_t>(std::floor(horizon / setup.sample_interval + 1e-9));
  for (std::size_t k = 0; k < samples; ++k) {
    integ.advance(s, setup.sample_interval, SensitivityMode::DS);
    out.push_back(s.sensitivities->columns[0]);
  }
  return out;
}

template <typename M>
double worst_relative_gap(const M& model, const ParamVector& c, std::size_t i, double delta,
                          double horizon, const ObservationOperator& op, const OracleSetup& setup) {
  const auto fd = fd_sensitivity_oracle(model, c, i, delta, horizon, op, setup);
  const auto ds = ds_samples(model, c, i, horizon, op, setup);
  double worst = 0.0;
  for (std::size_t k = 0; k < fd.size(); ++k) {
    worst = std::max(worst, test::relative_error(ds[k].span(), fd[k].tangent.span()));
  }
  return worst;
}

TEST(SensitivityOracle, ScalarDecayClosedForm) {
  // u = 0, v(0) = 1: v = exp(-(c+mu) t), dv/dc = -t exp(-(c+mu) t).
  const double c = 0.7, mu = 2.0;
  OracleSetup setup{ParamVector{c}, StateVector{0.0}, StateVector{1.0},
                    config(Scheme::RK4, 1e-3, mu), 0.1};
  const auto op = ObservationOperator::identity(1);
  const auto fd = fd_sensitivity_oracle(ScalarDecay{}, ParamVector{c}, 0, 1e-4, 1.0, op, setup);
  const auto ds = ds_samples(ScalarDecay{}, ParamVector{c}, 0, 1.0, op, setup);
  ASSERT_EQ(fd.size(), 10u);
  for (std::size_t k = 0; k < fd.size(); ++k) {
    const double t = fd[k].time;
    const double exact = -t * std::exp(-(c + mu) * t);
    EXPECT_NEAR(fd[k].tangent[0], exact, 1e-8);
    EXPECT_NEAR(ds[k][0], exact, 1e-8);
  }
}

TEST(SensitivityOracle, CentralDifferenceIsSecondOrder) {
  const ParamVector gamma{10.0, 28.0, 8.0 / 3.0};
  const ParamVector c{9.0, 27.0, 2.5};
  OracleSetup setup{gamma, StateVector{1.0, 2.0, 20.0}, StateVector{0.0, 0.0, 0.0},
                    config(Scheme::RK4, 1e-3, 100.0), 0.5};
  const auto op = ObservationOperator::identity(3);
  const double e1 = worst_relative_gap(Lorenz63{}, c, 1, 0.4, 1.0, op, setup);
  const double e2 = worst_relative_gap(Lorenz63{}, c, 1, 0.2, 1.0, op, setup);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(SensitivityOracle, Lorenz63DsMatchesFiniteDifference) {
  const ParamVector gamma{10.0, 28.0, 8.0 / 3.0};
  const ParamVector c{5.0, 14.0, 4.0 / 3.0};
  OracleSetup setup{gamma, StateVector{0.0, 1.0, -1.0}, StateVector(3),
                    config(Scheme::RK4, 1e-3, 100.0), 0.1};
  const auto op = ObservationOperator::identity(3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LT(worst_relative_gap(Lorenz63{}, c, i, 1e-4, 1.0, op, setup), 1e-3) << "param " << i;
  }
}

TEST(SensitivityOracle, Lorenz96DsMatchesFiniteDifference) {
  const Lorenz96 m;
  std::mt19937_64 rng(7);
  OracleSetup setup{ParamVector{0.01, 0.5}, test::random_state(m.dimension(), rng),
                    StateVector(m.dimension()), config(Scheme::RK4, 1e-3, 50.0), 0.1};
  const auto op = ObservationOperator::large_scale_only(m.sites(), m.dimension());
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LT(worst_relative_gap(m, ParamVector{0.005, 0.25}, i, 1e-4, 1.0, op, setup), 1e-3)
        << "param " << i;
  }
}

TEST(SensitivityOracle, KseDsMatchesFiniteDifferenceCoarseGrid) {
  const Kse kse(KseConstants{100.0, 128, 0.0});
  const StateVector u0 = test::field(kse, [](double x) { return kse_reference_field(x, 100.0); });
  OracleSetup setup{ParamVector{1.0, 1.0, 1.0}, u0, StateVector(kse.dimension()),
                    config(Scheme::SemiImplicitSpectral, 1e-2, 25.0), 0.1};
  const auto op = ObservationOperator::low_fourier_modes(16, kse.layout());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LT(worst_relative_gap(kse, ParamVector{0.5, 1.0, 1.0}, i, 1e-4, 1.0, op, setup), 1e-3)
        << "param " << i;
  }
}

TEST(SensitivityOracle, RejectsBadArguments) {
  OracleSetup setup{ParamVector{1.0}, StateVector{0.0}, StateVector{1.0},
                    config(Scheme::RK4, 1e-3, 1.0), 0.1};
  const auto op = ObservationOperator::identity(1);
  EXPECT_THROW(fd_sensitivity_oracle(ScalarDecay{}, ParamVector{1.0}, 0, 0.0, 1.0, op, setup), DomainError);
  EXPECT_THROW(fd_sensitivity_oracle(ScalarDecay{}, ParamVector{1.0}, 1, 1e-4, 1.0, op, setup), DomainError);
}

}  // namespace
}  // namespace cda
