#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "geophase/thermal.hpp"

using namespace geophase;

TEST(PostPulseMoments, KnownTriples) {
  const auto idle = post_pulse_moments(0.0, 0.0);
  EXPECT_DOUBLE_EQ(idle.xx, 0.5);
  EXPECT_DOUBLE_EQ(idle.pp, 0.5);
  EXPECT_DOUBLE_EQ(idle.xp, 0.0);

  const auto hot = post_pulse_moments(10.0, 1.0);
  EXPECT_DOUBLE_EQ(hot.xx, 10.5);
  EXPECT_DOUBLE_EQ(hot.pp, 52.5);
  EXPECT_DOUBLE_EQ(hot.xp, -42.0);
}

TEST(PostPulseMoments, UncertaintyProductIsPure) {
  for (const double nbar : {0.0, 1.0, 10.0}) {
    for (const double chi2 : {0.0, 0.5, 1.0, 3.0}) {
      const auto m = post_pulse_moments(nbar, chi2);
      const double product = m.xx * m.pp - 0.25 * m.xp * m.xp;
      EXPECT_NEAR(product, std::pow(nbar + 0.5, 2), 1e-9 * std::pow(nbar + 0.5, 2));
    }
  }
  EXPECT_THROW(post_pulse_moments(-1.0, 0.0), std::invalid_argument);
}

TEST(MomentSet, RejectsSubUncertaintyMoments) {
  EXPECT_THROW(MomentSet(0.1, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(MomentSet(-1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(VarianceTrajectory, ConsistencyAtEndpoints) {
  const auto m0 = post_pulse_moments(10.0, 1.0);
  const BathParams bath = BathParams::from_quality_factor(2.0 * std::numbers::pi * 24e3, 1e5, 1e5);
  EXPECT_DOUBLE_EQ(variance_at(m0, bath, 0.0), m0.xx);
  const double late = 50.0 / bath.gamma;
  EXPECT_NEAR(variance_at(m0, bath, late), bath.nbar + 0.5, 1e-8 * (bath.nbar + 0.5));
}

TEST(VarianceTrajectory, UndampedQuarterPeriodSwapsQuadratures) {
  const auto m0 = post_pulse_moments(0.0, 1.0);
  const BathParams bath(0.0, 2.0 * std::numbers::pi, 0.0);
  const double quarter = std::numbers::pi / (2.0 * bath.omega);
  EXPECT_NEAR(variance_at(m0, bath, quarter), m0.pp, 1e-12);
  EXPECT_NEAR(variance_at(m0, bath, quarter), 2.5, 1e-12);
}

TEST(VarianceTrajectory, RejectsUnsortedTimes) {
  const auto m0 = post_pulse_moments(0.0, 0.0);
  const BathParams bath(0.1, 1.0, 0.0);
  const std::vector<double> bad{0.0, 2.0, 1.0};
  EXPECT_THROW(variance_trajectory(m0, bath, bad), std::invalid_argument);
  const std::vector<double> negative{-1.0, 0.0};
  EXPECT_THROW(variance_trajectory(m0, bath, negative), std::invalid_argument);
}

TEST(VarianceTrajectory, UncorrectedVariantFailsConsistency) {
  const auto m0 = post_pulse_moments(10.0, 1.0);
  const BathParams bath = BathParams::from_quality_factor(1.0, 1e5, 1e5);
  // The offset form starts half a quantum low and relaxes to nbar + 1.
  EXPECT_NEAR(variance_at(m0, bath, 0.0, VarianceForm::uncorrected), m0.xx - 0.5, 1e-12);
  const double late = 50.0 / bath.gamma;
  EXPECT_NEAR(variance_at(m0, bath, late, VarianceForm::uncorrected), bath.nbar + 1.0, 1e-6);
}

TEST(VarianceTrajectory, EquilibriumIsFixedPoint) {
  const double nbar = 1e5;
  const auto m0 = post_pulse_moments(nbar, 0.0);
  const BathParams bath = BathParams::from_quality_factor(2.0 * std::numbers::pi * 24e3, 1e4, nbar);
  for (const double t : {0.0, 1e-5, 1e-3, 1e-1}) {
    EXPECT_NEAR(variance_at(m0, bath, t), nbar + 0.5, 1e-10 * (nbar + 0.5));
  }
}

TEST(CovarianceOdeOracle, MatchesClosedFormOnReferencePoint) {
  const auto m0 = post_pulse_moments(10.0, 1.0);
  const double omega = 2.0 * std::numbers::pi * 24e3;
  const BathParams bath = BathParams::from_quality_factor(omega, 1e5, 1e5);
  const double period = 2.0 * std::numbers::pi / omega;
  const auto sampled = covariance_ode_oracle(m0, bath, 3.0 * period, period / 25000.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < sampled.var_x.size(); ++i) {
    const double exact = variance_at(m0, bath, static_cast<double>(i) * sampled.dt);
    worst = std::max(worst, std::abs(sampled.var_x[i] - exact) / std::abs(exact));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(CovarianceOdeOracle, UndampedEnergyConserved) {
  const auto m0 = post_pulse_moments(0.0, 1.0);
  const BathParams bath(0.0, 2.0 * std::numbers::pi * 1e3, 0.0);
  const double period = 1e-3;
  const std::size_t per_period = 5000;
  const auto sampled = covariance_ode_oracle(m0, bath, 2.0 * period, period / per_period);
  // A quarter rotation swaps X and P, so var_x(t) + var_x(t + T/4) tracks the
  // invariant xx + pp without exposing the internal moments.
  const std::size_t quarter = per_period / 4;
  const double sum0 = sampled.var_x[0] + sampled.var_x[quarter];
  EXPECT_NEAR(sum0, m0.xx + m0.pp, 1e-10 * sum0);
  for (std::size_t i = 0; i + quarter < sampled.var_x.size(); i += per_period / 10) {
    const double sum = sampled.var_x[i] + sampled.var_x[i + quarter];
    EXPECT_NEAR(sum, sum0, 1e-10 * sum0);
  }
}

TEST(CovarianceOdeOracle, RejectsCoarseStep) {
  const auto m0 = post_pulse_moments(0.0, 0.0);
  const BathParams bath(0.0, 1.0, 0.0);
  EXPECT_THROW(covariance_ode_oracle(m0, bath, 1.0, 1.0), std::invalid_argument);
}

TEST(CovarianceOdeOracle, AgreesAcrossParameterGrid) {
  for (const double nbar : {0.0, 10.0, 1e5}) {
    for (const double chi2 : {0.0, 1.0, 3.0}) {
      for (const double q_factor : {1e4, 1e5, 5e6}) {
        const auto m0 = post_pulse_moments(nbar, chi2);
        const double omega = 2.0 * std::numbers::pi * 24e3;
        const BathParams bath = BathParams::from_quality_factor(omega, q_factor, nbar);
        const double period = 2.0 * std::numbers::pi / omega;
        const auto sampled = covariance_ode_oracle(m0, bath, 3.0 * period, period / 25000.0);
        // Spot-check a handful of samples against the closed form.
        for (const std::size_t i :
             {std::size_t{0}, sampled.var_x.size() / 3, sampled.var_x.size() - 1}) {
          const double exact = variance_at(m0, bath, static_cast<double>(i) * sampled.dt);
          EXPECT_NEAR(sampled.var_x[i], exact, 1e-8 * std::abs(exact))
              << "nbar=" << nbar << " chi2=" << chi2 << " Q=" << q_factor;
        }
      }
    }
  }
}

TEST(ObservedVariance, ConstantTrajectory) {
  const std::vector<double> flat(500, 2.5);
  EXPECT_DOUBLE_EQ(observed_variance(flat, 2e-4, 1e2), 2.5);
}

TEST(ObservedVariance, InfiniteKappaDegeneratesToMinimum) {
  std::vector<double> values{3.0, 1.0, 2.0, 0.25, 5.0};
  EXPECT_DOUBLE_EQ(observed_variance(values, 1e-3, 1e9), 0.25);
}

TEST(ObservedVariance, WindowAveragesAroundMinimum) {
  // Parabola v(t) = 1 + t^2: optimal window centres on the vertex, adding
  // the curvature term w^2/12.
  const double dt = 1e-3;
  std::vector<double> values;
  for (int i = -2000; i <= 2000; ++i) {
    const double t = i * dt;
    values.push_back(1.0 + t * t);
  }
  const double kappa = 2.0;  // window 0.5 s = 500 samples
  const double window = 1.0 / kappa;
  const double expected = 1.0 + window * window / 12.0;
  EXPECT_NEAR(observed_variance(values, dt, kappa), expected, 1e-5);
}

TEST(ObservedVariance, MinimumNonincreasingInKappa) {
  const auto m0 = post_pulse_moments(10.0, 1.0);
  const double omega = 2.0 * std::numbers::pi * 24e3;
  const BathParams bath = BathParams::from_quality_factor(omega, 1e5, 1e5);
  const double period = 2.0 * std::numbers::pi / omega;
  const double dt = period / 262144.0;
  std::vector<double> values;
  for (double t = 0.0; t <= period; t += dt) {
    values.push_back(variance_at(m0, bath, t));
  }
  double previous = std::numeric_limits<double>::infinity();
  for (const double kappa : {1e6, 3e6, 1e7, 3e7, 1e8}) {
    const double observed = observed_variance(values, dt, kappa);
    EXPECT_LE(observed, previous + 1e-12);
    previous = observed;
  }
}

TEST(ObservedVariance, UndampedMinimumMatchesCovarianceEigenvalue) {
  const auto m0 = post_pulse_moments(0.0, 1.0);
  const BathParams bath(0.0, 2.0 * std::numbers::pi, 0.0);
  const double period = 1.0;
  const double dt = period / 262144.0;
  std::vector<double> values;
  for (double t = 0.0; t <= period; t += dt) {
    values.push_back(variance_at(m0, bath, t));
  }
  const double min_var = *std::min_element(values.begin(), values.end());
  // Minimum eigenvalue of the post-pulse covariance: (sqrt(2) - 1)^2 / 2.
  EXPECT_NEAR(min_var, 0.5 * std::pow(std::sqrt(2.0) - 1.0, 2), 1e-6);
}

TEST(ObservedVariance, RejectsWindowBeyondTrajectory) {
  const std::vector<double> brief(50, 1.0);
  EXPECT_THROW(observed_variance(brief, 1e-3, 10.0), std::invalid_argument);
}
