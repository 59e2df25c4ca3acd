#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

#include "geophase/pulse_loop.hpp"

using namespace geophase;

namespace {

constexpr double pi = std::numbers::pi;

// Oracle for the pulse map: the Heisenberg flow of the quadratic generator
// chi X_M X_L^phi is exp(Omega G) with G the symmetric coefficient matrix.
Eigen::Matrix4d pulse_map_oracle(double chi, double phi) {
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g(0, 2) = g(2, 0) = chi * std::cos(phi);
  g(0, 3) = g(3, 0) = chi * std::sin(phi);
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = omega(2, 3) = 1.0;
  omega(1, 0) = omega(3, 2) = -1.0;
  return (omega * g).exp();
}

// Appends the pulse that closes the optical loop: chi e^{i phi} = -sum.
PulseLoop closed_random_loop(std::mt19937& rng, int open_pulses) {
  std::uniform_real_distribution<double> chi_dist(0.1, 2.0);
  std::uniform_real_distribution<double> phi_dist(0.0, 2.0 * pi);
  std::vector<Pulse> pulses;
  std::complex<double> sum(0.0, 0.0);
  for (int i = 0; i < open_pulses; ++i) {
    pulses.emplace_back(chi_dist(rng), phi_dist(rng));
    sum += pulses.back().chi * std::polar(1.0, pulses.back().phi);
  }
  pulses.emplace_back(std::abs(sum), std::arg(-sum));
  return PulseLoop(std::move(pulses));
}

}  // namespace

TEST(Pulse, NormalisesPhaseAndRejectsNegativeStrength) {
  EXPECT_NEAR(Pulse(1.0, -pi / 2.0).phi, 1.5 * pi, 1e-15);
  EXPECT_NEAR(Pulse(1.0, 2.5 * pi).phi, 0.5 * pi, 1e-12);
  EXPECT_THROW(Pulse(-0.1, 0.0), std::invalid_argument);
}

TEST(PulseLoop, ValidatesShape) {
  EXPECT_THROW(PulseLoop({}, 1.0), std::invalid_argument);
  EXPECT_THROW(PulseLoop({Pulse(1.0, 0.0)}, 0.0), std::invalid_argument);
  EXPECT_THROW(PulseLoop({Pulse(1.0, 0.0)}, 1.1), std::invalid_argument);
}

TEST(ChiFromPulse, ZeroPhotonsAndScaling) {
  EXPECT_DOUBLE_EQ(chi_from_pulse(1e4, 0.0, 1e-8, 1e8), 0.0);
  const double base = chi_from_pulse(1e4, 1e6, 1e-8, 1e8);
  EXPECT_NEAR(chi_from_pulse(1e4, 2e6, 1e-8, 1e8), std::sqrt(2.0) * base, 1e-12 * base);
  EXPECT_NEAR(base, 4.0 * 1e4 * std::sqrt(1e6 * 1e-8 * std::sqrt(pi / 2.0) / 1e8), 1e-12 * base);
}

TEST(ChiFromPulse, RejectsNonpositiveRates) {
  EXPECT_THROW(chi_from_pulse(0.0, 1.0, 1e-8, 1e8), std::invalid_argument);
  EXPECT_THROW(chi_from_pulse(1e4, 1.0, 0.0, 1e8), std::invalid_argument);
  EXPECT_THROW(chi_from_pulse(1e4, 1.0, 1e-8, 0.0), std::invalid_argument);
  EXPECT_THROW(chi_from_pulse(1e4, -1.0, 1e-8, 1e8), std::invalid_argument);
}

TEST(PulseSymplectic, ZeroStrengthIsIdentity) {
  EXPECT_TRUE(pulse_symplectic(Pulse(0.0, 1.3)).matrix().isIdentity(1e-15));
}

TEST(PulseSymplectic, AmplitudeQuadraturePulse) {
  // phi = 0: P_M -> P_M - chi X_L and P_L -> P_L - chi X_M.
  const auto map = pulse_symplectic(Pulse(1.0, 0.0));
  Eigen::Matrix4d expected = Eigen::Matrix4d::Identity();
  expected(1, 2) = -1.0;
  expected(3, 0) = -1.0;
  EXPECT_LT((map.matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PulseSymplectic, PhaseQuadraturePulse) {
  // phi = pi/2: P_M -> P_M - chi P_L and X_L -> X_L + chi X_M.
  const auto map = pulse_symplectic(Pulse(1.0, pi / 2.0));
  Eigen::Matrix4d expected = Eigen::Matrix4d::Identity();
  expected(1, 3) = -1.0;
  expected(2, 0) = 1.0;
  EXPECT_LT((map.matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PulseSymplectic, MatchesMatrixExponentialOracle) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> chi_dist(0.0, 3.0);
  std::uniform_real_distribution<double> phi_dist(0.0, 2.0 * pi);
  for (int trial = 0; trial < 40; ++trial) {
    const Pulse pulse(chi_dist(rng), phi_dist(rng));
    const Eigen::Matrix4d oracle = pulse_map_oracle(pulse.chi, pulse.phi);
    EXPECT_LT((pulse_symplectic(pulse).matrix() - oracle).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ComposeLoop, CanonicalLoopClosesIntoShear) {
  const auto composition = compose_loop(PulseLoop::canonical(1.0));
  EXPECT_LT(composition.residual.chi_loss, 1e-12);
  EXPECT_NEAR(composition.area, 1.0, 1e-12);

  const Eigen::Matrix4d total = composition.total.matrix();
  const Eigen::Matrix2d mech = total.block(0, 0, 2, 2);
  const double mech_dev = (mech - shear_from_chi2(1.0).matrix()).cwiseAbs().maxCoeff();
  const double upper_coupling = total.block(0, 2, 2, 2).cwiseAbs().maxCoeff();
  const double lower_coupling = total.block(2, 0, 2, 2).cwiseAbs().maxCoeff();
  const bool optics_identity = total.block(2, 2, 2, 2).isIdentity(1e-12);
  EXPECT_LT(mech_dev, 1e-12);
  EXPECT_LT(upper_coupling, 1e-12);
  EXPECT_LT(lower_coupling, 1e-12);
  EXPECT_TRUE(optics_identity);
}

TEST(ComposeLoop, SinglePulseIsFullyOpen) {
  const auto composition = compose_loop(PulseLoop({Pulse(1.0, 0.0)}));
  EXPECT_NEAR(composition.residual.chi_loss, 1.0, 1e-15);
  EXPECT_NEAR(composition.residual.phi_loss, 0.0, 1e-15);
  EXPECT_EQ(composition.area, 0.0);
}

TEST(ComposeLoop, WeakFourthPulseLeavesResidual) {
  PulseLoop loop = PulseLoop::canonical(1.0);
  loop.pulses[3] = Pulse(0.9, loop.pulses[3].phi);
  const auto composition = compose_loop(loop);
  EXPECT_NEAR(composition.residual.chi_loss, 0.1, 1e-12);
  // The leftover kick is 0.1 X^{pi/2}: the complex sum evaluates to 0.1i.
  EXPECT_NEAR(composition.residual.phi_loss, pi / 2.0, 1e-10);
  EXPECT_NEAR(composition.area, 1.0, 1e-12);
  // The kick appears verbatim in the momentum row of the total map.
  EXPECT_NEAR(composition.total.matrix()(1, 3), -0.1, 1e-12);
}

TEST(ComposeLoop, AreaMatchesExtractedShearForClosedLoops) {
  std::mt19937 rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const PulseLoop loop = closed_random_loop(rng, 3 + trial % 3);
    const auto composition = compose_loop(loop);
    ASSERT_LT(composition.residual.chi_loss, 1e-12);
    const double extracted = -0.5 * composition.total.matrix()(1, 0);
    EXPECT_NEAR(composition.area, extracted, 1e-10 * std::max(1.0, std::abs(extracted)));
    const double upper_coupling = composition.total.matrix().block(0, 2, 2, 2).cwiseAbs().maxCoeff();
    const double lower_coupling = composition.total.matrix().block(2, 0, 2, 2).cwiseAbs().maxCoeff();
    EXPECT_LT(upper_coupling, 1e-12);
    EXPECT_LT(lower_coupling, 1e-12);
  }
}

TEST(ComposeLoop, AreaSignFlipsUnderReversalAndScalesQuadratically) {
  std::mt19937 rng(321);
  const PulseLoop loop = closed_random_loop(rng, 4);
  const auto forward = compose_loop(loop);

  PulseLoop reversed = loop;
  std::reverse(reversed.pulses.begin(), reversed.pulses.end());
  EXPECT_NEAR(compose_loop(reversed).area, -forward.area, 1e-12);

  PulseLoop scaled = loop;
  for (auto& pulse : scaled.pulses) {
    pulse = Pulse(2.0 * pulse.chi, pulse.phi);
  }
  EXPECT_NEAR(compose_loop(scaled).area, 4.0 * forward.area, 1e-10);
}

TEST(ComposeLoop, BackActionOfOpposedPulsesCancels) {
  // With no loss, the X_L and -X_L pulses cancel in the momentum row.
  const auto composition = compose_loop(PulseLoop::canonical(1.0));
  EXPECT_NEAR(composition.total.matrix()(1, 2), 0.0, 1e-12);
  EXPECT_NEAR(composition.total.matrix()(1, 3), 0.0, 1e-12);
}

TEST(ApplyLoss, LosslessLoopUnchanged) {
  const auto lossy = apply_loss(PulseLoop::canonical(1.0, 1.0));
  EXPECT_DOUBLE_EQ(lossy.added_noise_chi, 0.0);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(lossy.effective_loop.pulses[i].chi, 1.0);
  }
}

TEST(ApplyLoss, AttenuationAccumulatesPerCirculation) {
  const double eta = 0.9;
  const auto lossy = apply_loss(PulseLoop::canonical(1.0, eta));
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(lossy.effective_loop.pulses[i].chi, std::pow(eta, i), 1e-15);
  }
  // 1 - eta^2 ~ 19% vacuum noise for a 90% pass.
  EXPECT_NEAR(lossy.added_noise_chi, std::sqrt(1.0 - 0.81), 1e-12);
  EXPECT_NEAR(lossy.added_noise_chi * lossy.added_noise_chi, 0.19, 1e-12);
}

TEST(ApplyLoss, TwoPercentNoiseForNinetyNinePercentPass) {
  const auto lossy = apply_loss(PulseLoop::canonical(1.0, 0.99));
  EXPECT_NEAR(lossy.added_noise_chi * lossy.added_noise_chi, 1.0 - 0.99 * 0.99, 1e-12);
  EXPECT_NEAR(lossy.added_noise_chi * lossy.added_noise_chi, 0.02, 2e-4);
}

TEST(CorrectedDisplacements, IdentityWithoutLoss) {
  const auto corrected = corrected_displacements(PulseLoop::canonical(1.0, 1.0));
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(corrected.pulses[i].chi, 1.0);
  }
}

TEST(CorrectedDisplacements, RestoresClosureUnderAttenuation) {
  const PulseLoop loop = PulseLoop::canonical(1.0, 0.9);
  const auto corrected = corrected_displacements(loop);
  const auto lossy = apply_loss(corrected);
  EXPECT_LT(compose_loop(lossy.effective_loop).residual.chi_loss, 1e-10);
}

TEST(CorrectedDisplacements, CapLimitsCorrectableLoss) {
  EXPECT_NO_THROW(corrected_displacements(PulseLoop::canonical(1.0, 0.5)));
  EXPECT_THROW(corrected_displacements(PulseLoop::canonical(1.0, 0.05)), std::domain_error);
}

TEST(SqueezingWithNonclosure, ClosedLoopRecoversMinimumVariance) {
  EXPECT_NEAR(squeezing_with_nonclosure(1.0, 0.0), 0.5 * std::pow(std::sqrt(2.0) - 1.0, 2),
              1e-12);
  for (const double chi2 : {0.25, 0.5, 1.0, 2.0}) {
    const auto sheared = apply_symplectic(GaussianState::vacuum(), shear_from_chi2(chi2));
    EXPECT_NEAR(squeezing_with_nonclosure(chi2, 0.0), min_variance_and_angle(sheared).variance,
                1e-12);
  }
}

TEST(SqueezingWithNonclosure, MonotoneAndEventuallyUnsqueezed) {
  double previous = squeezing_with_nonclosure(1.0, 0.0);
  for (double chi_loss = 0.25; chi_loss <= 6.0; chi_loss += 0.25) {
    const double var = squeezing_with_nonclosure(1.0, chi_loss);
    EXPECT_GE(var, previous);
    previous = var;
  }
  EXPECT_GT(squeezing_with_nonclosure(1.0, 6.0), 0.5);
}

TEST(SqueezingWithNonclosure, ThresholdCrossingWithinExpectedWindow) {
  // Analytically the implemented model crosses 0.5 at 2 * 2^(1/4) ~ 2.378.
  double lo = 0.0;
  double hi = 4.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (squeezing_with_nonclosure(1.0, mid) < 0.5 ? lo : hi) = mid;
  }
  const double crossing = 0.5 * (lo + hi);
  EXPECT_NEAR(crossing, 2.0 * std::pow(2.0, 0.25), 1e-9);
  EXPECT_GT(crossing, 1.5);
  EXPECT_LT(crossing, 2.8);
}

TEST(ValidateTiming, AcceptsHierarchyWithMargin) {
  // 24 kHz device: T_M = 4.2e-5 s; tau = 4e-7 keeps T_M/tau above 100.
  EXPECT_TRUE(validate_timing(4.2e-5, 4e-7, 1e-8, 5e8).empty());
}

TEST(ValidateTiming, HierarchyFactorIsStrict) {
  // tau = 5e-7 gives T_M/tau = 84 < 100: the ">>" clause reports.
  const auto violations = validate_timing(4.2e-5, 5e-7, 1e-8, 5e8);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].clause, "T_M>=100*tau");
  EXPECT_NEAR(violations[0].margin, 0.84, 0.01);
}

TEST(ValidateTiming, ReportsEachClause) {
  const auto tau_violation = validate_timing(1.0, 3e-8, 1e-8, 5e8);
  ASSERT_EQ(tau_violation.size(), 1u);
  EXPECT_EQ(tau_violation[0].clause, "tau>4*sigma");
  EXPECT_NEAR(tau_violation[0].margin, 0.75, 1e-12);

  const auto hierarchy = validate_timing(5e-6, 5e-7, 1e-8, 5e8);
  ASSERT_EQ(hierarchy.size(), 1u);
  EXPECT_EQ(hierarchy[0].clause, "T_M>=100*tau");
  EXPECT_NEAR(hierarchy[0].margin, 0.1, 1e-12);

  const auto kappa_violation = validate_timing(1.0, 1e-3, 1e-8, 1e7);
  ASSERT_EQ(kappa_violation.size(), 1u);
  EXPECT_EQ(kappa_violation[0].clause, "4*sigma>1/kappa");
  EXPECT_NEAR(kappa_violation[0].margin, 0.4, 1e-12);

  EXPECT_THROW(validate_timing(0.0, 1e-7, 1e-8, 5e8), std::invalid_argument);
}
