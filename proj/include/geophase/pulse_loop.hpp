#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geophase/gaussian.hpp"

namespace geophase {

/**
 * One pulsed radiation-pressure interaction exp[-i chi X_M X_L^phi], where
 * X_L^phi = X_L cos(phi) + P_L sin(phi) is the driven optical quadrature.
 */
struct Pulse {
  double chi;  // interaction strength, >= 0
  double phi;  // optical quadrature phase, stored in [0, 2*pi)

  Pulse(double chi_, double phi_) : chi(chi_), phi(phi_) {
    if (!(chi >= 0.0) || !std::isfinite(chi)) {
      throw std::invalid_argument("Pulse: chi must be a nonnegative real");
    }
    if (!std::isfinite(phi)) {
      throw std::invalid_argument("Pulse: phi must be finite");
    }
    const double two_pi = 2.0 * std::numbers::pi;
    phi = std::fmod(phi, two_pi);
    if (phi < 0.0) {
      phi += two_pi;
    }
  }
};

/**
 * Ordered pulse sequence (applied first to last) plus the single-pass
 * amplitude efficiency of the recirculating fiber loop.
 */
struct PulseLoop {
  std::vector<Pulse> pulses;
  double single_pass_efficiency;

  explicit PulseLoop(std::vector<Pulse> pulses_, double eta = 1.0)
      : pulses(std::move(pulses_)), single_pass_efficiency(eta) {
    if (pulses.empty()) {
      throw std::invalid_argument("PulseLoop: need at least one pulse");
    }
    if (!(eta > 0.0) || eta > 1.0) {
      throw std::invalid_argument("PulseLoop: efficiency must lie in (0, 1]");
    }
  }

  /** Four equal pulses at phases {0, pi/2, pi, 3pi/2}: the closed loop. */
  static PulseLoop canonical(double chi, double eta = 1.0) {
    const double half_pi = std::numbers::pi / 2.0;
    return PulseLoop({Pulse(chi, 0.0), Pulse(chi, half_pi), Pulse(chi, 2.0 * half_pi),
                      Pulse(chi, 3.0 * half_pi)},
                     eta);
  }
};

/** Residual optical displacement left when the loop fails to close. */
struct ClosureResidual {
  double chi_loss = 0.0;  // magnitude of the leftover kick, >= 0
  double phi_loss = 0.0;  // quadrature angle of the kick, in [0, 2*pi)
};

/**
 * Pulse strength of a Gaussian pulse of temporal width sigma carrying
 * n_photons through a cavity with decay rate kappa:
 *   chi = 4 g0 sqrt(n_photons * sigma * sqrt(pi/2) / kappa).
 */
inline double chi_from_pulse(double g0, double n_photons, double sigma, double kappa) {
  if (!(g0 > 0.0) || !(sigma > 0.0) || !(kappa > 0.0)) {
    throw std::invalid_argument("chi_from_pulse: g0, sigma and kappa must be positive");
  }
  if (n_photons < 0.0) {
    throw std::invalid_argument("chi_from_pulse: photon number must be nonnegative");
  }
  return 4.0 * g0 * std::sqrt(n_photons * sigma * std::sqrt(std::numbers::pi / 2.0) / kappa);
}

/**
 * Two-mode map of one pulse (mechanics mode 1, optics mode 2):
 *   P_M -> P_M - chi (X_L cos phi + P_L sin phi)
 *   X_L -> X_L + chi sin(phi) X_M,   P_L -> P_L - chi cos(phi) X_M
 * with X_M and the driven quadrature X_L^phi unchanged.
 */
inline SymplecticMap pulse_symplectic(const Pulse& pulse) {
  const double c = pulse.chi * std::cos(pulse.phi);
  const double s = pulse.chi * std::sin(pulse.phi);
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(1, 2) = -c;
  m(1, 3) = -s;
  m(2, 0) = s;
  m(3, 0) = -c;
  return SymplecticMap(m);
}

struct LoopComposition {
  SymplecticMap total;  // combined two-mode map, see compose_loop
  ClosureResidual residual;
  double area = 0.0;  // enclosed optical phase-space area
};

/**
 * Composes a loop into a single two-mode map, the closure residual and the
 * enclosed area. Composition is lossless; attenuation belongs to apply_loss.
 *
 * total is the matrix product S_1 S_2 ... S_n in list order. With the pulse
 * maps above this ordering makes the canonical closed loop act on the
 * mechanics as shear_from_chi2(area) — momentum picks up -2*area*X_M, the
 * negative X-P correlation of the four-pulse gate — while the optical block
 * stays the identity and the off-diagonal blocks carry exactly the residual.
 *
 * area = (1/2) Σ_{j<k} chi_j chi_k sin(phi_k - phi_j), the signed area swept
 * by the optical displacements; for a closed loop the mechanical block of
 * total equals shear_from_chi2(area) identically. The residual is
 * Σ_j chi_j e^{i phi_j} written as chi_loss >= 0 at angle phi_loss.
 */
inline LoopComposition compose_loop(const PulseLoop& loop) {
  Eigen::Matrix4d total = Eigen::Matrix4d::Identity();
  double area = 0.0;
  std::complex<double> residual_sum(0.0, 0.0);
  for (std::size_t j = 0; j < loop.pulses.size(); ++j) {
    const Pulse& pj = loop.pulses[j];
    total = (total * pulse_symplectic(pj).matrix()).eval();
    residual_sum += pj.chi * std::polar(1.0, pj.phi);
    for (std::size_t k = j + 1; k < loop.pulses.size(); ++k) {
      const Pulse& pk = loop.pulses[k];
      area += 0.5 * pj.chi * pk.chi * std::sin(pk.phi - pj.phi);
    }
  }
  ClosureResidual residual;
  residual.chi_loss = std::abs(residual_sum);
  residual.phi_loss = residual.chi_loss > 0.0 ? std::arg(residual_sum) : 0.0;
  if (residual.phi_loss < 0.0) {
    residual.phi_loss += 2.0 * std::numbers::pi;
  }
  return {SymplecticMap(total), residual, area};
}

struct LossyLoop {
  PulseLoop effective_loop;
  double added_noise_chi = 0.0;
};

/**
 * Applies the per-circulation attenuation: pulse j has survived j fiber round
 * trips when it interacts, so its strength scales by eta^j. added_noise_chi
 * reports the strength of the vacuum-noise kick left because cancelling pulse
 * pairs straddle two circulations: (mean pulse chi) * sqrt(1 - eta^2).
 */
inline LossyLoop apply_loss(const PulseLoop& loop) {
  const double eta = loop.single_pass_efficiency;
  std::vector<Pulse> scaled;
  scaled.reserve(loop.pulses.size());
  double pass = 1.0;
  double chi_sum = 0.0;
  for (const Pulse& p : loop.pulses) {
    scaled.emplace_back(p.chi * pass, p.phi);
    chi_sum += p.chi;
    pass *= eta;
  }
  const double chi_mean = chi_sum / static_cast<double>(loop.pulses.size());
  const double noise = chi_mean * std::sqrt(std::max(0.0, 1.0 - eta * eta));
  return {PulseLoop(std::move(scaled), eta), noise};
}

/**
 * Pre-scales pulse amplitudes by eta^{-j} so that the attenuated loop closes:
 * compose_loop(apply_loss(corrected).effective_loop) recovers the nominal
 * pulses. Throws when the required boost exceeds cap_factor times nominal.
 */
inline PulseLoop corrected_displacements(const PulseLoop& loop, double cap_factor = 10.0) {
  const double eta = loop.single_pass_efficiency;
  std::vector<Pulse> boosted;
  boosted.reserve(loop.pulses.size());
  double boost = 1.0;
  for (const Pulse& p : loop.pulses) {
    if (boost > cap_factor) {
      throw std::domain_error(
          "corrected_displacements: required amplitude exceeds the correction cap");
    }
    boosted.emplace_back(p.chi * boost, p.phi);
    boost /= eta;
  }
  return PulseLoop(std::move(boosted), eta);
}

/**
 * Readout variance of an initially-vacuum mechanical mode after the shear
 * gate chi2 when the loop fails to close by chi_loss. The leftover kick
 * chi_loss * X_L^phi acts on the momentum through an uncorrelated optical
 * quadrature of vacuum variance 1/2, and the readout angle stays fixed at the
 * chi_loss = 0 optimum (the experimenter calibrates without knowing
 * chi_loss), so the kick adds chi_loss^2/2 to P before projecting.
 * Nondecreasing in chi_loss.
 */
inline double squeezing_with_nonclosure(double chi2, double chi_loss) {
  if (chi2 < 0.0 || chi_loss < 0.0) {
    throw std::invalid_argument("squeezing_with_nonclosure: chi2 and chi_loss must be >= 0");
  }
  const GaussianState sheared =
      apply_symplectic(GaussianState::vacuum(), shear_from_chi2(chi2));
  const double theta = min_variance_and_angle(sheared).angle;
  Eigen::Matrix2d cov = sheared.cov();
  cov(1, 1) += 0.5 * chi_loss * chi_loss;
  return variance_along(GaussianState(Eigen::Vector2d::Zero(), cov), theta);
}

/** Required scale hierarchy: T_M >= timing_hierarchy_factor * tau. */
inline constexpr double timing_hierarchy_factor = 100.0;

struct TimingViolation {
  std::string clause;  // violated inequality, e.g. "tau>4*sigma"
  double margin;       // achieved/required ratio, < 1 when violated
};

/**
 * Checks the pulse-timing hierarchy T_M >> tau > 4*sigma > 1/kappa, with the
 * ">>" quantified as a factor of timing_hierarchy_factor. Returns one entry
 * per violated clause; empty means the protocol timing is admissible.
 */
inline std::vector<TimingViolation> validate_timing(double t_period, double tau, double sigma,
                                                    double kappa) {
  if (!(t_period > 0.0) || !(tau > 0.0) || !(sigma > 0.0) || !(kappa > 0.0)) {
    throw std::invalid_argument("validate_timing: all inputs must be positive");
  }
  std::vector<TimingViolation> violations;
  if (t_period < timing_hierarchy_factor * tau) {
    violations.push_back({"T_M>=100*tau", t_period / (timing_hierarchy_factor * tau)});
  }
  if (!(tau > 4.0 * sigma)) {
    violations.push_back({"tau>4*sigma", tau / (4.0 * sigma)});
  }
  if (!(4.0 * sigma > 1.0 / kappa)) {
    violations.push_back({"4*sigma>1/kappa", 4.0 * sigma * kappa});
  }
  return violations;
}

}  // namespace geophase
