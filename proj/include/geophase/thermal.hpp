#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace geophase {

/**
 * Damped-mode bath parameters. gamma is the amplitude decay rate, so energy
 * decays at 2*gamma and a mode of quality factor Q has gamma = omega/(2 Q);
 * the rethermalisation rate is then (2*gamma)*nbar = omega*nbar/Q.
 */
struct BathParams {
  double gamma;  // 1/s
  double omega;  // rad/s
  double nbar;   // bath occupation

  BathParams(double gamma_, double omega_, double nbar_)
      : gamma(gamma_), omega(omega_), nbar(nbar_) {
    if (gamma < 0.0 || !(omega > 0.0) || nbar < 0.0) {
      throw std::invalid_argument("BathParams: need gamma >= 0, omega > 0, nbar >= 0");
    }
  }

  static BathParams from_quality_factor(double omega, double q_factor, double nbar) {
    if (!(q_factor > 0.0)) {
      throw std::invalid_argument("BathParams: quality factor must be positive");
    }
    return BathParams(omega / (2.0 * q_factor), omega, nbar);
  }
};

/** Second moments <X^2>, <P^2> and the symmetrised cross term <XP + PX>. */
struct MomentSet {
  double xx;
  double pp;
  double xp;

  MomentSet(double xx_, double pp_, double xp_) : xx(xx_), pp(pp_), xp(xp_) {
    if (!(xx > 0.0) || !(pp > 0.0)) {
      throw std::invalid_argument("MomentSet: variances must be positive");
    }
    // The product cancels to (n + 1/2)^2 for pure shears, so the slack must
    // scale with the operands or rounding rejects strongly sheared states.
    const double slack = 1e-10 + 16.0 * std::numeric_limits<double>::epsilon() * xx * pp;
    if (xx * pp - 0.25 * xp * xp < 0.25 - slack) {
      throw std::invalid_argument("MomentSet: violates the uncertainty bound");
    }
  }
};

/**
 * Moments right after the geometric-phase gate chi2 on a thermal state of
 * occupation n: <X^2> = n + 1/2, <P^2> = (n + 1/2)(1 + 4 chi2^2),
 * <XP + PX> = -4 chi2 (n + 1/2).
 */
inline MomentSet post_pulse_moments(double nbar_eff, double chi2) {
  if (nbar_eff < 0.0) {
    throw std::invalid_argument("post_pulse_moments: occupation must be nonnegative");
  }
  const double xx = nbar_eff + 0.5;
  return MomentSet(xx, xx * (1.0 + 4.0 * chi2 * chi2), -4.0 * chi2 * xx);
}

/**
 * Which closed form variance_at evaluates. `corrected` returns xx at t = 0
 * and relaxes to nbar + 1/2; `uncorrected` keeps a "-1" offset inside the
 * oscillating bracket and an (nbar + 1) equilibrium tail, fails both
 * consistency checks, and is retained only for comparison.
 */
enum class VarianceForm { corrected, uncorrected };

/**
 * Closed-form position variance of the freely rotating damped mode:
 *   Var X(t) = e^{-2 g t}/2 [cos(2 w t)(xx - pp) + sin(2 w t) xp + xx + pp]
 *              + (1 - e^{-2 g t})(nbar + 1/2)
 * which is the exact solution of the symmetric-damping covariance equations
 * with a white-noise bath.
 */
inline double variance_at(const MomentSet& m0, const BathParams& bath, double t,
                          VarianceForm form = VarianceForm::corrected) {
  const double decay = std::exp(-2.0 * bath.gamma * t);
  const double angle = 2.0 * bath.omega * t;
  double bracket =
      std::cos(angle) * (m0.xx - m0.pp) + std::sin(angle) * m0.xp + m0.xx + m0.pp;
  double tail = bath.nbar + 0.5;
  if (form == VarianceForm::uncorrected) {
    bracket -= 1.0;
    tail = bath.nbar + 1.0;
  }
  return 0.5 * decay * bracket + (1.0 - decay) * tail;
}

/** variance_at over a sorted list of nonnegative times. */
inline std::vector<double> variance_trajectory(const MomentSet& m0, const BathParams& bath,
                                               std::span<const double> times,
                                               VarianceForm form = VarianceForm::corrected) {
  double previous = 0.0;
  for (const double t : times) {
    if (t < 0.0 || t < previous) {
      throw std::invalid_argument("variance_trajectory: times must be sorted and nonnegative");
    }
    previous = t;
  }
  std::vector<double> out;
  out.reserve(times.size());
  for (const double t : times) {
    out.push_back(variance_at(m0, bath, t, form));
  }
  return out;
}

/** Uniformly sampled Var X(t): values[k] at t = k * dt. */
struct SampledVariance {
  double dt = 0.0;
  std::vector<double> var_x;
};

/**
 * Independent check of the closed form: fixed-step RK4 integration of the
 * second-moment equations for the damped mode coupled to a white-noise bath,
 *   d(xx)/dt =  w xp - 2 g xx + 2 g (nbar + 1/2)
 *   d(pp)/dt = -w xp - 2 g pp + 2 g (nbar + 1/2)
 *   d(xp)/dt =  2 w (pp - xx) - 2 g xp
 * sampled every dt up to t_end. Requires dt <= 2 pi / (50 w).
 */
inline SampledVariance covariance_ode_oracle(const MomentSet& m0, const BathParams& bath,
                                             double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) {
    throw std::invalid_argument("covariance_ode_oracle: need dt > 0 and t_end >= 0");
  }
  if (dt > 2.0 * std::numbers::pi / (50.0 * bath.omega)) {
    throw std::invalid_argument("covariance_ode_oracle: step size too large for the rotation");
  }
  struct Moments {
    double xx, pp, xp;
  };
  const double g2 = 2.0 * bath.gamma;
  const double drive = g2 * (bath.nbar + 0.5);
  const auto rhs = [&](const Moments& m) {
    return Moments{bath.omega * m.xp - g2 * m.xx + drive,
                   -bath.omega * m.xp - g2 * m.pp + drive,
                   2.0 * bath.omega * (m.pp - m.xx) - g2 * m.xp};
  };
  const auto axpy = [](const Moments& m, const Moments& k, double h) {
    return Moments{m.xx + h * k.xx, m.pp + h * k.pp, m.xp + h * k.xp};
  };

  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  SampledVariance out;
  out.dt = dt;
  out.var_x.reserve(steps + 1);
  Moments m{m0.xx, m0.pp, m0.xp};
  out.var_x.push_back(m.xx);
  for (std::size_t step = 0; step < steps; ++step) {
    const Moments k1 = rhs(m);
    const Moments k2 = rhs(axpy(m, k1, dt / 2.0));
    const Moments k3 = rhs(axpy(m, k2, dt / 2.0));
    const Moments k4 = rhs(axpy(m, k3, dt));
    m.xx += dt / 6.0 * (k1.xx + 2.0 * k2.xx + 2.0 * k3.xx + k4.xx);
    m.pp += dt / 6.0 * (k1.pp + 2.0 * k2.pp + 2.0 * k3.pp + k4.pp);
    m.xp += dt / 6.0 * (k1.xp + 2.0 * k2.xp + 2.0 * k3.xp + k4.xp);
    out.var_x.push_back(m.xx);
  }
  return out;
}

/**
 * Experimentally observable variance: the minimum over window starts of the
 * mean of Var X over one cavity decay time 1/kappa. The integral is divided
 * by the window length so the result is a variance, directly comparable with
 * the 1/2 ground-state reference. A window shorter than one sample
 * degenerates to the trajectory minimum (the kappa -> infinity limit);
 * otherwise the sampling interval must resolve the window (dt <= 1/(20 kappa)).
 */
inline double observed_variance(std::span<const double> var_x, double dt, double kappa) {
  if (var_x.empty() || !(dt > 0.0) || !(kappa > 0.0)) {
    throw std::invalid_argument("observed_variance: need samples, dt > 0 and kappa > 0");
  }
  const double window = 1.0 / kappa;
  if (window <= dt) {
    return *std::min_element(var_x.begin(), var_x.end());
  }
  if (dt > window / 20.0) {
    throw std::invalid_argument("observed_variance: sampling interval must be <= 1/(20 kappa)");
  }
  const auto k = static_cast<std::size_t>(std::llround(window / dt));
  if (k > var_x.size()) {
    throw std::invalid_argument("observed_variance: window longer than the trajectory");
  }
  std::vector<long double> prefix(var_x.size() + 1, 0.0L);
  for (std::size_t i = 0; i < var_x.size(); ++i) {
    prefix[i + 1] = prefix[i] + var_x[i];
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + k <= var_x.size(); ++i) {
    const double mean = static_cast<double>((prefix[i + k] - prefix[i]) / k);
    best = std::min(best, mean);
  }
  return best;
}

}  // namespace geophase
