#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "geophase/constants.hpp"
#include "geophase/detail/parallel.hpp"
#include "geophase/pulse_loop.hpp"
#include "geophase/thermal.hpp"

namespace geophase {

/** Doubly clamped SiN string of dimensions length x thickness x width. */
struct StringGeometry {
  double length;     // m
  double thickness;  // m, the bending dimension
  double width;      // m
  int mode_number = 1;

  StringGeometry(double length_, double thickness_, double width_, int mode_number_ = 1)
      : length(length_), thickness(thickness_), width(width_), mode_number(mode_number_) {
    if (!(thickness > 0.0) || !(width >= thickness) || !(length >= width)) {
      throw std::invalid_argument("StringGeometry: need 0 < thickness <= width <= length");
    }
    if (mode_number < 1) {
      throw std::invalid_argument("StringGeometry: mode number must be positive");
    }
  }
};

/** Stoichiometric LPCVD SiN bulk values. */
struct MaterialParams {
  double youngs_modulus = 241e9;  // Pa
  double q_bending = 17000.0;     // bending-loss quality factor
  double density = 3100.0;        // kg/m^3
};

/**
 * Tensile stress that tunes a stretched string of length L and density rho to
 * cycle frequency f: S = 4 f^2 L^2 rho, from the string dispersion relation
 * f = (1/2L) sqrt(S/rho).
 */
inline double tensile_stress(double f_m, double length, double density) {
  if (!(f_m > 0.0) || !(length > 0.0) || !(density > 0.0)) {
    throw std::invalid_argument("tensile_stress: inputs must be positive");
  }
  return 4.0 * f_m * f_m * length * length * density;
}

/**
 * Expected quality factor of a stressed string, bending losses diluted by
 * tension:
 *   Q = [ (n pi)^2 E h^2 / (12 S L^2) + 1.0887 sqrt(E/S) h/L ]^{-1} Q_bending
 */
inline double string_q_factor(const StringGeometry& geom, const MaterialParams& mat,
                              double f_m) {
  const double stress = tensile_stress(f_m, geom.length, mat.density);
  const double n_pi = geom.mode_number * std::numbers::pi;
  const double h_over_l = geom.thickness / geom.length;
  const double term_bend = n_pi * n_pi * mat.youngs_modulus * geom.thickness * geom.thickness /
                           (12.0 * stress * geom.length * geom.length);
  const double term_edge = 1.0887 * std::sqrt(mat.youngs_modulus / stress) * h_over_l;
  return mat.q_bending / (term_bend + term_edge);
}

/**
 * Optomechanical coupling rate g0 = G x0 with x0 = sqrt(hbar/(2 m_eff w)):
 * gradient times the zero-point motion of the string mode. The effective mass
 * is mass_fraction times the total mass; the fundamental mode of a doubly
 * clamped string carries half of it.
 */
inline double zero_point_coupling(double gradient, const StringGeometry& geom,
                                  const MaterialParams& mat, double omega_m,
                                  double mass_fraction = 0.5) {
  if (gradient < 0.0 || !(omega_m > 0.0) || !(mass_fraction > 0.0)) {
    throw std::invalid_argument(
        "zero_point_coupling: need gradient >= 0, omega > 0 and mass_fraction > 0");
  }
  const double m_eff = mass_fraction * mat.density * geom.length * geom.thickness * geom.width;
  return gradient * std::sqrt(hbar / (2.0 * m_eff * omega_m));
}

/**
 * Timing ratios tying the pulse width, cavity decay and fiber round trip to
 * the mechanical period: sigma = sigma_over_period * T_M, kappa =
 * kappa_sigma / sigma, tau = tau_over_sigma * sigma. The defaults satisfy the
 * timing hierarchy with margin (T_M/tau = 125, kappa sigma = 5, tau = 8 sigma).
 */
struct TimingModel {
  double sigma_over_period = 1e-3;
  double kappa_sigma = 5.0;
  double tau_over_sigma = 8.0;
};

struct PulseTiming {
  double sigma;  // s
  double kappa;  // rad/s
  double tau;    // s
};

inline PulseTiming derive_timing(double f_m, const TimingModel& model = {}) {
  if (!(f_m > 0.0)) {
    throw std::invalid_argument("derive_timing: frequency must be positive");
  }
  const double sigma = model.sigma_over_period / f_m;
  return {sigma, model.kappa_sigma / sigma, model.tau_over_sigma * sigma};
}

/**
 * Occupation reached by two-pulse measurement cooling:
 *   N_eff = (sqrt(1 + 1/chi^4 + pi nbar/(Q chi^2)) - 1) / 2
 */
inline double effective_phonon_number(double chi, double nbar, double q_factor) {
  if (!(chi > 0.0)) {
    throw std::invalid_argument("effective_phonon_number: chi must be positive");
  }
  if (nbar < 0.0 || !(q_factor > 0.0)) {
    throw std::invalid_argument("effective_phonon_number: need nbar >= 0 and Q > 0");
  }
  const double chi2 = chi * chi;
  return 0.5 * (std::sqrt(1.0 + 1.0 / (chi2 * chi2) +
                          std::numbers::pi * nbar / (q_factor * chi2)) -
                1.0);
}

/** Planck occupation of the bath at cycle frequency f_m and temperature T. */
inline double bath_occupation(double f_m, double temperature) {
  if (!(f_m > 0.0) || !(temperature > 0.0)) {
    throw std::invalid_argument("bath_occupation: inputs must be positive");
  }
  const double ratio = hbar * 2.0 * std::numbers::pi * f_m / (k_boltzmann * temperature);
  return 1.0 / std::expm1(ratio);
}

/** Derived per-device quantities carried through the pipeline. */
struct DeviceParams {
  double f_m = 0.0;
  double omega_m = 0.0;
  double q_factor = 0.0;
  double g0 = 0.0;
  double kappa = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  double n_photons = 0.0;
  double temperature = 0.0;
  double coupling_gradient = 0.0;
};

struct PipelineOptions {
  /** Coupling gradient in rad/s per metre: 200 MHz/nm read as an angular rate. */
  double coupling_gradient = 2.0e17;
  TimingModel timing{};
  /** When positive, floor the cooled initial occupation at this value. */
  double n_eff_floor = 0.0;
  /** When positive, cap the model quality factor at this value. */
  double q_cap = 0.0;
  /** Effective mode mass as a fraction of the total string mass. */
  double mode_mass_fraction = 0.5;
};

struct PipelineResult {
  DeviceParams device;
  double bath_nbar = 0.0;
  double n_eff = 0.0;
  double chi = 0.0;
  double var_obs = 0.0;
  std::vector<std::string> violations;
};

/**
 * End-to-end experiment model for one device: geometry -> Q -> coupling ->
 * pulse strength -> cooled initial state -> geometric phase -> free damped
 * evolution -> window-averaged observable variance. Constraint failures are
 * recorded in `violations` instead of aborting; the photon number is capped
 * at flux_cap * sigma (the most photons deliverable within one pulse width).
 */
inline PipelineResult run_pipeline(const StringGeometry& geom, const MaterialParams& mat,
                                   double f_m, double temperature, double n_photons,
                                   double flux_cap, const PipelineOptions& options = {}) {
  if (!(f_m > 0.0) || !(temperature > 0.0) || n_photons < 0.0 || !(flux_cap > 0.0)) {
    throw std::invalid_argument("run_pipeline: nonpositive physical input");
  }
  PipelineResult result;
  const double omega = 2.0 * std::numbers::pi * f_m;
  double q_factor = string_q_factor(geom, mat, f_m);
  if (options.q_cap > 0.0) {
    q_factor = std::min(q_factor, options.q_cap);
  }
  const PulseTiming timing = derive_timing(f_m, options.timing);
  const double g0 = zero_point_coupling(options.coupling_gradient, geom, mat, omega,
                                        options.mode_mass_fraction);

  double n_used = n_photons;
  const double n_max = flux_cap * timing.sigma;
  if (n_used > n_max) {
    n_used = n_max;
    result.violations.push_back("photon_flux_cap");
  }

  const double chi = chi_from_pulse(g0, n_used, timing.sigma, timing.kappa);
  const double nbar = bath_occupation(f_m, temperature);
  // The cooling formula diverges as chi -> 0; physically the pulses then do
  // nothing and the mode stays at the bath occupation.
  double n_eff = chi > 0.0 ? std::min(nbar, effective_phonon_number(chi, nbar, q_factor)) : nbar;
  if (options.n_eff_floor > 0.0) {
    n_eff = std::max(n_eff, options.n_eff_floor);
  }

  const MomentSet m0 = post_pulse_moments(n_eff, chi * chi);
  const BathParams bath = BathParams::from_quality_factor(omega, q_factor, nbar);
  const double period = 1.0 / f_m;
  const double window = 1.0 / timing.kappa;
  const double dt = std::min(window / 20.0, period / 4096.0);
  const double span = period + window;
  const auto samples = static_cast<std::size_t>(std::ceil(span / dt)) + 1;
  std::vector<double> trajectory(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    trajectory[i] = variance_at(m0, bath, static_cast<double>(i) * dt);
  }
  result.var_obs = observed_variance(trajectory, dt, timing.kappa);

  for (const auto& violation : validate_timing(period, timing.tau, timing.sigma, timing.kappa)) {
    result.violations.push_back(violation.clause);
  }

  result.device = {f_m,        omega,      q_factor,    g0,
                   timing.kappa, timing.sigma, timing.tau, n_used,
                   temperature, options.coupling_gradient};
  result.bath_nbar = nbar;
  result.n_eff = n_eff;
  result.chi = chi;
  return result;
}

struct SweepRange {
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  SweepRange() = default;
  SweepRange(double min_, double max_, int count_) : min(min_), max(max_), count(count_) {
    if (!(min > 0.0) || !(max >= min) || count < 2) {
      throw std::invalid_argument("SweepRange: need 0 < min <= max and count >= 2");
    }
  }

  double at(int i) const { return min + (max - min) * i / (count - 1); }
};

/** Highest quality factor demonstrated in a SiN string to date. */
inline constexpr double max_demonstrated_q = 6.9e6;

/**
 * Shared sweep inputs: cross-section, environment and drive budget. The
 * defaults pin the cooled initial state at 10 phonons and cap the model Q at
 * the demonstrated maximum (the dashed-line boundary of the squeezing map);
 * set options.q_cap to 0 for the raw, uncapped Q formula.
 */
struct SweepFixed {
  double thickness = 157e-9;    // m
  double width = 3e-6;          // m
  double temperature = 1.0;     // K
  double photon_flux = 1e16;    // photons/s
  MaterialParams material{};
  PipelineOptions options{.coupling_gradient = 2.0e17,
                          .timing = {},
                          .n_eff_floor = 10.0,
                          .q_cap = max_demonstrated_q};
};

struct SweepCell {
  double length = 0.0;
  double f_m = 0.0;
  double q_factor = 0.0;
  double g0 = 0.0;
  double chi = 0.0;
  double n_eff = 0.0;
  double var_obs = 0.0;
  std::vector<std::string> violations;
};

struct ContourPoint {
  double length = 0.0;
  double f_m = 0.0;
};

struct SweepResult {
  SweepRange length_range;
  SweepRange frequency_range;
  std::vector<SweepCell> cells;  // row-major: length rows, frequency columns
  /** Figures truncate the colour axis here; below is squeezing. */
  double color_axis_truncation = 0.5;
  /** Interpolated Q = max_demonstrated_q crossing, one point per length row. */
  std::vector<ContourPoint> q_contour;
  std::size_t min_index = 0;  // argmin of var_obs over all cells
  /** argmin restricted to devices whose formula Q stays within the
      demonstrated maximum (the region below the contour). */
  std::size_t min_feasible_index = 0;

  const SweepCell& min_cell() const { return cells[min_index]; }
  const SweepCell& min_feasible_cell() const { return cells[min_feasible_index]; }
};

/**
 * Observable-squeezing map over (length, frequency) at fixed cross-section,
 * temperature and photon flux: each cell drives the maximum photon number the
 * flux cap allows. Cells are independent and evaluated concurrently; the
 * output ordering is row-major over the grid regardless of scheduling.
 */
inline SweepResult sweep_squeezing(const SweepRange& length_range,
                                   const SweepRange& frequency_range,
                                   const SweepFixed& fixed = {}) {
  SweepResult result;
  result.length_range = length_range;
  result.frequency_range = frequency_range;
  result.cells.resize(static_cast<std::size_t>(length_range.count) *
                      static_cast<std::size_t>(frequency_range.count));

  detail::parallel_for(0, length_range.count, [&](std::ptrdiff_t i) {
    const double length = length_range.at(static_cast<int>(i));
    const StringGeometry geom(length, fixed.thickness, fixed.width);
    for (int j = 0; j < frequency_range.count; ++j) {
      const double f_m = frequency_range.at(j);
      const PulseTiming timing = derive_timing(f_m, fixed.options.timing);
      const double n_photons = fixed.photon_flux * timing.sigma;
      const PipelineResult run = run_pipeline(geom, fixed.material, f_m, fixed.temperature,
                                              n_photons, fixed.photon_flux, fixed.options);
      SweepCell& cell =
          result.cells[static_cast<std::size_t>(i) * frequency_range.count + j];
      cell.length = length;
      cell.f_m = f_m;
      cell.q_factor = run.device.q_factor;
      cell.g0 = run.device.g0;
      cell.chi = run.chi;
      cell.n_eff = run.n_eff;
      cell.var_obs = run.var_obs;
      cell.violations = run.violations;
    }
  });

  // The contour tracks the raw geometry formula (cells may store a capped Q).
  // Q rises with frequency at fixed length; mark the first crossing per row.
  for (int i = 0; i < length_range.count; ++i) {
    const StringGeometry geom(length_range.at(i), fixed.thickness, fixed.width);
    double q_low = string_q_factor(geom, fixed.material, frequency_range.at(0));
    for (int j = 1; j < frequency_range.count; ++j) {
      const double q_high = string_q_factor(geom, fixed.material, frequency_range.at(j));
      if (q_low < max_demonstrated_q && q_high >= max_demonstrated_q) {
        const double frac = (max_demonstrated_q - q_low) / (q_high - q_low);
        const double f_low = frequency_range.at(j - 1);
        result.q_contour.push_back(
            {geom.length, f_low + frac * (frequency_range.at(j) - f_low)});
        break;
      }
      q_low = q_high;
    }
  }

  bool feasible_found = false;
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    if (result.cells[c].var_obs < result.cells[result.min_index].var_obs) {
      result.min_index = c;
    }
    const StringGeometry geom(result.cells[c].length, fixed.thickness, fixed.width);
    const bool feasible =
        string_q_factor(geom, fixed.material, result.cells[c].f_m) <= max_demonstrated_q;
    if (feasible && (!feasible_found || result.cells[c].var_obs <
                                            result.cells[result.min_feasible_index].var_obs)) {
      result.min_feasible_index = c;
      feasible_found = true;
    }
  }
  if (!feasible_found) {
    result.min_feasible_index = result.min_index;
  }
  return result;
}

}  // namespace geophase
