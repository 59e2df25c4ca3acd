#pragma once

#include <ostream>
#include <span>

#include "geophase/detail/format.hpp"
#include "geophase/device.hpp"

namespace geophase {

/** Trajectory export: header "t,var_x", SI seconds and dimensionless variance. */
inline void write_trajectory_csv(std::span<const double> times, std::span<const double> var_x,
                                 std::ostream& os) {
  if (times.size() != var_x.size()) {
    throw std::invalid_argument("write_trajectory_csv: size mismatch");
  }
  os << "t,var_x\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << detail::format_shortest(times[i]) << ',' << detail::format_shortest(var_x[i]) << '\n';
  }
}

/**
 * Sweep export: header "L_m,f_hz,Q,g0_rad_s,chi,n_eff,var_obs,violations",
 * row-major over the grid, violations as semicolon-joined tokens.
 */
inline void write_sweep_csv(const SweepResult& sweep, std::ostream& os) {
  os << "L_m,f_hz,Q,g0_rad_s,chi,n_eff,var_obs,violations\n";
  for (const SweepCell& cell : sweep.cells) {
    os << detail::format_shortest(cell.length) << ',' << detail::format_shortest(cell.f_m) << ','
       << detail::format_shortest(cell.q_factor) << ',' << detail::format_shortest(cell.g0) << ','
       << detail::format_shortest(cell.chi) << ',' << detail::format_shortest(cell.n_eff) << ','
       << detail::format_shortest(cell.var_obs) << ',';
    for (std::size_t v = 0; v < cell.violations.size(); ++v) {
      if (v > 0) {
        os << ';';
      }
      os << cell.violations[v];
    }
    os << '\n';
  }
}

}  // namespace geophase
