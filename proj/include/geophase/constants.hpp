#pragma once

namespace geophase {

// CODATA 2018 SI values.
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K

}  // namespace geophase
