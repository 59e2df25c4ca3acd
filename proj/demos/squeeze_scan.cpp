// Minimal library walkthrough: compose the four-pulse loop for a few pulse
// strengths and print the resulting mechanical squeezing.

#include <cstdio>
#include <numbers>

#include "geophase/gaussian.hpp"
#include "geophase/pulse_loop.hpp"

int main() {
  using namespace geophase;
  std::printf("%8s %12s %14s %12s\n", "chi", "area=chi^2", "min variance", "angle/pi");
  for (const double chi : {0.5, 0.7071067811865476, 1.0, 1.4142135623730951, 2.0}) {
    const PulseLoop loop = PulseLoop::canonical(chi);
    const LoopComposition composition = compose_loop(loop);
    const GaussianState mech = extract_mode(
        apply_symplectic(GaussianState::vacuum(2), composition.total), 0);
    const QuadratureExtremum extremum = min_variance_and_angle(mech);
    std::printf("%8.4f %12.6f %14.8f %12.6f\n", chi, composition.area, extremum.variance,
                extremum.angle / std::numbers::pi);
  }
  return 0;
}
