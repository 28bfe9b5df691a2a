// Tunable tolerances and seeds. All numerical decisions in the library go
// through a Config so that runs are reproducible and limits are explicit.
#pragma once

#include <cstdint>

namespace qgr {

struct Config {
  // Matrix checks
  double unitarity_tol = 1e-10;        // max-norm of UU*-I
  double self_adjoint_tol = 1e-9;      // AB* Hermiticity / rank tolerance

  // Symbolic engine
  int symbolic_cap = 18;               // refuse secular_exppoly above 2N+M
  double vanish_rel = 1e-9;            // drop term if max-norm < rel * global max
  double fragile_factor = 1e3;         // warn when dropped term is this close

  // Randomized identity testing (criteria module)
  int id_samples = 8;
  int max_resamples = 32;
  double id_zero_rel = 1e-8;           // |det| < rel * matrix scale counts as zero
  double pole_guard = 1e-12;           // smallest singular value guard

  // Contour machinery
  double phase_step_max = 1.5707963267948966;  // pi/2 refinement target
  int contour_depth = 28;              // max bisection depth per segment
  int contour_initial = 64;            // starting samples on a closed contour
  double winding_integrality = 0.05;   // max distance from an integer

  // RNG seed for every deterministic sampling loop
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

inline const Config& default_config() {
  static const Config cfg{};
  return cfg;
}

}  // namespace qgr
