#pragma once

#include <cmath>
#include <cstdlib>
#include <string>

#include "tunnelnav/tunnel.hpp"

namespace tunnelnav::testing {

inline ParametricTunnel unit_cylinder() { return ParametricTunnel::cylinder(1.0); }
inline ParametricTunnel ring_torus() { return ParametricTunnel::torus(2.0, 0.5); }

// Gently bent torus used to exercise charts without closed-form symmetry.
inline ParametricTunnel bent_torus() {
  PolynomialWarp w;
  w.linear << 1.0, 0.1, 0.0, 0.0, 0.95, 0.05, 0.0, 0.0, 1.1;
  w.quadratic[2](0, 0) = 0.02;
  w.quadratic[0](1, 2) = 0.01;
  return ParametricTunnel::warped(ring_torus(), w);
}

// Waisted surface of revolution: f(z) = 1 - 0.1 z + 0.05 z^2 on [-1, 3].
inline ParametricTunnel waisted() { return ParametricTunnel::revolution({1.0, -0.1, 0.05}, -1.0, 3.0); }

inline std::string scenario_dir() {
  const char* env = std::getenv("TUNNELNAV_SCENARIOS");
  return env ? env : "scenarios";
}

}  // namespace tunnelnav::testing
