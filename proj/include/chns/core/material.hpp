#pragma once

#include <algorithm>

#include "chns/core/params.hpp"

namespace chns::core {

/// phi pulled back to [-1, 1] before entering the material laws.
inline double pullback(double phi) { return std::clamp(phi, -1.0, 1.0); }

inline double mixture_density(double phi, const PhysicalParams& p) { return p.alpha() * pullback(phi) + p.beta(); }

/// Affine density without the pullback. Its integral is exactly conserved with phi, so the
/// energy functional uses it; the clamped form would turn bulk overshoot into potential energy.
inline double affine_density(double phi, const PhysicalParams& p) { return p.alpha() * phi + p.beta(); }

inline double mixture_viscosity(double phi, const PhysicalParams& p) { return p.gamma() * pullback(phi) + p.xi(); }

/// d eta / d phi, zero where the pullback is active.
inline double viscosity_slope(double phi, const PhysicalParams& p) { return std::abs(phi) < 1.0 ? p.gamma() : 0.0; }

inline double free_energy(double phi) {
  const double s = phi * phi - 1.0;
  return 0.25 * s * s;
}

inline double free_energy_prime(double phi) { return phi * phi * phi - phi; }

inline double free_energy_second(double phi) { return 3.0 * phi * phi - 1.0; }

}  // namespace chns::core
