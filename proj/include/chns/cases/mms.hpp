#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "chns/core/material.hpp"
#include "chns/core/state.hpp"

namespace chns::cases {

struct MmsFields {
  std::array<double, 2> v{};
  double p = 0.0, phi = 0.0, mu = 0.0;
};

struct MmsForcing {
  std::array<double, 2> momentum{};
  double phi = 0.0;
  double mu = 0.0;
};

/// Solenoidal manufactured solution on the unit square.
inline MmsFields mms_exact(const std::array<double, 2>& x, double t) {
  constexpr double pi = std::numbers::pi;
  const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]);
  const double cx = std::cos(pi * x[0]), cy = std::cos(pi * x[1]);
  const double st = std::sin(t);
  MmsFields f;
  f.v[0] = pi * sx * sx * std::sin(2 * pi * x[1]) * st;
  f.v[1] = -pi * std::sin(2 * pi * x[0]) * sy * sy * st;
  f.p = cx * sy * st;
  f.phi = f.mu = cx * cy * st;
  return f;
}

/// Strong residual of the governing equations (momentum in convective form,
/// conservative capillary term) at the manufactured fields. The mu equation
/// gets its own source because mu = phi is not the chemical potential of phi.
inline MmsForcing mms_forcing(const std::array<double, 2>& x, double t, const core::PhysicalParams& p,
                              core::SurfaceTension mode = core::SurfaceTension::DivPhiPhi) {
  CHNS_REQUIRE(mode != core::SurfaceTension::None, ConfigError,
               "manufactured solution requires a capillary forcing mode");
  constexpr double pi = std::numbers::pi;
  const double pi2 = pi * pi, pi3 = pi2 * pi;
  const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]);
  const double cx = std::cos(pi * x[0]), cy = std::cos(pi * x[1]);
  const double s2x = std::sin(2 * pi * x[0]), s2y = std::sin(2 * pi * x[1]);
  const double c2x = std::cos(2 * pi * x[0]), c2y = std::cos(2 * pi * x[1]);
  const double st = std::sin(t), ct = std::cos(t);

  const std::array<double, 2> v{pi * sx * sx * s2y * st, -pi * s2x * sy * sy * st};
  const std::array<double, 2> vt{pi * sx * sx * s2y * ct, -pi * s2x * sy * sy * ct};
  // gv[i][j] = d v_i / d x_j, lap[i] = laplacian of v_i
  const std::array<std::array<double, 2>, 2> gv{{{pi2 * s2x * s2y * st, 2 * pi2 * sx * sx * c2y * st},
                                                 {-2 * pi2 * c2x * sy * sy * st, -pi2 * s2x * s2y * st}}};
  const std::array<double, 2> lap{(2 * pi3 * c2x * s2y - 4 * pi3 * sx * sx * s2y) * st,
                                  (4 * pi3 * s2x * sy * sy - 2 * pi3 * s2x * c2y) * st};
  const double phi = cx * cy * st;
  const double phit = cx * cy * ct;
  const std::array<double, 2> gphi{-pi * sx * cy * st, -pi * cx * sy * st};
  const double pxx = -pi2 * phi, pyy = -pi2 * phi, pxy = pi2 * sx * sy * st;
  const double lphi = pxx + pyy;
  const std::array<std::array<double, 2>, 2> hphi{{{pxx, pxy}, {pxy, pyy}}};
  const std::array<double, 2> gp{-pi * sx * sy * st, pi * cx * cy * st};
  // mu = phi
  const auto& gmu = gphi;
  const double lmu = lphi;

  const double rho = core::mixture_density(phi, p);
  const double eta = core::mixture_viscosity(phi, p);
  const double deta = core::viscosity_slope(phi, p);
  const double jc = -p.alpha() * p.mobility / p.Cn;

  MmsForcing f;
  for (int i = 0; i < 2; ++i) {
    double conv = 0.0, flux = 0.0, cap = 0.0, visc_extra = 0.0;
    for (int j = 0; j < 2; ++j) {
      conv += v[j] * gv[i][j];
      flux += jc * gmu[j] * gv[i][j];
      cap += hphi[i][j] * gphi[j];
      visc_extra += deta * gphi[j] * gv[i][j];
    }
    cap += gphi[i] * lphi;
    f.momentum[i] = rho * (vt[i] + conv) + flux / p.Pe + p.Cn / p.We * cap + gp[i] -
                    (eta * lap[i] + visc_extra) / p.Re - rho * p.gravity[static_cast<std::size_t>(i)] / p.Fr;
  }
  f.phi = phit + v[0] * gphi[0] + v[1] * gphi[1] - p.mobility * lmu / (p.Pe * p.Cn);
  f.mu = -phi + core::free_energy_prime(phi) - p.Cn * p.Cn * lphi;
  return f;
}

/// Paper parameter set for the manufactured-solution study.
inline core::PhysicalParams mms_params() {
  core::PhysicalParams p;
  p.Re = 10.0;
  p.We = 1.0;
  p.Cn = 1.0;
  p.Pe = 3.0;
  p.Fr = 1.0;
  p.rho_ratio = 0.85;
  p.nu_ratio = 1.0;
  return p;
}

/// Forcing hook for the block step.
inline core::Forcing<2> mms_forcing_hook(const core::PhysicalParams& p) {
  core::Forcing<2> f;
  f.eval = [p](const std::array<double, 2>& x, double t, std::array<double, 2>& fm, double& fphi, double& fmu) {
    const auto r = mms_forcing(x, t, p);
    fm = r.momentum;
    fphi = r.phi;
    fmu = r.mu;
  };
  return f;
}

}  // namespace chns::cases
