#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "chns/cases/mms.hpp"
#include "chns/core/mesh.hpp"
#include "chns/core/params.hpp"
#include "chns/core/state.hpp"

namespace chns::cases {

enum class CaseId { MMS, Bubble1, Bubble2, RT2D };

inline std::string to_string(CaseId c) {
  switch (c) {
    case CaseId::MMS: return "MMS";
    case CaseId::Bubble1: return "Bubble1";
    case CaseId::Bubble2: return "Bubble2";
    default: return "RT2D";
  }
}

inline CaseId parse_case_id(const std::string& s) {
  if (s == "MMS" || s == "mms") return CaseId::MMS;
  if (s == "Bubble1" || s == "bubble1") return CaseId::Bubble1;
  if (s == "Bubble2" || s == "bubble2") return CaseId::Bubble2;
  if (s == "RT2D" || s == "rt2d") return CaseId::RT2D;
  throw ConfigError("unknown case '" + s + "' (expected MMS, Bubble1, Bubble2 or RT2D)");
}

/// Refinement levels of the bulk, the walls and the interface band.
struct AmrLevels {
  int bkg = 5;
  int wall = 5;
  int interface = 5;

  bool uniform() const { return bkg == wall && wall == interface; }
  int finest() const { return std::max({bkg, wall, interface}); }
};

/// Everything that defines a run apart from solver settings.
struct CaseSpec {
  CaseId id = CaseId::MMS;
  std::array<double, 2> domain_lo{0.0, 0.0};
  std::array<double, 2> domain_hi{1.0, 1.0};
  std::array<int, 2> roots{1, 1};

  // initial condition
  std::array<double, 2> bubble_center{1.0, 1.0};
  double bubble_radius = 0.5;
  double atwood = 0.5;
  double interface_height = 2.0;
  double perturbation = 0.05;

  core::BoundarySpec<2> bc = core::BoundarySpec<2>::all(core::VelocityBc::NoSlip);
  core::PhysicalParams params;
  bool pe_from_cn = false;

  double dt = 1e-3;
  // optional piecewise-constant schedule: dt_schedule[i].second applies until time dt_schedule[i].first
  std::vector<std::pair<double, double>> dt_schedule;
  double t_end = 1.0;
  long steps = 0;  // when positive, overrides t_end

  AmrLevels levels;
  int remesh_every = 1;
  core::SurfaceTension forcing_mode = core::SurfaceTension::DivPhiPhi;
  core::UhatMode uhat = core::UhatMode::Minus;

  double dt_at(double t) const {
    for (const auto& [until, d] : dt_schedule)
      if (t < until - 1e-12) return d;
    return dt;
  }

  long step_count() const {
    if (steps > 0) return steps;
    return static_cast<long>(std::llround(t_end / dt));
  }

  /// Cn over the finest cell size; below one the interface is under-resolved.
  double interface_resolution() const {
    double h = 0.0;
    for (int d = 0; d < 2; ++d) h = std::max(h, (domain_hi[d] - domain_lo[d]) / (roots[d] * std::ldexp(1.0, levels.finest())));
    return params.Cn / h;
  }

  std::array<double, 2> extent() const { return {domain_hi[0] - domain_lo[0], domain_hi[1] - domain_lo[1]}; }

  void validate() const {
    CHNS_REQUIRE(domain_hi[0] > domain_lo[0] && domain_hi[1] > domain_lo[1], ConfigError, "empty domain box");
    CHNS_REQUIRE(levels.bkg <= levels.wall && levels.wall <= levels.interface, ConfigError,
                 "AMR levels must satisfy bkg <= wall <= interface");
    CHNS_REQUIRE(levels.bkg >= 0 && levels.interface <= 30, ConfigError, "AMR levels out of range");
    CHNS_REQUIRE(dt > 0.0, ConfigError, "dt must be positive");
    for (const auto& [until, d] : dt_schedule) CHNS_REQUIRE(d > 0.0 && until > 0.0, ConfigError, "bad dt schedule entry");
    CHNS_REQUIRE(steps > 0 || t_end > 0.0, ConfigError, "either steps or t_end must be positive");
    CHNS_REQUIRE(remesh_every >= 1, ConfigError, "remesh_every must be at least 1");
    CHNS_REQUIRE(!(id == CaseId::MMS && forcing_mode == core::SurfaceTension::None), ConfigError,
                 "the manufactured-solution case needs forcing mode div-phiphi or phi-grad-mu");
    if (id == CaseId::RT2D) CHNS_REQUIRE(atwood > 0.0 && atwood < 1.0, ConfigError, "Atwood number must lie in (0, 1)");
    bc.validate();
    params.validate(2);
  }
};

/// Bubble rise setup; case 2 is the high-contrast variant.
inline CaseSpec bubble_setup(int which, double cn, AmrLevels levels) {
  CHNS_REQUIRE(which == 1 || which == 2, ConfigError, "bubble case must be 1 or 2");
  CaseSpec s;
  s.id = which == 1 ? CaseId::Bubble1 : CaseId::Bubble2;
  s.domain_lo = {0.0, 0.0};
  s.domain_hi = {2.0, 4.0};
  s.roots = {1, 2};
  s.bubble_center = {1.0, 1.0};
  s.bubble_radius = 0.5;
  auto& p = s.params;
  p.Re = 35.0;
  p.Fr = 1.0;
  p.We = which == 1 ? 10.0 : 125.0;
  p.rho_ratio = which == 1 ? 0.1 : 0.001;
  p.nu_ratio = which == 1 ? 0.1 : 0.01;
  p.Cn = cn;
  p.Pe = core::PhysicalParams::peclet_from_cahn(cn);
  s.pe_from_cn = true;
  s.bc.face = {core::VelocityBc::FreeSlip, core::VelocityBc::FreeSlip, core::VelocityBc::NoSlip,
               core::VelocityBc::NoSlip};
  s.levels = levels;
  s.dt = 1e-3;
  s.t_end = 3.0;
  return s;
}

/// Single-mode Rayleigh-Taylor setup with the heavy fluid on top.
inline CaseSpec rt2d_setup(double at, double cn, AmrLevels levels) {
  CHNS_REQUIRE(at > 0.0 && at < 1.0, ConfigError, "Atwood number must lie in (0, 1)");
  CaseSpec s;
  s.id = CaseId::RT2D;
  s.domain_lo = {0.0, 0.0};
  s.domain_hi = {1.0, 4.0};
  s.roots = {1, 4};
  s.atwood = at;
  s.interface_height = 2.0;
  s.perturbation = 0.05;
  auto& p = s.params;
  p.Re = 3000.0;
  p.We = 100.0;
  p.Fr = 1.0;
  p.rho_ratio = (1.0 - at) / (1.0 + at);
  p.nu_ratio = 1.0;
  p.Cn = cn;
  p.Pe = core::PhysicalParams::peclet_from_cahn(cn);
  s.pe_from_cn = true;
  s.bc = core::BoundarySpec<2>::all(core::VelocityBc::NoSlip);
  s.levels = levels;
  s.dt = 2.5e-3;
  s.t_end = 1.0;
  return s;
}

/// Manufactured-solution setup on the unit square with a uniform mesh of 2^level cells per side.
inline CaseSpec mms_setup(int level) {
  CaseSpec s;
  s.id = CaseId::MMS;
  s.domain_lo = {0.0, 0.0};
  s.domain_hi = {1.0, 1.0};
  s.roots = {1, 1};
  s.params = mms_params();
  s.bc = core::BoundarySpec<2>::all(core::VelocityBc::NoSlip);
  s.levels = {level, level, level};
  s.dt = 0.1;
  s.t_end = 3.141592653589793;
  return s;
}

/// Initial phase field of a case at a point.
inline double initial_phi(const CaseSpec& s, const std::array<double, 2>& x) {
  const double cn = s.params.Cn;
  switch (s.id) {
    case CaseId::Bubble1:
    case CaseId::Bubble2: {
      const double r = std::hypot(x[0] - s.bubble_center[0], x[1] - s.bubble_center[1]);
      return std::tanh((r - s.bubble_radius) / (std::sqrt(2.0) * cn));
    }
    case CaseId::RT2D: {
      const double g = s.perturbation * std::cos(2.0 * 3.141592653589793 * (x[0] - s.domain_lo[0]));
      return std::tanh(std::sqrt(2.0) * (x[1] - s.interface_height - g) / cn);
    }
    default: return 0.0;
  }
}

}  // namespace chns::cases
