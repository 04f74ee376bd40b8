#pragma once

#include <array>
#include <functional>
#include <string>

#include "chns/core/mesh.hpp"
#include "chns/core/params.hpp"
#include "chns/linalg/krylov.hpp"

namespace chns::core {

/// Nodal fields of the two time levels the scheme touches. Velocities are
/// interleaved per node; pressure carries the absorbed 1/We.
struct MixtureState {
  Vec u_k, u_km1, v_kp1;
  Vec p_k, p_kp1;
  Vec phi_k, phi_kp1, mu_k, mu_kp1;
  double t = 0.0;
  long step = 0;

  void resize(std::size_t nodes, int dim) {
    const std::size_t nv = nodes * static_cast<std::size_t>(dim);
    for (Vec* f : {&u_k, &u_km1, &v_kp1}) f->assign(nv, 0.0);
    for (Vec* f : {&p_k, &p_kp1, &phi_k, &phi_kp1, &mu_k, &mu_kp1}) f->assign(nodes, 0.0);
  }

  bool consistent(std::size_t nodes, int dim) const {
    const std::size_t nv = nodes * static_cast<std::size_t>(dim);
    for (const Vec* f : {&u_k, &u_km1, &v_kp1})
      if (f->size() != nv) return false;
    for (const Vec* f : {&p_k, &p_kp1, &phi_k, &phi_kp1, &mu_k, &mu_kp1})
      if (f->size() != nodes) return false;
    return true;
  }
};

enum class UhatMode { Minus, Plus };

/// Form of the capillary term in the momentum equation.
enum class SurfaceTension { DivPhiPhi, PhiGradMu, None };

inline std::string to_string(UhatMode m) { return m == UhatMode::Minus ? "minus" : "plus"; }

inline UhatMode parse_uhat_mode(const std::string& s) {
  if (s == "minus") return UhatMode::Minus;
  if (s == "plus" || s == "uhat_plus") return UhatMode::Plus;
  throw ConfigError("unknown uhat mode '" + s + "' (expected minus or plus)");
}

inline std::string to_string(SurfaceTension m) {
  switch (m) {
    case SurfaceTension::DivPhiPhi: return "div-phiphi";
    case SurfaceTension::PhiGradMu: return "phi-grad-mu";
    default: return "none";
  }
}

inline SurfaceTension parse_surface_tension(const std::string& s) {
  if (s == "div-phiphi") return SurfaceTension::DivPhiPhi;
  if (s == "phi-grad-mu") return SurfaceTension::PhiGradMu;
  if (s == "none") return SurfaceTension::None;
  throw ConfigError("unknown forcing mode '" + s + "'");
}

/// Optional external body forces: momentum (Dim components), phi and mu equations.
template <int Dim>
struct Forcing {
  std::function<void(const std::array<double, Dim>& x, double t, std::array<double, Dim>& fm, double& fphi,
                     double& fmu)>
      eval;

  explicit operator bool() const { return static_cast<bool>(eval); }
};

/// Everything the block step needs besides mesh, state and dt.
template <int Dim>
struct SchemeOptions {
  PhysicalParams params;
  BoundarySpec<Dim> bc;
  UhatMode uhat = UhatMode::Minus;
  SurfaceTension surface_tension = SurfaceTension::DivPhiPhi;
  Forcing<Dim> forcing;
  linalg::SolverConfig momentum, pp, vupdate, ch;
};

inline Vec average(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = 0.5 * (a[i] + b[i]);
  return out;
}

/// Extrapolated advecting velocity: (3u^k - u^{k-1})/2, or the printed "+" variant.
inline Vec extrapolate_uhat(const Vec& uk, const Vec& ukm1, UhatMode mode) {
  const double s = mode == UhatMode::Minus ? -1.0 : 1.0;
  Vec out(uk.size());
  for (std::size_t i = 0; i < uk.size(); ++i) out[i] = 0.5 * (3.0 * uk[i] + s * ukm1[i]);
  return out;
}

struct TimeAverages {
  Vec v_tilde, u_tilde, phi_tilde, mu_tilde, p_tilde, u_hat;
};

/// Midpoint averages of the current candidate fields. u^{k+1} is taken from v_kp1
/// when no separate corrected velocity is supplied.
inline TimeAverages time_averages(const MixtureState& s, UhatMode mode, const Vec* u_kp1 = nullptr) {
  TimeAverages a;
  a.v_tilde = average(s.u_k, s.v_kp1);
  a.u_tilde = average(s.u_k, u_kp1 ? *u_kp1 : s.v_kp1);
  a.phi_tilde = average(s.phi_k, s.phi_kp1);
  a.mu_tilde = average(s.mu_k, s.mu_kp1);
  a.p_tilde = average(s.p_k, s.p_kp1);
  a.u_hat = extrapolate_uhat(s.u_k, s.u_km1, mode);
  return a;
}

/// Per-block wall time of one step, in seconds.
struct BlockTimings {
  double ch = 0.0, vp = 0.0, pp = 0.0, vu = 0.0, remesh = 0.0, update = 0.0;

  BlockTimings& operator+=(const BlockTimings& o) {
    ch += o.ch;
    vp += o.vp;
    pp += o.pp;
    vu += o.vu;
    remesh += o.remesh;
    update += o.update;
    return *this;
  }
};

}  // namespace chns::core
