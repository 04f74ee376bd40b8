#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "chns/core/material.hpp"
#include "chns/core/state.hpp"

namespace chns::core {

/// Element stabilization time scale; the radicand is floored at 1e-30.
template <int Dim>
double compute_tau_m(const fem::ElementGeometry<Dim>& g, double dt, const std::type_identity_t<std::array<double, Dim>>& uc,
                     const std::type_identity_t<std::array<double, Dim>>& Jc, double rho, double eta,
                     const PhysicalParams& p) {
  double uGu = 0.0, uGJ = 0.0;
  for (int j = 0; j < Dim; ++j) {
    uGu += uc[j] * g.G[j] * uc[j];
    uGJ += uc[j] * g.G[j] * Jc[j];
  }
  const double visc = eta / (rho * p.Re);
  double r = 4.0 / (dt * dt) + uGu + uGJ / (rho * p.Pe) + p.C_I * visc * visc * g.GG;
  r = std::max(r, 1e-30);
  return 1.0 / std::sqrt(r);
}

/// Nodal inputs shared by the momentum, pressure and update assemblies.
template <int Dim>
struct MomentumFields {
  const Vec* phi_tilde = nullptr;
  const Vec* mu_tilde = nullptr;
  const Vec* u_k = nullptr;
  const Vec* u_hat = nullptr;
  const Vec* p_k = nullptr;
  const Vec* grad_phi = nullptr;  // lumped projection of grad phi_tilde (conservative form only)
  const Vec* v = nullptr;         // predicted velocity, once known
  // Lumped projections of the velocity gradients (Dim*Dim per node). They
  // supply the viscous second derivatives that Q1 lacks elementwise.
  const Vec* grad_uk_rec = nullptr;
  const Vec* grad_v_rec = nullptr;  // when absent the u_k field stands in for v
  double dt = 0.0;
  double t_half = 0.0;
  const PhysicalParams* params = nullptr;
  SurfaceTension surface_tension = SurfaceTension::DivPhiPhi;
  const Forcing<Dim>* forcing = nullptr;
};

/// Quadrature-point quantities of the momentum block.
template <int Dim>
struct MomentumPoint {
  using V = std::array<double, Dim>;
  double rho = 1.0, eta = 1.0, tau = 0.0;
  double phi = 0.0;
  V grad_phi{}, grad_mu{}, grad_eta{}, u_hat{}, J{}, beta{}, u_k{}, grad_p{}, st{}, f{};
  std::array<V, Dim> grad_uk{};  // grad_uk[i][j] = d u_i / d x_j
  V lap_uk{}, lap_v{};           // recovered Laplacians, zero without projections
  V K{};                         // residual part independent of v
  V Rm{};                        // full residual (valid when v is supplied)
  V v{};
  std::array<V, Dim> grad_v{};

  /// The v-dependent operator of the residual applied to a scalar shape function.
  double L(double N, const V& dN, const PhysicalParams& p, double dt) const {
    return rho * N / dt + 0.5 * rho * fem::dot(beta, dN) - 0.5 / p.Re * fem::dot(grad_eta, dN);
  }
};

/// Gathers element corner values once and evaluates MomentumPoint at each quadrature point.
template <int Dim>
class MomentumElement {
 public:
  static constexpr int nc = 1 << Dim;
  using Corner = std::array<double, nc>;
  using V = std::array<double, Dim>;

  MomentumElement(const MomentumFields<Dim>& f, const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev)
      : f_(f), ev_(ev) {
    phi_ = e.corner_values(*f.phi_tilde);
    mu_ = e.corner_values(*f.mu_tilde);
    p_ = e.corner_values(*f.p_k);
    for (int i = 0; i < Dim; ++i) {
      uk_[i] = e.corner_values(*f.u_k, Dim, i);
      uh_[i] = e.corner_values(*f.u_hat, Dim, i);
      if (f.grad_phi) g_[i] = e.corner_values(*f.grad_phi, Dim, i);
      if (f.v) v_[i] = e.corner_values(*f.v, Dim, i);
    }
    for (int c = 0; c < Dim * Dim; ++c) {
      if (f.grad_uk_rec) guk_[c] = e.corner_values(*f.grad_uk_rec, Dim * Dim, c);
      if (f.grad_v_rec) gv_[c] = e.corner_values(*f.grad_v_rec, Dim * Dim, c);
    }
  }

  MomentumPoint<Dim> eval(int q) const {
    const PhysicalParams& prm = *f_.params;
    const double dt = f_.dt;
    MomentumPoint<Dim> m;
    m.phi = ev_.value(q, phi_);
    m.grad_phi = ev_.grad(q, phi_);
    m.grad_mu = ev_.grad(q, mu_);
    m.rho = mixture_density(m.phi, prm);
    m.eta = mixture_viscosity(m.phi, prm);
    const double slope = viscosity_slope(m.phi, prm);
    m.grad_p = ev_.grad(q, p_);
    const double jc = -prm.alpha() * prm.mobility / prm.Cn;
    for (int i = 0; i < Dim; ++i) {
      m.grad_eta[i] = slope * m.grad_phi[i];
      m.u_hat[i] = ev_.value(q, uh_[i]);
      m.J[i] = jc * m.grad_mu[i];
      m.beta[i] = m.u_hat[i] + m.J[i] / (prm.Pe * m.rho);
      m.u_k[i] = ev_.value(q, uk_[i]);
      m.grad_uk[i] = ev_.grad(q, uk_[i]);
    }
    m.tau = compute_tau_m<Dim>(ev_.geo, dt, m.u_hat, m.J, m.rho, m.eta, prm);

    switch (f_.surface_tension) {
      case SurfaceTension::DivPhiPhi: {
        // d/dx_j (g_i g_j) from the projected gradient field
        V gq{};
        std::array<V, Dim> dg{};
        for (int i = 0; i < Dim; ++i) {
          gq[i] = ev_.value(q, g_[i]);
          dg[i] = ev_.grad(q, g_[i]);
        }
        double div = 0.0;
        for (int j = 0; j < Dim; ++j) div += dg[j][j];
        for (int i = 0; i < Dim; ++i) {
          double s = gq[i] * div;
          for (int j = 0; j < Dim; ++j) s += dg[i][j] * gq[j];
          m.st[i] = prm.Cn / prm.We * s;
        }
        break;
      }
      case SurfaceTension::PhiGradMu:
        for (int i = 0; i < Dim; ++i) m.st[i] = m.phi * m.grad_mu[i] / (prm.Cn * prm.We);
        break;
      case SurfaceTension::None: break;
    }
    if (f_.forcing && *f_.forcing) {
      double fphi = 0.0, fmu = 0.0;
      f_.forcing->eval(ev_.x[q], f_.t_half, m.f, fphi, fmu);
    }
    if (f_.grad_uk_rec) {
      for (int i = 0; i < Dim; ++i)
        for (int j = 0; j < Dim; ++j) m.lap_uk[i] += ev_.grad(q, guk_[i * Dim + j])[j];
      if (f_.grad_v_rec) {
        for (int i = 0; i < Dim; ++i)
          for (int j = 0; j < Dim; ++j) m.lap_v[i] += ev_.grad(q, gv_[i * Dim + j])[j];
      } else {
        m.lap_v = m.lap_uk;
      }
    }
    const double hv = 0.5 * m.eta / prm.Re;
    for (int i = 0; i < Dim; ++i) {
      m.K[i] = -m.rho * m.u_k[i] / dt + 0.5 * m.rho * fem::dot(m.beta, m.grad_uk[i]) -
               0.5 / prm.Re * fem::dot(m.grad_eta, m.grad_uk[i]) - hv * m.lap_uk[i] + m.st[i] + m.grad_p[i] -
               m.rho * prm.gravity[static_cast<std::size_t>(i)] / prm.Fr - m.f[i];
      // lagged v half of the viscous term; the prediction cannot carry it implicitly
      if (!f_.v) m.K[i] -= hv * m.lap_v[i];
    }
    if (f_.v) {
      for (int i = 0; i < Dim; ++i) {
        m.v[i] = ev_.value(q, v_[i]);
        m.grad_v[i] = ev_.grad(q, v_[i]);
        m.Rm[i] = m.K[i] + m.rho * m.v[i] / dt + 0.5 * m.rho * fem::dot(m.beta, m.grad_v[i]) -
                  0.5 / prm.Re * fem::dot(m.grad_eta, m.grad_v[i]) - hv * m.lap_v[i];
      }
    }
    return m;
  }

 private:
  const MomentumFields<Dim>& f_;
  const fem::ElementValues<Dim>& ev_;
  Corner phi_{}, mu_{}, p_{};
  std::array<Corner, Dim> uk_{}, uh_{}, g_{}, v_{};
  std::array<Corner, Dim * Dim> guk_{}, gv_{};
};

/// Lumped projection of grad(phi) to the nodes, Dim components interleaved.
template <int Dim>
Vec project_gradient(const Mesh<Dim>& m, const Vec& phi) {
  return lumped_projection<Dim>(m, Dim, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* out) {
    const auto c = e.corner_values(phi);
    for (int q = 0; q < ev.nq; ++q) {
      const auto g = ev.grad(q, c);
      for (int a = 0; a < (1 << Dim); ++a)
        for (int i = 0; i < Dim; ++i) out[a * Dim + i] += ev.JxW[q] * ev.N[q][a] * g[i];
    }
  });
}

/// Lumped projection of the velocity gradient, entry i*Dim+j holding d u_i / d x_j.
template <int Dim>
Vec project_velocity_gradient(const Mesh<Dim>& m, const Vec& u) {
  constexpr int nd = Dim * Dim;
  return lumped_projection<Dim>(m, nd, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* out) {
    std::array<std::array<double, 1 << Dim>, Dim> c;
    for (int i = 0; i < Dim; ++i) c[i] = e.corner_values(u, Dim, i);
    for (int q = 0; q < ev.nq; ++q)
      for (int i = 0; i < Dim; ++i) {
        const auto g = ev.grad(q, c[i]);
        for (int a = 0; a < (1 << Dim); ++a)
          for (int j = 0; j < Dim; ++j) out[a * nd + i * Dim + j] += ev.JxW[q] * ev.N[q][a] * g[j];
      }
  });
}

}  // namespace chns::core
