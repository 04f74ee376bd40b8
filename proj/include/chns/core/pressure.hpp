#pragma once

#include "chns/core/vms.hpp"
#include "chns/linalg/krylov.hpp"

namespace chns::core {

/// Variable-coefficient pressure Poisson system. f.v must hold the predicted velocity.
template <int Dim>
std::pair<linalg::CsrMatrix, Vec> assemble_pressure_poisson(const Mesh<Dim>& m, const MomentumFields<Dim>& f,
                                                            bool stabilized = true) {
  constexpr int nc = 1 << Dim;
  CHNS_REQUIRE(f.v != nullptr, ContractError, "pressure Poisson needs the predicted velocity");
  const double dt = f.dt;
  auto A = assemble_operator<Dim>(m, 1, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* E) {
    const auto phi = e.corner_values(*f.phi_tilde);
    for (int q = 0; q < ev.nq; ++q) {
      const double w = ev.JxW[q] / mixture_density(ev.value(q, phi), *f.params);
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) E[a * nc + b] += w * fem::dot(ev.dN[q][a], ev.dN[q][b]);
    }
  });
  Vec b = assemble_rhs<Dim>(m, 1, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* out) {
    const MomentumElement<Dim> me(f, e, ev);
    for (int q = 0; q < ev.nq; ++q) {
      const auto mp = me.eval(q);
      double divv = 0.0;
      for (int i = 0; i < Dim; ++i) divv += mp.grad_v[i][i];
      std::array<double, Dim> vf{};
      for (int i = 0; i < Dim; ++i) vf[i] = stabilized ? mp.tau * mp.Rm[i] / mp.rho : 0.0;
      for (int a = 0; a < nc; ++a) {
        const auto& dNa = ev.dN[q][a];
        out[a] += ev.JxW[q] * (-2.0 / dt * ev.N[q][a] * divv - 2.0 / dt * fem::dot(dNa, vf) +
                               fem::dot(dNa, mp.grad_p) / mp.rho);
      }
    }
  });
  return {std::move(A), std::move(b)};
}

/// Shifts p to zero mean with respect to the lumped mass.
template <int Dim>
void remove_weighted_mean(const Mesh<Dim>& m, Vec& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += m.lumped_mass[i] * p[i];
  s /= m.volume;
  for (double& v : p) v -= s;
}

/// Pure-Neumann solve with the constant mode deflated.
template <int Dim>
linalg::SolveResult solve_pressure(const Mesh<Dim>& m, const linalg::CsrMatrix& A, const Vec& b,
                                   const linalg::SolverConfig& cfg, Vec& p) {
  const auto r = linalg::cg_solve(A, b, p, cfg, true);
  if (!r.converged())
    throw SolverError("pressure Poisson", "CG did not converge (" + linalg::to_string(r.status) + ", residual " +
                                              std::to_string(r.residual) + ")");
  remove_weighted_mean(m, p);
  return r;
}

}  // namespace chns::core

namespace chns::core {

/// Pressure balancing the body and capillary forces of a state at rest:
/// (grad q, grad p / rho) = -(grad q, R_m / rho) with R_m evaluated at zero velocity and pressure.
template <int Dim>
Vec static_pressure(const Mesh<Dim>& m, const Vec& phi, const Vec& mu, const SchemeOptions<Dim>& opt, double t = 0.0) {
  constexpr int nc = 1 << Dim;
  const Vec zero_v(m.nodes() * Dim, 0.0), zero_p(m.nodes(), 0.0);
  Vec gphi;
  if (opt.surface_tension == SurfaceTension::DivPhiPhi) gphi = project_gradient(m, phi);
  MomentumFields<Dim> f;
  f.phi_tilde = &phi;
  f.mu_tilde = &mu;
  f.u_k = &zero_v;
  f.u_hat = &zero_v;
  f.p_k = &zero_p;
  f.v = &zero_v;
  f.grad_phi = gphi.empty() ? nullptr : &gphi;
  f.dt = 1.0;
  f.t_half = t;
  f.params = &opt.params;
  f.surface_tension = opt.surface_tension;
  f.forcing = &opt.forcing;
  auto A = assemble_operator<Dim>(m, 1, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* E) {
    const auto c = e.corner_values(phi);
    for (int q = 0; q < ev.nq; ++q) {
      const double w = ev.JxW[q] / mixture_density(ev.value(q, c), opt.params);
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) E[a * nc + b] += w * fem::dot(ev.dN[q][a], ev.dN[q][b]);
    }
  });
  Vec b = assemble_rhs<Dim>(m, 1, [&](const octree::Element<Dim>& e, const fem::ElementValues<Dim>& ev, double* out) {
    const MomentumElement<Dim> me(f, e, ev);
    for (int q = 0; q < ev.nq; ++q) {
      const auto mp = me.eval(q);
      for (int a = 0; a < nc; ++a) out[a] -= ev.JxW[q] * fem::dot(ev.dN[q][a], mp.Rm) / mp.rho;
    }
  });
  Vec p(m.nodes(), 0.0);
  solve_pressure(m, A, b, opt.pp, p);
  return p;
}

}  // namespace chns::core
